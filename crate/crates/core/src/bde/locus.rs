// Zero sets of scalar functions on a parameter domain by marching squares,
// with bisection-polished crossings and periodic wrap.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use super::{BdeField, GridSpec, LocusCurve, LocusKind};
use crate::chart::Domain;
use crate::math;

/// A polyline of a zero set in unwrapped parameter coordinates. Closed
/// lines repeat their first point (possibly shifted by a period).
#[derive(Debug, Clone, PartialEq)]
pub struct ContourLine {
    pub uv: Vec<(f64, f64)>,
    pub closed: bool,
}

// (horizontal?, i, j): edge from node (i,j) to (i+1,j) or (i,j) to (i,j+1)
type EdgeKey = (u8, usize, usize);

struct Lattice<'a> {
    dom: Domain,
    us: Vec<f64>,
    vs: Vec<f64>,
    hu: f64,
    hv: f64,
    vals: Vec<Option<f64>>,
    thr: f64,
    f: &'a dyn Fn(f64, f64) -> Option<f64>,
}

impl Lattice<'_> {
    fn nu(&self) -> usize {
        self.us.len()
    }
    fn nv(&self) -> usize {
        self.vs.len()
    }
    fn idx(&self, i: usize, j: usize) -> usize {
        (j % self.nv()) * self.nu() + (i % self.nu())
    }
    fn neg(&self, x: f64) -> bool {
        x < -self.thr
    }
    /// Sign class of node (i,j); `None` where the function is undefined.
    fn node(&self, i: usize, j: usize) -> Option<bool> {
        self.vals[self.idx(i, j)].map(|x| self.neg(x))
    }
    /// Unwrapped coordinates of node (i,j), i ≤ nu, j ≤ nv.
    fn coord(&self, i: usize, j: usize) -> (f64, f64) {
        let u = if i < self.nu() { self.us[i] } else { self.us[i - self.nu()] + self.hu * self.nu() as f64 };
        let v = if j < self.nv() { self.vs[j] } else { self.vs[j - self.nv()] + self.hv * self.nv() as f64 };
        (u, v)
    }
    fn eval(&self, p: (f64, f64)) -> Option<f64> {
        let (u, v) = self.dom.wrap(p.0, p.1);
        (self.f)(u, v)
    }
    fn crossing(&self, e: EdgeKey) -> (f64, f64) {
        let (d, i, j) = e;
        let a = self.coord(i, j);
        let b = if d == 0 { self.coord(i + 1, j) } else { self.coord(i, j + 1) };
        let sa = self.node(i, j).unwrap_or(false);
        let (mut lo, mut hi) = (0.0f64, 1.0f64);
        let at = |t: f64| (a.0 + t * (b.0 - a.0), a.1 + t * (b.1 - a.1));
        for _ in 0..48 {
            let mid = 0.5 * (lo + hi);
            match self.eval(at(mid)) {
                Some(x) if self.neg(x) == sa => lo = mid,
                Some(_) => hi = mid,
                None => break,
            }
        }
        at(0.5 * (lo + hi))
    }
}

/// Zero set of `f` over `domain` sampled on `grid`. A node counts as
/// negative only when its value is below −`neg_tol_rel`·median|f|, which
/// keeps round-off around double zeros from producing spurious loops.
pub fn contour(domain: &Domain, grid: GridSpec, f: &dyn Fn(f64, f64) -> Option<f64>, neg_tol_rel: f64) -> Vec<ContourLine> {
    let (us, vs) = grid.nodes(domain);
    let step = |xs: &[f64], periodic: bool, span: f64| {
        if periodic {
            span / xs.len() as f64
        } else {
            xs[1] - xs[0]
        }
    };
    let (w, h) = domain.width();
    let hu = step(&us, domain.periodic_u, w);
    let hv = step(&vs, domain.periodic_v, h);
    let mut vals = Vec::with_capacity(us.len() * vs.len());
    for &v in &vs {
        for &u in &us {
            vals.push(f(u, v).filter(|x| x.is_finite()));
        }
    }
    let mut mags: Vec<f64> = vals.iter().flatten().map(|x| math::abs(*x)).collect();
    let thr = if mags.is_empty() { 0.0 } else { neg_tol_rel * math::median(&mut mags) };
    let lat = Lattice { dom: *domain, us, vs, hu, hv, vals, thr, f };

    let ci = if domain.periodic_u { lat.nu() } else { lat.nu() - 1 };
    let cj = if domain.periodic_v { lat.nv() } else { lat.nv() - 1 };
    let wrap_i = |i: usize| i % lat.nu();
    let wrap_j = |j: usize| j % lat.nv();

    let mut adj: BTreeMap<EdgeKey, Vec<EdgeKey>> = BTreeMap::new();
    let mut link = |a: EdgeKey, b: EdgeKey| {
        adj.entry(a).or_default().push(b);
        adj.entry(b).or_default().push(a);
    };
    for j in 0..cj {
        for i in 0..ci {
            let s = [lat.node(i, j), lat.node(i + 1, j), lat.node(i + 1, j + 1), lat.node(i, j + 1)];
            if s.iter().any(|x| x.is_none()) {
                continue;
            }
            let s = s.map(|x| x.unwrap());
            let edges: [EdgeKey; 4] =
                [(0, i, wrap_j(j)), (1, wrap_i(i + 1), j), (0, i, wrap_j(j + 1)), (1, i, j)];
            let cut: Vec<usize> = (0..4).filter(|&k| s[k] != s[(k + 1) % 4]).collect();
            match cut.len() {
                2 => link(edges[cut[0]], edges[cut[1]]),
                4 => {
                    let c = lat.coord(i, j);
                    let centre = lat.eval((c.0 + 0.5 * hu, c.1 + 0.5 * hv)).map(|x| lat.neg(x));
                    if centre == Some(s[0]) {
                        link(edges[0], edges[1]);
                        link(edges[2], edges[3]);
                    } else {
                        link(edges[3], edges[0]);
                        link(edges[1], edges[2]);
                    }
                }
                _ => {}
            }
        }
    }

    let mut pts: BTreeMap<EdgeKey, (f64, f64)> = BTreeMap::new();
    for &e in adj.keys() {
        pts.insert(e, lat.crossing(e));
    }

    let (pu, pv) = domain.periods();
    let near = |p: (f64, f64), q: (f64, f64)| {
        let sh = |x: f64, r: f64, per: Option<f64>| match per {
            Some(per) => x + per * math::round((r - x) / per),
            None => x,
        };
        (sh(p.0, q.0, pu), sh(p.1, q.1, pv))
    };

    let mut used: BTreeMap<EdgeKey, bool> = BTreeMap::new();
    let mut out = Vec::new();
    let walk = |start: EdgeKey, used: &mut BTreeMap<EdgeKey, bool>| {
        let mut chain = Vec::new();
        let mut cur = start;
        let mut prev: Option<EdgeKey> = None;
        loop {
            used.insert(cur, true);
            let p = pts[&cur];
            chain.push(match chain.last() {
                Some(&q) => near(p, q),
                None => p,
            });
            let next = adj[&cur].iter().copied().find(|&n| Some(n) != prev && !used.contains_key(&n));
            match next {
                Some(n) => {
                    prev = Some(cur);
                    cur = n;
                }
                None => {
                    let closes = adj[&cur].contains(&start) && chain.len() > 2;
                    return (chain, closes);
                }
            }
        }
    };
    let ends: Vec<EdgeKey> = adj.iter().filter(|(_, n)| n.len() == 1).map(|(k, _)| *k).collect();
    for e in ends {
        if !used.contains_key(&e) {
            let (chain, _) = walk(e, &mut used);
            out.push(ContourLine { uv: chain, closed: false });
        }
    }
    let keys: Vec<EdgeKey> = adj.keys().copied().collect();
    for e in keys {
        if !used.contains_key(&e) {
            let (mut chain, closes) = walk(e, &mut used);
            if closes {
                let first = near(chain[0], *chain.last().unwrap());
                chain.push(first);
            }
            out.push(ContourLine { uv: chain, closed: closes });
        }
    }
    out
}

/// Tropic (det I = 0) or lightlike principal locus (M² − 4LN = 0) of a field.
pub fn trace_locus<F: BdeField + ?Sized>(field: &F, kind: LocusKind, grid: GridSpec) -> Vec<LocusCurve> {
    let dom = field.domain();
    let lines = match kind {
        LocusKind::LD => contour(&dom, grid, &|u, v| field.det_metric(u, v).ok(), 0.0),
        LocusKind::LPL => contour(
            &dom,
            grid,
            &|u, v| {
                let [l, m, n] = field.sample(u, v).ok()?.values();
                Some(m * m - 4.0 * l * n)
            },
            1e-9,
        ),
    };
    lines
        .into_iter()
        .filter_map(|c| {
            let mut uv = Vec::with_capacity(c.uv.len());
            let mut xyz = Vec::with_capacity(c.uv.len());
            for &(u, v) in &c.uv {
                let (wu, wv) = dom.wrap(u, v);
                if let Ok(p) = field.position(wu, wv) {
                    uv.push((u, v));
                    xyz.push(p);
                }
            }
            (uv.len() >= 2).then_some(LocusCurve { kind, polyline_uv: uv, polyline_xyz: xyz, closed: c.closed })
        })
        .collect()
}
