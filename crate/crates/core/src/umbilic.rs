//! Umbilics: points where L = M = N = 0.
//!
//! Location is a grid scan followed by Newton polishing. Classification
//! lifts the equation to the projectivized tangent bundle, F(u,v,p) =
//! L p² + M p + N with p = dv/du, and looks at the singularities of the
//! Lie–Cartan field Y = (F_p, p F_p, −(F_u + p F_v)) on the fiber over the
//! umbilic (and of the analogous field in q = du/dv, so that du = 0 is not
//! missed). On the fiber these are the real roots of the cubic
//!
//! C(p) = N_u + (M_u + N_v) p + (L_u + M_v) p² + L_v p³,
//!
//! and DY there has eigenvalues 0, α = M_u + p(2L_u + M_v) + 2p²L_v and
//! δ = −C'(p).

use alloc::vec::Vec;

use crate::bde::{integrate_from, BdeField, GridSpec, IntegrationOptions, PrincipalCurve};
use crate::chart::ChartSpec;
use crate::error::{Error, Result};
use crate::math;
use crate::minkowski::Vec3M;

const PI: f64 = core::f64::consts::PI;

/// Scan threshold on (L² + M² + N²)/median over the grid.
pub const DEFAULT_SCAN_THRESHOLD: f64 = 1e-2;
/// Acceptance after polishing: max|L,M,N| ≤ this × median over the grid.
pub const ACCEPT_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum UmbilicCausal {
    Spacelike,
    Timelike,
    /// On the tropic.
    Lightlike,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum FiberChart {
    P,
    Q,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum SingularityKind {
    Saddle,
    Node,
    /// An eigenvalue is (numerically) zero.
    Degenerate,
}

/// A zero of the lifted field on the fiber over an umbilic.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct LieCartanSingularity {
    /// p = dv/du in the P chart, q = du/dv in the Q chart.
    pub slope: f64,
    pub chart: FiberChart,
    /// Direction angle in [0, π) of the corresponding tangent line.
    pub angle: f64,
    /// Nonzero eigenvalues of the linearization: along the surface, along
    /// the fiber.
    pub eigenvalues: (f64, f64),
    pub kind: SingularityKind,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum DarbouxType {
    D1,
    D2,
    D3,
    Center,
    NonDarbouxian,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct UmbilicRecord {
    pub uv: (f64, f64),
    pub xyz: Vec3M,
    pub causal: UmbilicCausal,
    pub singularities: Vec<LieCartanSingularity>,
    pub darboux: Option<DarbouxType>,
    /// max(|L|,|M|,|N|) after polishing, relative to the grid median.
    pub residual: f64,
    /// Index of the chart in an atlas search.
    pub chart: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UmbilicSearch {
    pub grid: GridSpec,
    pub threshold: f64,
    pub accept: f64,
}

impl Default for UmbilicSearch {
    fn default() -> Self {
        UmbilicSearch { grid: GridSpec::default().with_phase(0.5, 0.5), threshold: DEFAULT_SCAN_THRESHOLD, accept: ACCEPT_TOL }
    }
}

fn max_abs3(x: [f64; 3]) -> f64 {
    math::abs(x[0]).max(math::abs(x[1])).max(math::abs(x[2]))
}

/// Damped Newton on the pair of coefficients with the best conditioned
/// Jacobian. Returns the end point and its max|L,M,N|.
fn polish<F: BdeField + ?Sized>(field: &F, start: (f64, f64)) -> Option<((f64, f64), f64)> {
    let dom = field.domain();
    let diam = dom.diameter();
    let mut p = start;
    let mut s = field.sample(p.0, p.1).ok()?;
    let mut f = max_abs3(s.values());
    for _ in 0..100 {
        if f == 0.0 {
            break;
        }
        let v = s.values();
        let g: [(f64, f64); 3] = core::array::from_fn(|k| (s.lmn[k].d_u(), s.lmn[k].d_v()));
        let (i, j) = [(0, 1), (0, 2), (1, 2)]
            .into_iter()
            .max_by(|&(a, b), &(c, d)| {
                let x = math::abs(g[a].0 * g[b].1 - g[a].1 * g[b].0);
                let y = math::abs(g[c].0 * g[d].1 - g[c].1 * g[d].0);
                x.total_cmp(&y)
            })
            .unwrap();
        let det = g[i].0 * g[j].1 - g[i].1 * g[j].0;
        if det == 0.0 {
            break;
        }
        let mut du = -(v[i] * g[j].1 - v[j] * g[i].1) / det;
        let mut dv = -(g[i].0 * v[j] - g[j].0 * v[i]) / det;
        let len = math::hypot(du, dv);
        if len > 0.05 * diam {
            du *= 0.05 * diam / len;
            dv *= 0.05 * diam / len;
        }
        let mut t = 1.0;
        let mut moved = false;
        while t > 1e-4 {
            let (nu, nv) = dom.wrap(p.0 + t * du, p.1 + t * dv);
            if let Ok(ns) = field.sample(nu, nv) {
                let nf = max_abs3(ns.values());
                if nf < f {
                    p = (nu, nv);
                    s = ns;
                    f = nf;
                    moved = true;
                    break;
                }
            }
            t *= 0.5;
        }
        if !moved || t * math::hypot(du, dv) < 1e-15 * diam {
            break;
        }
    }
    Some((p, f))
}

fn causal_at<F: BdeField + ?Sized>(field: &F, uv: (f64, f64)) -> UmbilicCausal {
    match field.det_metric(uv.0, uv.1) {
        Ok(d) if d > 0.0 => UmbilicCausal::Spacelike,
        Ok(d) if d < 0.0 => UmbilicCausal::Timelike,
        _ => UmbilicCausal::Lightlike,
    }
}

/// Umbilics of a field, unclassified, sorted by (u, v).
pub fn find_umbilics<F: BdeField + ?Sized>(field: &F, search: &UmbilicSearch) -> Vec<UmbilicRecord> {
    let dom = field.domain();
    let (us, vs) = search.grid.nodes(&dom);
    let (nu, nv) = (us.len(), vs.len());
    let mut r: Vec<Option<f64>> = Vec::with_capacity(nu * nv);
    let mut sizes = Vec::new();
    for &v in &vs {
        for &u in &us {
            let val = if field.is_singular(u, v) {
                None
            } else {
                field.sample(u, v).ok().map(|s| s.values()).filter(|x| x.iter().all(|c| c.is_finite()))
            };
            if let Some(x) = val {
                sizes.push(max_abs3(x));
            }
            r.push(val.map(|[l, m, n]| l * l + m * m + n * n));
        }
    }
    let mut sq: Vec<f64> = r.iter().flatten().copied().collect();
    let med = math::median(&mut sq);
    let med_size = math::median(&mut sizes);
    if med == 0.0 {
        return Vec::new();
    }
    let mut found: Vec<((f64, f64), f64)> = Vec::new();
    for j in 0..nv {
        for i in 0..nu {
            let Some(x) = r[j * nu + i] else { continue };
            if x / med >= search.threshold {
                continue;
            }
            let mut is_min = true;
            for dj in -1i64..=1 {
                for di in -1i64..=1 {
                    if di == 0 && dj == 0 {
                        continue;
                    }
                    let (ii, jj) = (i as i64 + di, j as i64 + dj);
                    let ii = if dom.periodic_u { ii.rem_euclid(nu as i64) } else { ii };
                    let jj = if dom.periodic_v { jj.rem_euclid(nv as i64) } else { jj };
                    if ii < 0 || jj < 0 || ii >= nu as i64 || jj >= nv as i64 {
                        continue;
                    }
                    if let Some(y) = r[jj as usize * nu + ii as usize] {
                        if y < x {
                            is_min = false;
                        }
                    }
                }
            }
            if !is_min {
                continue;
            }
            if let Some((p, f)) = polish(field, (us[i], vs[j])) {
                if f <= search.accept * med_size && !field.is_singular(p.0, p.1) {
                    found.push((p, f / med_size));
                }
            }
        }
    }
    let mut out: Vec<UmbilicRecord> = Vec::new();
    for (p, res) in found {
        if out.iter().any(|o| dom.distance(o.uv, p) < 1e-6) {
            continue;
        }
        let Ok(xyz) = field.position(p.0, p.1) else { continue };
        out.push(UmbilicRecord {
            uv: p,
            xyz,
            causal: causal_at(field, p),
            singularities: Vec::new(),
            darboux: None,
            residual: res,
            chart: None,
        });
    }
    out.sort_by(|a, b| a.uv.0.total_cmp(&b.uv.0).then(a.uv.1.total_cmp(&b.uv.1)));
    out
}

/// Searches every chart of an atlas, merges umbilics found in several
/// charts (keeping the chart where the point is most interior), and sorts
/// by (x, y, z).
pub fn find_umbilics_atlas(charts: &[ChartSpec], search: &UmbilicSearch) -> Vec<UmbilicRecord> {
    let interior = |ch: &ChartSpec, uv: (f64, f64)| {
        let d = ch.domain;
        let fu = if d.periodic_u { 0.0 } else { (2.0 * uv.0 - d.u.0 - d.u.1).abs() / (d.u.1 - d.u.0) };
        let fv = if d.periodic_v { 0.0 } else { (2.0 * uv.1 - d.v.0 - d.v.1).abs() / (d.v.1 - d.v.0) };
        fu.max(fv)
    };
    let mut all: Vec<UmbilicRecord> = Vec::new();
    let mut size = 0.0f64;
    for (k, ch) in charts.iter().enumerate() {
        for mut rec in find_umbilics(ch, search) {
            rec.chart = Some(k);
            size = size.max(rec.xyz.euclid_norm());
            all.push(rec);
        }
    }
    let mut out: Vec<UmbilicRecord> = Vec::new();
    for rec in all {
        let k = rec.chart.unwrap();
        match out.iter_mut().find(|o| (o.xyz - rec.xyz).euclid_norm() <= 1e-6 * (1.0 + size)) {
            Some(o) => {
                if interior(&charts[k], rec.uv) < interior(&charts[o.chart.unwrap()], o.uv) {
                    *o = rec;
                }
            }
            None => out.push(rec),
        }
    }
    out.sort_by(|a, b| a.xyz.x.total_cmp(&b.xyz.x).then(a.xyz.y.total_cmp(&b.xyz.y)).then(a.xyz.z.total_cmp(&b.xyz.z)));
    out
}

/// First partials of L, M, N at a point: [(L_u, L_v), (M_u, M_v), (N_u, N_v)].
fn partials<F: BdeField + ?Sized>(field: &F, uv: (f64, f64)) -> Result<[(f64, f64); 3]> {
    let s = field.sample(uv.0, uv.1)?;
    Ok(core::array::from_fn(|k| (s.lmn[k].d_u(), s.lmn[k].d_v())))
}

/// Homogeneous form of the cubic: C(cos θ, sin θ).
fn cubic_h(d: &[(f64, f64); 3], t: f64) -> f64 {
    let [(lu, lv), (mu, mv), (nu, nv)] = *d;
    let (c, s) = (math::cos(t), math::sin(t));
    nu * c * c * c + (mu + nv) * c * c * s + (lu + mv) * c * s * s + lv * s * s * s
}

/// Angles in [0, π) of the tangent lines over which the lifted field
/// vanishes.
fn fiber_roots(d: &[(f64, f64); 3]) -> Vec<f64> {
    const K: usize = 360;
    let h = PI / K as f64;
    let at = |k: usize| (k as f64 + 0.5) * h;
    let mut roots = Vec::new();
    for k in 0..K {
        let (t0, t1) = (at(k), at(k) + h);
        // C(θ + π) = −C(θ)
        let (f0, f1) = (cubic_h(d, t0), cubic_h(d, t1));
        if f0 == 0.0 {
            roots.push(t0);
            continue;
        }
        if f0.signum() == f1.signum() || f1 == 0.0 {
            continue;
        }
        let (mut lo, mut hi, mut flo) = (t0, t1, f0);
        for _ in 0..80 {
            let mid = 0.5 * (lo + hi);
            let fm = cubic_h(d, mid);
            if fm == 0.0 {
                lo = mid;
                hi = mid;
                break;
            }
            if fm.signum() == flo.signum() {
                lo = mid;
                flo = fm;
            } else {
                hi = mid;
            }
        }
        let t = 0.5 * (lo + hi);
        roots.push(if t >= PI { t - PI } else { t });
    }
    roots.sort_by(f64::total_cmp);
    roots
}

fn singularity_at(d: &[(f64, f64); 3], theta: f64, tiny: f64) -> LieCartanSingularity {
    let [(lu, lv), (mu, mv), (nu, nv)] = *d;
    let (c, s) = (math::cos(theta), math::sin(theta));
    let (slope, chart, a, b) = if math::abs(c) >= math::abs(s) {
        let p = s / c;
        let alpha = mu + p * (2.0 * lu + mv) + 2.0 * p * p * lv;
        let dc = (mu + nv) + 2.0 * (lu + mv) * p + 3.0 * lv * p * p;
        (p, FiberChart::P, alpha, -dc)
    } else {
        let q = c / s;
        let beta = mv + q * (mu + 2.0 * nv) + 2.0 * q * q * nu;
        let dd = 3.0 * nu * q * q + 2.0 * (mu + nv) * q + (lu + mv);
        (q, FiberChart::Q, beta, -dd)
    };
    let kind = if math::abs(a) < tiny || math::abs(b) < tiny {
        SingularityKind::Degenerate
    } else if a * b < 0.0 {
        SingularityKind::Saddle
    } else {
        SingularityKind::Node
    };
    LieCartanSingularity { slope, chart, angle: theta, eigenvalues: (a, b), kind }
}

/// Fills `singularities` and `darboux`.
pub fn classify_umbilic<F: BdeField + ?Sized>(field: &F, rec: &UmbilicRecord) -> Result<UmbilicRecord> {
    let mut out = rec.clone();
    let d = partials(field, rec.uv)?;
    let first = d.iter().map(|&(a, b)| math::abs(a).max(math::abs(b))).fold(0.0, f64::max);

    // size of the coefficients on a small ring, per unit radius
    let dom = field.domain();
    let rho = 1e-3 * dom.diameter();
    let mut ring = 0.0f64;
    for k in 0..16 {
        let t = k as f64 * PI / 8.0;
        let (u, v) = dom.wrap(rec.uv.0 + rho * math::cos(t), rec.uv.1 + rho * math::sin(t));
        if let Ok(s) = field.sample(u, v) {
            ring = ring.max(max_abs3(s.values()) / rho);
        }
    }
    if ring == 0.0 {
        out.darboux = Some(DarbouxType::NonDarbouxian);
        out.singularities.clear();
        return Ok(out);
    }
    if first <= 1e-6 * ring {
        out.darboux = Some(DarbouxType::Center);
        out.singularities.clear();
        return Ok(out);
    }
    let sing: Vec<LieCartanSingularity> = fiber_roots(&d).into_iter().map(|t| singularity_at(&d, t, 1e-8 * first)).collect();
    let saddles = sing.iter().filter(|s| s.kind == SingularityKind::Saddle).count();
    let nodes = sing.iter().filter(|s| s.kind == SingularityKind::Node).count();
    out.darboux = Some(match (sing.len(), saddles, nodes) {
        (1, 1, 0) => DarbouxType::D1,
        (3, 2, 1) => DarbouxType::D2,
        (3, 3, 0) => DarbouxType::D3,
        _ => DarbouxType::NonDarbouxian,
    });
    out.singularities = sing;
    Ok(out)
}

/// Leaves leaving the umbilic along each saddle direction, both ways.
/// `opts.umbilics` should list the known umbilics so that arcs ending at
/// another umbilic stop there.
pub fn trace_separatrices<F: BdeField + ?Sized>(
    field: &F,
    rec: &UmbilicRecord,
    opts: &IntegrationOptions,
) -> Result<Vec<PrincipalCurve>> {
    match rec.darboux {
        Some(DarbouxType::D1 | DarbouxType::D2 | DarbouxType::D3) => {}
        _ => return Err(Error::NotDarbouxian),
    }
    let dom = field.domain();
    let delta = 1e-4 * dom.diameter();
    let mut out = Vec::new();
    for s in rec.singularities.iter().filter(|s| s.kind == SingularityKind::Saddle) {
        let dir = (math::cos(s.angle), math::sin(s.angle));
        for sg in [1.0, -1.0] {
            let d = (sg * dir.0, sg * dir.1);
            let start = dom.wrap(rec.uv.0 + delta * d.0, rec.uv.1 + delta * d.1);
            if let Ok(c) = integrate_from(field, start, d, opts, Some(rec.uv)) {
                let mut c = c;
                // prepend the umbilic itself, unwrapped next to the start
                let s0 = c.points_uv[0];
                c.points_uv.insert(0, (s0.0 - delta * d.0, s0.1 - delta * d.1));
                c.points_xyz.insert(0, rec.xyz);
                out.push(c);
            }
        }
    }
    Ok(out)
}

/// Finds and classifies the umbilics of a single chart or field.
pub fn umbilics<F: BdeField + ?Sized>(field: &F, search: &UmbilicSearch) -> Result<Vec<UmbilicRecord>> {
    find_umbilics(field, search).iter().map(|r| classify_umbilic(field, r)).collect()
}

/// Atlas version of [`umbilics`]; each record is classified on its chart.
pub fn umbilics_atlas(charts: &[ChartSpec], search: &UmbilicSearch) -> Result<Vec<UmbilicRecord>> {
    find_umbilics_atlas(charts, search)
        .iter()
        .map(|r| classify_umbilic(&charts[r.chart.unwrap()], r))
        .collect()
}
