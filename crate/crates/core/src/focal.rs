//! Focal sheets: loci of the centres of principal curvature X + N/kᵢ.
//!
//! With n = X_u × X_v unnormalized, the centre is X + s n where s solves
//! det(s ÎI − I) = 0, i.e. Q s² − P s + D = 0 with Q = êĝ − f̂²,
//! P = Eĝ + Gê − 2Ff̂ and D = EG − F². The factors ε and W cancel, so
//! the centres stay finite on the tropic (there D = 0 and one root is 0).

use alloc::vec::Vec;

use crate::bde::{contour, Foliation, GridSpec};
use crate::chart::{ChartSpec, Domain, EllipsoidCover};
use crate::error::Result;
use crate::jet::{Jet, Scalar};
use crate::math;
use crate::minkowski::Vec3M;
use crate::surface::form_jets;

#[derive(Debug, Clone, PartialEq)]
pub enum FocalSource {
    Numeric(ChartSpec),
    /// Closed-form sheets of the ellipsoid over its principal chart.
    ClosedForm { a: f64, b: f64, c: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct FocalPoint {
    pub uv: (f64, f64),
    pub xyz: Vec3M,
    pub valid: bool,
    /// ⟨Φ_u × Φ_v, w⟩ with w the principal direction of the sheet; vanishes
    /// where the sheet is singular.
    pub indicator: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FocalSheet {
    pub which: Foliation,
    pub nu: usize,
    pub nv: usize,
    pub domain: Domain,
    /// Row-major, v outer.
    pub points: Vec<FocalPoint>,
    /// Grid nodes next to a sign change of the indicator.
    pub singular_points: Vec<(f64, f64)>,
    pub source: FocalSource,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct FocalCurve {
    pub polyline_uv: Vec<(f64, f64)>,
    pub polyline_xyz: Vec<Vec3M>,
    pub closed: bool,
}

type V3 = [Jet; 3];

fn cross(a: [f64; 3], b: [f64; 3]) -> Vec3M {
    Vec3M::from_array(a).cross(Vec3M::from_array(b))
}

fn indicator(phi: &V3, w: Vec3M) -> f64 {
    let pu = phi.map(|j| j.d_u());
    let pv = phi.map(|j| j.d_v());
    cross(pu, pv).dot(w)
}

/// Centre of curvature (as a jet) and indicator of one sheet at a point.
fn numeric_at(x: &V3, which: Foliation) -> Option<(V3, f64)> {
    let fj = form_jets(x);
    let q = fj.eh * fj.gh - fj.fh * fj.fh;
    let p = fj.e * fj.gh + fj.g * fj.eh - fj.f * fj.fh * 2.0;
    let d = fj.e * fj.g - fj.f * fj.f;
    let disc = p * p - q * d * 4.0;
    let size = p.val() * p.val() + math::abs(q.val() * d.val());
    if size == 0.0 || disc.val() < -1e-12 * size {
        return None;
    }
    let sq = disc.sqrt_checked().ok()?;
    let t = if p.val() >= 0.0 { p + sq } else { p - sq };
    if t.val() == 0.0 {
        return None;
    }
    let mut roots: Vec<Jet> = Vec::with_capacity(2);
    if q.val() != 0.0 {
        roots.push(t / (q * 2.0));
    }
    roots.push(d * 2.0 / t);
    let xu = Vec3M::new(x[0].d_u(), x[1].d_u(), x[2].d_u());
    let xv = Vec3M::new(x[0].d_v(), x[1].d_v(), x[2].d_v());
    let (e, f, g) = (fj.e.val(), fj.f.val(), fj.g.val());
    let (eh, fh, gh) = (fj.eh.val(), fj.fh.val(), fj.gh.val());
    // principal direction of each root: kernel of s ÎI − I
    let dirs: Vec<(f64, f64)> = roots
        .iter()
        .map(|s| {
            let s = s.val();
            let r1 = (s * eh - e, s * fh - f);
            let r2 = (s * fh - f, s * gh - g);
            let r = if math::hypot(r1.0, r1.1) >= math::hypot(r2.0, r2.1) { r1 } else { r2 };
            let n = math::hypot(r.0, r.1);
            (-r.1 / n, r.0 / n)
        })
        .collect();
    let k = match (roots.len(), which) {
        (2, _) => {
            let first = if math::abs(dirs[0].0) >= math::abs(dirs[1].0) { 0 } else { 1 };
            if which == Foliation::F1 {
                first
            } else {
                1 - first
            }
        }
        (_, w) => {
            let is_first = math::abs(dirs[0].0) >= math::abs(dirs[0].1);
            if (w == Foliation::F1) != is_first {
                return None;
            }
            0
        }
    };
    let s = roots[k];
    let phi: V3 = core::array::from_fn(|i| x[i] + fj.n[i] * s);
    if !phi.iter().all(|j| j.val().is_finite()) {
        return None;
    }
    let w = xu * dirs[k].0 + xv * dirs[k].1;
    Some((phi, indicator(&phi, w)))
}

/// Closed-form sheets of x²/a² + y²/b² + z²/c² = 1 over its principal chart.
fn closed_form_map<S: Scalar>(a: f64, b: f64, c: f64, which: Foliation, u: S, v: S) -> Option<[S; 3]> {
    let (a2, b2, c2) = (a * a, b * b, c * c);
    let k = math::sqrt(a2 + c2);
    let (cu, su, cv, sv) = (u.cos(), u.sin(), v.cos(), v.sin());
    let ra = cv.sq() * (a2 - b2) + sv.sq() * (a2 + c2);
    let rc = cu.sq() * (b2 + c2) + su.sq() * (a2 + c2);
    let (sa, sc) = (ra.sqrt_checked().ok()?, rc.sqrt_checked().ok()?);
    Some(match which {
        Foliation::F1 => [
            cu.powi(3) * sa * ((a2 - b2) / (a * k)),
            -(su.powi(3) * sv * ((a2 - b2) / b)),
            cv * rc * sc / (c * k),
        ],
        Foliation::F2 => [
            cu * ra * sa / (a * k),
            su * sv.powi(3) * ((b2 + c2) / b),
            cv.powi(3) * sc * ((b2 + c2) / (c * k)),
        ],
    })
}

fn closed_form_at(a: f64, b: f64, c: f64, which: Foliation, u: f64, v: f64) -> Option<(V3, f64)> {
    let phi = closed_form_map(a, b, c, which, Jet::var_u(u), Jet::var_v(v))?;
    let ch = ChartSpec::ellipsoid(a, b, c, EllipsoidCover::Torus).ok()?;
    let x = ch.taylor(u, v).ok()?;
    let w = match which {
        Foliation::F1 => Vec3M::new(x[0].d_u(), x[1].d_u(), x[2].d_u()),
        Foliation::F2 => Vec3M::new(x[0].d_v(), x[1].d_v(), x[2].d_v()),
    };
    Some((phi, indicator(&phi, w)))
}

impl FocalSource {
    fn eval(&self, which: Foliation, u: f64, v: f64) -> Option<(V3, f64)> {
        match self {
            FocalSource::Numeric(ch) => numeric_at(&ch.taylor(u, v).ok()?, which),
            FocalSource::ClosedForm { a, b, c } => closed_form_at(*a, *b, *c, which, u, v),
        }
    }
}

fn build(source: FocalSource, domain: Domain, which: Foliation, grid: GridSpec) -> FocalSheet {
    let (us, vs) = grid.nodes(&domain);
    let mut points = Vec::with_capacity(us.len() * vs.len());
    for &v in &vs {
        for &u in &us {
            let pt = match source.eval(which, u, v) {
                Some((phi, ind)) => FocalPoint {
                    uv: (u, v),
                    xyz: Vec3M::new(phi[0].val(), phi[1].val(), phi[2].val()),
                    valid: true,
                    indicator: ind.is_finite().then_some(ind),
                },
                None => FocalPoint { uv: (u, v), xyz: Vec3M::ZERO, valid: false, indicator: None },
            };
            points.push(pt);
        }
    }
    let (nu, nv) = (us.len(), vs.len());
    let mut singular_points = Vec::new();
    for j in 0..nv {
        for i in 0..nu {
            let Some(s) = points[j * nu + i].indicator else { continue };
            let right = (i + 1 < nu).then(|| points[j * nu + i + 1].indicator).flatten();
            let up = (j + 1 < nv).then(|| points[(j + 1) * nu + i].indicator).flatten();
            if [right, up].iter().flatten().any(|&t| (t < 0.0) != (s < 0.0)) {
                singular_points.push((us[i], vs[j]));
            }
        }
    }
    FocalSheet { which, nu, nv, domain, points, singular_points, source }
}

/// Sheet of centres of a chart, from its own second-order data.
pub fn focal_numeric(chart: &ChartSpec, which: Foliation, grid: GridSpec) -> FocalSheet {
    build(FocalSource::Numeric(chart.clone()), chart.domain, which, grid)
}

/// Closed-form sheet of the ellipsoid over the principal chart (u, v) ∈
/// [0, 2π] × [0, π].
pub fn focal_closed_form(a: f64, b: f64, c: f64, which: Foliation, grid: GridSpec) -> Result<FocalSheet> {
    let ch = ChartSpec::ellipsoid(a, b, c, EllipsoidCover::U2)?;
    Ok(build(FocalSource::ClosedForm { a, b, c }, ch.domain, which, grid))
}

/// Centre of curvature of one sheet of a chart at (u, v).
pub fn numeric_point(chart: &ChartSpec, which: Foliation, u: f64, v: f64) -> Option<Vec3M> {
    let (phi, _) = numeric_at(&chart.taylor(u, v).ok()?, which)?;
    Some(Vec3M::new(phi[0].val(), phi[1].val(), phi[2].val()))
}

/// Point of a closed-form sheet.
pub fn closed_form_point(a: f64, b: f64, c: f64, which: Foliation, u: f64, v: f64) -> Option<Vec3M> {
    closed_form_map(a, b, c, which, u, v).map(Vec3M::from_array)
}

/// Curves where the sheet's indicator changes sign, polished by bisection
/// on the sheet's source. Closed-form sheets are traced over the full torus
/// [0, 2π]², since one cusp edge of the second sheet lies on v = 0 and
/// v = π, the boundary of the sheet's own domain.
pub fn focal_singular_locus(sheet: &FocalSheet) -> Vec<FocalCurve> {
    if sheet.points.iter().all(|p| p.indicator.is_none()) {
        return Vec::new();
    }
    let (domain, grid) = match sheet.source {
        FocalSource::ClosedForm { .. } => {
            let tau = core::f64::consts::TAU;
            (Domain::new((0.0, tau), (0.0, tau)).periodic(true, true), GridSpec::new(sheet.nu, 2 * sheet.nv))
        }
        FocalSource::Numeric(_) => (sheet.domain, GridSpec::new(sheet.nu, sheet.nv)),
    };
    let grid = grid.with_phase(0.5, 0.5);
    let f = |u: f64, v: f64| sheet.source.eval(sheet.which, u, v).map(|(_, s)| s);
    contour(&domain, grid, &f, 0.0)
        .into_iter()
        .filter_map(|c| {
            let mut uv = Vec::new();
            let mut xyz = Vec::new();
            for &(u, v) in &c.uv {
                let (wu, wv) = domain.wrap(u, v);
                if let Some((phi, _)) = sheet.source.eval(sheet.which, wu, wv) {
                    uv.push((u, v));
                    xyz.push(Vec3M::new(phi[0].val(), phi[1].val(), phi[2].val()));
                }
            }
            (uv.len() >= 2).then_some(FocalCurve { polyline_uv: uv, polyline_xyz: xyz, closed: c.closed })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::{FRAC_PI_2, PI};

    const ABC: (f64, f64, f64) = (2.0, 1.5, 2.2);

    #[test]
    fn closed_form_components() {
        let (a, b, c) = ABC;
        for &(u, v) in &[(0.3, 0.4), (1.0, 2.0), (2.5, 0.2)] {
            let p = closed_form_point(a, b, c, Foliation::F1, u, v).unwrap();
            assert!((p.y + math::sin(u).powi(3) * math::sin(v) * (a * a - b * b) / b).abs() < 1e-14);
        }
        let p = closed_form_point(a, b, c, Foliation::F2, 0.7, FRAC_PI_2).unwrap();
        assert!(p.z.abs() < 1e-15);
        // u = 0: B1 vanishes and A1 is the stated one-variable profile
        let v = 0.9;
        let p = closed_form_point(a, b, c, Foliation::F1, 0.0, v).unwrap();
        let want = (a * a - b * b) / (a * math::sqrt(a * a + c * c))
            * math::sqrt((a * a - b * b) * math::cos(v).powi(2) + (a * a + c * c) * math::sin(v).powi(2));
        assert_eq!(p.y, 0.0);
        assert!((p.x - want).abs() < 1e-14);
    }

    #[test]
    fn numeric_matches_closed_form() {
        let (a, b, c) = ABC;
        let ch = ChartSpec::ellipsoid(a, b, c, EllipsoidCover::U2).unwrap();
        for which in [Foliation::F1, Foliation::F2] {
            for &(u, v) in &[(0.3, 0.4), (1.0, 2.0), (2.5, 0.2), (4.0, 1.3)] {
                let (phi, _) = numeric_at(&ch.taylor(u, v).unwrap(), which).unwrap();
                let p = Vec3M::new(phi[0].val(), phi[1].val(), phi[2].val());
                let q = closed_form_point(a, b, c, which, u, v).unwrap();
                assert!((p - q).euclid_norm() < 1e-10 * (1.0 + q.euclid_norm()), "{p:?} {q:?}");
            }
        }
    }

    #[test]
    fn finite_on_the_tropic() {
        let (a, b, c) = ABC;
        let ch = ChartSpec::ellipsoid(a, b, c, EllipsoidCover::U2).unwrap();
        let v1 = math::acos(c / math::sqrt(b * b + c * c));
        for which in [Foliation::F1, Foliation::F2] {
            let (phi, _) = numeric_at(&ch.taylor(1.1, v1).unwrap(), which).unwrap();
            let p = Vec3M::new(phi[0].val(), phi[1].val(), phi[2].val());
            let q = closed_form_point(a, b, c, which, 1.1, v1).unwrap();
            assert!((p - q).euclid_norm() < 1e-9, "{p:?} {q:?}");
        }
    }

    #[test]
    fn plane_has_no_centres() {
        let ch = ChartSpec::plane(Domain::new((-1.0, 1.0), (-1.0, 1.0)));
        let s = focal_numeric(&ch, Foliation::F1, GridSpec::new(5, 5));
        assert!(s.points.iter().all(|p| !p.valid));
        assert!(focal_singular_locus(&s).is_empty());
    }

    #[test]
    fn singular_locus_meets_umbilic_images() {
        let (a, b, c) = ABC;
        for which in [Foliation::F1, Foliation::F2] {
            let sheet = focal_closed_form(a, b, c, which, GridSpec::new(120, 60)).unwrap();
            let curves = focal_singular_locus(&sheet);
            assert!(!curves.is_empty());
            for (u, v) in [(0.0, 0.0), (PI, 0.0), (0.0, PI), (PI, PI)] {
                let img = closed_form_point(a, b, c, which, u, v).unwrap();
                let d = curves.iter().flat_map(|c| c.polyline_xyz.iter()).map(|p| (*p - img).euclid_norm()).fold(f64::INFINITY, f64::min);
                assert!(d < 1e-2, "{which:?} {d}");
            }
        }
    }
}
