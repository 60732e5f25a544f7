//! Inversions p ↦ (p − q)/⟨p − q, p − q⟩ of ℝ^{2,1} and a check that they
//! carry curvature lines to curvature lines.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::bde::{integrate_principal_line, Foliation, GridSpec, IntegrationOptions};
use crate::chart::ChartSpec;
use crate::error::{Error, Result};
use crate::math;
use crate::minkowski::Vec3M;
use crate::surface::bde_coefficient_jets;

/// Points with |⟨p−q, p−q⟩| ≤ LIGHTCONE_BAND·‖p−q‖² (Euclidean) count as
/// lying on the light cone of q.
pub const LIGHTCONE_BAND: f64 = 1e-8;

/// Relative Hausdorff tolerance of [`verify_inversion_invariance`].
pub const INVERSION_TOL: f64 = 1e-4;

pub fn invert_point(q: Vec3M, p: Vec3M) -> Result<Vec3M> {
    let d = p - q;
    let m = d.square();
    if math::abs(m) <= LIGHTCONE_BAND * d.euclid_dot(d) || d.euclid_dot(d) == 0.0 {
        return Err(Error::Lightcone);
    }
    Ok(d / m)
}

/// Chart of the inverted surface. Evaluation fails with `Lightcone` where
/// the surface meets the light cone of q.
pub fn invert_chart(q: Vec3M, chart: &ChartSpec) -> ChartSpec {
    chart.inverted(q)
}

/// Largest relative deviation of (L̄, M̄, N̄)·⟨X−q, X−q⟩⁵ from −(L, M, N)
/// over the given parameter points. The minus sign comes from the
/// orientation reversal of the inversion.
pub fn coefficient_proportionality(chart: &ChartSpec, q: Vec3M, points: &[(f64, f64)]) -> Result<f64> {
    let inv = chart.inverted(q);
    let mut worst = 0.0f64;
    for &(u, v) in points {
        let a = bde_coefficient_jets(chart, u, v)?.map(|j| j.value());
        let b = bde_coefficient_jets(&inv, u, v)?.map(|j| j.value());
        let m = (chart.point(u, v)? - q).square();
        let m5 = m * m * m * m * m;
        let size = math::sqrt(a.iter().map(|x| x * x).sum::<f64>());
        if size == 0.0 {
            continue;
        }
        for i in 0..3 {
            worst = worst.max(math::abs(b[i] * m5 + a[i]) / size);
        }
    }
    Ok(worst)
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct SeedComparison {
    pub seed: (f64, f64),
    pub foliation: Foliation,
    /// One-sided Hausdorff distance from I_q(leaf on S) to the leaf on S_q.
    pub hausdorff: Option<f64>,
    pub pass: bool,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct InversionReport {
    pub q: Vec3M,
    /// Euclidean diameter of the mapped leaves; distances are judged against
    /// `tolerance`·scale.
    pub scale: f64,
    pub tolerance: f64,
    pub seeds: Vec<SeedComparison>,
    pub precondition: Option<String>,
    pub pass: bool,
}

fn dist_to_polyline(p: Vec3M, line: &[Vec3M]) -> f64 {
    if line.len() == 1 {
        return (p - line[0]).euclid_norm();
    }
    let mut best = f64::INFINITY;
    for w in line.windows(2) {
        let d = w[1] - w[0];
        let l2 = d.euclid_dot(d);
        let t = if l2 > 0.0 { ((p - w[0]).euclid_dot(d) / l2).clamp(0.0, 1.0) } else { 0.0 };
        best = best.min((w[0] + d * t - p).euclid_norm());
    }
    best
}

fn bbox_diameter(pts: &[Vec3M]) -> f64 {
    let mut lo = [f64::INFINITY; 3];
    let mut hi = [f64::NEG_INFINITY; 3];
    for p in pts {
        for (k, x) in p.to_array().into_iter().enumerate() {
            lo[k] = lo[k].min(x);
            hi[k] = hi[k].max(x);
        }
    }
    let d = Vec3M::new(hi[0] - lo[0], hi[1] - lo[1], hi[2] - lo[2]);
    d.euclid_norm()
}

/// Distance from q to the chart image, from a grid scan refined by
/// Gauss–Newton; and whether the light cone of q cuts the sampled image.
fn check_precondition(chart: &ChartSpec, q: Vec3M) -> Option<String> {
    let dom = chart.domain;
    let (us, vs) = GridSpec::new(120, 120).with_phase(0.5, 0.5).nodes(&dom);
    let mut best = (f64::INFINITY, (0.0, 0.0));
    let (mut pos, mut neg) = (false, false);
    let mut size = 0.0f64;
    for &v in &vs {
        for &u in &us {
            if let Ok(p) = chart.point(u, v) {
                let d = p - q;
                let m = d.square();
                pos |= m > 0.0;
                neg |= m < 0.0;
                size = size.max(p.euclid_norm());
                if d.euclid_norm() < best.0 {
                    best = (d.euclid_norm(), (u, v));
                }
            }
        }
    }
    let (mut u, mut v) = best.1;
    for _ in 0..50 {
        let Ok(j) = crate::chart::eval_jet(chart, u, v) else { break };
        let r = j.x - q;
        let (a11, a12, a22) = (j.xu.euclid_dot(j.xu), j.xu.euclid_dot(j.xv), j.xv.euclid_dot(j.xv));
        let (b1, b2) = (j.xu.euclid_dot(r), j.xv.euclid_dot(r));
        let det = a11 * a22 - a12 * a12;
        if det == 0.0 {
            break;
        }
        let (du, dv) = ((a22 * b1 - a12 * b2) / det, (a11 * b2 - a12 * b1) / det);
        let (nu, nv) = dom.wrap(u - du, v - dv);
        if !dom.contains(nu, nv) {
            break;
        }
        u = nu;
        v = nv;
        best.0 = best.0.min(r.euclid_norm());
    }
    if let Ok(p) = chart.point(u, v) {
        best.0 = best.0.min((p - q).euclid_norm());
    }
    if best.0 <= 1e-8 * (1.0 + size) {
        return Some(format!("q = ({}, {}, {}) lies on the surface", q.x, q.y, q.z));
    }
    if pos && neg {
        return Some(String::from("the light cone of q meets the surface"));
    }
    None
}

/// For each seed, integrates a leaf on S and maps it by I_q, integrates
/// the same leaf on I_q(S) independently, and compares the two in space.
pub fn verify_inversion_invariance(
    chart: &ChartSpec,
    q: Vec3M,
    seeds: &[((f64, f64), Foliation)],
    opts: &IntegrationOptions,
) -> InversionReport {
    let mut rep = InversionReport {
        q,
        scale: 0.0,
        tolerance: INVERSION_TOL,
        seeds: Vec::new(),
        precondition: check_precondition(chart, q),
        pass: false,
    };
    if rep.precondition.is_some() {
        return rep;
    }
    let inv = chart.inverted(q);
    let mut pairs = Vec::new();
    for &(seed, fol) in seeds {
        let run = || -> Result<(Vec<Vec3M>, Vec<Vec3M>)> {
            let a = integrate_principal_line(chart, seed, fol, opts)?;
            let mapped = a.points_xyz.iter().map(|&p| invert_point(q, p)).collect::<Result<Vec<_>>>()?;
            let b = integrate_principal_line(&inv, seed, fol, opts)?;
            Ok((mapped, b.points_xyz))
        };
        match run() {
            Ok(pair) => {
                rep.scale = rep.scale.max(bbox_diameter(&pair.0));
                pairs.push((seed, fol, Some(pair), None));
            }
            Err(e) => pairs.push((seed, fol, None, Some(format!("{e}")))),
        }
    }
    let bound = rep.tolerance * rep.scale;
    for (seed, foliation, pair, error) in pairs {
        let hausdorff = pair.map(|(mapped, direct)| mapped.iter().map(|&p| dist_to_polyline(p, &direct)).fold(0.0, f64::max));
        let pass = hausdorff.is_some_and(|h| h <= bound);
        rep.seeds.push(SeedComparison { seed, foliation, hausdorff, pass, error });
    }
    rep.pass = !rep.seeds.is_empty() && rep.seeds.iter().all(|s| s.pass);
    rep
}

/// Options that give leaves dense enough for polyline comparison.
pub fn comparison_options() -> IntegrationOptions {
    IntegrationOptions { max_step_frac: 0.001, atol: 1e-10, ..Default::default() }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chart::{Domain, EllipsoidCover, Monomial};

    #[test]
    fn points() {
        let o = Vec3M::ZERO;
        assert_eq!(invert_point(o, Vec3M::new(2.0, 0.0, 0.0)).unwrap(), Vec3M::new(0.5, 0.0, 0.0));
        assert_eq!(invert_point(o, Vec3M::new(0.0, 0.0, 2.0)).unwrap(), Vec3M::new(0.0, 0.0, -0.5));
        assert_eq!(invert_point(o, Vec3M::new(1.0, 0.0, 1.0)), Err(Error::Lightcone));
    }

    #[test]
    fn involution() {
        let q = Vec3M::new(0.3, -0.2, 4.0);
        for p in [Vec3M::new(1.0, 2.0, 0.5), Vec3M::new(-0.7, 0.1, -1.0)] {
            let back = invert_point(q, invert_point(q, p).unwrap() + q).unwrap() + q;
            assert!((back - p).euclid_norm() < 1e-12 * p.euclid_norm());
        }
    }

    #[test]
    fn graph_coefficients_scale() {
        let h = alloc::vec![
            Monomial { i: 2, j: 0, coef: 0.3 },
            Monomial { i: 1, j: 1, coef: -0.2 },
            Monomial { i: 0, j: 2, coef: 0.5 },
            Monomial { i: 3, j: 0, coef: 0.1 },
        ];
        let ch = ChartSpec::graph(h, Domain::new((-1.0, 1.0), (-1.0, 1.0)));
        let r = coefficient_proportionality(&ch, Vec3M::new(0.4, -0.2, 3.0), &[(0.1, 0.2), (0.5, -0.3), (-0.6, 0.7)]).unwrap();
        assert!(r < 1e-8, "{r}");
    }

    #[test]
    fn q_on_surface_is_reported() {
        let ch = ChartSpec::ellipsoid(2.0, 1.5, 2.2, EllipsoidCover::Torus).unwrap();
        let q = ch.point(0.4, 1.1).unwrap();
        let rep = verify_inversion_invariance(&ch, q, &[((0.7, 0.9), Foliation::F1)], &IntegrationOptions::default());
        assert!(!rep.pass);
        assert!(rep.precondition.unwrap().contains("on the surface"));
    }

    #[test]
    fn graph_leaves_map_to_leaves() {
        let ch = ChartSpec::graph(alloc::vec![Monomial { i: 2, j: 0, coef: 0.2 }, Monomial { i: 0, j: 2, coef: 0.7 }], Domain::new((-1.0, 1.0), (-1.0, 1.0)));
        let q = Vec3M::new(0.1, 0.2, 4.0);
        let o = comparison_options();
        let rep = verify_inversion_invariance(&ch, q, &[((0.3, 0.2), Foliation::F1), ((-0.4, 0.1), Foliation::F2)], &o);
        assert!(rep.pass, "{rep:?}");
    }
}
