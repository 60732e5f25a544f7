//! Numeric checks that coordinate curves of a triple system are curvature
//! lines of its coordinate surfaces, and that the system is orthogonal.

use alloc::string::String;

use super::{BdeField, GridSpec};
use crate::error::Result;
use crate::math;
use crate::minkowski::det3;
use crate::quadrics::{describe, Axis3, TripleSystemSpec};
use crate::sampling::{admissible_points, well_inside};

/// Relative bound on the equation residual along coordinate curves.
pub const DUPIN_TOL: f64 = 1e-8;

const MARGIN: f64 = 0.02;

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct DupinReport {
    pub system: String,
    pub fixed: Axis3,
    pub curves: usize,
    pub points: usize,
    /// max |N|/scale along first-parameter curves and |L|/scale along
    /// second-parameter curves.
    pub max_residual: f64,
    /// max |F|/√|EG| of the coordinate surfaces.
    pub max_orthogonality: f64,
    pub tolerance: f64,
    pub pass: bool,
}

/// Samples `sample.nu` coordinate curves with up to `sample.nv` points each
/// on the surfaces with parameter `fixed` frozen. Curves alternate between
/// the two free parameters.
pub fn verify_dupin(sys: &TripleSystemSpec, fixed: Axis3, sample: GridSpec) -> Result<DupinReport> {
    let bx = sys.sample_box();
    let free = match fixed {
        Axis3::X => [1, 2],
        Axis3::Y => [0, 2],
        Axis3::Z => [0, 1],
    };
    let mut rep = DupinReport {
        system: describe(sys),
        fixed,
        curves: 0,
        points: 0,
        max_residual: 0.0,
        max_orthogonality: 0.0,
        tolerance: DUPIN_TOL,
        pass: false,
    };
    let bases = admissible_points(sys, 4 * sample.nu.max(1), MARGIN);
    for (k, base) in bases.iter().enumerate() {
        if rep.curves >= sample.nu {
            break;
        }
        let chart = sys.coordinate_surface(fixed, base[fixed.index()]);
        let moving = k % 2;
        let axis = free[moving];
        let (lo, hi) = bx[axis];
        let mut used = 0;
        for i in 0..sample.nv.max(2) {
            let mut p = *base;
            p[axis] = lo + (hi - lo) * (i as f64 + 0.5) / sample.nv.max(2) as f64;
            if !well_inside(sys, p, MARGIN) {
                continue;
            }
            let (s, t) = (p[free[0]], p[free[1]]);
            if chart.is_singular(s, t) {
                continue;
            }
            let fs = chart.sample(s, t)?;
            let [l, _, n] = fs.values();
            let r = if moving == 0 { math::abs(n) } else { math::abs(l) } / fs.scale;
            rep.max_residual = rep.max_residual.max(r);
            let j = crate::chart::eval_jet(&chart, s, t)?;
            let (e, f, g) = (j.xu.dot(j.xu), j.xu.dot(j.xv), j.xv.dot(j.xv));
            rep.max_orthogonality = rep.max_orthogonality.max(math::abs(f) / math::sqrt(math::abs(e * g)));
            used += 1;
        }
        if used >= 2 {
            rep.curves += 1;
            rep.points += used;
        }
    }
    rep.pass = rep.curves > 0 && rep.max_residual <= rep.tolerance;
    Ok(rep)
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct OrthogonalityReport {
    pub system: String,
    pub samples: usize,
    /// max over samples and pairs of |⟨X_i, X_j⟩|
    pub max_abs: f64,
    /// same, divided by ‖X_i‖‖X_j‖ (Euclidean)
    pub max_rel: f64,
    /// Relative error of det(DX) against the closed form (confocal only).
    pub max_det_rel_error: Option<f64>,
}

/// Pairwise Minkowski orthogonality of the partials at `count` admissible
/// points.
pub fn orthogonality_report(sys: &TripleSystemSpec, count: usize, margin: f64) -> Result<OrthogonalityReport> {
    let pts = admissible_points(sys, count, margin);
    let mut rep = OrthogonalityReport {
        system: describe(sys),
        samples: pts.len(),
        max_abs: 0.0,
        max_rel: 0.0,
        max_det_rel_error: matches!(sys, TripleSystemSpec::Confocal(_)).then_some(0.0),
    };
    for p in &pts {
        let d = sys.partials(p[0], p[1], p[2])?;
        for (i, j) in [(0, 1), (0, 2), (1, 2)] {
            let x = math::abs(d[i].dot(d[j]));
            rep.max_abs = rep.max_abs.max(x);
            rep.max_rel = rep.max_rel.max(x / (d[i].euclid_norm() * d[j].euclid_norm()));
        }
        if let TripleSystemSpec::Confocal(c) = sys {
            let want = c.det_dx_closed_form(p[0], p[1], p[2])?;
            let got = det3(d[0], d[1], d[2]);
            let e = math::abs(got - want) / math::abs(want);
            rep.max_det_rel_error = rep.max_det_rel_error.map(|m| m.max(e));
        }
    }
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::boxed::Box;
    use crate::quadrics::{ConfocalParams, StoParams};

    fn confocal() -> TripleSystemSpec {
        TripleSystemSpec::Confocal(ConfocalParams::new(2.0, 1.5, 2.2).unwrap())
    }

    #[test]
    fn confocal_coordinate_curves() {
        for ax in Axis3::ALL {
            let r = verify_dupin(&confocal(), ax, GridSpec::new(20, 10)).unwrap();
            assert!(r.pass, "{r:?}");
            assert_eq!(r.curves, 20);
        }
    }

    #[test]
    fn sto_coordinate_curves() {
        let s = TripleSystemSpec::Sto(StoParams::new(1.3, 0.8, -1.0).unwrap());
        let r = verify_dupin(&s, Axis3::Z, GridSpec::new(20, 10)).unwrap();
        assert!(r.pass, "{r:?}");
    }

    #[test]
    fn shear_breaks_it() {
        let s = TripleSystemSpec::Sheared { base: Box::new(confocal()), shear: 0.3 };
        let r = verify_dupin(&s, Axis3::Z, GridSpec::new(10, 10)).unwrap();
        assert!(!r.pass);
        assert!(r.max_residual > 1e-4);
    }

    #[test]
    fn orthogonality() {
        let r = orthogonality_report(&confocal(), 300, 0.02).unwrap();
        assert_eq!(r.samples, 300);
        assert!(r.max_abs < 1e-9, "{r:?}");
        assert!(r.max_det_rel_error.unwrap() < 1e-9);
    }
}
