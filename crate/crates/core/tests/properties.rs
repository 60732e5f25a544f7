use proptest::prelude::*;

use minkowski_principal::bde::{
    directions_from_coefficients, equation_residual, integrate_principal_line, Foliation, IntegrationOptions,
    Multiplicity, Termination,
};
use minkowski_principal::chart::EllipsoidCover;
use minkowski_principal::minkowski::{minkowski_cross, rotations};
use minkowski_principal::quadrics::{ellipsoid_atlas, GeneralQuadric};
use minkowski_principal::umbilic::{umbilics_atlas, DarbouxType, UmbilicSearch};
use minkowski_principal::{eval_jet, finite_difference_jet, ChartSpec, Vec3M};

fn vec3() -> impl Strategy<Value = Vec3M> {
    (-5.0..5.0f64, -5.0..5.0f64, -5.0..5.0f64).prop_map(|(x, y, z)| Vec3M::new(x, y, z))
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * (1.0 + a.abs().max(b.abs()))
}

proptest! {
    #[test]
    fn cross_product_is_orthogonal(u in vec3(), v in vec3()) {
        let w = minkowski_cross(u, v);
        prop_assert!(close(w.dot(u), 0.0, 1e-12 * (1.0 + u.euclid_norm() * v.euclid_norm())));
        prop_assert!(close(w.dot(v), 0.0, 1e-12 * (1.0 + u.euclid_norm() * v.euclid_norm())));
        // Lagrange identity with the Lorentzian sign
        let lhs = w.square();
        let rhs = u.dot(v).powi(2) - u.square() * v.square();
        prop_assert!(close(lhs, rhs, 1e-9));
    }

    #[test]
    fn isometries_preserve_the_product(
        t in 0.0..6.3f64, a in -1.5..1.5f64, b in -1.5..1.5f64, u in vec3(), v in vec3()
    ) {
        let iso = rotations(t, a, b);
        prop_assert!(iso.metric_defect() < 1e-10);
        let (lu, lv) = (iso.linear.apply(u), iso.linear.apply(v));
        let scale = lu.euclid_norm() * lv.euclid_norm() + 1.0;
        prop_assert!((lu.dot(lv) - u.dot(v)).abs() < 1e-11 * scale);
    }

    #[test]
    fn jets_agree_with_finite_differences(u in 0.2..2.9f64, v in 0.2..2.9f64) {
        let ch = ChartSpec::ellipsoid(2.0, 1.5, 2.2, EllipsoidCover::Torus).unwrap();
        let j = eval_jet(&ch, u, v).unwrap();
        let fd = finite_difference_jet(&ch, u, v, 1e-4).unwrap();
        prop_assert!((j.x - fd.x).euclid_norm() < 1e-14);
        prop_assert!((j.xu - fd.xu).euclid_norm() < 1e-6);
        prop_assert!((j.xv - fd.xv).euclid_norm() < 1e-6);
        for (a, b) in [(j.xuu, fd.xuu), (j.xuv, fd.xuv), (j.xvv, fd.xvv)] {
            prop_assert!((a - b).euclid_norm() < 1e-4, "{a:?} {b:?}");
        }
    }

    #[test]
    fn directions_solve_the_equation(l in -3.0..3.0f64, m in -3.0..3.0f64, n in -3.0..3.0f64) {
        let p = directions_from_coefficients(l, m, n, 1.0, 1e-12);
        if p.multiplicity == Multiplicity::Two {
            let (d1, d2) = (p.d1.unwrap(), p.d2.unwrap());
            prop_assert!(equation_residual([l, m, n], d1) < 1e-12);
            prop_assert!(equation_residual([l, m, n], d2) < 1e-12);
            prop_assert!(d1.0.abs() >= d2.0.abs());
            // the roots are projective: any nonzero rescaling keeps them
            let q = directions_from_coefficients(-2.0 * l, -2.0 * m, -2.0 * n, 2.0, 1e-12);
            prop_assert!((q.d1.unwrap().0 - d1.0).abs() < 1e-12 && (q.d1.unwrap().1 - d1.1).abs() < 1e-12);
        }
        if m * m - 4.0 * l * n < -1e-9 {
            prop_assert_eq!(p.multiplicity, Multiplicity::None);
        }
    }

    #[test]
    fn canonical_form_round_trip(
        l1 in 0.1..4.0f64, l2 in 0.1..4.0f64, l3 in 0.1..4.0f64,
        t in 0.0..6.3f64, a in -1.0..1.0f64, b in -1.0..1.0f64, s in vec3()
    ) {
        let mut iso = rotations(t, a, b);
        iso.translation = s * 0.2;
        let q = GeneralQuadric::diagonal([l1, l2, l3]).transformed(&iso);
        let cf = q.canonicalize().unwrap();
        prop_assert!(cf.isometry.metric_defect() < 1e-10);
        // the timelike coefficient is recovered in place
        prop_assert!(close(cf.lambdas[2], l3, 1e-8), "{:?} vs {}", cf.lambdas, l3);
        let mut got = [cf.lambdas[0], cf.lambdas[1]];
        got.sort_by(f64::total_cmp);
        let want = if l1 < l2 { [l1, l2] } else { [l2, l1] };
        prop_assert!(close(got[0], want[0], 1e-8) && close(got[1], want[1], 1e-8));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn leaves_follow_coordinate_lines(u in 0.3..2.8f64, v in 0.3..2.8f64, second in any::<bool>()) {
        let ch = ChartSpec::ellipsoid(2.0, 1.5, 2.2, EllipsoidCover::Torus).unwrap();
        let fol = if second { Foliation::F2 } else { Foliation::F1 };
        let opts = IntegrationOptions { max_length: Some(1.5), detect_closure: false, ..Default::default() };
        let c = integrate_principal_line(&ch, (u, v), fol, &opts).unwrap();
        prop_assert_ne!(c.termination, Termination::UmbilicHit);
        // principal chart: each leaf keeps one coordinate fixed
        let k = if second { 0 } else { 1 };
        for p in &c.points_uv {
            let x = if k == 0 { p.0 } else { p.1 };
            let y = if k == 0 { u } else { v };
            prop_assert!((x - y).abs() < 1e-6, "{p:?} from ({u}, {v})");
        }
    }

    #[test]
    fn triaxial_ellipsoids_have_four_d1_umbilics(a in 1.2..3.0f64, db in 0.1..0.8f64, c in 0.5..3.0f64) {
        let b = a * (1.0 - db * 0.8);
        let recs = umbilics_atlas(&ellipsoid_atlas(a, b, c).unwrap(), &UmbilicSearch::default()).unwrap();
        prop_assert_eq!(recs.len(), 4, "({}, {}, {})", a, b, c);
        let x0 = a * ((a * a - b * b) / (a * a + c * c)).sqrt();
        for r in &recs {
            prop_assert_eq!(r.darboux, Some(DarbouxType::D1));
            prop_assert!((r.xyz.x.abs() - x0).abs() < 1e-8 && r.xyz.y.abs() < 1e-8);
        }
    }
}
