//! The binary differential equation L dv² + M du dv + N du² = 0 of curvature
//! lines: pointwise directions, leaves, and the tropic / lightlike loci.

use alloc::vec::Vec;

use crate::chart::{ChartSpec, Domain, Monomial};
use crate::error::{Error, Result};
use crate::jet::{Jet, Scalar};
use crate::math;
use crate::minkowski::Vec3M;
use crate::surface::{form_jets, FundamentalData};

pub mod dupin;
mod integrate;
mod locus;

pub use integrate::{integrate_from, integrate_principal_line, IntegrationOptions};
pub use locus::{contour, trace_locus, ContourLine};

/// Default relative tolerance for umbilic-like and double-root detection.
pub const DEFAULT_DIRECTION_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Foliation {
    F1,
    F2,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Multiplicity {
    Two,
    One,
    None,
    UmbilicLike,
}

/// Roots (du : dv) of the equation at one point, as unit vectors in the
/// parameter plane. `d1` is the root closer to the u axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DirectionPair {
    pub d1: Option<(f64, f64)>,
    pub d2: Option<(f64, f64)>,
    pub discriminant: f64,
    pub multiplicity: Multiplicity,
}

impl DirectionPair {
    pub fn get(&self, f: Foliation) -> Option<(f64, f64)> {
        match f {
            Foliation::F1 => self.d1,
            Foliation::F2 => self.d2,
        }
    }
}

fn canonical(d: (f64, f64)) -> (f64, f64) {
    let n = math::hypot(d.0, d.1);
    let (a, b) = (d.0 / n, d.1 / n);
    if a < 0.0 || (a == 0.0 && b < 0.0) {
        (-a, -b)
    } else {
        (a, b)
    }
}

/// Solves L dv² + M du dv + N du² = 0 projectively. `scale` is a reference
/// size of the coefficients at points where they do not vanish.
pub fn directions_from_coefficients(l: f64, m: f64, n: f64, scale: f64, tol: f64) -> DirectionPair {
    let disc = m * m - 4.0 * l * n;
    let size = math::abs(l).max(math::abs(m)).max(math::abs(n));
    let absent = |mult| DirectionPair { d1: None, d2: None, discriminant: disc, multiplicity: mult };
    if size <= tol * scale || size == 0.0 {
        return absent(Multiplicity::UmbilicLike);
    }
    if disc < -tol * size * size {
        return absent(Multiplicity::None);
    }
    // Quadratic form dᵀ S d with S = [[N, M/2], [M/2, L]].
    let mean = 0.5 * (n + l);
    let r = math::hypot(0.5 * (n - l), 0.5 * m);
    let det = n * l - 0.25 * m * m;
    let (mu1, mu2) = if mean >= 0.0 {
        let a = mean + r;
        (a, det / a)
    } else {
        let b = mean - r;
        (det / b, b)
    };
    let phi = 0.5 * math::atan2(m, n - l);
    let e1 = (math::cos(phi), math::sin(phi));
    let e2 = (-e1.1, e1.0);
    if math::abs(disc) <= tol * size * size {
        // the eigenvector of the eigenvalue closest to zero
        let d = if math::abs(mu1) < math::abs(mu2) { e1 } else { e2 };
        return DirectionPair { d1: Some(canonical(d)), d2: None, discriminant: disc, multiplicity: Multiplicity::One };
    }
    let (p, q) = (math::sqrt((-mu2).max(0.0)), math::sqrt(mu1.max(0.0)));
    let a = canonical((p * e1.0 + q * e2.0, p * e1.1 + q * e2.1));
    let b = canonical((p * e1.0 - q * e2.0, p * e1.1 - q * e2.1));
    let (d1, d2) = if math::abs(a.0) >= math::abs(b.0) { (a, b) } else { (b, a) };
    DirectionPair { d1: Some(d1), d2: Some(d2), discriminant: disc, multiplicity: Multiplicity::Two }
}

pub fn principal_directions(fd: &FundamentalData, tol: f64) -> DirectionPair {
    directions_from_coefficients(fd.l1, fd.m1, fd.n1, fd.coefficient_scale(), tol)
}

/// Equation coefficients (with first partials) and a reference scale.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldSample {
    /// [L, M, N] as jets exact through degree 1.
    pub lmn: [Jet; 3],
    pub scale: f64,
}

impl FieldSample {
    pub fn values(&self) -> [f64; 3] {
        self.lmn.map(|j| j.value())
    }

    pub fn directions(&self, tol: f64) -> DirectionPair {
        let [l, m, n] = self.values();
        directions_from_coefficients(l, m, n, self.scale, tol)
    }
}

/// Anything that provides a curvature-line equation on a parameter domain.
pub trait BdeField {
    fn domain(&self) -> Domain;
    fn sample(&self, u: f64, v: f64) -> Result<FieldSample>;
    fn position(&self, u: f64, v: f64) -> Result<Vec3M>;
    /// EG − F² of the underlying surface.
    fn det_metric(&self, u: f64, v: f64) -> Result<f64>;
    /// True where the parametrization itself degenerates.
    fn is_singular(&self, _u: f64, _v: f64) -> bool {
        false
    }
}

impl BdeField for ChartSpec {
    fn domain(&self) -> Domain {
        self.domain
    }

    fn sample(&self, u: f64, v: f64) -> Result<FieldSample> {
        let x = self.taylor(u, v)?;
        let fj = form_jets(&x);
        let scale = (math::abs(fj.e.value()) + math::abs(fj.f.value()) + math::abs(fj.g.value()))
            * (math::abs(fj.eh.value()) + math::abs(fj.fh.value()) + math::abs(fj.gh.value()));
        Ok(FieldSample { lmn: fj.lmn(), scale })
    }

    fn position(&self, u: f64, v: f64) -> Result<Vec3M> {
        self.point(u, v)
    }

    fn det_metric(&self, u: f64, v: f64) -> Result<f64> {
        let j = crate::chart::eval_jet(self, u, v)?;
        let (e, f, g) = (j.xu.dot(j.xu), j.xu.dot(j.xv), j.xv.dot(j.xv));
        Ok(e * g - f * f)
    }

    fn is_singular(&self, u: f64, v: f64) -> bool {
        ChartSpec::is_singular(self, u, v)
    }
}

/// Equation with polynomial coefficients, optionally tied to a chart that
/// supplies positions and the metric.
#[derive(Debug, Clone, PartialEq)]
pub struct PolynomialBde {
    /// coefficient of dv²
    pub l: Vec<Monomial>,
    /// coefficient of du dv
    pub m: Vec<Monomial>,
    /// coefficient of du²
    pub n: Vec<Monomial>,
    pub domain: Domain,
    /// Restrict to u² + v² < 1 as well.
    pub unit_disk: bool,
    pub embedding: Option<ChartSpec>,
}

fn poly<S: Scalar>(terms: &[Monomial], u: S, v: S) -> S {
    let mut acc = S::cst(0.0);
    for t in terms {
        acc = acc + u.powi(t.i) * v.powi(t.j) * t.coef;
    }
    acc
}

impl PolynomialBde {
    fn check(&self, u: f64, v: f64) -> Result<()> {
        if !self.domain.contains(u, v) || (self.unit_disk && u * u + v * v >= 1.0) {
            Err(Error::Domain { u, v })
        } else {
            Ok(())
        }
    }

    /// [L, M, N] at (u,v).
    pub fn coefficients(&self, u: f64, v: f64) -> Result<[f64; 3]> {
        self.check(u, v)?;
        Ok([poly(&self.l, u, v), poly(&self.m, u, v), poly(&self.n, u, v)])
    }
}

impl BdeField for PolynomialBde {
    fn domain(&self) -> Domain {
        self.domain
    }

    fn sample(&self, u: f64, v: f64) -> Result<FieldSample> {
        self.check(u, v)?;
        let (ju, jv) = (Jet::var_u(u), Jet::var_v(v));
        let lmn = [poly(&self.l, ju, jv), poly(&self.m, ju, jv), poly(&self.n, ju, jv)];
        let scale = [&self.l, &self.m, &self.n].iter().flat_map(|p| p.iter()).map(|t| math::abs(t.coef)).sum();
        Ok(FieldSample { lmn, scale })
    }

    fn position(&self, u: f64, v: f64) -> Result<Vec3M> {
        self.check(u, v)?;
        match &self.embedding {
            Some(ch) => ch.point(u, v),
            None => Ok(Vec3M::new(u, v, 0.0)),
        }
    }

    fn det_metric(&self, u: f64, v: f64) -> Result<f64> {
        self.check(u, v)?;
        match &self.embedding {
            Some(ch) => ch.det_metric(u, v),
            None => Ok(1.0),
        }
    }
}

/// Sampling lattice over a domain. `phase` shifts all nodes by that
/// fraction of a cell (used to keep nodes off special lines).
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct GridSpec {
    pub nu: usize,
    pub nv: usize,
    pub phase: (f64, f64),
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec { nu: 200, nv: 200, phase: (0.0, 0.0) }
    }
}

impl GridSpec {
    pub fn new(nu: usize, nv: usize) -> Self {
        GridSpec { nu, nv, phase: (0.0, 0.0) }
    }

    pub fn with_phase(mut self, pu: f64, pv: f64) -> Self {
        self.phase = (pu, pv);
        self
    }

    fn axis(n: usize, (a, b): (f64, f64), periodic: bool, phase: f64) -> Vec<f64> {
        if periodic {
            let h = (b - a) / n as f64;
            (0..n).map(|i| a + (i as f64 + phase) * h).collect()
        } else {
            let h = (b - a) / (n as f64 - 1.0 + 2.0 * phase);
            (0..n).map(|i| a + (i as f64 + phase) * h).collect()
        }
    }

    /// Node coordinates along u and along v.
    pub fn nodes(&self, d: &Domain) -> (Vec<f64>, Vec<f64>) {
        (
            Self::axis(self.nu.max(2), d.u, d.periodic_u, self.phase.0),
            Self::axis(self.nv.max(2), d.v, d.periodic_v, self.phase.1),
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Termination {
    Closed,
    DomainExit,
    UmbilicHit,
    LPLHit,
    StepLimit,
}

/// An integrated leaf. Parameter coordinates are unwrapped (continuous
/// across periodic seams).
#[derive(Debug, Clone, PartialEq)]
pub struct PrincipalCurve {
    pub foliation: Foliation,
    pub points_uv: Vec<(f64, f64)>,
    pub points_xyz: Vec<Vec3M>,
    pub closed: bool,
    pub termination: Termination,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum LocusKind {
    LD,
    LPL,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LocusCurve {
    pub kind: LocusKind,
    pub polyline_uv: Vec<(f64, f64)>,
    pub polyline_xyz: Vec<Vec3M>,
    pub closed: bool,
}

/// |L dv² + M du dv + N du²| / (‖(L,M,N)‖ ‖d‖²) at a point.
pub fn equation_residual(lmn: [f64; 3], d: (f64, f64)) -> f64 {
    let [l, m, n] = lmn;
    let s = math::sqrt(l * l + m * m + n * n);
    let dd = d.0 * d.0 + d.1 * d.1;
    if s == 0.0 || dd == 0.0 {
        return 0.0;
    }
    math::abs(l * d.1 * d.1 + m * d.0 * d.1 + n * d.0 * d.0) / (s * dd)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chart::EllipsoidCover;

    #[test]
    fn factored_quadratic() {
        let d = directions_from_coefficients(0.0, 1.0, 0.0, 1.0, DEFAULT_DIRECTION_TOL);
        assert_eq!(d.multiplicity, Multiplicity::Two);
        let d1 = d.d1.unwrap();
        assert!((d1.0 - 1.0).abs() < 1e-15 && d1.1.abs() < 1e-15);
        let d2 = d.d2.unwrap();
        assert!(d2.0.abs() < 1e-15 && (d2.1 - 1.0).abs() < 1e-15);
    }

    #[test]
    fn special_branches() {
        assert_eq!(directions_from_coefficients(0.0, 0.0, 0.0, 1.0, 1e-12).multiplicity, Multiplicity::UmbilicLike);
        assert_eq!(directions_from_coefficients(1.0, 0.0, 1.0, 1.0, 1e-12).multiplicity, Multiplicity::None);
        let one = directions_from_coefficients(1.0, 2.0, 1.0, 1.0, 1e-12);
        assert_eq!(one.multiplicity, Multiplicity::One);
        // (dv + du)² = 0
        let d = one.d1.unwrap();
        assert!((d.0 + d.1).abs() < 1e-12);
        // N = 0: a root at du = 0
        let z = directions_from_coefficients(0.0, 1.0, 0.0, 1.0, 1e-12);
        assert!(z.d2.unwrap().0.abs() < 1e-15);
    }

    #[test]
    fn roots_satisfy_the_equation() {
        for &(l, m, n) in &[(1.0, 3.0, -2.0), (-0.3, 0.1, 5.0), (1e-9, 1.0, 1e-9), (2.0, -7.0, 0.5)] {
            let d = directions_from_coefficients(l, m, n, 1.0, 1e-12);
            for r in [d.d1.unwrap(), d.d2.unwrap()] {
                assert!(equation_residual([l, m, n], r) < 1e-14);
            }
        }
    }

    #[test]
    fn principal_chart_directions_are_axes() {
        let ch = ChartSpec::ellipsoid(2.0, 1.5, 2.2, EllipsoidCover::Torus).unwrap();
        for &(u, v) in &[(0.4, 0.3), (1.0, 1.5), (2.0, 2.9)] {
            let d = ch.sample(u, v).unwrap().directions(DEFAULT_DIRECTION_TOL);
            let (a, b) = (d.d1.unwrap(), d.d2.unwrap());
            assert!((a.0 - 1.0).abs() < 1e-12 && b.0.abs() < 1e-12);
        }
    }

    #[test]
    fn graph_equation_on_the_axis() {
        let (a, b, c) = (2.0, 1.5, 2.2);
        let eq = crate::quadrics::graph_chart_equation(a, b, c).unwrap();
        let [l, m, n] = eq.coefficients(0.0, 0.5).unwrap();
        assert_eq!((l, n), (0.0, 0.0));
        assert!((m - (-0.25 * (b * b + c * c) - a * a + b * b)).abs() < 1e-14);
        assert!(matches!(eq.coefficients(0.8, 0.7), Err(Error::Domain { .. })));
    }

    #[test]
    fn grid_nodes() {
        let d = Domain::new((0.0, 1.0), (0.0, 2.0)).periodic(false, true);
        let (us, vs) = GridSpec::new(5, 4).nodes(&d);
        assert_eq!(us, alloc::vec![0.0, 0.25, 0.5, 0.75, 1.0]);
        assert_eq!(vs, alloc::vec![0.0, 0.5, 1.0, 1.5]);
        let (us, _) = GridSpec::new(2, 2).with_phase(0.5, 0.5).nodes(&d);
        assert_eq!(us, alloc::vec![0.25, 0.75]);
    }
}
