//! Closed-form geometry of confocal quadrics in ℝ^{2,1}.
//!
//! * the confocal triple system X(u,v,w) (families with parameters u, v, w),
//! * the separable triple system Z(u,v,w) with its three quadric families,
//! * the principal chart and graph atlas of the ellipsoid
//!   x²/a² + y²/b² + z²/c² = 1,
//! * the planar confocal-conic equation,
//! * general quadrics and their reduction to diagonal form by an isometry.

use alloc::boxed::Box;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::bde::PolynomialBde;
use crate::chart::{ChartSpec, Domain, EllipsoidCover, Monomial};
use crate::error::{Error, Result};
use crate::jet::{Jet, Scalar};
use crate::math;
use crate::minkowski::{boost_s, boost_t, rotation_r, Isometry21, Mat3, Vec3M};

const TAU: f64 = core::f64::consts::TAU;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum Axis3 {
    X,
    Y,
    Z,
}

impl Axis3 {
    pub const ALL: [Axis3; 3] = [Axis3::X, Axis3::Y, Axis3::Z];

    pub fn index(self) -> usize {
        match self {
            Axis3::X => 0,
            Axis3::Y => 1,
            Axis3::Z => 2,
        }
    }
}

fn bad(msg: &str) -> Error {
    Error::Param(alloc::string::String::from(msg))
}

/// Semi-axes of the reference ellipsoid, a > b > 0, c > 0.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ConfocalParams {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

impl ConfocalParams {
    pub fn new(a: f64, b: f64, c: f64) -> Result<Self> {
        if a > b && b > 0.0 && c > 0.0 {
            Ok(ConfocalParams { a, b, c })
        } else {
            Err(bad("confocal system needs a > b > 0 and c > 0"))
        }
    }

    /// Parameter box (−c², b²) × (b², a²) × (−c², b²).
    pub fn parameter_box(&self) -> [(f64, f64); 3] {
        let (a2, b2, c2) = (self.a * self.a, self.b * self.b, self.c * self.c);
        [(-c2, b2), (b2, a2), (-c2, b2)]
    }

    pub fn admissible(&self, u: f64, v: f64, w: f64) -> bool {
        let bx = self.parameter_box();
        let inside = |x: f64, (lo, hi): (f64, f64)| x > lo && x < hi;
        inside(u, bx[0])
            && inside(v, bx[1])
            && inside(w, bx[2])
            && math::abs(u - w) > 1e-12 * (self.b * self.b + self.c * self.c)
    }

    pub(crate) fn eval<S: Scalar>(&self, p: [S; 3], at: (f64, f64)) -> Result<[S; 3]> {
        let (a2, b2, c2) = (self.a * self.a, self.b * self.b, self.c * self.c);
        let [u, v, w] = p;
        let sq = |x: S| x.sqrt_checked().map_err(|arg| Error::SingularChart { u: at.0, v: at.1, arg });
        let x = sq((-u + a2) * (-v + a2) * (-w + a2) / ((a2 - b2) * (a2 + c2)))?;
        let y = sq(-((-u + b2) * (-v + b2) * (-w + b2)) / ((a2 - b2) * (b2 + c2)))?;
        let z = sq((u + c2) * (v + c2) * (w + c2) / ((a2 + c2) * (b2 + c2)))?;
        Ok([x, y, z])
    }

    pub fn point(&self, u: f64, v: f64, w: f64) -> Result<Vec3M> {
        if !self.admissible(u, v, w) {
            return Err(Error::OutsideSystem { u, v, w });
        }
        Ok(Vec3M::from_array(self.eval([u, v, w], (u, v))?))
    }

    /// det(DX) from the closed form (u−v)(u−w)(v−w)/(8xyz(a²−b²)(a²+c²)(b²+c²)).
    pub fn det_dx_closed_form(&self, u: f64, v: f64, w: f64) -> Result<f64> {
        let p = self.point(u, v, w)?;
        let (a2, b2, c2) = (self.a * self.a, self.b * self.b, self.c * self.c);
        Ok((u - v) * (u - w) * (v - w) / (8.0 * p.x * p.y * p.z * (a2 - b2) * (a2 + c2) * (b2 + c2)))
    }

    /// Residuals of the three confocal quadrics with parameters u, v, w at p.
    pub fn family_residuals(&self, p: Vec3M, t: [f64; 3]) -> [f64; 3] {
        let (a2, b2, c2) = (self.a * self.a, self.b * self.b, self.c * self.c);
        t.map(|s| p.x * p.x / (a2 - s) + p.y * p.y / (b2 - s) + p.z * p.z / (c2 + s) - 1.0)
    }
}

/// Parameters of the separable system Z. ε = −1 needs n < m.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct StoParams {
    pub m: f64,
    pub n: f64,
    pub eps: f64,
}

impl StoParams {
    pub fn new(m: f64, n: f64, eps: f64) -> Result<Self> {
        if !(m > 0.0 && n > 0.0) {
            return Err(bad("m and n must be positive"));
        }
        if eps != 1.0 && eps != -1.0 {
            return Err(bad("eps must be +1 or -1"));
        }
        if eps < 0.0 && n >= m {
            return Err(bad("eps = -1 needs n < m"));
        }
        Ok(StoParams { m, n, eps })
    }

    /// Parameters for which the w-surface is the ellipsoid with semi-axes
    /// a, b, c (a > b). Returns the system and that w.
    pub fn for_ellipsoid(a: f64, b: f64, c: f64) -> Result<(Self, f64)> {
        let p = ConfocalParams::new(a, b, c)?;
        let m = math::sqrt(p.a * p.a - p.b * p.b);
        let n = math::sqrt((p.b * p.b + p.c * p.c) * (p.a * p.a - p.b * p.b)) / math::sqrt(p.a * p.a + p.c * p.c);
        let w = libm::acosh(p.a / m);
        Ok((StoParams::new(m, n, -1.0)?, w))
    }

    fn mu(&self) -> f64 {
        self.m * self.m + self.eps * self.n * self.n
    }

    /// The two square-root arguments of Z at (u,v,w).
    pub fn radicands(&self, u: f64, v: f64, w: f64) -> (f64, f64) {
        let (m2, en2) = (self.m * self.m, self.eps * self.n * self.n);
        let (cu, su) = (math::cos(u), math::sin(u));
        let (cv, sv) = (math::cos(v), math::sin(v));
        let (cw, sw) = (math::cosh(w), math::sinh(w));
        let ra = (en2 + m2) * cv * cv + m2 * sv * sv;
        let rc = (en2 * cu * cu - m2 * su * su) * (en2 * cw * cw + m2 * sw * sw) / self.mu();
        (ra, rc)
    }

    /// Admissible when both radicands are positive.
    pub fn admissible(&self, u: f64, v: f64, w: f64) -> bool {
        let (ra, rc) = self.radicands(u, v, w);
        ra > 0.0 && rc > 0.0 && u.is_finite() && v.is_finite() && w.is_finite()
    }

    pub(crate) fn eval<S: Scalar>(&self, p: [S; 3], at: (f64, f64)) -> Result<[S; 3]> {
        let [u, v, w] = p;
        let (m, m2, en2) = (self.m, self.m * self.m, self.eps * self.n * self.n);
        let sq = |x: S| x.sqrt_checked().map_err(|arg| Error::SingularChart { u: at.0, v: at.1, arg });
        let (cu, su) = (u.cos(), u.sin());
        let (cv, sv) = (v.cos(), v.sin());
        let (cw, sw) = (w.cosh(), w.sinh());
        let ra = sq(cv.sq() * (en2 + m2) + sv.sq() * m2)?;
        let rc = sq((cu.sq() * en2 - su.sq() * m2) * (cw.sq() * en2 + sw.sq() * m2) / self.mu())?;
        Ok([cu * cw * ra, su * sv * sw * m, cv * rc])
    }

    pub fn point(&self, u: f64, v: f64, w: f64) -> Result<Vec3M> {
        if !self.admissible(u, v, w) {
            return Err(Error::OutsideSystem { u, v, w });
        }
        Ok(Vec3M::from_array(self.eval([u, v, w], (u, v))?))
    }

    /// Residuals of the three quadric families through Z(u,v,w):
    /// `[fixed w, fixed v, fixed u]`. With μ = m² + εn²:
    ///
    /// * x²/(m²cosh²w) + y²/(m²sinh²w) − z²μ/(m²(εn²cosh²w + m²sinh²w)) = 1
    /// * x²μ/(m²(m² + εn²cos²v)) − y²μ/(εm²n²sin²v) − z²μ/(εm²n²cos²v) = 1
    /// * x²/(m²cos²u) − y²/(m²sin²u) + z²μ/(m²(m²sin²u − εn²cos²u)) = 1
    pub fn quadric_residuals(&self, u: f64, v: f64, w: f64) -> Result<[f64; 3]> {
        let p = self.point(u, v, w)?;
        let (m2, en2, mu) = (self.m * self.m, self.eps * self.n * self.n, self.mu());
        let (x2, y2, z2) = (p.x * p.x, p.y * p.y, p.z * p.z);
        let (cu2, su2) = (math::cos(u).powi(2), math::sin(u).powi(2));
        let (cv2, sv2) = (math::cos(v).powi(2), math::sin(v).powi(2));
        let (cw2, sw2) = (math::cosh(w).powi(2), math::sinh(w).powi(2));
        let e1 = x2 / (m2 * cw2) + y2 / (m2 * sw2) - z2 * mu / (m2 * (en2 * cw2 + m2 * sw2)) - 1.0;
        let e2 = x2 * mu / (m2 * (m2 + en2 * cv2)) - y2 * mu / (m2 * en2 * sv2) - z2 * mu / (m2 * en2 * cv2) - 1.0;
        let h1 = x2 / (m2 * cu2) - y2 / (m2 * su2) + z2 * mu / (m2 * (m2 * su2 - en2 * cu2)) - 1.0;
        Ok([e1, e2, h1])
    }
}

/// A triply parametrized system of surfaces X(u,v,w).
#[derive(Debug, Clone, PartialEq)]
pub enum TripleSystemSpec {
    Confocal(ConfocalParams),
    Sto(StoParams),
    /// `base` evaluated at (u + shear·v, v, w). Same surfaces, but the
    /// coordinate curves are no longer curvature lines; a negative control.
    Sheared { base: Box<TripleSystemSpec>, shear: f64 },
}

impl TripleSystemSpec {
    pub(crate) fn eval<S: Scalar>(&self, p: [S; 3], at: (f64, f64)) -> Result<[S; 3]> {
        match self {
            TripleSystemSpec::Confocal(c) => c.eval(p, at),
            TripleSystemSpec::Sto(s) => s.eval(p, at),
            TripleSystemSpec::Sheared { base, shear } => base.eval([p[0] + p[1] * *shear, p[1], p[2]], at),
        }
    }

    pub fn admissible(&self, u: f64, v: f64, w: f64) -> bool {
        match self {
            TripleSystemSpec::Confocal(c) => c.admissible(u, v, w),
            TripleSystemSpec::Sto(s) => s.admissible(u, v, w),
            TripleSystemSpec::Sheared { base, shear } => base.admissible(u + shear * v, v, w),
        }
    }

    pub fn point(&self, u: f64, v: f64, w: f64) -> Result<Vec3M> {
        if !self.admissible(u, v, w) {
            return Err(Error::OutsideSystem { u, v, w });
        }
        Ok(Vec3M::from_array(self.eval([u, v, w], (u, v))?))
    }

    /// [X_u, X_v, X_w] at an admissible point.
    pub fn partials(&self, u: f64, v: f64, w: f64) -> Result<[Vec3M; 3]> {
        if !self.admissible(u, v, w) {
            return Err(Error::OutsideSystem { u, v, w });
        }
        let j1 = self.eval([Jet::var_u(u), Jet::var_v(v), Jet::constant(w)], (u, v))?;
        let j2 = self.eval([Jet::constant(u), Jet::var_u(v), Jet::var_v(w)], (u, v))?;
        let col = |j: &[Jet; 3], f: fn(&Jet) -> f64| Vec3M::new(f(&j[0]), f(&j[1]), f(&j[2]));
        Ok([col(&j1, Jet::d_u), col(&j1, Jet::d_v), col(&j2, Jet::d_v)])
    }

    /// Box that contains the admissible set (sampling rejects the rest).
    pub fn sample_box(&self) -> [(f64, f64); 3] {
        match self {
            TripleSystemSpec::Confocal(c) => c.parameter_box(),
            TripleSystemSpec::Sto(s) => {
                let wmax = if s.eps < 0.0 { libm::atanh(s.n / s.m) } else { 2.0 };
                [(0.0, TAU), (0.0, TAU), (-wmax, wmax)]
            }
            TripleSystemSpec::Sheared { base, .. } => base.sample_box(),
        }
    }

    /// Coordinate surface with `fixed` frozen at `value`; the remaining two
    /// parameters, in order, become the chart coordinates.
    pub fn coordinate_surface(&self, fixed: Axis3, value: f64) -> ChartSpec {
        let bx = self.sample_box();
        let free: Vec<(f64, f64)> = (0..3).filter(|&i| i != fixed.index()).map(|i| bx[i]).collect();
        let periodic = |r: (f64, f64)| matches!(self.base(), TripleSystemSpec::Sto(_)) && r.1 - r.0 == TAU;
        let domain = Domain::new(free[0], free[1]).periodic(periodic(free[0]), periodic(free[1]));
        ChartSpec::triple_surface(self.clone(), fixed, value, domain)
    }

    fn base(&self) -> &TripleSystemSpec {
        match self {
            TripleSystemSpec::Sheared { base, .. } => base.base(),
            s => s,
        }
    }
}

/// Principal chart of the ellipsoid on the chosen cover.
pub fn global_principal_chart(a: f64, b: f64, c: f64, cover: EllipsoidCover) -> Result<ChartSpec> {
    ChartSpec::ellipsoid(a, b, c, cover)
}

/// Six graph charts covering the ellipsoid, in the order x+, x−, y+, y−,
/// z+, z−, each on [−0.98, 0.98]².
pub fn ellipsoid_atlas(a: f64, b: f64, c: f64) -> Result<Vec<ChartSpec>> {
    let mut out = Vec::with_capacity(6);
    for axis in Axis3::ALL {
        for sign in [1.0, -1.0] {
            out.push(ChartSpec::ellipsoid_graph(a, b, c, axis, sign, 0.98)?);
        }
    }
    Ok(out)
}

/// Closed-form curvature-line equation on the graph chart
/// (a u, b v, c√(1−u²−v²)):
///
/// −uv(a²+c²) du² + (u²(a²+c²) − v²(b²+c²) − a² + b²) du dv + uv(b²+c²) dv² = 0.
pub fn graph_chart_equation(a: f64, b: f64, c: f64) -> Result<PolynomialBde> {
    let p = ConfocalParams::new(a, b, c)?;
    let (a2, b2, c2) = (p.a * p.a, p.b * p.b, p.c * p.c);
    let m = |i, j, coef| Monomial { i, j, coef };
    let chart = ChartSpec::ellipsoid_graph(a, b, c, Axis3::Z, 1.0, 0.98)?;
    Ok(PolynomialBde {
        l: vec![m(1, 1, b2 + c2)],
        m: vec![m(2, 0, a2 + c2), m(0, 2, -(b2 + c2)), m(0, 0, b2 - a2)],
        n: vec![m(1, 1, -(a2 + c2))],
        domain: chart.domain,
        unit_disk: true,
        embedding: Some(chart),
    })
}

/// The planar equation −xy dx² + (x² − y² − λ²) dx dy + xy dy² = 0 and its
/// solution families.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConfocalConics {
    pub lambda2: f64,
}

impl ConfocalConics {
    pub fn new(lambda2: f64) -> Result<Self> {
        if lambda2 > 0.0 {
            Ok(ConfocalConics { lambda2 })
        } else {
            Err(bad("lambda^2 must be positive"))
        }
    }

    /// λ² = (a² − b²)/(b² + c²) for the ellipsoid with semi-axes a, b, c.
    pub fn for_ellipsoid(a: f64, b: f64, c: f64) -> Result<Self> {
        let p = ConfocalParams::new(a, b, c)?;
        Self::new((p.a * p.a - p.b * p.b) / (p.b * p.b + p.c * p.c))
    }

    /// The equation as a field on the square [−r, r]².
    pub fn bde(&self, r: f64) -> PolynomialBde {
        let m = |i, j, coef| Monomial { i, j, coef };
        PolynomialBde {
            l: vec![m(1, 1, 1.0)],
            m: vec![m(2, 0, 1.0), m(0, 2, -1.0), m(0, 0, -self.lambda2)],
            n: vec![m(1, 1, -1.0)],
            domain: Domain::new((-r, r), (-r, r)),
            unit_disk: false,
            embedding: None,
        }
    }

    /// Left-hand side at (x,y) in direction (dx,dy), divided by the size of
    /// its coefficients.
    pub fn residual(&self, (x, y): (f64, f64), (dx, dy): (f64, f64)) -> f64 {
        let (l, m, n) = (x * y, x * x - y * y - self.lambda2, -x * y);
        let s = math::abs(l).max(math::abs(m)).max(math::abs(n)).max(1e-300);
        (l * dy * dy + m * dx * dy + n * dx * dx) / (s * (dx * dx + dy * dy))
    }

    /// Point and tangent of the ellipse (R cos t, r sin t), R² = r² + λ².
    pub fn ellipse(&self, r: f64, t: f64) -> ((f64, f64), (f64, f64)) {
        let big = math::sqrt(r * r + self.lambda2);
        ((big * math::cos(t), r * math::sin(t)), (-big * math::sin(t), r * math::cos(t)))
    }

    /// Point and tangent of the hyperbola (R cosh t, r sinh t), R² + r² = λ²,
    /// 0 < r < λ.
    pub fn hyperbola(&self, r: f64, t: f64) -> ((f64, f64), (f64, f64)) {
        let big = math::sqrt(self.lambda2 - r * r);
        ((big * math::cosh(t), r * math::sinh(t)), (big * math::sinh(t), r * math::cosh(t)))
    }

    /// Value of r² for the ellipse of the family through (x,y), y ≠ 0 or
    /// |x| > λ. Constant along ellipse leaves.
    pub fn ellipse_label(&self, x: f64, y: f64) -> f64 {
        // x²/(r²+λ²) + y²/r² = 1  ⇒  r⁴ + (λ² − x² − y²) r² − λ² y² = 0
        let bq = self.lambda2 - x * x - y * y;
        0.5 * (-bq + math::sqrt(bq * bq + 4.0 * self.lambda2 * y * y))
    }
}

/// E(x,y,z) = ax² + by² + cz² + 2dxy + 2exz + 2fyz + gx + hy + kz + l.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct GeneralQuadric {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
    pub e: f64,
    pub f: f64,
    pub g: f64,
    pub h: f64,
    pub k: f64,
    pub l: f64,
}

/// Output of [`GeneralQuadric::canonicalize`]: E(h(p)) = ρ(λ₁p₁² + λ₂p₂² + λ₃p₃² − 1).
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CanonicalForm {
    pub isometry: Isometry21,
    pub lambdas: [f64; 3],
    pub rho: f64,
    /// Roots of det(A − xη) = 0, spacelike ones first.
    pub pencil_roots: [f64; 3],
    /// Minkowski-unit eigenvectors, the timelike one last.
    pub eigenvectors: [Vec3M; 3],
}

impl GeneralQuadric {
    /// Σ λᵢ pᵢ² − 1.
    pub fn diagonal(l: [f64; 3]) -> Self {
        GeneralQuadric { a: l[0], b: l[1], c: l[2], d: 0.0, e: 0.0, f: 0.0, g: 0.0, h: 0.0, k: 0.0, l: -1.0 }
    }

    pub fn from_parts(q: Mat3, lin: Vec3M, l: f64) -> Self {
        let m = q.0;
        GeneralQuadric {
            a: m[0][0],
            b: m[1][1],
            c: m[2][2],
            d: 0.5 * (m[0][1] + m[1][0]),
            e: 0.5 * (m[0][2] + m[2][0]),
            f: 0.5 * (m[1][2] + m[2][1]),
            g: lin.x,
            h: lin.y,
            k: lin.z,
            l,
        }
    }

    pub fn matrix(&self) -> Mat3 {
        Mat3([[self.a, self.d, self.e], [self.d, self.b, self.f], [self.e, self.f, self.c]])
    }

    fn linear_part(&self) -> Vec3M {
        Vec3M::new(self.g, self.h, self.k)
    }

    pub fn eval(&self, p: Vec3M) -> f64 {
        let q = self.matrix().apply(p);
        p.euclid_dot(q) + self.linear_part().euclid_dot(p) + self.l
    }

    /// Coefficients of p ↦ E(t(p)).
    pub fn transformed(&self, t: &Isometry21) -> GeneralQuadric {
        let (l, s) = (t.linear, t.translation);
        let a = self.matrix();
        let q = l.transpose() * a * l;
        let lin = l.transpose().apply(a.apply(s) * 2.0 + self.linear_part());
        GeneralQuadric::from_parts(q, lin, self.eval(s))
    }

    /// The three chains of leading principal minors, one per ordering of the
    /// variables that starts the chain at a different diagonal entry.
    pub fn minor_chains(&self) -> [[f64; 3]; 3] {
        let det = self.matrix().det();
        [
            [self.a, self.a * self.b - self.d * self.d, det],
            [self.b, self.b * self.c - self.f * self.f, det],
            [self.c, self.c * self.a - self.e * self.e, det],
        ]
    }

    pub fn is_positive_definite(&self) -> bool {
        self.minor_chains().iter().any(|ch| ch.iter().all(|&m| m > 0.0))
    }

    /// Reduces an ellipsoid to λ₁u² + λ₂v² + λ₃w² = 1 by an isometry built
    /// from two boosts, a rotation about the timelike axis and a translation.
    pub fn canonicalize(&self) -> Result<CanonicalForm> {
        if !self.is_positive_definite() {
            return Err(Error::NotPositiveDefinite);
        }
        let a = self.matrix();
        let m = Mat3::ETA * a;
        let roots = sym_pencil_roots(&m).ok_or(Error::NoTimelikeEigenvector)?;
        let mut vecs = [Vec3M::ZERO; 3];
        for (i, &x) in roots.iter().enumerate() {
            vecs[i] = null_vector(&m, x);
        }
        let ti = (0..3)
            .filter(|&i| vecs[i].square() < -1e-12 * vecs[i].euclid_dot(vecs[i]))
            .min_by(|&i, &j| roots[i].total_cmp(&roots[j]))
            .ok_or(Error::NoTimelikeEigenvector)?;
        let mut e3 = vecs[ti] / math::sqrt(-vecs[ti].square());
        if e3.z < 0.0 {
            e3 = -e3;
        }
        let alpha = math::asinh(e3.x);
        let beta = math::asinh(e3.y / math::cosh(alpha));
        let h1 = boost_t(beta) * boost_s(alpha);
        let bm = (h1.transpose() * a * h1).0;
        let (b11, b22, b12) = (bm[0][0], bm[1][1], bm[0][1]);
        let theta = if math::abs(b12) <= 1e-15 * (math::abs(b11) + math::abs(b22)) {
            0.0
        } else if b11 == b22 {
            core::f64::consts::FRAC_PI_4 * math::signum(b12)
        } else {
            0.5 * math::atan(2.0 * b12 / (b11 - b22))
        };
        let lin = h1 * rotation_r(-theta);
        let x0 = solve3(&a, self.linear_part() * -0.5).ok_or(Error::NotPositiveDefinite)?;
        let rho = -self.eval(x0);
        if !(rho > 0.0) {
            return Err(Error::EmptyQuadric);
        }
        let dmat = (lin.transpose() * a * lin).0;
        let lambdas = [dmat[0][0] / rho, dmat[1][1] / rho, dmat[2][2] / rho];
        let mut order: Vec<usize> = (0..3).filter(|&i| i != ti).collect();
        order.push(ti);
        let unit = |v: Vec3M| v / v.norm();
        Ok(CanonicalForm {
            isometry: Isometry21 { linear: lin, translation: x0 },
            lambdas,
            rho,
            pencil_roots: [roots[order[0]], roots[order[1]], roots[order[2]]],
            eigenvectors: [unit(vecs[order[0]]), unit(vecs[order[1]]), e3],
        })
    }
}

/// Real eigenvalues of a 3×3 matrix from its characteristic cubic
/// (trigonometric Cardano, one Newton step each). `None` if not all real.
fn sym_pencil_roots(m: &Mat3) -> Option<[f64; 3]> {
    let a = &m.0;
    let tr = a[0][0] + a[1][1] + a[2][2];
    let s2 = a[0][0] * a[1][1] - a[0][1] * a[1][0] + a[0][0] * a[2][2] - a[0][2] * a[2][0] + a[1][1] * a[2][2]
        - a[1][2] * a[2][1];
    let det = m.det();
    // x³ + B x² + C x + D
    let (bb, cc, dd) = (-tr, s2, -det);
    let p = cc - bb * bb / 3.0;
    let q = 2.0 * bb * bb * bb / 27.0 - bb * cc / 3.0 + dd;
    let scale = 1.0 + math::abs(bb) + math::sqrt(math::abs(cc)) + math::pow(math::abs(dd), 1.0 / 3.0);
    if p > -1e-14 * scale * scale {
        return None;
    }
    let r = 2.0 * math::sqrt(-p / 3.0);
    let arg = (3.0 * q / (p * r)).clamp(-1.0, 1.0);
    let phi = math::acos(arg) / 3.0;
    let mut roots = [0.0; 3];
    for (k, x) in roots.iter_mut().enumerate() {
        let mut y = r * math::cos(phi - TAU * k as f64 / 3.0) - bb / 3.0;
        let f = ((y + bb) * y + cc) * y + dd;
        let df = (3.0 * y + 2.0 * bb) * y + cc;
        if df != 0.0 {
            y -= f / df;
        }
        *x = y;
    }
    Some(roots)
}

/// Kernel direction of (m − x I) from the best-conditioned pair of rows.
fn null_vector(m: &Mat3, x: f64) -> Vec3M {
    let mut s = m.0;
    for (i, row) in s.iter_mut().enumerate() {
        row[i] -= x;
    }
    let rows = s.map(Vec3M::from_array);
    let cands = [rows[0].euclid_cross(rows[1]), rows[0].euclid_cross(rows[2]), rows[1].euclid_cross(rows[2])];
    let best = cands.iter().copied().max_by(|p, q| p.euclid_norm().total_cmp(&q.euclid_norm())).unwrap();
    best / best.euclid_norm()
}

fn solve3(a: &Mat3, rhs: Vec3M) -> Option<Vec3M> {
    let det = a.det();
    if det == 0.0 || !det.is_finite() {
        return None;
    }
    let c = [a.col(0), a.col(1), a.col(2)];
    let x = crate::minkowski::det3(rhs, c[1], c[2]) / det;
    let y = crate::minkowski::det3(c[0], rhs, c[2]) / det;
    let z = crate::minkowski::det3(c[0], c[1], rhs) / det;
    Some(Vec3M::new(x, y, z))
}

/// Printable summary of a triple system's parameters, used in reports.
pub fn describe(sys: &TripleSystemSpec) -> alloc::string::String {
    match sys {
        TripleSystemSpec::Confocal(p) => format!("confocal a={} b={} c={}", p.a, p.b, p.c),
        TripleSystemSpec::Sto(p) => format!("sto m={} n={} eps={}", p.m, p.n, p.eps),
        TripleSystemSpec::Sheared { base, shear } => format!("{} sheared by {}", describe(base), shear),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::minkowski::rotations;

    #[test]
    fn confocal_point_on_three_quadrics() {
        let p = ConfocalParams::new(2.0, 1.5, 2.2).unwrap();
        let (u, v, w) = (0.5, 3.0, -1.0);
        let x = p.point(u, v, w).unwrap();
        for r in p.family_residuals(x, [u, v, w]) {
            assert!(math::abs(r) < 1e-12);
        }
        assert!(p.point(0.5, 3.0, 0.5).is_err());
        assert!(p.point(5.0, 3.0, 0.1).is_err());
    }

    #[test]
    fn separable_parameters_give_the_ellipsoid() {
        let (s, w) = StoParams::for_ellipsoid(2.0, 1.5, 2.2).unwrap();
        for &(u, v) in &[(0.3, 0.4), (2.0, 5.0), (4.0, 1.0)] {
            let p = s.point(u, v, w).unwrap();
            let r = p.x * p.x / 4.0 + p.y * p.y / 2.25 + p.z * p.z / 4.84 - 1.0;
            assert!(math::abs(r) < 1e-13);
        }
    }

    #[test]
    fn diagonal_quadric_is_fixed() {
        let q = GeneralQuadric::diagonal([0.25, 1.0 / 2.25, 1.0 / 4.84]);
        let cf = q.canonicalize().unwrap();
        assert!(cf.isometry.linear.max_abs_diff(&Mat3::IDENTITY) < 1e-15);
        assert!(cf.isometry.translation.max_abs() < 1e-15);
        assert!(math::abs(cf.lambdas[0] - 0.25) < 1e-15);
        assert!(math::abs(cf.lambdas[2] - 1.0 / 4.84) < 1e-15);
    }

    #[test]
    fn moved_quadric_recovers_spectrum() {
        let lam = [0.25, 1.0 / 2.25, 1.0 / 4.84];
        let g = rotations(0.7, 0.3, 0.0);
        let g = Isometry21 { linear: g.linear, translation: Vec3M::new(0.3, -1.0, 0.5) };
        let q = GeneralQuadric::diagonal(lam).transformed(&g.inverse());
        let cf = q.canonicalize().unwrap();
        let mut got = cf.lambdas;
        got.sort_by(f64::total_cmp);
        let mut want = lam;
        want.sort_by(f64::total_cmp);
        for i in 0..3 {
            assert!(math::abs(got[i] - want[i]) < 1e-12, "{got:?}");
        }
        assert!(cf.isometry.metric_defect() < 1e-12);
    }

    #[test]
    fn indefinite_is_rejected() {
        let q = GeneralQuadric::diagonal([1.0, 1.0, -1.0]);
        assert_eq!(q.canonicalize(), Err(Error::NotPositiveDefinite));
        let empty = GeneralQuadric { l: 1.0, ..GeneralQuadric::diagonal([1.0, 1.0, 1.0]) };
        assert_eq!(empty.canonicalize(), Err(Error::EmptyQuadric));
    }

    #[test]
    fn conic_families_solve_the_equation() {
        let cc = ConfocalConics::new(0.7).unwrap();
        for k in 0..40 {
            let t = -2.0 + 0.1 * k as f64;
            let (p, d) = cc.ellipse(1.0, t);
            assert!(math::abs(cc.residual(p, d)) < 1e-12);
            let (p, d) = cc.hyperbola(0.5, t);
            assert!(math::abs(cc.residual(p, d)) < 1e-12);
            assert!(math::abs(cc.ellipse_label(cc.ellipse(0.8, t).0 .0, cc.ellipse(0.8, t).0 .1) - 0.64) < 1e-12);
        }
        // the coordinate axes
        assert_eq!(cc.residual((0.4, 0.0), (1.0, 0.0)), 0.0);
        assert_eq!(cc.residual((0.0, 0.4), (0.0, 1.0)), 0.0);
    }
}
