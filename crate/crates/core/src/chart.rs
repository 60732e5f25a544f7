//! Parametrized surfaces and their second-order jets.

use alloc::boxed::Box;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::jet::{Jet, Scalar};
use crate::math;
use crate::minkowski::Vec3M;
use crate::quadrics::{Axis3, TripleSystemSpec};

const TAU: f64 = core::f64::consts::TAU;
const PI: f64 = core::f64::consts::PI;

/// Parameter rectangle with per-axis periodicity.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Domain {
    pub u: (f64, f64),
    pub v: (f64, f64),
    pub periodic_u: bool,
    pub periodic_v: bool,
}

impl Domain {
    pub fn new(u: (f64, f64), v: (f64, f64)) -> Self {
        Domain { u, v, periodic_u: false, periodic_v: false }
    }

    pub fn periodic(mut self, pu: bool, pv: bool) -> Self {
        self.periodic_u = pu;
        self.periodic_v = pv;
        self
    }

    pub fn width(&self) -> (f64, f64) {
        (self.u.1 - self.u.0, self.v.1 - self.v.0)
    }

    pub fn diameter(&self) -> f64 {
        let (w, h) = self.width();
        math::hypot(w, h)
    }

    /// Period of each axis, `None` on non-periodic axes.
    pub fn periods(&self) -> (Option<f64>, Option<f64>) {
        let (w, h) = self.width();
        (self.periodic_u.then_some(w), self.periodic_v.then_some(h))
    }

    pub fn contains(&self, u: f64, v: f64) -> bool {
        let slack = 1e-12 * (1.0 + self.diameter());
        let ok_u = self.periodic_u || (u >= self.u.0 - slack && u <= self.u.1 + slack);
        let ok_v = self.periodic_v || (v >= self.v.0 - slack && v <= self.v.1 + slack);
        ok_u && ok_v && u.is_finite() && v.is_finite()
    }

    /// Maps periodic coordinates into the base rectangle.
    pub fn wrap(&self, u: f64, v: f64) -> (f64, f64) {
        let wrap1 = |x: f64, (a, b): (f64, f64)| {
            let p = b - a;
            let t = x - a;
            a + (t - p * math::floor(t / p))
        };
        let u = if self.periodic_u { wrap1(u, self.u) } else { u };
        let v = if self.periodic_v { wrap1(v, self.v) } else { v };
        (u, v)
    }

    /// Parameter-space distance with periodic identification.
    pub fn distance(&self, a: (f64, f64), b: (f64, f64)) -> f64 {
        let (pu, pv) = self.periods();
        let fold = |d: f64, p: Option<f64>| match p {
            Some(p) => d - p * math::round(d / p),
            None => d,
        };
        math::hypot(fold(a.0 - b.0, pu), fold(a.1 - b.1, pv))
    }
}

/// Which double-cover sheet of the ellipsoid principal chart is used.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum EllipsoidCover {
    /// [0,π]×[0,2π], v periodic.
    U1,
    /// [0,2π]×[0,π], u periodic.
    U2,
    /// [0,2π]², both periodic. Covers the ellipsoid twice, since
    /// X(−u,v) = X(u,−v); every leaf of the chart is closed here.
    Torus,
}

/// One term `coef·u^i·v^j` of a polynomial height function.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Monomial {
    pub i: u32,
    pub j: u32,
    pub coef: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ChartKind {
    /// (u, v, 0)
    Plane,
    /// (u, v, h(u,v)) with polynomial h.
    Graph { terms: Vec<Monomial> },
    /// Global principal chart (a cos u A(v), b sin u sin v, c B(u) cos v).
    Ellipsoid { a: f64, b: f64, c: f64 },
    /// Ellipsoid with a = b: (a sin v cos u, a sin v sin u, c cos v).
    Revolution { a: f64, c: f64 },
    /// Ellipsoid as a graph over the coordinate plane orthogonal to `axis`,
    /// `sign` picking the half. With axis z this is (a u, b v, ±c√(1−u²−v²)).
    EllipsoidGraph { a: f64, b: f64, c: f64, axis: Axis3, sign: f64 },
    /// Coordinate surface of a triple system with one parameter frozen.
    TripleSurface { system: TripleSystemSpec, fixed: Axis3, value: f64 },
    /// Image of `base` under the inversion centred at `q`.
    Inverted { base: Box<ChartKind>, q: Vec3M },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChartSpec {
    pub kind: ChartKind,
    pub domain: Domain,
}

/// Position and all first and second partials at one parameter point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SurfaceJet2 {
    pub x: Vec3M,
    pub xu: Vec3M,
    pub xv: Vec3M,
    pub xuu: Vec3M,
    pub xuv: Vec3M,
    pub xvv: Vec3M,
    pub at: (f64, f64),
}

fn param(msg: &str) -> Error {
    Error::Param(alloc::string::String::from(msg))
}

impl ChartSpec {
    pub fn plane(domain: Domain) -> Self {
        ChartSpec { kind: ChartKind::Plane, domain }
    }

    pub fn graph(terms: Vec<Monomial>, domain: Domain) -> Self {
        ChartSpec { kind: ChartKind::Graph { terms }, domain }
    }

    /// Principal chart of x²/a² + y²/b² + z²/c² = 1, needs a > b > 0, c > 0.
    pub fn ellipsoid(a: f64, b: f64, c: f64, cover: EllipsoidCover) -> Result<Self> {
        if !(a > b && b > 0.0 && c > 0.0) {
            return Err(param("ellipsoid chart needs a > b > 0 and c > 0"));
        }
        let domain = match cover {
            EllipsoidCover::U1 => Domain::new((0.0, PI), (0.0, TAU)).periodic(false, true),
            EllipsoidCover::U2 => Domain::new((0.0, TAU), (0.0, PI)).periodic(true, false),
            EllipsoidCover::Torus => Domain::new((0.0, TAU), (0.0, TAU)).periodic(true, true),
        };
        Ok(ChartSpec { kind: ChartKind::Ellipsoid { a, b, c }, domain })
    }

    /// Revolution ellipsoid about the z axis; u is the azimuth, v the polar
    /// angle. The poles v = 0, π are chart singularities.
    pub fn revolution(a: f64, c: f64) -> Result<Self> {
        if !(a > 0.0 && c > 0.0) {
            return Err(param("revolution chart needs a > 0 and c > 0"));
        }
        let domain = Domain::new((0.0, TAU), (0.0, PI)).periodic(true, false);
        Ok(ChartSpec { kind: ChartKind::Revolution { a, c }, domain })
    }

    /// Graph chart of the ellipsoid over the plane orthogonal to `axis` on
    /// the square [−r, r]².
    pub fn ellipsoid_graph(a: f64, b: f64, c: f64, axis: Axis3, sign: f64, r: f64) -> Result<Self> {
        if !(a > 0.0 && b > 0.0 && c > 0.0) || !(r > 0.0 && r < 1.0) {
            return Err(param("ellipsoid graph chart needs positive semi-axes and 0 < r < 1"));
        }
        let sign = if sign < 0.0 { -1.0 } else { 1.0 };
        Ok(ChartSpec {
            kind: ChartKind::EllipsoidGraph { a, b, c, axis, sign },
            domain: Domain::new((-r, r), (-r, r)),
        })
    }

    pub fn triple_surface(system: TripleSystemSpec, fixed: Axis3, value: f64, domain: Domain) -> Self {
        ChartSpec { kind: ChartKind::TripleSurface { system, fixed, value }, domain }
    }

    /// Chart of the inverted surface I_q(S) over the same parameter domain.
    pub fn inverted(&self, q: Vec3M) -> Self {
        ChartSpec { kind: ChartKind::Inverted { base: Box::new(self.kind.clone()), q }, domain: self.domain }
    }

    fn check_domain(&self, u: f64, v: f64) -> Result<()> {
        if self.domain.contains(u, v) {
            Ok(())
        } else {
            Err(Error::Domain { u, v })
        }
    }

    /// Position only, evaluated in plain floating point.
    pub fn point(&self, u: f64, v: f64) -> Result<Vec3M> {
        self.check_domain(u, v)?;
        let p = eval_kind(&self.kind, u, v, (u, v))?;
        Ok(Vec3M::from_array(p))
    }

    /// Third-order Taylor expansion of the three coordinates at (u,v).
    pub fn taylor(&self, u: f64, v: f64) -> Result<[Jet; 3]> {
        self.check_domain(u, v)?;
        let p = eval_kind(&self.kind, Jet::var_u(u), Jet::var_v(v), (u, v))?;
        if p.iter().all(|j| j.is_finite()) {
            Ok(p)
        } else {
            Err(Error::SingularChart { u, v, arg: 0.0 })
        }
    }

    /// True where the chart fails to be an immersion (or fails to evaluate).
    pub fn is_singular(&self, u: f64, v: f64) -> bool {
        match eval_jet(self, u, v) {
            Ok(j) => {
                let n = j.xu.euclid_cross(j.xv).euclid_norm();
                n <= 1e-8 * j.xu.euclid_norm() * j.xv.euclid_norm() || n == 0.0
            }
            Err(_) => true,
        }
    }

    /// The curves u ≡ 0 and u ≡ π of the ellipsoid principal chart, where the
    /// chart folds onto itself. Always false for other charts.
    pub fn is_seam(&self, u: f64, _v: f64) -> bool {
        match self.kind {
            ChartKind::Ellipsoid { .. } => {
                let r = u - PI * math::round(u / PI);
                math::abs(r) < 1e-12
            }
            _ => false,
        }
    }
}

fn sqrt_at<S: Scalar>(x: S, at: (f64, f64)) -> Result<S> {
    x.sqrt_checked().map_err(|arg| Error::SingularChart { u: at.0, v: at.1, arg })
}

pub(crate) fn eval_kind<S: Scalar>(kind: &ChartKind, u: S, v: S, at: (f64, f64)) -> Result<[S; 3]> {
    match kind {
        ChartKind::Plane => Ok([u, v, S::cst(0.0)]),
        ChartKind::Graph { terms } => {
            let mut h = S::cst(0.0);
            for t in terms {
                h = h + u.powi(t.i) * v.powi(t.j) * t.coef;
            }
            Ok([u, v, h])
        }
        ChartKind::Ellipsoid { a, b, c } => {
            let (a, b, c) = (*a, *b, *c);
            let k = a * a + c * c;
            let a1 = (a * a - b * b) / k;
            let b1 = (b * b + c * c) / k;
            let (cu, su) = (u.cos(), u.sin());
            let (cv, sv) = (v.cos(), v.sin());
            let av = sqrt_at(cv.sq() * a1 + sv.sq(), at)?;
            let bu = sqrt_at(cu.sq() * b1 + su.sq(), at)?;
            Ok([cu * av * a, su * sv * b, bu * cv * c])
        }
        ChartKind::Revolution { a, c } => {
            let sv = v.sin();
            Ok([sv * u.cos() * *a, sv * u.sin() * *a, v.cos() * *c])
        }
        ChartKind::EllipsoidGraph { a, b, c, axis, sign } => {
            let r = sqrt_at(-(u.sq() + v.sq()) + 1.0, at)? * *sign;
            Ok(match axis {
                Axis3::X => [r * *a, u * *b, v * *c],
                Axis3::Y => [u * *a, r * *b, v * *c],
                Axis3::Z => [u * *a, v * *b, r * *c],
            })
        }
        ChartKind::TripleSurface { system, fixed, value } => {
            let w = S::cst(*value);
            let p = match fixed {
                Axis3::X => [w, u, v],
                Axis3::Y => [u, w, v],
                Axis3::Z => [u, v, w],
            };
            system.eval(p, at)
        }
        ChartKind::Inverted { base, q } => {
            let x = eval_kind(base.as_ref(), u, v, at)?;
            let d = [x[0] - q.x, x[1] - q.y, x[2] - q.z];
            let m = d[0].sq() + d[1].sq() - d[2].sq();
            let e = d[0].val().powi(2) + d[1].val().powi(2) + d[2].val().powi(2);
            if math::abs(m.val()) <= crate::transforms::LIGHTCONE_BAND * e {
                return Err(Error::Lightcone);
            }
            Ok([d[0] / m, d[1] / m, d[2] / m])
        }
    }
}

/// Exact (to rounding) 2-jet of the chart at (u,v) from Taylor arithmetic.
pub fn eval_jet(chart: &ChartSpec, u: f64, v: f64) -> Result<SurfaceJet2> {
    let t = chart.taylor(u, v)?;
    let pick = |f: fn(&Jet) -> f64| Vec3M::new(f(&t[0]), f(&t[1]), f(&t[2]));
    Ok(SurfaceJet2 {
        x: pick(Jet::value),
        xu: pick(Jet::d_u),
        xv: pick(Jet::d_v),
        xuu: pick(Jet::d_uu),
        xuv: pick(Jet::d_uv),
        xvv: pick(Jet::d_vv),
        at: (u, v),
    })
}

/// Default finite-difference step at (u,v).
pub fn default_fd_step(u: f64, v: f64) -> f64 {
    1e-5 * 1f64.max(math::abs(u)).max(math::abs(v))
}

/// Central-difference estimate of the 2-jet; an independent check on
/// [`eval_jet`].
pub fn finite_difference_jet(chart: &ChartSpec, u: f64, v: f64, h: f64) -> Result<SurfaceJet2> {
    let d = &chart.domain;
    let m = 2.0 * h;
    let inside_u = d.periodic_u || (u - m >= d.u.0 && u + m <= d.u.1);
    let inside_v = d.periodic_v || (v - m >= d.v.0 && v + m <= d.v.1);
    if !(inside_u && inside_v) {
        return Err(Error::Domain { u, v });
    }
    let p = |du: f64, dv: f64| chart.point(u + du, v + dv);
    let x = p(0.0, 0.0)?;
    let (xp, xm) = (p(h, 0.0)?, p(-h, 0.0)?);
    let (yp, ym) = (p(0.0, h)?, p(0.0, -h)?);
    let (pp, pm, mp, mm) = (p(h, h)?, p(h, -h)?, p(-h, h)?, p(-h, -h)?);
    Ok(SurfaceJet2 {
        x,
        xu: (xp - xm) / (2.0 * h),
        xv: (yp - ym) / (2.0 * h),
        xuu: (xp - x * 2.0 + xm) / (h * h),
        xuv: (pp - pm - mp + mm) / (4.0 * h * h),
        xvv: (yp - x * 2.0 + ym) / (h * h),
        at: (u, v),
    })
}
