//! Fundamental forms, Gauss map sign, curvatures and the coefficients of the
//! curvature-line equation L dv² + M du dv + N du² = 0.
//!
//! The coefficients are built from the unnormalized second-form numerators
//! ê = ⟨X_uu, X_u × X_v⟩ (same for f̂, ĝ):
//!
//! L = F ĝ − G f̂,  M = E ĝ − G ê,  N = E f̂ − F ê.
//!
//! They differ from the normalized ones by the factor ε/W, so the equation
//! is the same off the tropic, and they stay smooth and defined across it.

use crate::chart::{ChartSpec, SurfaceJet2};
use crate::error::{Error, Result};
use crate::jet::{Jet, Scalar};
use crate::math;
use crate::minkowski::Vec3M;

/// Relative tolerance for tropic detection used when none is supplied.
pub const DEFAULT_TROPIC_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum SurfaceClass {
    Riemannian,
    Lorentzian,
    Degenerate,
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Curvatures {
    Real { k1: f64, k2: f64 },
    /// H ± i·im, only possible on the Lorentzian part.
    ComplexPair { re: f64, im: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FundamentalData {
    pub e_big: f64,
    pub f_big: f64,
    pub g_big: f64,
    /// Normalized second form; `None` on the tropic.
    pub second: Option<(f64, f64, f64)>,
    pub eps: f64,
    /// Minkowski norm of X_u × X_v.
    pub w: f64,
    pub det_i: f64,
    pub h: Option<f64>,
    pub k: Option<f64>,
    pub curvatures: Option<Curvatures>,
    pub l1: f64,
    pub m1: f64,
    pub n1: f64,
    /// (ê, f̂, ĝ)
    pub second_raw: (f64, f64, f64),
    pub class: SurfaceClass,
    pub normal_raw: Vec3M,
}

impl FundamentalData {
    /// Size of the coefficients of an umbilic-free point, used to make the
    /// coefficient tests scale-free.
    pub fn coefficient_scale(&self) -> f64 {
        let (e, f, g) = self.second_raw;
        (math::abs(self.e_big) + math::abs(self.f_big) + math::abs(self.g_big))
            * (math::abs(e) + math::abs(f) + math::abs(g))
    }

    /// Unit normal N = ε (X_u × X_v)/W, `None` on the tropic.
    pub fn normal(&self) -> Option<Vec3M> {
        (self.class != SurfaceClass::Degenerate).then(|| self.normal_raw * (self.eps / self.w))
    }
}

fn classify(e: f64, f: f64, g: f64, det: f64, tol: f64) -> SurfaceClass {
    if math::abs(det) <= tol * (e * e + 2.0 * f * f + g * g) {
        SurfaceClass::Degenerate
    } else if det > 0.0 {
        SurfaceClass::Riemannian
    } else {
        SurfaceClass::Lorentzian
    }
}

pub fn fundamental_data(jet: &SurfaceJet2, tol: f64) -> FundamentalData {
    let (xu, xv) = (jet.xu, jet.xv);
    let (e, f, g) = (xu.dot(xu), xu.dot(xv), xv.dot(xv));
    let n = xu.cross(xv);
    let (eh, fh, gh) = (jet.xuu.dot(n), jet.xuv.dot(n), jet.xvv.dot(n));
    let det = e * g - f * f;
    let nn = n.square();
    let w = math::sqrt(math::abs(nn));
    let eps = if nn > 0.0 { 1.0 } else { -1.0 };
    let class = classify(e, f, g, det, tol);
    let (l1, m1, n1) = (f * gh - g * fh, e * gh - g * eh, e * fh - f * eh);
    let mut fd = FundamentalData {
        e_big: e,
        f_big: f,
        g_big: g,
        second: None,
        eps,
        w,
        det_i: det,
        h: None,
        k: None,
        curvatures: None,
        l1,
        m1,
        n1,
        second_raw: (eh, fh, gh),
        class,
        normal_raw: n,
    };
    if class != SurfaceClass::Degenerate {
        let s = eps / w;
        let (e2, f2, g2) = (eh * s, fh * s, gh * s);
        let hh = (e * g2 + g * e2 - 2.0 * f * f2) / (2.0 * det);
        let kk = (e2 * g2 - f2 * f2) / det;
        fd.second = Some((e2, f2, g2));
        fd.h = Some(hh);
        fd.k = Some(kk);
        let disc = hh * hh - kk;
        fd.curvatures = Some(if disc >= -1e-12 * (hh * hh + math::abs(kk)) {
            let r = math::sqrt(disc.max(0.0));
            Curvatures::Real { k1: hh + r, k2: hh - r }
        } else {
            Curvatures::ComplexPair { re: hh, im: math::sqrt(-disc) }
        });
    }
    fd
}

pub fn surface_class(fd: &FundamentalData, tol: f64) -> SurfaceClass {
    classify(fd.e_big, fd.f_big, fd.g_big, fd.det_i, tol)
}

pub fn principal_curvatures(fd: &FundamentalData) -> Result<Curvatures> {
    fd.curvatures.ok_or(Error::Degenerate)
}

/// Fundamental data of a chart at a point.
pub fn fundamental_data_at(chart: &ChartSpec, u: f64, v: f64) -> Result<FundamentalData> {
    Ok(fundamental_data(&crate::chart::eval_jet(chart, u, v)?, DEFAULT_TROPIC_TOL))
}

type V3<S> = [S; 3];

fn mdot<S: Scalar>(a: &V3<S>, b: &V3<S>) -> S {
    a[0] * b[0] + a[1] * b[1] - a[2] * b[2]
}

fn mcross<S: Scalar>(a: &V3<S>, b: &V3<S>) -> V3<S> {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], -(a[0] * b[1] - a[1] * b[0])]
}

/// Metric, raw second form and equation coefficients computed from
/// derivative jets. Used with `Jet` to obtain exact first partials.
pub(crate) struct FormJets<S> {
    pub e: S,
    pub f: S,
    pub g: S,
    pub eh: S,
    pub fh: S,
    pub gh: S,
    pub n: V3<S>,
}

pub(crate) fn form_jets(x: &[Jet; 3]) -> FormJets<Jet> {
    let xu = x.map(|j| j.diff_u());
    let xv = x.map(|j| j.diff_v());
    let xuu = xu.map(|j| j.diff_u());
    let xuv = xu.map(|j| j.diff_v());
    let xvv = xv.map(|j| j.diff_v());
    let n = mcross(&xu, &xv);
    FormJets {
        e: mdot(&xu, &xu),
        f: mdot(&xu, &xv),
        g: mdot(&xv, &xv),
        eh: mdot(&xuu, &n),
        fh: mdot(&xuv, &n),
        gh: mdot(&xvv, &n),
        n,
    }
}

impl<S: Scalar> FormJets<S> {
    pub fn lmn(&self) -> [S; 3] {
        [
            self.f * self.gh - self.g * self.fh,
            self.e * self.gh - self.g * self.eh,
            self.e * self.fh - self.f * self.eh,
        ]
    }
}

/// (L, M, N) at (u,v) with their first partials (jets valid to degree 1).
pub fn bde_coefficient_jets(chart: &ChartSpec, u: f64, v: f64) -> Result<[Jet; 3]> {
    let x = chart.taylor(u, v)?;
    Ok(form_jets(&x).lmn())
}
