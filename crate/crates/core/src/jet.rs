//! Truncated bivariate Taylor arithmetic.
//!
//! A [`Jet`] holds the Taylor coefficients of a function of (u,v) up to
//! total degree 3 around a base point, in the order
//! `[1, u, v, u², uv, v², u³, u²v, uv², v³]`. Chart formulas are written once,
//! generically over [`Scalar`], and evaluated either on plain `f64` or on
//! jets. Third order is carried so that the curvature-line coefficients,
//! which involve second derivatives of the chart, come out with exact first
//! partials.

use core::ops::{Add, Div, Mul, Neg, Sub};

use crate::math;

/// Arguments of √ below this (absolute) threshold are rejected, arguments
/// in `[-SQRT_CLAMP, 0]` are clamped to zero.
pub const SQRT_CLAMP: f64 = 1e-14;

const DEG: [u8; 10] = [0, 1, 1, 2, 2, 2, 3, 3, 3, 3];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet {
    pub c: [f64; 10],
}

impl Jet {
    pub const fn constant(x: f64) -> Jet {
        Jet { c: [x, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0] }
    }

    /// The coordinate u around the base value `u0`.
    pub const fn var_u(u0: f64) -> Jet {
        let mut c = [0.0; 10];
        c[0] = u0;
        c[1] = 1.0;
        Jet { c }
    }

    pub const fn var_v(v0: f64) -> Jet {
        let mut c = [0.0; 10];
        c[0] = v0;
        c[2] = 1.0;
        Jet { c }
    }

    pub fn value(&self) -> f64 {
        self.c[0]
    }

    /// ∂/∂u at the base point.
    pub fn d_u(&self) -> f64 {
        self.c[1]
    }

    pub fn d_v(&self) -> f64 {
        self.c[2]
    }

    pub fn d_uu(&self) -> f64 {
        2.0 * self.c[3]
    }

    pub fn d_uv(&self) -> f64 {
        self.c[4]
    }

    pub fn d_vv(&self) -> f64 {
        2.0 * self.c[5]
    }

    /// Partial derivative in u as a jet. The result is exact through degree 2
    /// only; its cubic slots are zero.
    pub fn diff_u(&self) -> Jet {
        let c = &self.c;
        Jet { c: [c[1], 2.0 * c[3], c[4], 3.0 * c[6], 2.0 * c[7], c[8], 0.0, 0.0, 0.0, 0.0] }
    }

    pub fn diff_v(&self) -> Jet {
        let c = &self.c;
        Jet { c: [c[2], c[4], 2.0 * c[5], c[7], 2.0 * c[8], 3.0 * c[9], 0.0, 0.0, 0.0, 0.0] }
    }

    pub fn is_finite(&self) -> bool {
        self.c.iter().all(|x| x.is_finite())
    }

    fn is_constant(&self) -> bool {
        self.c[1..].iter().all(|&x| x == 0.0)
    }

    /// f(self) from f and its first three derivatives at the base value.
    fn compose(&self, f: [f64; 4]) -> Jet {
        let mut d = *self;
        d.c[0] = 0.0;
        let d2 = d * d;
        let d3 = d2 * d;
        let mut r = [0.0; 10];
        r[0] = f[0];
        for k in 1..10 {
            r[k] = f[1] * d.c[k] + 0.5 * f[2] * d2.c[k] + f[3] / 6.0 * d3.c[k];
        }
        Jet { c: r }
    }

    pub fn recip(self) -> Jet {
        let x = self.c[0];
        let i = 1.0 / x;
        self.compose([i, -i * i, 2.0 * i * i * i, -6.0 * i * i * i * i])
    }

    /// Drops the degree-3 coefficients, used by tests to compare truncations.
    pub fn truncated(&self, degree: u8) -> Jet {
        let mut r = *self;
        for (k, x) in r.c.iter_mut().enumerate() {
            if DEG[k] > degree {
                *x = 0.0;
            }
        }
        r
    }
}

impl Add for Jet {
    type Output = Jet;
    fn add(self, o: Jet) -> Jet {
        let mut r = self;
        for k in 0..10 {
            r.c[k] += o.c[k];
        }
        r
    }
}
impl Sub for Jet {
    type Output = Jet;
    fn sub(self, o: Jet) -> Jet {
        let mut r = self;
        for k in 0..10 {
            r.c[k] -= o.c[k];
        }
        r
    }
}
impl Neg for Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        let mut r = self;
        for x in r.c.iter_mut() {
            *x = -*x;
        }
        r
    }
}
impl Mul for Jet {
    type Output = Jet;
    fn mul(self, o: Jet) -> Jet {
        let a = &self.c;
        let b = &o.c;
        Jet {
            c: [
                a[0] * b[0],
                a[0] * b[1] + a[1] * b[0],
                a[0] * b[2] + a[2] * b[0],
                a[0] * b[3] + a[1] * b[1] + a[3] * b[0],
                a[0] * b[4] + a[1] * b[2] + a[2] * b[1] + a[4] * b[0],
                a[0] * b[5] + a[2] * b[2] + a[5] * b[0],
                a[0] * b[6] + a[1] * b[3] + a[3] * b[1] + a[6] * b[0],
                a[0] * b[7] + a[1] * b[4] + a[2] * b[3] + a[3] * b[2] + a[4] * b[1] + a[7] * b[0],
                a[0] * b[8] + a[1] * b[5] + a[2] * b[4] + a[4] * b[2] + a[5] * b[1] + a[8] * b[0],
                a[0] * b[9] + a[2] * b[5] + a[5] * b[2] + a[9] * b[0],
            ],
        }
    }
}
impl Div for Jet {
    type Output = Jet;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, o: Jet) -> Jet {
        self * o.recip()
    }
}
impl Add<f64> for Jet {
    type Output = Jet;
    fn add(self, s: f64) -> Jet {
        let mut r = self;
        r.c[0] += s;
        r
    }
}
impl Sub<f64> for Jet {
    type Output = Jet;
    fn sub(self, s: f64) -> Jet {
        let mut r = self;
        r.c[0] -= s;
        r
    }
}
impl Mul<f64> for Jet {
    type Output = Jet;
    fn mul(self, s: f64) -> Jet {
        let mut r = self;
        for x in r.c.iter_mut() {
            *x *= s;
        }
        r
    }
}
impl Div<f64> for Jet {
    type Output = Jet;
    fn div(self, s: f64) -> Jet {
        self * (1.0 / s)
    }
}

/// Number-like type the chart formulas are written against.
pub trait Scalar:
    Copy
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + Add<f64, Output = Self>
    + Sub<f64, Output = Self>
    + Mul<f64, Output = Self>
    + Div<f64, Output = Self>
{
    fn cst(x: f64) -> Self;
    fn val(&self) -> f64;
    fn sin(self) -> Self;
    fn cos(self) -> Self;
    fn sinh(self) -> Self;
    fn cosh(self) -> Self;
    fn acos(self) -> Self;
    /// Square root under the clamping policy. `Err` carries the offending
    /// argument.
    fn sqrt_checked(self) -> core::result::Result<Self, f64>;

    fn sq(self) -> Self {
        self * self
    }

    fn powi(self, n: u32) -> Self {
        let mut r = Self::cst(1.0);
        for _ in 0..n {
            r = r * self;
        }
        r
    }
}

impl Scalar for f64 {
    fn cst(x: f64) -> Self {
        x
    }
    fn val(&self) -> f64 {
        *self
    }
    fn sin(self) -> Self {
        math::sin(self)
    }
    fn cos(self) -> Self {
        math::cos(self)
    }
    fn sinh(self) -> Self {
        math::sinh(self)
    }
    fn cosh(self) -> Self {
        math::cosh(self)
    }
    fn acos(self) -> Self {
        math::acos(self)
    }
    fn sqrt_checked(self) -> core::result::Result<Self, f64> {
        if self > 0.0 {
            Ok(math::sqrt(self))
        } else if self >= -SQRT_CLAMP {
            Ok(0.0)
        } else {
            Err(self)
        }
    }
}

impl Scalar for Jet {
    fn cst(x: f64) -> Self {
        Jet::constant(x)
    }
    fn val(&self) -> f64 {
        self.c[0]
    }
    fn sin(self) -> Self {
        let (s, c) = (math::sin(self.c[0]), math::cos(self.c[0]));
        self.compose([s, c, -s, -c])
    }
    fn cos(self) -> Self {
        let (s, c) = (math::sin(self.c[0]), math::cos(self.c[0]));
        self.compose([c, -s, -c, s])
    }
    fn sinh(self) -> Self {
        let (s, c) = (math::sinh(self.c[0]), math::cosh(self.c[0]));
        self.compose([s, c, s, c])
    }
    fn cosh(self) -> Self {
        let (s, c) = (math::sinh(self.c[0]), math::cosh(self.c[0]));
        self.compose([c, s, c, s])
    }
    fn acos(self) -> Self {
        let x = self.c[0];
        let w = 1.0 - x * x;
        let r = math::sqrt(w);
        self.compose([math::acos(x), -1.0 / r, -x / (w * r), -(1.0 + 2.0 * x * x) / (w * w * r)])
    }
    fn sqrt_checked(self) -> core::result::Result<Self, f64> {
        let x = self.c[0];
        if x > 0.0 {
            let r = math::sqrt(x);
            Ok(self.compose([r, 0.5 / r, -0.25 / (x * r), 0.375 / (x * x * r)]))
        } else if x >= -SQRT_CLAMP && self.is_constant() {
            Ok(Jet::constant(0.0))
        } else {
            Err(x)
        }
    }
}
