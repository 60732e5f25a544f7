//! Metric algebra of ℝ^{2,1}: ⟨u,v⟩ = u₁v₁ + u₂v₂ − u₃v₃.
//!
//! The third coordinate is the timelike one. Matrices are dense 3×3,
//! row-major.

use core::ops::{Add, AddAssign, Div, Mul, Neg, Sub, SubAssign};

use crate::math;

/// Relative tolerance used by [`classify_vector`] when callers have no
/// better idea.
pub const DEFAULT_LIGHTLIKE_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Vec3M {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Vec3M {
    pub const ZERO: Vec3M = Vec3M { x: 0.0, y: 0.0, z: 0.0 };

    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Vec3M { x, y, z }
    }

    pub fn from_array(a: [f64; 3]) -> Self {
        Vec3M::new(a[0], a[1], a[2])
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }

    /// Minkowski inner product.
    pub fn dot(self, o: Vec3M) -> f64 {
        self.x * o.x + self.y * o.y - self.z * o.z
    }

    /// Minkowski square ⟨v,v⟩ (any sign).
    pub fn square(self) -> f64 {
        self.dot(self)
    }

    /// √|⟨v,v⟩|.
    pub fn norm(self) -> f64 {
        math::sqrt(math::abs(self.square()))
    }

    pub fn cross(self, o: Vec3M) -> Vec3M {
        Vec3M::new(
            self.y * o.z - self.z * o.y,
            self.z * o.x - self.x * o.z,
            -(self.x * o.y - self.y * o.x),
        )
    }

    pub fn euclid_dot(self, o: Vec3M) -> f64 {
        self.x * o.x + self.y * o.y + self.z * o.z
    }

    pub fn euclid_norm(self) -> f64 {
        math::sqrt(self.euclid_dot(self))
    }

    pub fn euclid_cross(self, o: Vec3M) -> Vec3M {
        Vec3M::new(
            self.y * o.z - self.z * o.y,
            self.z * o.x - self.x * o.z,
            self.x * o.y - self.y * o.x,
        )
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }

    pub fn max_abs(self) -> f64 {
        math::abs(self.x).max(math::abs(self.y)).max(math::abs(self.z))
    }
}

/// Euclidean determinant of the matrix with columns a, b, c.
pub fn det3(a: Vec3M, b: Vec3M, c: Vec3M) -> f64 {
    a.euclid_dot(b.euclid_cross(c))
}

impl Add for Vec3M {
    type Output = Vec3M;
    fn add(self, o: Vec3M) -> Vec3M {
        Vec3M::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }
}
impl Sub for Vec3M {
    type Output = Vec3M;
    fn sub(self, o: Vec3M) -> Vec3M {
        Vec3M::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }
}
impl AddAssign for Vec3M {
    fn add_assign(&mut self, o: Vec3M) {
        *self = *self + o;
    }
}
impl SubAssign for Vec3M {
    fn sub_assign(&mut self, o: Vec3M) {
        *self = *self - o;
    }
}
impl Mul<f64> for Vec3M {
    type Output = Vec3M;
    fn mul(self, s: f64) -> Vec3M {
        Vec3M::new(self.x * s, self.y * s, self.z * s)
    }
}
impl Mul<Vec3M> for f64 {
    type Output = Vec3M;
    fn mul(self, v: Vec3M) -> Vec3M {
        v * self
    }
}
impl Div<f64> for Vec3M {
    type Output = Vec3M;
    fn div(self, s: f64) -> Vec3M {
        Vec3M::new(self.x / s, self.y / s, self.z / s)
    }
}
impl Neg for Vec3M {
    type Output = Vec3M;
    fn neg(self) -> Vec3M {
        Vec3M::new(-self.x, -self.y, -self.z)
    }
}

pub fn minkowski_dot(u: Vec3M, v: Vec3M) -> f64 {
    u.dot(v)
}

pub fn minkowski_norm(v: Vec3M) -> f64 {
    v.norm()
}

pub fn minkowski_cross(u: Vec3M, v: Vec3M) -> Vec3M {
    u.cross(v)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum CausalCharacter {
    Spacelike,
    Timelike,
    Lightlike,
}

/// The zero vector counts as spacelike.
pub fn classify_vector(v: Vec3M, tol: f64) -> CausalCharacter {
    let e2 = v.euclid_dot(v);
    if e2 == 0.0 {
        return CausalCharacter::Spacelike;
    }
    let q = v.square();
    if math::abs(q) <= tol * e2 {
        CausalCharacter::Lightlike
    } else if q > 0.0 {
        CausalCharacter::Spacelike
    } else {
        CausalCharacter::Timelike
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Mat3(pub [[f64; 3]; 3]);

impl Mat3 {
    pub const IDENTITY: Mat3 = Mat3([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]);
    /// diag(1, 1, −1)
    pub const ETA: Mat3 = Mat3([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, -1.0]]);

    pub fn from_cols(a: Vec3M, b: Vec3M, c: Vec3M) -> Mat3 {
        Mat3([[a.x, b.x, c.x], [a.y, b.y, c.y], [a.z, b.z, c.z]])
    }

    pub fn col(&self, j: usize) -> Vec3M {
        Vec3M::new(self.0[0][j], self.0[1][j], self.0[2][j])
    }

    pub fn transpose(&self) -> Mat3 {
        let m = &self.0;
        let mut t = [[0.0; 3]; 3];
        for (i, row) in t.iter_mut().enumerate() {
            for (j, x) in row.iter_mut().enumerate() {
                *x = m[j][i];
            }
        }
        Mat3(t)
    }

    pub fn apply(&self, v: Vec3M) -> Vec3M {
        let m = &self.0;
        Vec3M::new(
            m[0][0] * v.x + m[0][1] * v.y + m[0][2] * v.z,
            m[1][0] * v.x + m[1][1] * v.y + m[1][2] * v.z,
            m[2][0] * v.x + m[2][1] * v.y + m[2][2] * v.z,
        )
    }

    pub fn det(&self) -> f64 {
        det3(self.col(0), self.col(1), self.col(2))
    }

    /// Largest absolute entry of `self − o`.
    pub fn max_abs_diff(&self, o: &Mat3) -> f64 {
        let mut d: f64 = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                d = d.max(math::abs(self.0[i][j] - o.0[i][j]));
            }
        }
        d
    }
}

impl Mul for Mat3 {
    type Output = Mat3;
    fn mul(self, o: Mat3) -> Mat3 {
        let mut r = [[0.0; 3]; 3];
        for (i, row) in r.iter_mut().enumerate() {
            for (j, x) in row.iter_mut().enumerate() {
                *x = (0..3).map(|k| self.0[i][k] * o.0[k][j]).sum();
            }
        }
        Mat3(r)
    }
}

/// Affine map p ↦ linear·p + translation with an SO(2,1)-type linear part.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Isometry21 {
    pub linear: Mat3,
    pub translation: Vec3M,
}

impl Isometry21 {
    pub const IDENTITY: Isometry21 = Isometry21 { linear: Mat3::IDENTITY, translation: Vec3M::ZERO };

    pub fn linear(m: Mat3) -> Self {
        Isometry21 { linear: m, translation: Vec3M::ZERO }
    }

    pub fn apply(&self, p: Vec3M) -> Vec3M {
        self.linear.apply(p) + self.translation
    }

    /// `self ∘ other`
    pub fn compose(&self, other: &Isometry21) -> Isometry21 {
        Isometry21 {
            linear: self.linear * other.linear,
            translation: self.linear.apply(other.translation) + self.translation,
        }
    }

    /// Inverse, using L⁻¹ = η Lᵀ η.
    pub fn inverse(&self) -> Isometry21 {
        let inv = Mat3::ETA * self.linear.transpose() * Mat3::ETA;
        Isometry21 { linear: inv, translation: -inv.apply(self.translation) }
    }

    /// ‖Lᵀ η L − η‖∞
    pub fn metric_defect(&self) -> f64 {
        let l = self.linear;
        (l.transpose() * Mat3::ETA * l).max_abs_diff(&Mat3::ETA)
    }
}

/// Euclidean rotation about the timelike axis.
pub fn rotation_r(theta: f64) -> Mat3 {
    let (s, c) = (math::sin(theta), math::cos(theta));
    Mat3([[c, s, 0.0], [-s, c, 0.0], [0.0, 0.0, 1.0]])
}

/// Boost in the x–z plane; sends (0,0,1) to (sinh α, 0, cosh α).
pub fn boost_s(alpha: f64) -> Mat3 {
    let (sh, ch) = (math::sinh(alpha), math::cosh(alpha));
    Mat3([[ch, 0.0, sh], [0.0, 1.0, 0.0], [sh, 0.0, ch]])
}

/// Boost in the y–z plane.
pub fn boost_t(beta: f64) -> Mat3 {
    let (sh, ch) = (math::sinh(beta), math::cosh(beta));
    Mat3([[1.0, 0.0, 0.0], [0.0, ch, sh], [0.0, sh, ch]])
}

/// R(θ)·S(α)·T(β) as a linear isometry.
pub fn rotations(theta: f64, alpha: f64, beta: f64) -> Isometry21 {
    Isometry21::linear(rotation_r(theta) * boost_s(alpha) * boost_t(beta))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn basis_products() {
        let e1 = Vec3M::new(1.0, 0.0, 0.0);
        let e2 = Vec3M::new(0.0, 1.0, 0.0);
        let e3 = Vec3M::new(0.0, 0.0, 1.0);
        assert_eq!(e1.dot(e1), 1.0);
        assert_eq!(e3.dot(e3), -1.0);
        assert_eq!(Vec3M::new(1.0, 0.0, 1.0).square(), 0.0);
        assert_eq!(e1.cross(e2), Vec3M::new(0.0, 0.0, -1.0));
        assert_eq!(e1.cross(e1), Vec3M::ZERO);
        // expand the determinant with −k in the last slot by hand
        assert_eq!(e2.cross(e3), Vec3M::new(1.0, 0.0, 0.0));
    }

    #[test]
    fn norms() {
        assert_eq!(minkowski_norm(Vec3M::new(0.0, 0.0, 2.0)), 2.0);
        assert_eq!(minkowski_norm(Vec3M::new(3.0, 4.0, 0.0)), 5.0);
        assert_eq!(minkowski_norm(Vec3M::new(1.0, 0.0, 1.0)), 0.0);
    }

    #[test]
    fn causal_characters() {
        let t = DEFAULT_LIGHTLIKE_TOL;
        assert_eq!(classify_vector(Vec3M::ZERO, t), CausalCharacter::Spacelike);
        assert_eq!(classify_vector(Vec3M::new(0.0, 0.0, 1.0), t), CausalCharacter::Timelike);
        assert_eq!(classify_vector(Vec3M::new(1.0, 0.0, 1.0), t), CausalCharacter::Lightlike);
        assert_eq!(classify_vector(Vec3M::new(1.0, 0.0, 0.5), t), CausalCharacter::Spacelike);
    }

    #[test]
    fn factories() {
        assert_eq!(rotation_r(0.0), Mat3::IDENTITY);
        let a = 0.7;
        let p = Isometry21::linear(boost_s(a)).apply(Vec3M::new(0.0, 0.0, 1.0));
        assert!((p.x - math::sinh(a)).abs() < 1e-15 && p.y == 0.0 && (p.z - math::cosh(a)).abs() < 1e-15);
        assert!(Isometry21::linear(boost_t(1.3)).metric_defect() < 1e-12);
        let g = rotations(0.3, -0.4, 1.1);
        assert!(g.metric_defect() < 1e-12);
        let gi = g.inverse();
        assert!(g.compose(&gi).linear.max_abs_diff(&Mat3::IDENTITY) < 1e-12);
    }
}
