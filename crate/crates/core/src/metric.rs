//! Planar vectors, symmetric 2×2 matrices and the direction-dependent
//! quadratic metric built from them.

use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use crate::error::{Error, Result};

/// Below this length a direction vector is treated as zero.
pub const ZERO_DIRECTION_THRESHOLD: f64 = 1e-9;

/// Absolute slack on the quadratic form in [`ellipsoid_contains`].
pub const MEMBERSHIP_TOLERANCE: f64 = 1e-9;

/// A workspace vector in meters.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Vec2 {
    pub x: f64,
    pub y: f64,
}

impl Vec2 {
    pub const ZERO: Vec2 = Vec2 { x: 0.0, y: 0.0 };

    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn from_angle(theta: f64) -> Self {
        let (s, c) = theta.sin_cos();
        Self::new(c, s)
    }

    pub fn dot(self, other: Vec2) -> f64 {
        self.x * other.x + self.y * other.y
    }

    pub fn cross(self, other: Vec2) -> f64 {
        self.x * other.y - self.y * other.x
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn norm_sq(self) -> f64 {
        self.dot(self)
    }

    /// Counter-clockwise quarter turn.
    pub fn perp(self) -> Vec2 {
        Vec2::new(-self.y, self.x)
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    pub fn distance(self, other: Vec2) -> f64 {
        (self - other).norm()
    }

    pub fn lerp(self, other: Vec2, t: f64) -> Vec2 {
        self + (other - self) * t
    }

    pub fn rotate(self, theta: f64) -> Vec2 {
        let (s, c) = theta.sin_cos();
        Vec2::new(c * self.x - s * self.y, s * self.x + c * self.y)
    }
}

impl Add for Vec2 {
    type Output = Vec2;
    fn add(self, rhs: Vec2) -> Vec2 {
        Vec2::new(self.x + rhs.x, self.y + rhs.y)
    }
}

impl AddAssign for Vec2 {
    fn add_assign(&mut self, rhs: Vec2) {
        self.x += rhs.x;
        self.y += rhs.y;
    }
}

impl Sub for Vec2 {
    type Output = Vec2;
    fn sub(self, rhs: Vec2) -> Vec2 {
        Vec2::new(self.x - rhs.x, self.y - rhs.y)
    }
}

impl SubAssign for Vec2 {
    fn sub_assign(&mut self, rhs: Vec2) {
        self.x -= rhs.x;
        self.y -= rhs.y;
    }
}

impl Mul<f64> for Vec2 {
    type Output = Vec2;
    fn mul(self, rhs: f64) -> Vec2 {
        Vec2::new(self.x * rhs, self.y * rhs)
    }
}

impl Mul<Vec2> for f64 {
    type Output = Vec2;
    fn mul(self, rhs: Vec2) -> Vec2 {
        rhs * self
    }
}

impl Neg for Vec2 {
    type Output = Vec2;
    fn neg(self) -> Vec2 {
        Vec2::new(-self.x, -self.y)
    }
}

/// Symmetric 2×2 matrix `[[a11, a12], [a12, a22]]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymMat2 {
    pub a11: f64,
    pub a12: f64,
    pub a22: f64,
}

impl SymMat2 {
    pub const IDENTITY: SymMat2 = SymMat2 { a11: 1.0, a12: 0.0, a22: 1.0 };

    pub const fn new(a11: f64, a12: f64, a22: f64) -> Self {
        Self { a11, a12, a22 }
    }

    pub const fn diag(d1: f64, d2: f64) -> Self {
        Self::new(d1, 0.0, d2)
    }

    pub fn scaled_identity(s: f64) -> Self {
        Self::new(s, 0.0, s)
    }

    /// `u uᵀ`
    pub fn outer(u: Vec2) -> Self {
        Self::new(u.x * u.x, u.x * u.y, u.y * u.y)
    }

    pub fn mul_vec(&self, v: Vec2) -> Vec2 {
        Vec2::new(self.a11 * v.x + self.a12 * v.y, self.a12 * v.x + self.a22 * v.y)
    }

    pub fn trace(&self) -> f64 {
        self.a11 + self.a22
    }

    pub fn det(&self) -> f64 {
        self.a11 * self.a22 - self.a12 * self.a12
    }

    pub fn is_finite(&self) -> bool {
        self.a11.is_finite() && self.a12.is_finite() && self.a22.is_finite()
    }

    pub fn is_positive_definite(&self) -> bool {
        self.is_finite() && self.a11 > 0.0 && self.det() > 0.0
    }

    /// Frobenius norm.
    pub fn norm(&self) -> f64 {
        (self.a11 * self.a11 + 2.0 * self.a12 * self.a12 + self.a22 * self.a22).sqrt()
    }

    pub fn add_diag(&self, eps: f64) -> SymMat2 {
        SymMat2::new(self.a11 + eps, self.a12, self.a22 + eps)
    }

    pub fn scale(&self, s: f64) -> SymMat2 {
        SymMat2::new(self.a11 * s, self.a12 * s, self.a22 * s)
    }

    /// `R · self · Rᵀ` for the rotation by `theta`.
    pub fn rotated(&self, theta: f64) -> SymMat2 {
        let (s, c) = theta.sin_cos();
        // Columns of Q·Rᵀ, then left-multiply by R.
        let (m11, m12) = (self.a11 * c - self.a12 * s, self.a11 * s + self.a12 * c);
        let (m21, m22) = (self.a12 * c - self.a22 * s, self.a12 * s + self.a22 * c);
        SymMat2::new(c * m11 - s * m21, c * m12 - s * m22, s * m12 + c * m22)
    }

    /// Rebuilds `λmin·vvᵀ + λmax·v⊥v⊥ᵀ` from a unit eigenvector `v_min`.
    pub fn from_eigen(lambda_min: f64, lambda_max: f64, v_min: Vec2) -> SymMat2 {
        let a = SymMat2::outer(v_min).scale(lambda_min);
        let b = SymMat2::outer(v_min.perp()).scale(lambda_max);
        SymMat2::new(a.a11 + b.a11, a.a12 + b.a12, a.a22 + b.a22)
    }

    /// Principal square root of a positive semidefinite matrix.
    pub fn sqrt(&self) -> SymMat2 {
        let e = eig_sym2(self);
        SymMat2::from_eigen(e.lambda_min.max(0.0).sqrt(), e.lambda_max.max(0.0).sqrt(), e.v_min)
    }

    pub fn inverse(&self) -> Option<SymMat2> {
        let d = self.det();
        if d == 0.0 || !d.is_finite() {
            return None;
        }
        Some(SymMat2::new(self.a22 / d, -self.a12 / d, self.a11 / d))
    }
}

/// Closed-form eigendecomposition of a symmetric 2×2 matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Eigen2 {
    pub lambda_min: f64,
    pub lambda_max: f64,
    /// Unit vector, sign fixed so that `x > 0` (or `x == 0, y > 0`).
    pub v_min: Vec2,
    /// `v_min` rotated by +90°.
    pub v_max: Vec2,
}

pub fn eig_sym2(q: &SymMat2) -> Eigen2 {
    let mean = 0.5 * (q.a11 + q.a22);
    let half_diff = 0.5 * (q.a11 - q.a22);
    let radius = half_diff.hypot(q.a12);
    let lambda_min = mean - radius;
    // Rows of (Q − λmin·I) are orthogonal to v_min; take the better conditioned one.
    let r1 = Vec2::new(q.a11 - lambda_min, q.a12);
    let r2 = Vec2::new(q.a12, q.a22 - lambda_min);
    let row = if r1.norm_sq() >= r2.norm_sq() { r1 } else { r2 };
    let mut v_min = if q.a12 == 0.0 {
        if q.a11 <= q.a22 { Vec2::new(1.0, 0.0) } else { Vec2::new(0.0, 1.0) }
    } else {
        let v = row.perp();
        v * (1.0 / v.norm())
    };
    if v_min.x < 0.0 || (v_min.x == 0.0 && v_min.y < 0.0) {
        v_min = -v_min;
    }
    Eigen2 {
        lambda_min,
        lambda_max: mean + radius,
        v_min,
        v_max: v_min.perp(),
    }
}

/// `xᵀ Q x`
pub fn quad_norm_sq(q: &SymMat2, x: Vec2) -> f64 {
    q.a11 * x.x * x.x + 2.0 * q.a12 * x.x * x.y + q.a22 * x.y * x.y
}

/// Positive definite metric with eigenvalue `c1` along `dir` and `c2` across it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DirectionalMatrix {
    pub q: SymMat2,
    pub c1: f64,
    pub c2: f64,
    pub dir: Vec2,
}

impl DirectionalMatrix {
    /// True when the generating direction fell below [`ZERO_DIRECTION_THRESHOLD`].
    pub fn is_isotropic(&self) -> bool {
        self.dir.norm() < ZERO_DIRECTION_THRESHOLD
    }
}

/// `Q[v] = c2·I + (c1 − c2)·vvᵀ/‖v‖²`, or `c1·I` when `v` is (numerically) zero.
pub fn directional_matrix(v: Vec2, c1: f64, c2: f64) -> Result<DirectionalMatrix> {
    if !v.is_finite() || !c1.is_finite() || !c2.is_finite() {
        return Err(Error::InvalidParameters("non-finite directional matrix input".into()));
    }
    if c1 <= 0.0 || c2 <= c1 {
        return Err(Error::InvalidParameters(format!(
            "directional matrix needs 0 < c1 < c2, got c1={c1}, c2={c2}"
        )));
    }
    let len = v.norm();
    let q = if len < ZERO_DIRECTION_THRESHOLD {
        SymMat2::scaled_identity(c1)
    } else {
        let u = v * (1.0 / len);
        let uu = SymMat2::outer(u);
        let d = c1 - c2;
        SymMat2::new(c2 + d * uu.a11, d * uu.a12, c2 + d * uu.a22)
    };
    Ok(DirectionalMatrix { q, c1, c2, dir: v })
}

/// The sublevel set `{p | (p − center)ᵀ Q (p − center) ≤ level}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ellipsoid {
    pub center: Vec2,
    pub q: SymMat2,
    pub level: f64,
}

impl Ellipsoid {
    pub fn new(center: Vec2, q: SymMat2, level: f64) -> Result<Self> {
        // An unbounded level is allowed: it describes an obstacle-free world.
        if !(level >= 0.0) {
            return Err(Error::InvalidParameters(format!("ellipsoid level must be >= 0, got {level}")));
        }
        if !q.is_positive_definite() {
            return Err(Error::InvalidParameters("ellipsoid matrix must be positive definite".into()));
        }
        Ok(Self { center, q, level })
    }

    pub fn form(&self, p: Vec2) -> f64 {
        quad_norm_sq(&self.q, p - self.center)
    }

    /// Semi-axis lengths and the direction of the major (longest) axis.
    pub fn semi_axes(&self) -> (f64, f64, Vec2) {
        let e = eig_sym2(&self.q);
        let major = (self.level / e.lambda_min).sqrt();
        let minor = (self.level / e.lambda_max).sqrt();
        (major, minor, e.v_min)
    }
}

pub fn ellipsoid_contains(e: &Ellipsoid, p: Vec2) -> bool {
    e.form(p) <= e.level + MEMBERSHIP_TOLERANCE
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::FRAC_1_SQRT_2;

    #[test]
    fn diagonal_direction_matrix() {
        let m = directional_matrix(Vec2::new(FRAC_1_SQRT_2, FRAC_1_SQRT_2), 1.0, 4.0).unwrap();
        assert_abs_diff_eq!(m.q.a11, 2.5, epsilon = 1e-14);
        assert_abs_diff_eq!(m.q.a12, -1.5, epsilon = 1e-14);
        assert_abs_diff_eq!(m.q.a22, 2.5, epsilon = 1e-14);
    }

    #[test]
    fn zero_direction_is_isotropic() {
        let m = directional_matrix(Vec2::ZERO, 1.0, 4.0).unwrap();
        assert_eq!(m.q, SymMat2::IDENTITY);
        assert!(m.is_isotropic());
        let tiny = directional_matrix(Vec2::new(5e-10, 0.0), 2.0, 4.0).unwrap();
        assert_eq!(tiny.q, SymMat2::scaled_identity(2.0));
    }

    #[test]
    fn axis_direction_matrix() {
        let m = directional_matrix(Vec2::new(3.0, 0.0), 1.0, 4.0).unwrap();
        assert_eq!(m.q, SymMat2::new(1.0, 0.0, 4.0));
        let e = eig_sym2(&m.q);
        assert_eq!(e.lambda_min, 1.0);
        assert_eq!(e.v_min, Vec2::new(1.0, 0.0));
    }

    #[test]
    fn rejects_bad_constants() {
        assert!(directional_matrix(Vec2::new(1.0, 0.0), 0.0, 4.0).is_err());
        assert!(directional_matrix(Vec2::new(1.0, 0.0), 4.0, 4.0).is_err());
        assert!(directional_matrix(Vec2::new(1.0, 0.0), 2.0, 1.0).is_err());
        assert!(directional_matrix(Vec2::new(f64::NAN, 0.0), 1.0, 4.0).is_err());
        assert!(directional_matrix(Vec2::new(1.0, 0.0), 1.0, f64::INFINITY).is_err());
    }

    #[test]
    fn quadratic_norms() {
        assert_eq!(quad_norm_sq(&SymMat2::IDENTITY, Vec2::new(3.0, 4.0)), 25.0);
        assert_abs_diff_eq!(
            quad_norm_sq(&SymMat2::new(2.5, -1.5, 2.5), Vec2::new(1.0, 1.0)),
            2.0,
            epsilon = 1e-15
        );
        assert_eq!(quad_norm_sq(&SymMat2::diag(1.0, 4.0), Vec2::new(0.0, 2.0)), 16.0);
    }

    #[test]
    fn ellipsoid_membership() {
        let unit = Ellipsoid::new(Vec2::ZERO, SymMat2::IDENTITY, 1.0).unwrap();
        assert!(ellipsoid_contains(&unit, Vec2::new(1.0, 0.0)));
        assert!(!ellipsoid_contains(&unit, Vec2::new(1.1, 0.0)));
        let e = Ellipsoid::new(Vec2::new(1.0, 1.0), SymMat2::diag(1.0, 4.0), 4.0).unwrap();
        assert!(ellipsoid_contains(&e, Vec2::new(3.0, 1.0)));
        assert!(Ellipsoid::new(Vec2::ZERO, SymMat2::IDENTITY, -1.0).is_err());
    }

    #[test]
    fn eigen_of_rotated_diag() {
        let e = eig_sym2(&SymMat2::new(2.5, -1.5, 2.5));
        assert_abs_diff_eq!(e.lambda_min, 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(e.lambda_max, 4.0, epsilon = 1e-14);
        assert_abs_diff_eq!(e.v_min.cross(Vec2::new(1.0, 1.0)), 0.0, epsilon = 1e-14);
        assert_abs_diff_eq!(e.v_max.cross(Vec2::new(1.0, -1.0)), 0.0, epsilon = 1e-14);

        let i = eig_sym2(&SymMat2::IDENTITY);
        assert_eq!((i.lambda_min, i.lambda_max), (1.0, 1.0));
        assert_abs_diff_eq!(i.v_min.dot(i.v_max), 0.0);
    }

    #[test]
    fn sqrt_squares_back() {
        let q = SymMat2::new(2.5, -1.5, 2.0);
        let r = q.sqrt();
        let back = SymMat2::new(
            r.a11 * r.a11 + r.a12 * r.a12,
            r.a11 * r.a12 + r.a12 * r.a22,
            r.a12 * r.a12 + r.a22 * r.a22,
        );
        assert_abs_diff_eq!(back.a11, q.a11, epsilon = 1e-13);
        assert_abs_diff_eq!(back.a12, q.a12, epsilon = 1e-13);
        assert_abs_diff_eq!(back.a22, q.a22, epsilon = 1e-13);
    }
}
