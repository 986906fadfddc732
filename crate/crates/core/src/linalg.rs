//! Fixed-size 2D vectors and matrices.

use crate::real::Real;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Vec2<T> {
    pub x: T,
    pub y: T,
}

impl<T: Real> Vec2<T> {
    #[inline]
    pub fn new(x: T, y: T) -> Self {
        Self { x, y }
    }

    #[inline]
    pub fn zero() -> Self {
        Self::new(T::zero(), T::zero())
    }

    #[inline]
    pub fn dot(self, other: Self) -> T {
        self.x * other.x + self.y * other.y
    }

    #[inline]
    pub fn norm(self) -> T {
        self.x.hypot(self.y)
    }

    #[inline]
    pub fn scale(self, s: T) -> Self {
        Self::new(self.x * s, self.y * s)
    }

    /// 2D cross product `self × other` (z-component).
    #[inline]
    pub fn cross(self, other: Self) -> T {
        self.x * other.y - self.y * other.x
    }
}

impl<T: Real> Add for Vec2<T> {
    type Output = Self;
    #[inline]
    fn add(self, o: Self) -> Self {
        Self::new(self.x + o.x, self.y + o.y)
    }
}

impl<T: Real> AddAssign for Vec2<T> {
    #[inline]
    fn add_assign(&mut self, o: Self) {
        self.x += o.x;
        self.y += o.y;
    }
}

impl<T: Real> Sub for Vec2<T> {
    type Output = Self;
    #[inline]
    fn sub(self, o: Self) -> Self {
        Self::new(self.x - o.x, self.y - o.y)
    }
}

impl<T: Real> Neg for Vec2<T> {
    type Output = Self;
    #[inline]
    fn neg(self) -> Self {
        Self::new(-self.x, -self.y)
    }
}

/// Row-major 2×2 matrix `[[a, b], [c, d]]`.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Mat2<T> {
    pub a: T,
    pub b: T,
    pub c: T,
    pub d: T,
}

impl<T: Real> Mat2<T> {
    #[inline]
    pub fn new(a: T, b: T, c: T, d: T) -> Self {
        Self { a, b, c, d }
    }

    #[inline]
    pub fn identity() -> Self {
        Self::diag(T::one(), T::one())
    }

    #[inline]
    pub fn diag(a: T, d: T) -> Self {
        Self::new(a, T::zero(), T::zero(), d)
    }

    #[inline]
    pub fn from_columns(c0: Vec2<T>, c1: Vec2<T>) -> Self {
        Self::new(c0.x, c1.x, c0.y, c1.y)
    }

    #[inline]
    pub fn det(&self) -> T {
        self.a * self.d - self.b * self.c
    }

    #[inline]
    pub fn transpose(&self) -> Self {
        Self::new(self.a, self.c, self.b, self.d)
    }

    /// Inverse; `None` for a singular matrix.
    pub fn inverse(&self) -> Option<Self> {
        let det = self.det();
        if det == T::zero() || !det.is_finite() {
            return None;
        }
        let inv = T::one() / det;
        Some(Self::new(
            self.d * inv,
            -self.b * inv,
            -self.c * inv,
            self.a * inv,
        ))
    }

    #[inline]
    pub fn mul_vec(&self, v: Vec2<T>) -> Vec2<T> {
        Vec2::new(self.a * v.x + self.b * v.y, self.c * v.x + self.d * v.y)
    }

    #[inline]
    pub fn mul_mat(&self, m: &Self) -> Self {
        Self::new(
            self.a * m.a + self.b * m.c,
            self.a * m.b + self.b * m.d,
            self.c * m.a + self.d * m.c,
            self.c * m.b + self.d * m.d,
        )
    }

    #[inline]
    pub fn scale(&self, s: T) -> Self {
        Self::new(self.a * s, self.b * s, self.c * s, self.d * s)
    }

    /// Quadratic form `xᵀ M y`.
    #[inline]
    pub fn bilinear(&self, x: Vec2<T>, y: Vec2<T>) -> T {
        x.dot(self.mul_vec(y))
    }

    /// Eigenvalues of the symmetric part `(M + Mᵀ)/2`, ascending.
    pub fn symmetric_part_eigenvalues(&self) -> (T, T) {
        let half = T::of(0.5);
        let off = (self.b + self.c) * half;
        symmetric_eigenvalues(self.a, off, self.d)
    }

    /// Singular values, ascending.
    pub fn singular_values(&self) -> (T, T) {
        let g = self.transpose().mul_mat(self);
        let (lo, hi) = symmetric_eigenvalues(g.a, g.b, g.d);
        (lo.max(T::zero()).sqrt(), hi.max(T::zero()).sqrt())
    }

    /// Eigenvalues when they are real, ascending.
    pub fn real_eigenvalues(&self) -> Option<(T, T)> {
        let half = T::of(0.5);
        let tr = self.a + self.d;
        let disc = tr * tr * T::of(0.25) - self.det();
        if disc < T::zero() {
            return None;
        }
        let r = disc.sqrt();
        Some((tr * half - r, tr * half + r))
    }
}

impl<T: Real> Add for Mat2<T> {
    type Output = Self;
    #[inline]
    fn add(self, o: Self) -> Self {
        Self::new(self.a + o.a, self.b + o.b, self.c + o.c, self.d + o.d)
    }
}

impl<T: Real> Mul<Vec2<T>> for Mat2<T> {
    type Output = Vec2<T>;
    #[inline]
    fn mul(self, v: Vec2<T>) -> Vec2<T> {
        self.mul_vec(v)
    }
}

fn symmetric_eigenvalues<T: Real>(a: T, b: T, d: T) -> (T, T) {
    let half = T::of(0.5);
    let mean = (a + d) * half;
    let r = ((a - d) * half).hypot(b);
    (mean - r, mean + r)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn anisotropic_spectrum() {
        let m = Mat2::<f64>::new(2.0, 1.0, 2.0, 3.0);
        let (lo, hi) = m.real_eigenvalues().unwrap();
        assert!((lo - 1.0).abs() < 1e-14 && (hi - 4.0).abs() < 1e-14);
        let (s_lo, s_hi) = m.singular_values();
        assert!((s_lo * s_hi - 4.0).abs() < 1e-12);
        assert!(s_hi > 4.0);
    }

    #[test]
    fn inverse_roundtrip() {
        let m = Mat2::<f64>::new(0.3, -1.2, 2.5, 0.7);
        let p = m.mul_mat(&m.inverse().unwrap());
        assert!((p.a - 1.0).abs() < 1e-15 && p.b.abs() < 1e-15);
        assert!(p.c.abs() < 1e-15 && (p.d - 1.0).abs() < 1e-15);
        assert!(Mat2::new(1.0, 2.0, 2.0, 4.0).inverse().is_none());
    }
}
