//! Orthonormal polynomial basis on the reference triangle and the affine map
//! from the reference triangle to a physical element.
//!
//! The basis functions are generated by the three-term recurrences for the
//! Dubiner (Koornwinder) polynomials written in Cartesian reference
//! coordinates. Every quantity is carried as a second-order [`Jet`], so the
//! recurrences deliver values, gradients and Hessians exactly, with no
//! collapsed-coordinate singularity at the top vertex.

use crate::error::{Error, Result};
use crate::linalg::{Mat2, Vec2};
use crate::real::Real;
use std::ops::{Add, Mul, Sub};

/// Highest supported polynomial degree.
pub const MAX_DEGREE: usize = 4;

/// Number of basis functions spanning ℙ_k in two dimensions.
pub const fn dof_count(degree: usize) -> usize {
    (degree + 1) * (degree + 2) / 2
}

/// Value with first and second partial derivatives.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Jet<T> {
    pub v: T,
    pub dx: T,
    pub dy: T,
    pub dxx: T,
    pub dxy: T,
    pub dyy: T,
}

impl<T: Real> Jet<T> {
    pub fn constant(v: T) -> Self {
        Self { v, ..Self::zero() }
    }

    pub fn zero() -> Self {
        Self {
            v: T::zero(),
            dx: T::zero(),
            dy: T::zero(),
            dxx: T::zero(),
            dxy: T::zero(),
            dyy: T::zero(),
        }
    }

    /// The affine function `a x + b y + c`.
    pub fn linear(a: T, b: T, c: T, at: Vec2<T>) -> Self {
        Self {
            v: a * at.x + b * at.y + c,
            dx: a,
            dy: b,
            ..Self::zero()
        }
    }

    #[inline]
    pub fn scale(self, s: T) -> Self {
        Self {
            v: self.v * s,
            dx: self.dx * s,
            dy: self.dy * s,
            dxx: self.dxx * s,
            dxy: self.dxy * s,
            dyy: self.dyy * s,
        }
    }

    #[inline]
    pub fn grad(&self) -> Vec2<T> {
        Vec2::new(self.dx, self.dy)
    }

    /// Hessian as a (symmetric) matrix.
    #[inline]
    pub fn hessian(&self) -> Mat2<T> {
        Mat2::new(self.dxx, self.dxy, self.dxy, self.dyy)
    }

    /// `Σ c_j φ_j` for coefficients `c` and basis jets `φ`.
    #[inline]
    pub fn combine(coeffs: &[T], jets: &[Jet<T>]) -> Self {
        let mut acc = Self::zero();
        for (&c, j) in coeffs.iter().zip(jets) {
            acc.v += c * j.v;
            acc.dx += c * j.dx;
            acc.dy += c * j.dy;
            acc.dxx += c * j.dxx;
            acc.dxy += c * j.dxy;
            acc.dyy += c * j.dyy;
        }
        acc
    }
}

impl<T: Real> Add for Jet<T> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self {
            v: self.v + o.v,
            dx: self.dx + o.dx,
            dy: self.dy + o.dy,
            dxx: self.dxx + o.dxx,
            dxy: self.dxy + o.dxy,
            dyy: self.dyy + o.dyy,
        }
    }
}

impl<T: Real> Sub for Jet<T> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        self + o.scale(-T::one())
    }
}

impl<T: Real> Mul for Jet<T> {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        let two = T::of(2.0);
        Self {
            v: self.v * o.v,
            dx: self.dx * o.v + self.v * o.dx,
            dy: self.dy * o.v + self.v * o.dy,
            dxx: self.dxx * o.v + two * self.dx * o.dx + self.v * o.dxx,
            dxy: self.dxy * o.v + self.dx * o.dy + self.dy * o.dx + self.v * o.dxy,
            dyy: self.dyy * o.v + two * self.dy * o.dy + self.v * o.dyy,
        }
    }
}

/// Orthonormal basis of ℙ_k on the reference triangle with vertices
/// `(0,0), (1,0), (0,1)`, ordered hierarchically by total degree.
#[derive(Clone, Debug)]
pub struct Basis<T> {
    degree: usize,
    n_dof: usize,
    _scalar: std::marker::PhantomData<T>,
}

#[inline]
fn index(p: usize, q: usize) -> usize {
    (p + q) * (p + q + 1) / 2 + p
}

fn jacobi_coefficients(a: usize, n: usize) -> (f64, f64, f64) {
    let (a, n) = (a as f64, n as f64);
    (
        (a + 2.0 * n + 1.0) * (a + 2.0 * n + 2.0) / (2.0 * (n + 1.0) * (a + n + 1.0)),
        a * a * (a + 2.0 * n + 1.0) / (2.0 * (n + 1.0) * (a + n + 1.0) * (a + 2.0 * n)),
        n * (a + n) * (a + 2.0 * n + 2.0) / ((n + 1.0) * (a + n + 1.0) * (a + 2.0 * n)),
    )
}

impl<T: Real> Basis<T> {
    pub fn new(degree: usize) -> Result<Self> {
        if degree > MAX_DEGREE {
            return Err(Error::UnsupportedDegree(degree));
        }
        Ok(Self {
            degree,
            n_dof: dof_count(degree),
            _scalar: Default::default(),
        })
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn n_dof(&self) -> usize {
        self.n_dof
    }

    /// Value of the constant basis function (`√2`).
    pub fn constant_value() -> T {
        T::of(2.0).sqrt()
    }

    /// Reference-coordinate jets of every basis function at `point`.
    pub fn eval_into(&self, point: Vec2<T>, out: &mut [Jet<T>]) {
        let n = self.degree;
        debug_assert_eq!(out.len(), self.n_dof);
        let f = T::of;
        out[0] = Jet::constant(Self::constant_value());
        let x_lin = Jet::linear(f(2.0), T::one(), -T::one(), point);
        let y_lin = Jet::linear(T::zero(), f(2.0), -T::one(), point);
        let one_minus_y = Jet::linear(T::zero(), -T::one(), T::one(), point);

        for p in 1..=n {
            let pf = p as f64;
            let a = 2.0 - 1.0 / pf;
            let scale1 = ((pf + 0.5) * (pf + 1.0) / ((pf - 0.5) * pf)).sqrt();
            let mut next = (x_lin * out[index(p - 1, 0)]).scale(f(a * scale1));
            if p > 1 {
                let scale2 = ((pf + 0.5) * (pf + 1.0) / ((pf - 1.5) * (pf - 1.0))).sqrt();
                next = next
                    - (one_minus_y * one_minus_y * out[index(p - 2, 0)])
                        .scale(f((a - 1.0) * scale2));
            }
            out[index(p, 0)] = next;
        }

        for p in 0..n {
            let pf = p as f64;
            let scale3 = ((pf + 2.0) / (pf + 1.0)).sqrt();
            let factor = y_lin.scale(f(1.5 + pf)) + Jet::constant(f(0.5 + pf));
            out[index(p, 1)] = (out[index(p, 0)] * factor).scale(f(scale3));
            for q in 1..n - p {
                let s = (p + q) as f64;
                let (a1, a2, a3) = jacobi_coefficients(2 * p + 1, q);
                let scale4 = ((s + 2.0) / (s + 1.0)).sqrt();
                let scale5 = ((s + 2.0) / s).sqrt();
                let factor = y_lin.scale(f(a1)) + Jet::constant(f(a2));
                out[index(p, q + 1)] = (out[index(p, q)] * factor).scale(f(scale4))
                    - out[index(p, q - 1)].scale(f(a3 * scale5));
            }
        }
    }

    pub fn eval(&self, point: Vec2<T>) -> Vec<Jet<T>> {
        let mut out = vec![Jet::zero(); self.n_dof];
        self.eval_into(point, &mut out);
        out
    }

    /// Table `values[p][j] = φ_j(points[p])`.
    pub fn eval_basis(&self, points: &[Vec2<T>]) -> Vec<Vec<T>> {
        points
            .iter()
            .map(|&p| self.eval(p).iter().map(|j| j.v).collect())
            .collect()
    }

    /// Jets at each point, flattened as `points × n_dof`.
    pub fn tabulate(&self, points: &[Vec2<T>]) -> Vec<Jet<T>> {
        let mut out = vec![Jet::zero(); points.len() * self.n_dof];
        for (p, chunk) in points.iter().zip(out.chunks_mut(self.n_dof)) {
            self.eval_into(*p, chunk);
        }
        out
    }
}

/// Affine map `x = origin + J r` from the reference triangle to an element.
#[derive(Clone, Copy, Debug)]
pub struct AffineMap<T> {
    pub element: usize,
    pub origin: Vec2<T>,
    pub jacobian: Mat2<T>,
    pub inverse: Mat2<T>,
    pub det: T,
}

impl<T: Real> AffineMap<T> {
    /// Map sending `(0,0), (1,0), (0,1)` to `v0, v1, v2`.
    pub fn from_vertices(element: usize, v0: Vec2<T>, v1: Vec2<T>, v2: Vec2<T>) -> Self {
        let jacobian = Mat2::from_columns(v1 - v0, v2 - v0);
        let det = jacobian.det();
        let inverse = jacobian
            .inverse()
            .expect("degenerate triangle has a singular affine map");
        Self {
            element,
            origin: v0,
            jacobian,
            inverse,
            det,
        }
    }

    #[inline]
    pub fn to_physical(&self, r: Vec2<T>) -> Vec2<T> {
        self.origin + self.jacobian.mul_vec(r)
    }

    #[inline]
    pub fn to_reference(&self, x: Vec2<T>) -> Vec2<T> {
        self.inverse.mul_vec(x - self.origin)
    }

    /// Chain rule for a reference-coordinate jet: `∇ₓ = J⁻ᵀ∇ᵣ`, `Hₓ = J⁻ᵀ Hᵣ J⁻¹`.
    #[inline]
    pub fn physical_derivatives(&self, reference: &Jet<T>) -> Jet<T> {
        let g = &self.inverse;
        let grad = g.transpose().mul_vec(reference.grad());
        let h = g.transpose().mul_mat(&reference.hessian()).mul_mat(g);
        Jet {
            v: reference.v,
            dx: grad.x,
            dy: grad.y,
            dxx: h.a,
            dxy: h.b,
            dyy: h.d,
        }
    }

    /// Physical gradient only, for volume integrals.
    #[inline]
    pub fn physical_gradient(&self, reference: &Jet<T>) -> Vec2<T> {
        self.inverse.transpose().mul_vec(reference.grad())
    }
}
