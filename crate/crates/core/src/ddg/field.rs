use super::Discretization;
use crate::basis::{Basis, Jet};
use crate::linalg::Vec2;
use crate::real::Real;
use rayon::prelude::*;

/// Piecewise-polynomial field: `n_dof` orthonormal-basis coefficients per
/// element, stored element-major.
#[derive(Clone, Debug, PartialEq)]
pub struct DgField<T> {
    pub coeffs: Vec<T>,
    pub degree: usize,
    pub n_dof: usize,
    pub time: T,
}

impl<T: Real> DgField<T> {
    pub fn zeros(n_elements: usize, degree: usize, time: T) -> Self {
        let n_dof = crate::basis::dof_count(degree);
        Self {
            coeffs: vec![T::zero(); n_elements * n_dof],
            degree,
            n_dof,
            time,
        }
    }

    pub fn n_elements(&self) -> usize {
        self.coeffs.len() / self.n_dof
    }

    #[inline]
    pub fn element(&self, k: usize) -> &[T] {
        &self.coeffs[k * self.n_dof..(k + 1) * self.n_dof]
    }

    #[inline]
    pub fn element_mut(&mut self, k: usize) -> &mut [T] {
        let n = self.n_dof;
        &mut self.coeffs[k * n..(k + 1) * n]
    }

    /// Mean value over element `k`.
    #[inline]
    pub fn cell_average(&self, k: usize) -> T {
        self.coeffs[k * self.n_dof] * Basis::<T>::constant_value()
    }

    pub fn cell_averages(&self) -> Vec<T> {
        (0..self.n_elements())
            .map(|k| self.cell_average(k))
            .collect()
    }

    /// `self + s·other`, keeping `self.time`.
    pub fn axpy(&self, s: T, other: &Self) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(&a, &b)| a + s * b)
            .collect();
        Self {
            coeffs,
            ..self.clone()
        }
    }

    /// `a·self + b·other`.
    pub fn combine(&self, a: T, other: &Self, b: T) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(&x, &y)| a * x + b * y)
            .collect();
        Self {
            coeffs,
            ..self.clone()
        }
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_finite())
    }

    /// Value and derivatives at reference point `r` of element `k`,
    /// in reference coordinates.
    pub fn reference_jet(&self, basis: &Basis<T>, k: usize, r: Vec2<T>) -> Jet<T> {
        Jet::combine(self.element(k), &basis.eval(r))
    }
}

/// Element-wise `L²` projection of `f`, evaluated at physical points.
pub fn project_initial<T: Real, F>(disc: &Discretization<T>, f: F) -> DgField<T>
where
    F: Fn(Vec2<T>) -> T + Sync,
{
    project_with(disc, disc.volume_rule(), T::zero(), f)
}

pub(crate) fn project_with<T: Real, F>(
    disc: &Discretization<T>,
    rule: &crate::quadrature::QuadratureRule<T>,
    time: T,
    f: F,
) -> DgField<T>
where
    F: Fn(Vec2<T>) -> T + Sync,
{
    let basis = disc.basis();
    let values = basis.eval_basis(&rule.points);
    let n_dof = basis.n_dof();
    let mut field = DgField::zeros(disc.mesh().n_elements(), basis.degree(), time);
    field
        .coeffs
        .par_chunks_mut(n_dof)
        .enumerate()
        .for_each(|(k, out)| {
            let map = &disc.mesh().maps[k];
            for (q, (&r, &w)) in rule.points.iter().zip(&rule.weights).enumerate() {
                let fx = f(map.to_physical(r)) * w;
                for (o, &phi) in out.iter_mut().zip(&values[q]) {
                    *o += fx * phi;
                }
            }
        });
    field
}
