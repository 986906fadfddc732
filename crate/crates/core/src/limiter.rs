//! Linear scaling limiter: each element's polynomial is contracted towards
//! its cell average until the sampled values lie in `[lower, upper]`.

use crate::ddg::{DgField, Discretization};
use crate::error::{Error, Result};
use crate::linalg::Vec2;
use crate::mesh::reference_edge_point;
use crate::real::Real;
use rayon::prelude::*;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LimiterConfig<T> {
    /// Lower bound, or `-∞`.
    pub lower: T,
    /// Upper bound, or `+∞`.
    pub upper: T,
}

impl<T: Real> LimiterConfig<T> {
    pub fn new(lower: T, upper: T) -> Result<Self> {
        if lower.is_nan() || upper.is_nan() || lower >= upper {
            return Err(Error::Config(format!(
                "limiter bounds must satisfy lower < upper (got {lower}, {upper})"
            )));
        }
        Ok(Self { lower, upper })
    }

    pub fn positivity() -> Self {
        Self {
            lower: T::zero(),
            upper: T::infinity(),
        }
    }

    pub fn contains(&self, v: T) -> bool {
        v >= self.lower && v <= self.upper
    }

    /// Like [`contains`](Self::contains) but tolerating a relative round-off
    /// excess of [`AVERAGE_TOLERANCE`]; used for cell averages, which the
    /// limiter cannot change.
    pub fn admits_average(&self, v: T) -> bool {
        let tol = |b: T| T::of(AVERAGE_TOLERANCE) * b.abs().max(T::one());
        v >= self.lower - tol(self.lower) && v <= self.upper + tol(self.upper)
    }
}

/// Relative amount by which a cell average may exceed a bound before it is
/// reported as out of bounds.
pub const AVERAGE_TOLERANCE: f64 = 1e-12;

/// Limiter with its per-element sample set: volume quadrature points, edge
/// quadrature points on all three edges, and the vertices.
#[derive(Clone, Debug)]
pub struct ScalingLimiter<T> {
    pub config: LimiterConfig<T>,
    points: Vec<Vec2<T>>,
    /// `values[p * n_dof + j] = φ_j(points[p])`
    values: Vec<T>,
    n_dof: usize,
}

impl<T: Real> ScalingLimiter<T> {
    pub fn new(disc: &Discretization<T>, config: LimiterConfig<T>) -> Self {
        let mut points = disc.volume_rule().points.clone();
        for local in 0..3 {
            for p in &disc.edge_rule().points {
                points.push(reference_edge_point(local, p.x));
            }
        }
        points.extend([
            Vec2::new(T::zero(), T::zero()),
            Vec2::new(T::one(), T::zero()),
            Vec2::new(T::zero(), T::one()),
        ]);
        let values = disc.basis().tabulate(&points).iter().map(|j| j.v).collect();
        Self {
            config,
            points,
            values,
            n_dof: disc.n_dof(),
        }
    }

    pub fn sample_points(&self) -> &[Vec2<T>] {
        &self.points
    }

    /// Minimum and maximum of `coeffs` over the sample set.
    pub fn extrema(&self, coeffs: &[T]) -> (T, T) {
        self.values
            .chunks(self.n_dof)
            .map(|phi| phi.iter().zip(coeffs).map(|(&p, &c)| p * c).sum::<T>())
            .fold((T::infinity(), T::neg_infinity()), |(lo, hi), v| {
                (lo.min(v), hi.max(v))
            })
    }

    /// Scaling factor `θ ∈ [0, 1]` for one element.
    pub fn theta(&self, average: T, min: T, max: T) -> T {
        let LimiterConfig { lower, upper } = self.config;
        let slack = |b: T| T::of(8.0) * T::epsilon() * b.abs().max(T::one());
        let mut theta = T::one();
        if max > upper + slack(upper) {
            theta = theta.min((upper - average) / (max - average));
        }
        if min < lower - slack(lower) {
            theta = theta.min((average - lower) / (average - min));
        }
        theta.max(T::zero())
    }

    /// Limits `field` in place. Fails if some cell average is already out
    /// of bounds, listing the offending elements.
    pub fn apply_in_place(&self, field: &mut DgField<T>) -> Result<()> {
        let bad: Vec<usize> = (0..field.n_elements())
            .filter(|&k| !self.config.admits_average(field.cell_average(k)))
            .collect();
        if !bad.is_empty() {
            return Err(Error::AverageOutOfBounds {
                lower: self.config.lower.to_f64_lossy(),
                upper: self.config.upper.to_f64_lossy(),
                elements: bad,
            });
        }
        let average_factor = crate::basis::Basis::<T>::constant_value();
        field.coeffs.par_chunks_mut(self.n_dof).for_each(|c| {
            let (min, max) = self.extrema(c);
            let theta = self.theta(c[0] * average_factor, min, max);
            if theta < T::one() {
                for v in &mut c[1..] {
                    *v *= theta;
                }
            }
        });
        Ok(())
    }
}

/// Returns the limited copy of `field`.
pub fn apply_scaling_limiter<T: Real>(
    field: &DgField<T>,
    limiter: &ScalingLimiter<T>,
) -> Result<DgField<T>> {
    let mut out = field.clone();
    limiter.apply_in_place(&mut out)?;
    Ok(out)
}
