//! Direct discontinuous Galerkin discretisation with the direction-vector
//! flux: traces, numerical fluxes and residual assembly.
//!
//! On each element `K` and for each test function `v`, the semi-discrete
//! scheme reads
//!
//! ```text
//! ∫_K u_t v + ∫_K A(u)∇u·∇v − ∫_∂K (∇̂u·ξ) v + σ ∫_∂K ⟦u⟧ (∇̃v·ξ) = ∫_K S v
//! ```
//!
//! with `ξ = A({u})ᵀn` evaluated pointwise on the edge. The four variants
//! differ only in `σ` and the test-function flux `∇̃v`.

mod assemble;
mod field;
mod flux;
pub mod oracle;

pub use assemble::{assemble_residual, Discretization, Operator, QuadraturePolicy};
pub use field::{project_initial, DgField};
pub use flux::{direction_vector, gradient_flux, test_flux, TracePoint};

use crate::real::Real;
use std::fmt;
use std::str::FromStr;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Variant {
    Baseline,
    Ddgic,
    Symmetric,
    Nonsymmetric,
}

impl Variant {
    pub const ALL: [Variant; 4] = [
        Variant::Baseline,
        Variant::Ddgic,
        Variant::Symmetric,
        Variant::Nonsymmetric,
    ];

    /// Sign of the interface correction term.
    pub fn sigma(&self) -> i8 {
        match self {
            Variant::Baseline => 0,
            Variant::Ddgic | Variant::Symmetric => 1,
            Variant::Nonsymmetric => -1,
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Variant::Baseline => "baseline",
            Variant::Ddgic => "ddgic",
            Variant::Symmetric => "symmetric",
            Variant::Nonsymmetric => "nonsymmetric",
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Variant {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Variant::ALL
            .iter()
            .find(|v| v.as_str() == s)
            .copied()
            .ok_or_else(|| {
                format!(
                    "unknown variant `{s}` (expected baseline, ddgic, symmetric or nonsymmetric)"
                )
            })
    }
}

/// Variant and flux coefficients.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SchemeConfig<T> {
    pub variant: Variant,
    pub beta0: T,
    /// Penalty of the nonsymmetric test-function flux.
    pub beta0v: T,
    pub beta1: T,
    pub degree: usize,
}

impl<T: Real> SchemeConfig<T> {
    /// `β₀ = (k+1)²`, `β₀ᵥ = β₀/2`, `β₁ = 1/(2k(k+1))`. Degree zero has no
    /// second-derivative term and uses `β₀ = 1`, `β₁ = 0`.
    pub fn with_defaults(variant: Variant, degree: usize) -> Self {
        let (beta0, beta1) = if degree == 0 {
            (T::one(), T::zero())
        } else {
            let k = T::of_usize(degree);
            let kp1 = k + T::one();
            (kp1 * kp1, T::one() / (T::of(2.0) * k * kp1))
        };
        Self {
            variant,
            beta0,
            beta0v: beta0 * T::of(0.5),
            beta1,
            degree,
        }
    }

    pub fn sigma(&self) -> T {
        T::of(f64::from(self.variant.sigma()))
    }

    /// `(penalty, second-derivative)` coefficients of the test-function flux,
    /// or `None` when `∇̃v = 0`.
    pub fn test_flux_coefficients(&self) -> Option<(T, T)> {
        match self.variant {
            Variant::Baseline => None,
            Variant::Ddgic => Some((T::zero(), T::zero())),
            Variant::Symmetric => Some((self.beta0, self.beta1)),
            Variant::Nonsymmetric => Some((self.beta0v, self.beta1)),
        }
    }
}

#[cfg(test)]
mod config_tests {
    use super::*;

    #[test]
    fn sigma_per_variant() {
        assert_eq!(Variant::Baseline.sigma(), 0);
        assert_eq!(Variant::Ddgic.sigma(), 1);
        assert_eq!(Variant::Symmetric.sigma(), 1);
        assert_eq!(Variant::Nonsymmetric.sigma(), -1);
    }

    #[test]
    fn default_coefficients() {
        let s = SchemeConfig::<f64>::with_defaults(Variant::Nonsymmetric, 2);
        assert_eq!(s.beta0, 9.0);
        assert_eq!(s.beta0v, 4.5);
        assert!((s.beta1 - 1.0 / 12.0).abs() < 1e-16);
        let s4 = SchemeConfig::<f64>::with_defaults(Variant::Ddgic, 4);
        assert_eq!(s4.beta0, 25.0);
        assert!((s4.beta1 - 1.0 / 40.0).abs() < 1e-16);
        let s0 = SchemeConfig::<f64>::with_defaults(Variant::Symmetric, 0);
        assert_eq!((s0.beta0, s0.beta1), (1.0, 0.0));
    }

    #[test]
    fn variant_names() {
        for v in Variant::ALL {
            assert_eq!(v.as_str().parse::<Variant>().unwrap(), v);
        }
        assert!("sipg".parse::<Variant>().is_err());
    }
}
