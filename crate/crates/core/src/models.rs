//! Catalogue of diffusion problems `∂U/∂t = ∇·(A(U)∇U) + S`.

use crate::linalg::{Mat2, Vec2};
use crate::mesh::BoundaryKind;
use crate::real::Real;
use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

/// Names accepted in run configurations.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ModelName {
    Heat,
    Anisotropic,
    AnisotropicSymmetric,
    Porous,
    PorousManufactured,
    Bumps,
    Block,
    Blowup,
}

impl ModelName {
    pub const ALL: [ModelName; 8] = [
        ModelName::Heat,
        ModelName::Anisotropic,
        ModelName::AnisotropicSymmetric,
        ModelName::Porous,
        ModelName::PorousManufactured,
        ModelName::Bumps,
        ModelName::Block,
        ModelName::Blowup,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            ModelName::Heat => "heat",
            ModelName::Anisotropic => "anisotropic",
            ModelName::AnisotropicSymmetric => "anisotropic_symmetric",
            ModelName::Porous => "porous",
            ModelName::PorousManufactured => "porous_manufactured",
            ModelName::Bumps => "bumps",
            ModelName::Block => "block",
            ModelName::Blowup => "blowup",
        }
    }

    /// Builds the model with diffusion constant `mu` and porous-medium exponent
    /// `gamma_exp` (ignored by models that have no exponent).
    pub fn build<T: Real>(&self, mu: T, gamma_exp: T) -> DiffusionModel<T> {
        match self {
            ModelName::Heat => heat_model(mu),
            ModelName::Anisotropic => anisotropic_model(mu),
            ModelName::AnisotropicSymmetric => anisotropic_symmetric_model(mu),
            ModelName::Porous => porous_medium_model(mu, gamma_exp, false),
            ModelName::PorousManufactured => porous_medium_model(mu, gamma_exp, true),
            ModelName::Bumps => merging_bumps_model(mu),
            ModelName::Block => square_block_model(mu),
            ModelName::Blowup => blowup_model(mu),
        }
    }
}

impl fmt::Display for ModelName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ModelName {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ModelName::ALL
            .iter()
            .find(|m| m.as_str() == s)
            .copied()
            .ok_or_else(|| {
                let names: Vec<_> = ModelName::ALL.iter().map(|m| m.as_str()).collect();
                format!(
                    "unknown model `{s}` (expected one of: {})",
                    names.join(", ")
                )
            })
    }
}

#[derive(Clone, Copy, Debug)]
pub enum Diffusion<T> {
    Constant(Mat2<T>),
    /// `μ γ u^{γ−1} 𝕀`
    Porous {
        mu: T,
        exponent: T,
    },
    /// `μ diag(2, 4.5 √u)`
    Blowup {
        mu: T,
    },
}

#[derive(Clone, Copy, Debug)]
pub enum Source<T> {
    None,
    /// `U_t − μΔ(U^γ)` for the enforced solution `e^{−8π²μt} sin(2π(x+y))`.
    PorousManufactured {
        mu: T,
        exponent: T,
    },
    /// `μ u²`
    Reaction {
        mu: T,
    },
}

#[derive(Clone, Copy, Debug)]
pub enum ExactSolution<T> {
    /// `e^{−8π²μt} cos(2π(x+y))`
    HeatWave { mu: T },
    /// `e^{−32π²μt} cos(2πy) cos(4πx − 2πy)`
    AnisotropicWave { mu: T },
    /// `e^{−8π²μt} sin(2π(x+y))`
    SineWave { mu: T },
}

#[derive(Clone, Copy, Debug)]
pub enum InitialData<T> {
    FromExact,
    /// Porous-medium decay of `sin(2π(x+y))` with no known exact solution.
    Sine,
    Bumps,
    Block,
    /// `amplitude · sin(πx) sin(πy)`
    SineProduct {
        amplitude: T,
    },
}

/// A diffusion problem with its data.
#[derive(Clone, Debug)]
pub struct DiffusionModel<T> {
    pub name: ModelName,
    pub diffusion: Diffusion<T>,
    pub source: Source<T>,
    pub exact: Option<ExactSolution<T>>,
    pub initial: InitialData<T>,
    pub boundary_kind: BoundaryKind,
    pub origin: Vec2<T>,
    pub length: T,
    /// Nominal diffusion constant `μ`.
    pub mu: T,
    /// Range of solution values the model is posed on.
    pub solution_range: (T, T),
    /// Bounds for the scaling limiter, when the problem needs one.
    pub solution_bounds: Option<(T, T)>,
    /// Strongly nonlinear problems integrate to degree `4k+1` instead of `2k+1`.
    pub strongly_nonlinear: bool,
}

fn unit_square<T: Real>() -> (Vec2<T>, T) {
    (Vec2::new(T::zero(), T::zero()), T::one())
}

pub fn heat_model<T: Real>(mu: T) -> DiffusionModel<T> {
    let (origin, length) = unit_square();
    DiffusionModel {
        name: ModelName::Heat,
        diffusion: Diffusion::Constant(Mat2::identity().scale(mu)),
        source: Source::None,
        exact: Some(ExactSolution::HeatWave { mu }),
        initial: InitialData::FromExact,
        boundary_kind: BoundaryKind::Periodic,
        origin,
        length,
        mu,
        solution_range: (-T::one(), T::one()),
        solution_bounds: None,
        strongly_nonlinear: false,
    }
}

/// Constant nonsymmetric matrix `μ [[2, 1], [2, 3]]`.
pub fn anisotropic_model<T: Real>(mu: T) -> DiffusionModel<T> {
    constant_matrix_model(
        ModelName::Anisotropic,
        mu,
        Mat2::new(T::of(2.0), T::one(), T::of(2.0), T::of(3.0)),
    )
}

/// Same operator written with the symmetric matrix `μ [[2, 1.5], [1.5, 3]]`.
pub fn anisotropic_symmetric_model<T: Real>(mu: T) -> DiffusionModel<T> {
    constant_matrix_model(
        ModelName::AnisotropicSymmetric,
        mu,
        Mat2::new(T::of(2.0), T::of(1.5), T::of(1.5), T::of(3.0)),
    )
}

fn constant_matrix_model<T: Real>(name: ModelName, mu: T, m: Mat2<T>) -> DiffusionModel<T> {
    let (origin, length) = unit_square();
    DiffusionModel {
        name,
        diffusion: Diffusion::Constant(m.scale(mu)),
        source: Source::None,
        exact: Some(ExactSolution::AnisotropicWave { mu }),
        initial: InitialData::FromExact,
        boundary_kind: BoundaryKind::Periodic,
        origin,
        length,
        mu,
        solution_range: (-T::one(), T::one()),
        solution_bounds: None,
        strongly_nonlinear: false,
    }
}

/// Porous medium equation `U_t = μΔ(U^γ)` on the periodic unit square.
pub fn porous_medium_model<T: Real>(mu: T, exponent: T, manufactured: bool) -> DiffusionModel<T> {
    let (origin, length) = unit_square();
    DiffusionModel {
        name: if manufactured {
            ModelName::PorousManufactured
        } else {
            ModelName::Porous
        },
        diffusion: Diffusion::Porous { mu, exponent },
        source: if manufactured {
            Source::PorousManufactured { mu, exponent }
        } else {
            Source::None
        },
        exact: manufactured.then_some(ExactSolution::SineWave { mu }),
        initial: if manufactured {
            InitialData::FromExact
        } else {
            InitialData::Sine
        },
        boundary_kind: BoundaryKind::Periodic,
        origin,
        length,
        mu,
        solution_range: (-T::one(), T::one()),
        solution_bounds: None,
        strongly_nonlinear: true,
    }
}

/// Two compactly supported bumps on `[−10, 10]²` that spread and merge.
pub fn merging_bumps_model<T: Real>(mu: T) -> DiffusionModel<T> {
    let two = T::of(2.0);
    DiffusionModel {
        name: ModelName::Bumps,
        diffusion: Diffusion::Porous { mu, exponent: two },
        source: Source::None,
        exact: None,
        initial: InitialData::Bumps,
        boundary_kind: BoundaryKind::Dirichlet,
        origin: Vec2::new(T::of(-10.0), T::of(-10.0)),
        length: T::of(20.0),
        mu,
        solution_range: (T::zero(), T::of(-1.0 / 6.0).exp()),
        solution_bounds: None,
        strongly_nonlinear: false,
    }
}

/// Indicator of `[−½, ½]²` on `[−1, 1]²`, kept in `[0, 1]` by the limiter.
pub fn square_block_model<T: Real>(mu: T) -> DiffusionModel<T> {
    DiffusionModel {
        name: ModelName::Block,
        diffusion: Diffusion::Porous {
            mu,
            exponent: T::of(2.0),
        },
        source: Source::None,
        exact: None,
        initial: InitialData::Block,
        boundary_kind: BoundaryKind::Dirichlet,
        origin: Vec2::new(-T::one(), -T::one()),
        length: T::of(2.0),
        mu,
        solution_range: (T::zero(), T::one()),
        solution_bounds: Some((T::zero(), T::one())),
        strongly_nonlinear: false,
    }
}

/// `U_t = μ(2U_xx + 3(U^{1.5})_yy + U²)`, which blows up in finite time.
pub fn blowup_model<T: Real>(mu: T) -> DiffusionModel<T> {
    let (origin, length) = unit_square();
    DiffusionModel {
        name: ModelName::Blowup,
        diffusion: Diffusion::Blowup { mu },
        source: Source::Reaction { mu },
        exact: None,
        initial: InitialData::SineProduct {
            amplitude: T::of(200.0),
        },
        boundary_kind: BoundaryKind::Dirichlet,
        origin,
        length,
        mu,
        solution_range: (T::zero(), T::infinity()),
        solution_bounds: Some((T::zero(), T::infinity())),
        strongly_nonlinear: false,
    }
}

/// `u^m` for the porous-medium coefficient. Non-integer and odd powers are
/// taken of `max(u, 0)` so the coefficient stays real and nonnegative.
#[inline]
fn porous_power<T: Real>(u: T, m: T) -> T {
    if m == T::zero() {
        return T::one();
    }
    let rounded = m.round();
    if rounded == m && rounded.to_i32().is_some_and(|i| i % 2 == 0) {
        u.powi(rounded.to_i32().unwrap_or(0))
    } else if rounded == m {
        u.max(T::zero()).powi(rounded.to_i32().unwrap_or(0))
    } else {
        u.max(T::zero()).powf(m)
    }
}

/// `u^m` as a real power: exact for integer `m`, of `max(u, 0)` otherwise.
#[inline]
fn real_power<T: Real>(u: T, m: T) -> T {
    match m.to_i32() {
        Some(i) if T::of(f64::from(i)) == m => u.powi(i),
        _ => u.max(T::zero()).powf(m),
    }
}

impl<T: Real> DiffusionModel<T> {
    /// Diffusion matrix `A(u)`.
    #[inline]
    pub fn a(&self, u: T) -> Mat2<T> {
        match self.diffusion {
            Diffusion::Constant(m) => m,
            Diffusion::Porous { mu, exponent } => {
                Mat2::identity().scale(mu * exponent * porous_power(u, exponent - T::one()))
            }
            Diffusion::Blowup { mu } => {
                Mat2::diag(T::of(2.0) * mu, T::of(4.5) * mu * u.max(T::zero()).sqrt())
            }
        }
    }

    pub fn is_linear(&self) -> bool {
        matches!(self.diffusion, Diffusion::Constant(_))
    }

    pub fn has_source(&self) -> bool {
        !matches!(self.source, Source::None)
    }

    /// Source term `S(u, x, y, t)`; zero when the model has none.
    #[inline]
    pub fn source(&self, u: T, x: Vec2<T>, t: T) -> T {
        match self.source {
            Source::None => T::zero(),
            Source::Reaction { mu } => mu * u * u,
            Source::PorousManufactured { mu, exponent } => {
                let two_pi = T::of(2.0 * PI);
                let k2 = T::of(8.0 * PI * PI);
                let decay = (-k2 * mu * t).exp();
                let arg = two_pi * (x.x + x.y);
                let uu = decay * arg.sin();
                let grad_sq = k2 * decay * decay * arg.cos() * arg.cos();
                let lap = -k2 * uu;
                let g = exponent;
                let u_t = -k2 * mu * uu;
                // Δ(U^γ) = γ(γ−1) U^{γ−2} |∇U|² + γ U^{γ−1} ΔU
                let lap_power = g * (g - T::one()) * real_power(uu, g - T::of(2.0)) * grad_sq
                    + g * real_power(uu, g - T::one()) * lap;
                u_t - mu * lap_power
            }
        }
    }

    pub fn exact_solution(&self, x: Vec2<T>, t: T) -> Option<T> {
        let two_pi = T::of(2.0 * PI);
        self.exact.map(|exact| match exact {
            ExactSolution::HeatWave { mu } => {
                (-T::of(8.0 * PI * PI) * mu * t).exp() * (two_pi * (x.x + x.y)).cos()
            }
            ExactSolution::AnisotropicWave { mu } => {
                (-T::of(32.0 * PI * PI) * mu * t).exp()
                    * (two_pi * x.y).cos()
                    * (T::of(4.0 * PI) * x.x - two_pi * x.y).cos()
            }
            ExactSolution::SineWave { mu } => {
                (-T::of(8.0 * PI * PI) * mu * t).exp() * (two_pi * (x.x + x.y)).sin()
            }
        })
    }

    /// Initial data `U₀(x, y)`.
    pub fn initial(&self, x: Vec2<T>) -> T {
        match self.initial {
            InitialData::FromExact => self.exact_solution(x, T::zero()).unwrap_or_else(T::zero),
            InitialData::Sine => (T::of(2.0 * PI) * (x.x + x.y)).sin(),
            InitialData::Bumps => {
                let six = T::of(6.0);
                let bump = |cx: f64, cy: f64| {
                    let r2 = (x.x - T::of(cx)).powi(2) + (x.y - T::of(cy)).powi(2);
                    (r2 < six).then(|| (-T::one() / (six - r2)).exp())
                };
                bump(2.0, -2.0)
                    .or_else(|| bump(-2.0, 2.0))
                    .unwrap_or_else(T::zero)
            }
            InitialData::Block => {
                let half = T::of(0.5);
                if x.x.abs() <= half && x.y.abs() <= half {
                    T::one()
                } else {
                    T::zero()
                }
            }
            InitialData::SineProduct { amplitude } => {
                let pi = T::PI();
                amplitude * (pi * x.x).sin() * (pi * x.y).sin()
            }
        }
    }

    /// Dirichlet data `g(x, y, t)`: the exact solution when known, else zero.
    pub fn boundary_value(&self, x: Vec2<T>, t: T) -> T {
        self.exact_solution(x, t).unwrap_or_else(T::zero)
    }

    /// Bounds `[γ, γ*]` for `u ∈ [lo, hi]` such that `nᵀA(u)n ≥ γ|n|²` and
    /// `‖A(u)ᵀn‖ ≤ γ*|n|`. For symmetric `A` these are the extreme eigenvalues;
    /// for a nonsymmetric matrix they are the smallest eigenvalue of the
    /// symmetric part and the largest singular value.
    pub fn gamma_bounds(&self, lo: T, hi: T) -> (T, T) {
        match self.diffusion {
            Diffusion::Constant(m) => (m.symmetric_part_eigenvalues().0, m.singular_values().1),
            Diffusion::Porous { mu, exponent } => {
                let c = mu * exponent;
                let m = exponent - T::one();
                let mut vals = vec![porous_power(lo, m), porous_power(hi, m)];
                if lo < T::zero() && hi > T::zero() {
                    vals.push(porous_power(T::zero(), m));
                }
                let min = vals.iter().fold(T::infinity(), |a, &b| a.min(b));
                let max = vals.iter().fold(T::neg_infinity(), |a, &b| a.max(b));
                (c * min, c * max)
            }
            Diffusion::Blowup { mu } => {
                let two = T::of(2.0) * mu;
                let s = |u: T| T::of(4.5) * mu * u.max(T::zero()).sqrt();
                (two.min(s(lo)), two.max(s(hi)))
            }
        }
    }

    /// Bounds over the model's declared solution range.
    pub fn declared_gamma_bounds(&self) -> (T, T) {
        self.gamma_bounds(self.solution_range.0, self.solution_range.1)
    }

    /// Largest eigenvalue of `A(u)` over `[lo, hi]`; equals the largest
    /// singular value except for nonsymmetric constant matrices.
    pub fn max_eigenvalue(&self, lo: T, hi: T) -> T {
        match self.diffusion {
            Diffusion::Constant(m) => m
                .real_eigenvalues()
                .map(|(_, hi)| hi)
                .unwrap_or_else(|| m.singular_values().1),
            _ => self.gamma_bounds(lo, hi).1,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// `U_t − ∇·(A(U)∇U) − S` by central differences of the exact solution.
    fn strong_residual(model: &DiffusionModel<f64>, x: Vec2<f64>, t: f64) -> f64 {
        let u = |p: Vec2<f64>, s: f64| model.exact_solution(p, s).unwrap();
        let h = 1e-4;
        let ut = (u(x, t + h) - u(x, t - h)) / (2.0 * h);
        // flux F = A(U)∇U by central differences, divergence by central differences
        let flux = |p: Vec2<f64>| {
            let gx = (u(p + Vec2::new(h, 0.0), t) - u(p - Vec2::new(h, 0.0), t)) / (2.0 * h);
            let gy = (u(p + Vec2::new(0.0, h), t) - u(p - Vec2::new(0.0, h), t)) / (2.0 * h);
            model.a(u(p, t)).mul_vec(Vec2::new(gx, gy))
        };
        let div = (flux(x + Vec2::new(h, 0.0)).x - flux(x - Vec2::new(h, 0.0)).x) / (2.0 * h)
            + (flux(x + Vec2::new(0.0, h)).y - flux(x - Vec2::new(0.0, h)).y) / (2.0 * h);
        ut - div - model.source(u(x, t), x, t)
    }

    #[test]
    fn exact_solutions_satisfy_their_equations() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let models = [
            heat_model(0.01),
            anisotropic_model(0.01),
            anisotropic_symmetric_model(0.01),
            porous_medium_model(0.01, 3.0, true),
            heat_model(0.3),
            anisotropic_model(0.2),
            porous_medium_model(0.1, 3.0, true),
        ];
        for model in &models {
            for _ in 0..50 {
                let x = Vec2::new(rng.gen::<f64>(), rng.gen::<f64>());
                let t = rng.gen::<f64>();
                let r = strong_residual(model, x, t);
                let scale = model.mu * 400.0;
                assert!(
                    r.abs() <= 1e-6 * scale.max(1.0),
                    "{}: residual {r}",
                    model.name
                );
            }
        }
    }

    #[test]
    fn heat_and_anisotropic_data() {
        let m = heat_model(3.7);
        assert_eq!(m.a(123.0), Mat2::identity().scale(3.7));
        assert_eq!(m.declared_gamma_bounds(), (3.7, 3.7));
        let x = Vec2::new(0.3, 0.45);
        let want = (2.0 * PI * 0.75).cos();
        assert!((m.exact_solution(x, 0.0).unwrap() - want).abs() < 1e-15);

        let a = anisotropic_model(0.5_f64);
        let (lo, hi) = a.a(0.0).real_eigenvalues().unwrap();
        assert!((lo - 0.5).abs() < 1e-14 && (hi - 2.0).abs() < 1e-14);
        assert!(!a.has_source());
        let e = a.exact_solution(x, 0.0).unwrap();
        let want = (2.0 * PI * 0.45).cos() * (4.0 * PI * 0.3 - 2.0 * PI * 0.45).cos();
        assert!((e - want).abs() < 1e-15);
    }

    #[test]
    fn porous_coefficients() {
        let m = porous_medium_model(0.25, 3.0, true);
        assert_eq!(m.a(2.0), Mat2::identity().scale(0.25 * 12.0));
        assert_eq!(m.a(0.0), Mat2::identity().scale(0.0));
        // negative u keeps the even power
        assert_eq!(m.a(-1.0), Mat2::identity().scale(0.75));
        let (lo, hi) = m.declared_gamma_bounds();
        assert_eq!((lo, hi), (0.0, 0.75));

        let quadratic = square_block_model(1.0);
        assert_eq!(quadratic.a(1.0), Mat2::identity().scale(2.0));
        assert_eq!(quadratic.a(-0.5), Mat2::identity().scale(0.0));
        assert_eq!(quadratic.solution_bounds, Some((0.0, 1.0)));
    }

    #[test]
    fn manufactured_source_where_solution_vanishes() {
        // U = 0 on x + y = 1/2; there S = U_t = 0 and all Δ(U³) terms vanish
        let m = porous_medium_model(0.01_f64, 3.0, true);
        let x = Vec2::new(0.2, 0.3);
        assert!(m.exact_solution(x, 0.4).unwrap().abs() < 1e-15);
        assert!(m.source(0.0, x, 0.4).abs() < 1e-15);
    }

    #[test]
    fn bump_and_block_initial_data() {
        let b = merging_bumps_model(1.0);
        assert!((b.initial(Vec2::new(2.0, -2.0)) - (-1.0f64 / 6.0).exp()).abs() < 1e-15);
        assert!((b.initial(Vec2::new(-2.0, 2.0)) - (-1.0f64 / 6.0).exp()).abs() < 1e-15);
        assert_eq!(b.initial(Vec2::new(9.0, 9.0)), 0.0);
        assert_eq!(b.boundary_value(Vec2::new(10.0, 3.0), 2.0), 0.0);

        let k = square_block_model(1.0);
        assert_eq!(k.initial(Vec2::new(0.0, 0.0)), 1.0);
        assert_eq!(k.initial(Vec2::new(0.9, 0.0)), 0.0);
    }

    #[test]
    fn blowup_data() {
        let m = blowup_model(1.0_f64);
        assert_eq!(m.a(4.0), Mat2::diag(2.0, 9.0));
        assert!((m.initial(Vec2::new(0.5, 0.5)) - 200.0).abs() < 1e-12);
        assert_eq!(m.source(10.0, Vec2::zero(), 0.0), 100.0);
        assert_eq!(m.a(-1.0), Mat2::diag(2.0, 0.0));
    }

    #[test]
    fn model_names_round_trip() {
        for name in ModelName::ALL {
            assert_eq!(name.as_str().parse::<ModelName>().unwrap(), name);
        }
        assert!("navier_stokes".parse::<ModelName>().is_err());
    }

    #[test]
    fn positive_definite_over_declared_range() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let models = [
            heat_model(0.01),
            anisotropic_model(0.01),
            anisotropic_symmetric_model(1.0),
            square_block_model(1.0),
            merging_bumps_model(1.0),
        ];
        for m in &models {
            let (lo, hi) = m.solution_range;
            let (g, g_star) = m.declared_gamma_bounds();
            for _ in 0..200 {
                let u = lo + (hi - lo) * rng.gen::<f64>();
                let a = m.a(u);
                let (e_lo, e_hi) = a.symmetric_part_eigenvalues();
                let eps = 1e-10 * g_star;
                assert!(e_lo >= g - eps && e_hi <= g_star + eps);
                let x = Vec2::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5);
                if u > 1e-3 || m.is_linear() {
                    assert!(a.bilinear(x, x) > 0.0);
                }
            }
        }
    }
}
