//! Empirical energy stability and the direction-vector bound.

use crate::ddg::{DgField, Discretization, Operator, QuadraturePolicy, SchemeConfig, Variant};
use crate::error::Result;
use crate::linalg::Vec2;
use crate::mesh::build_uniform_mesh;
use crate::models::DiffusionModel;
use crate::timestep::{compute_dt, ssp_rk3_step, TimeConfig};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Clone, Debug)]
pub struct StabilitySettings {
    pub n_per_side: usize,
    pub degree: usize,
    pub variant: Variant,
    pub fields: usize,
    pub steps: usize,
    pub cfl: f64,
    pub seed: u64,
}

impl Default for StabilitySettings {
    fn default() -> Self {
        Self {
            n_per_side: 5,
            degree: 2,
            variant: Variant::Nonsymmetric,
            fields: 20,
            steps: 100,
            cfl: 0.1,
            seed: 0,
        }
    }
}

/// Worst observations over all random fields for one model.
#[derive(Clone, Debug, PartialEq)]
pub struct StabilityResult {
    pub model: String,
    /// Largest `(E_{n+1} − E_n) / E_n` over all steps.
    pub max_energy_growth: f64,
    /// Largest `∫ u L(u) / ‖u‖²` over all visited states.
    pub max_energy_rate: f64,
}

impl StabilityResult {
    pub const GROWTH_TOLERANCE: f64 = 1e-9;
    pub const RATE_TOLERANCE: f64 = 1e-10;

    pub fn passed(&self) -> bool {
        self.max_energy_growth <= Self::GROWTH_TOLERANCE
            && self.max_energy_rate <= Self::RATE_TOLERANCE
    }
}

fn random_field(d: &Discretization<f64>, rng: &mut ChaCha8Rng) -> DgField<f64> {
    let mut f = d.zero_field(0.0);
    f.coeffs
        .iter_mut()
        .for_each(|c| *c = rng.gen_range(-1.0..1.0));
    f
}

/// Integrates random initial fields with SSP-RK3 and records the energy
/// `‖u‖²` after every step together with the semi-discrete rate `∫ u L(u)`.
pub fn energy_study(
    model: &DiffusionModel<f64>,
    settings: &StabilitySettings,
) -> Result<StabilityResult> {
    let k = settings.degree;
    let mesh = build_uniform_mesh(
        model.origin,
        model.length,
        settings.n_per_side,
        model.boundary_kind,
    )?;
    let disc = Discretization::new(mesh, k, QuadraturePolicy::for_model(model, k))?;
    let op = Operator::new(
        &disc,
        model,
        SchemeConfig::with_defaults(settings.variant, k),
    );
    let time = TimeConfig::new(settings.cfl, f64::INFINITY);
    let mut rng = ChaCha8Rng::seed_from_u64(settings.seed);
    let (mut growth, mut rate) = (f64::NEG_INFINITY, f64::NEG_INFINITY);
    for _ in 0..settings.fields {
        let mut u = random_field(&disc, &mut rng);
        let mut energy = disc.energy(&u);
        for _ in 0..settings.steps {
            rate = rate.max(op.energy_rate(&u)? / energy);
            let dt = compute_dt(&disc, model, &u, &time);
            u = ssp_rk3_step(&u, dt, &|v: &DgField<f64>| op.apply(v), None)?;
            let next = disc.energy(&u);
            growth = growth.max((next - energy) / energy);
            energy = next;
        }
    }
    Ok(StabilityResult {
        model: model.name.to_string(),
        max_energy_growth: growth,
        max_energy_rate: rate,
    })
}

/// Smallest `γ*‖x‖ − |ξ(u)·x|` over random states `u` in `[lo, hi]`, unit
/// normals and vectors `x`, where `ξ(u) = A(u)ᵀn` and `γ*` bounds `A` over
/// the same range. Nonnegative when the bound holds.
pub fn direction_vector_slack(
    model: &DiffusionModel<f64>,
    lo: f64,
    hi: f64,
    samples: usize,
    seed: u64,
) -> f64 {
    let gamma_star = model.gamma_bounds(lo, hi).1;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = f64::INFINITY;
    for _ in 0..samples {
        let u = rng.gen_range(lo..=hi);
        let angle: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
        let n = Vec2::new(angle.cos(), angle.sin());
        let x = Vec2::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        let xi = crate::ddg::direction_vector(model, u, n);
        worst = worst.min(gamma_star * x.norm() - xi.dot(x).abs());
    }
    worst
}
