//! Self-checks of the discretisation building blocks, each compared with a
//! fixed tolerance.

use crate::basis::Jet;
use crate::basis::{Basis, MAX_DEGREE};
use crate::ddg::oracle::{physical_jets, reference_residual};
use crate::ddg::{
    assemble_residual, direction_vector, gradient_flux, project_initial, test_flux, DgField,
    Discretization, QuadraturePolicy, SchemeConfig, TracePoint, Variant,
};
use crate::error::Result;
use crate::limiter::{LimiterConfig, ScalingLimiter};
use crate::linalg::Vec2;
use crate::mesh::{build_uniform_mesh, BoundaryKind, Neighbor};
use crate::models::{anisotropic_model, blowup_model, heat_model, porous_medium_model};
use crate::quadrature::{edge_rule, volume_rule, MAX_EXACTNESS};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::fmt;
use std::time::{Duration, Instant};

#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub name: &'static str,
    /// Largest deviation observed.
    pub value: f64,
    pub tolerance: f64,
}

impl Check {
    pub fn passed(&self) -> bool {
        self.value.is_finite() && self.value <= self.tolerance
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = if self.passed() { "PASS" } else { "FAIL" };
        write!(
            f,
            "{tag} {:<28} {:.3e} (tol {:.0e})",
            self.name, self.value, self.tolerance
        )
    }
}

#[derive(Clone, Debug)]
pub struct VerifyReport {
    pub checks: Vec<Check>,
    pub elapsed: Duration,
}

impl VerifyReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(Check::passed)
    }
}

impl fmt::Display for VerifyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            writeln!(f, "{c}")?;
        }
        write!(
            f,
            "{} of {} checks passed in {:.2}s",
            self.checks.iter().filter(|c| c.passed()).count(),
            self.checks.len(),
            self.elapsed.as_secs_f64()
        )
    }
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|i| i as f64).product()
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |a, &b| a.max(b.abs()))
}

fn disc(n: usize, k: usize, kind: BoundaryKind) -> Result<Discretization<f64>> {
    let mesh = build_uniform_mesh(Vec2::new(0.0, 0.0), 1.0, n, kind)?;
    Discretization::new(mesh, k, QuadraturePolicy::standard(k))
}

fn random_field(d: &Discretization<f64>, rng: &mut ChaCha8Rng) -> DgField<f64> {
    let mut f = d.zero_field(0.0);
    f.coeffs
        .iter_mut()
        .for_each(|c| *c = rng.gen_range(-1.0..1.0));
    f
}

/// Relative error of every rule on every monomial within its exactness.
fn quadrature_monomials() -> Result<f64> {
    let mut worst: f64 = 0.0;
    for e in 0..=MAX_EXACTNESS {
        let tri = volume_rule::<f64>(e)?;
        let line = edge_rule::<f64>(e)?;
        for a in 0..=e {
            let exact = 1.0 / (a as f64 + 1.0);
            let got = line.integrate(|p| p.x.powi(a as i32));
            worst = worst.max((got - exact).abs() / exact);
            for b in 0..=e - a {
                let exact = factorial(a) * factorial(b) / factorial(a + b + 2);
                let got = tri.integrate(|p| p.x.powi(a as i32) * p.y.powi(b as i32));
                worst = worst.max((got - exact).abs() / exact);
            }
        }
    }
    Ok(worst)
}

/// `max |∫ φᵢ φⱼ − δᵢⱼ|` on the reference triangle.
fn mass_matrix() -> Result<f64> {
    let mut worst: f64 = 0.0;
    for k in 0..=MAX_DEGREE {
        let basis = Basis::<f64>::new(k)?;
        let rule = volume_rule::<f64>(2 * k)?;
        let values = basis.eval_basis(&rule.points);
        for i in 0..basis.n_dof() {
            for j in 0..basis.n_dof() {
                let m: f64 = values
                    .iter()
                    .zip(&rule.weights)
                    .map(|(v, &w)| w * v[i] * v[j])
                    .sum();
                worst = worst.max((m - if i == j { 1.0 } else { 0.0 }).abs());
            }
        }
    }
    Ok(worst)
}

/// Average drift and bound violation after limiting random fields.
fn limiter(rng: &mut ChaCha8Rng) -> Result<(f64, f64)> {
    let d = disc(3, 2, BoundaryKind::Periodic)?;
    let lim = ScalingLimiter::new(&d, LimiterConfig::new(0.0, 1.0)?);
    let c0 = Basis::<f64>::constant_value();
    let (mut drift, mut excess) = (0.0f64, 0.0f64);
    for _ in 0..50 {
        let mut u = random_field(&d, rng);
        for k in 0..u.n_elements() {
            u.element_mut(k)[0] = rng.gen_range(0.0..1.0) / c0;
        }
        let before = u.cell_averages();
        lim.apply_in_place(&mut u)?;
        for (k, b) in before.iter().enumerate() {
            drift = drift.max((u.cell_average(k) - b).abs());
            let (lo, hi) = lim.extrema(u.element(k));
            excess = excess.max(-lo).max(hi - 1.0);
        }
    }
    Ok((drift, excess))
}

fn random_jet(rng: &mut ChaCha8Rng) -> Jet<f64> {
    Jet {
        v: rng.gen_range(0.0..2.0),
        dx: rng.gen_range(-1.0..1.0),
        dy: rng.gen_range(-1.0..1.0),
        dxx: rng.gen_range(-1.0..1.0),
        dxy: rng.gen_range(-1.0..1.0),
        dyy: rng.gen_range(-1.0..1.0),
    }
}

/// `|(A ∇̂u)·n − ∇̂u·ξ|`, relative, on random traces.
fn adjoint_identity(rng: &mut ChaCha8Rng) -> f64 {
    let models = [
        heat_model(1.0),
        anisotropic_model(1.0),
        porous_medium_model(0.5, 3.0, false),
        blowup_model(1.0),
    ];
    let mut worst: f64 = 0.0;
    for _ in 0..1000 {
        let angle: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
        let normal = Vec2::new(angle.cos(), angle.sin());
        let trace = TracePoint {
            minus: random_jet(rng),
            plus: random_jet(rng),
            normal,
        };
        for model in &models {
            let g = gradient_flux(&trace, 0.2, 9.0, 1.0 / 12.0);
            let lhs = model.a(trace.average()).mul_vec(g).dot(normal);
            let rhs = g.dot(direction_vector(model, trace.average(), normal));
            worst = worst.max((lhs - rhs).abs() / lhs.abs().max(1.0));
        }
    }
    worst
}

/// On a continuous polynomial every gradient and test flux reduces to the
/// exact gradient at interior edge points (relative to `max(1, |∇u|)`).
fn flux_consistency() -> Result<f64> {
    let mut worst: f64 = 0.0;
    for k in 1..=3 {
        let d = disc(3, k, BoundaryKind::Dirichlet)?;
        let p = |x: Vec2<f64>| {
            (0..=k)
                .map(|i| (0.3 + i as f64) * x.x.powi(i as i32) * x.y.powi((k - i) as i32))
                .sum::<f64>()
                + 0.5
        };
        let u = project_initial(&d, p);
        let mesh = d.mesh();
        for edge in &mesh.edges {
            let other = match edge.neighbor {
                Neighbor::Element(e) => e,
                _ => continue,
            };
            let verts = mesh.element_vertices(edge.owner);
            let (a, b) = (verts[edge.owner_local], verts[(edge.owner_local + 1) % 3]);
            for s in d.edge_rule().points.iter().map(|q| q.x) {
                let x = a + (b - a).scale(s);
                let minus = Jet::combine(u.element(edge.owner), &physical_jets(&d, edge.owner, x));
                let plus = Jet::combine(u.element(other), &physical_jets(&d, other, x));
                let trace = TracePoint {
                    minus,
                    plus,
                    normal: edge.normal,
                };
                let exact = minus.grad();
                let scale = exact.norm().max(1.0);
                for v in Variant::ALL {
                    let scheme = SchemeConfig::with_defaults(v, k);
                    let g = gradient_flux(&trace, edge.h_e, scheme.beta0, scheme.beta1);
                    worst = worst.max((g - exact).norm() / scale);
                    if v != Variant::Baseline {
                        worst = worst
                            .max((test_flux(&scheme, &trace, edge.h_e) - exact).norm() / scale);
                    }
                }
                worst = worst.max((plus.grad() - exact).norm() / scale);
            }
        }
    }
    Ok(worst)
}

/// Residual of a constant field with exact coefficients.
fn constant_residual() -> Result<f64> {
    let mut worst: f64 = 0.0;
    for k in 0..=3 {
        let d = disc(4, k, BoundaryKind::Periodic)?;
        let mut u = d.zero_field(0.0);
        for e in 0..u.n_elements() {
            u.element_mut(e)[0] = 2.5 / Basis::<f64>::constant_value();
        }
        for model in [
            heat_model(0.7),
            anisotropic_model(0.3),
            porous_medium_model(0.5, 3.0, false),
        ] {
            for v in Variant::ALL {
                let r = assemble_residual(&d, &model, &SchemeConfig::with_defaults(v, k), &u, 0.0)?;
                worst = worst.max(max_abs(&r.coeffs));
            }
        }
    }
    Ok(worst)
}

/// Assembly against the independent reference residual on two elements.
fn two_element_oracle(rng: &mut ChaCha8Rng) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for k in 1..=3 {
        let d = disc(1, k, BoundaryKind::Dirichlet)?;
        let u = random_field(&d, rng);
        for model in [anisotropic_model(1.0), heat_model(0.5)] {
            for v in Variant::ALL {
                let s = SchemeConfig::with_defaults(v, k);
                let fast = assemble_residual(&d, &model, &s, &u, 0.1)?;
                let slow = reference_residual(&d, &model, &s, &u, 0.1);
                let scale = max_abs(&slow.coeffs).max(1.0);
                let diff: Vec<f64> = fast
                    .coeffs
                    .iter()
                    .zip(&slow.coeffs)
                    .map(|(a, b)| a - b)
                    .collect();
                worst = worst.max(max_abs(&diff) / scale);
            }
        }
    }
    Ok(worst)
}

/// Runs every check. `seed` fixes the random inputs.
pub fn run_verify(seed: u64) -> Result<VerifyReport> {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (drift, excess) = limiter(&mut rng)?;
    let checks = vec![
        Check {
            name: "quadrature monomials",
            value: quadrature_monomials()?,
            tolerance: 1e-11,
        },
        Check {
            name: "mass matrix identity",
            value: mass_matrix()?,
            tolerance: 1e-12,
        },
        Check {
            name: "limiter average",
            value: drift,
            tolerance: 1e-14,
        },
        Check {
            name: "limiter bounds",
            value: excess.max(0.0),
            tolerance: 1e-12,
        },
        Check {
            name: "adjoint identity",
            value: adjoint_identity(&mut rng),
            tolerance: 1e-13,
        },
        Check {
            name: "flux consistency",
            value: flux_consistency()?,
            tolerance: 1e-12,
        },
        Check {
            name: "constant-state residual",
            value: constant_residual()?,
            tolerance: 1e-12,
        },
        Check {
            name: "two-element oracle",
            value: two_element_oracle(&mut rng)?,
            tolerance: 1e-12,
        },
    ];
    Ok(VerifyReport {
        checks,
        elapsed: start.elapsed(),
    })
}
