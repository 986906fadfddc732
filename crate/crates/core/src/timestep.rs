//! Explicit SSP-RK3 time stepping with the diffusive step-size rule and
//! step rejection by halving.

use crate::ddg::{DgField, Discretization};
use crate::error::{Error, Result};
use crate::limiter::ScalingLimiter;
use crate::models::DiffusionModel;
use crate::real::Real;
use std::fmt;

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Deserialize, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CflMode {
    /// `Δt μ / min h_K² = ωλ`
    Standard,
    /// `Δt μ / min h_K² = min(ωλ, 1/max_K ū_K)`
    Blowup,
}

/// Which diffusion constant enters the step-size rule.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Deserialize, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum DiffusionScale {
    /// The model's nominal `μ`.
    Nominal,
    /// The direction-vector bound `γ*` over the current solution range.
    Effective,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TimeConfig<T> {
    /// CFL number `λ`.
    pub cfl: T,
    pub final_time: T,
    pub mode: CflMode,
    pub scale: DiffusionScale,
    /// Multiplies the step from the CFL rule.
    pub safety: T,
    pub restart: bool,
    /// Rejected steps below this size declare blow-up.
    pub dt_floor: T,
    pub max_steps: usize,
}

impl<T: Real> TimeConfig<T> {
    pub fn new(cfl: T, final_time: T) -> Self {
        Self {
            cfl,
            final_time,
            mode: CflMode::Standard,
            scale: DiffusionScale::Effective,
            safety: T::one(),
            restart: false,
            dt_floor: T::of(1e-13).max(T::epsilon()),
            max_steps: 50_000_000,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.cfl.is_nan()
            || self.cfl <= T::zero()
            || self.safety.is_nan()
            || self.safety <= T::zero()
        {
            return Err(Error::Config(
                "CFL number and safety factor must be positive".into(),
            ));
        }
        if self.final_time.is_nan() || self.final_time < T::zero() {
            return Err(Error::Config("final time must be nonnegative".into()));
        }
        if self.dt_floor.is_nan() || self.dt_floor < T::epsilon() {
            return Err(Error::Config(
                "step-size floor must be at least machine epsilon".into(),
            ));
        }
        Ok(())
    }
}

/// Diffusion constant for the step-size rule over `[lo, hi]`.
pub fn diffusion_scale<T: Real>(
    model: &DiffusionModel<T>,
    scale: DiffusionScale,
    lo: T,
    hi: T,
) -> T {
    match scale {
        DiffusionScale::Effective => model.gamma_bounds(lo, hi).1,
        DiffusionScale::Nominal => model.mu,
    }
}

/// `Δt = safety · r · min_K h_K² / μ_eff` with `r = ωλ` (standard) or
/// `r = min(ωλ, 1/max_K ū_K)` (blow-up).
#[allow(clippy::too_many_arguments)]
pub fn cfl_dt<T: Real>(
    min_h: T,
    mu_eff: T,
    omega: T,
    cfl: T,
    mode: CflMode,
    max_average: T,
    safety: T,
) -> T {
    let mut ratio = omega * cfl;
    if mode == CflMode::Blowup && max_average > T::zero() {
        ratio = ratio.min(T::one() / max_average);
    }
    safety * ratio * min_h * min_h / mu_eff
}

/// Step size for `field` from the discretisation's mesh and `ω`.
pub fn compute_dt<T: Real>(
    disc: &Discretization<T>,
    model: &DiffusionModel<T>,
    field: &DgField<T>,
    config: &TimeConfig<T>,
) -> T {
    let (lo, hi) = disc.value_range(field);
    let mu = diffusion_scale(model, config.scale, lo, hi);
    let max_avg = field
        .cell_averages()
        .into_iter()
        .fold(T::neg_infinity(), T::max);
    cfl_dt(
        disc.mesh().min_h(),
        mu,
        disc.omega(),
        config.cfl,
        config.mode,
        max_avg,
        config.safety,
    )
}

fn limit<T: Real>(mut u: DgField<T>, limiter: Option<&ScalingLimiter<T>>) -> Result<DgField<T>> {
    if let Some(l) = limiter {
        l.apply_in_place(&mut u)?;
    }
    if let Some(pos) = u.coeffs.iter().position(|c| !c.is_finite()) {
        return Err(Error::NonFinite {
            stage: "stage update",
            element: pos / u.n_dof,
        });
    }
    Ok(u)
}

/// One Shu–Osher SSP-RK3 step, limiting after every stage.
pub fn ssp_rk3_step<T, L>(
    u: &DgField<T>,
    dt: T,
    rate: &L,
    limiter: Option<&ScalingLimiter<T>>,
) -> Result<DgField<T>>
where
    T: Real,
    L: Fn(&DgField<T>) -> Result<DgField<T>>,
{
    let t = u.time;
    let (q, h, tq) = (T::of(0.25), T::of(0.5), T::one() / T::of(3.0));

    let mut u1 = u.axpy(dt, &rate(u)?);
    u1.time = t + dt;
    let u1 = limit(u1, limiter)?;

    let mut u2 = u.combine(T::one() - q, &u1.axpy(dt, &rate(&u1)?), q);
    u2.time = t + h * dt;
    let u2 = limit(u2, limiter)?;

    let mut u3 = u.combine(tq, &u2.axpy(dt, &rate(&u2)?), T::one() - tq);
    u3.time = t + dt;
    limit(u3, limiter)
}

#[derive(Clone, Debug, PartialEq)]
pub enum Event<T> {
    Step {
        step: usize,
        time: T,
        dt: T,
        restarts: usize,
        min_average: T,
        max_average: T,
    },
    Restart {
        step: usize,
        time: T,
        rejected_dt: T,
        reason: String,
    },
    BlowUp {
        step: usize,
        time: T,
        dt: T,
    },
    Completed {
        steps: usize,
        time: T,
    },
}

impl<T: Real> fmt::Display for Event<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Event::Step { step, time, dt, restarts, min_average, max_average } => write!(
                f,
                "step {step} t={time:.9e} dt={dt:.6e} restarts={restarts} min_avg={min_average:.6e} max_avg={max_average:.6e}"
            ),
            Event::Restart { step, time, rejected_dt, reason } => {
                write!(f, "restart step={step} t={time:.9e} rejected_dt={rejected_dt:.6e} reason={reason}")
            }
            Event::BlowUp { step, time, dt } => write!(f, "blowup step={step} t={time:.9e} dt={dt:.6e}"),
            Event::Completed { steps, time } => write!(f, "completed steps={steps} t={time:.9e}"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum RunStatus<T> {
    Completed,
    BlowUp { time: T },
}

#[derive(Clone, Debug)]
pub struct RunOutcome<T> {
    pub field: DgField<T>,
    pub status: RunStatus<T>,
    pub events: Vec<Event<T>>,
    pub steps: usize,
    pub restarts: usize,
}

impl<T: Real> RunOutcome<T> {
    pub fn blowup_time(&self) -> Option<T> {
        match self.status {
            RunStatus::BlowUp { time } => Some(time),
            RunStatus::Completed => None,
        }
    }

    /// Event log as newline-terminated records.
    pub fn log(&self) -> String {
        self.events.iter().map(|e| format!("{e}\n")).collect()
    }
}

fn is_restartable(e: &Error) -> bool {
    matches!(
        e,
        Error::NonFinite { .. } | Error::AverageOutOfBounds { .. }
    )
}

/// Integrates from `u0.time` to `config.final_time`. With restarts enabled a
/// failed step (cell average out of bounds, non-finite values) is discarded
/// and retried with half the step size; blow-up is declared once the step
/// drops below the floor or no longer advances time. `observe` sees every
/// accepted field.
pub fn run_with_restart<T, L, D, O>(
    u0: DgField<T>,
    config: &TimeConfig<T>,
    rate: L,
    limiter: Option<&ScalingLimiter<T>>,
    dt_rule: D,
    mut observe: O,
) -> Result<RunOutcome<T>>
where
    T: Real,
    L: Fn(&DgField<T>) -> Result<DgField<T>>,
    D: Fn(&DgField<T>) -> T,
    O: FnMut(&DgField<T>),
{
    config.validate()?;
    let mut u = u0;
    let mut events = Vec::new();
    let (mut steps, mut total_restarts) = (0usize, 0usize);
    let end = config.final_time;

    while u.time < end {
        if steps >= config.max_steps {
            return Err(Error::StepLimit(steps));
        }
        let mut dt = dt_rule(&u);
        if dt.is_nan() || dt <= T::zero() || !dt.is_finite() {
            return Err(Error::NonFinite {
                stage: "step size",
                element: 0,
            });
        }
        let mut last = false;
        if u.time + dt >= end {
            dt = end - u.time;
            last = true;
        }
        let mut restarts = 0;
        let next = loop {
            match ssp_rk3_step(&u, dt, &rate, limiter) {
                Ok(mut v) => {
                    if last {
                        v.time = end;
                    }
                    break Some(v);
                }
                Err(e) if config.restart && is_restartable(&e) => {
                    events.push(Event::Restart {
                        step: steps + 1,
                        time: u.time,
                        rejected_dt: dt,
                        reason: e.to_string(),
                    });
                    restarts += 1;
                    total_restarts += 1;
                    dt *= T::of(0.5);
                    last = false;
                    if dt < config.dt_floor || u.time + dt == u.time {
                        break None;
                    }
                }
                Err(e) => return Err(e),
            }
        };
        match next {
            Some(v) => {
                steps += 1;
                let avgs = v.cell_averages();
                let (min_average, max_average) = avgs
                    .iter()
                    .fold((T::infinity(), T::neg_infinity()), |(a, b), &x| {
                        (a.min(x), b.max(x))
                    });
                events.push(Event::Step {
                    step: steps,
                    time: v.time,
                    dt,
                    restarts,
                    min_average,
                    max_average,
                });
                observe(&v);
                u = v;
            }
            None => {
                events.push(Event::BlowUp {
                    step: steps + 1,
                    time: u.time,
                    dt,
                });
                return Ok(RunOutcome {
                    status: RunStatus::BlowUp { time: u.time },
                    field: u,
                    events,
                    steps,
                    restarts: total_restarts,
                });
            }
        }
    }
    events.push(Event::Completed {
        steps,
        time: u.time,
    });
    Ok(RunOutcome {
        field: u,
        status: RunStatus::Completed,
        events,
        steps,
        restarts: total_restarts,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::cell::Cell;

    fn scalar(v: f64) -> DgField<f64> {
        let mut f = DgField::zeros(1, 0, 0.0);
        f.coeffs[0] = v;
        f
    }

    fn decay(u: &DgField<f64>) -> Result<DgField<f64>> {
        Ok(DgField {
            coeffs: u.coeffs.iter().map(|c| -c).collect(),
            ..u.clone()
        })
    }

    #[test]
    fn zero_rate_leaves_field_unchanged() {
        let u = scalar(0.37);
        let zero = |u: &DgField<f64>| {
            Ok(DgField {
                coeffs: vec![0.0; u.coeffs.len()],
                ..u.clone()
            })
        };
        assert_eq!(ssp_rk3_step(&u, 0.1, &zero, None).unwrap().coeffs, u.coeffs);
    }

    #[test]
    fn decay_one_step() {
        // stages: 0.9; 0.75 + 0.25·0.81 = 0.9525; 1/3 + 2/3·(0.9525·0.9) = 0.9048333…
        let v = ssp_rk3_step(&scalar(1.0), 0.1, &decay, None).unwrap();
        let stage2 = 0.75 + 0.25 * (0.9 - 0.1 * 0.9);
        let want = 1.0 / 3.0 + 2.0 / 3.0 * (stage2 - 0.1 * stage2);
        assert!((v.coeffs[0] - want).abs() < 1e-15);
        assert!((v.coeffs[0] - 0.9048333).abs() < 1e-7);
        assert!((v.time - 0.1).abs() < 1e-16);
    }

    #[test]
    fn constant_rate_is_exact() {
        let c = |u: &DgField<f64>| {
            Ok(DgField {
                coeffs: vec![2.5; u.coeffs.len()],
                ..u.clone()
            })
        };
        let v = ssp_rk3_step(&scalar(1.0), 0.125, &c, None).unwrap();
        assert!((v.coeffs[0] - (1.0 + 2.5 * 0.125)).abs() < 1e-15);
    }

    #[test]
    fn third_order_in_time() {
        let err = |n: usize| {
            let dt = 1.0 / n as f64;
            let mut u = scalar(1.0);
            for _ in 0..n {
                u = ssp_rk3_step(&u, dt, &decay, None).unwrap();
            }
            (u.coeffs[0] - (-1.0f64).exp()).abs()
        };
        let ratio = err(20) / err(40);
        assert!((ratio.log2() - 3.0).abs() < 0.1, "ratio {ratio}");
    }

    #[test]
    fn cfl_arithmetic() {
        let dt = cfl_dt::<f64>(0.1, 0.01, 0.05, 0.1, CflMode::Standard, 0.0, 1.0);
        assert!((dt - 5e-3).abs() < 1e-15);
        let quarter = cfl_dt::<f64>(0.05, 0.01, 0.05, 0.1, CflMode::Standard, 0.0, 1.0);
        assert!((quarter - dt / 4.0).abs() < 1e-16);
        // 1/max ū = 1e-3 < ωλ = 5e-3
        let b = cfl_dt::<f64>(0.1, 0.01, 0.05, 0.1, CflMode::Blowup, 1000.0, 1.0);
        assert!((b - 1e-3).abs() < 1e-15);
        let s = cfl_dt::<f64>(0.1, 0.01, 0.05, 0.1, CflMode::Blowup, 2.0, 1.0);
        assert!((s - 5e-3).abs() < 1e-15);
    }

    #[test]
    fn run_lands_on_final_time() {
        let cfg = TimeConfig::new(1.0, 1.0);
        let mut times = Vec::new();
        let out = run_with_restart(
            scalar(1.0),
            &cfg,
            decay,
            None,
            |_| 0.3,
            |u| times.push(u.time),
        )
        .unwrap();
        assert_eq!(out.status, RunStatus::Completed);
        assert_eq!(out.field.time, 1.0);
        assert_eq!(out.restarts, 0);
        assert!(times.windows(2).all(|w| w[1] > w[0]));
        assert_eq!(times.len(), 4);
    }

    #[test]
    fn injected_fault_triggers_one_restart() {
        let calls = Cell::new(0);
        let faulty = |u: &DgField<f64>| {
            calls.set(calls.get() + 1);
            if calls.get() == 4 {
                Err(Error::AverageOutOfBounds {
                    lower: 0.0,
                    upper: f64::INFINITY,
                    elements: vec![0],
                })
            } else {
                decay(u)
            }
        };
        let mut cfg = TimeConfig::new(1.0, 1.0);
        cfg.restart = true;
        let out = run_with_restart(scalar(1.0), &cfg, faulty, None, |_| 0.25, |_| {}).unwrap();
        assert_eq!(out.restarts, 1);
        let restarts: Vec<_> = out
            .events
            .iter()
            .filter(|e| matches!(e, Event::Restart { .. }))
            .collect();
        assert_eq!(restarts.len(), 1);
        let halved = out
            .events
            .iter()
            .any(|e| matches!(e, Event::Step { step: 2, dt, restarts: 1, .. } if *dt == 0.125));
        assert!(halved, "{}", out.log());
        assert_eq!(out.field.time, 1.0);
    }

    #[test]
    fn persistent_failure_declares_blowup() {
        let mut cfg = TimeConfig::new(1.0, 1.0);
        cfg.restart = true;
        let fail = |_: &DgField<f64>| -> Result<DgField<f64>> {
            Err(Error::NonFinite {
                stage: "test",
                element: 0,
            })
        };
        let out = run_with_restart(scalar(1.0), &cfg, fail, None, |_| 0.1, |_| {}).unwrap();
        assert_eq!(out.blowup_time(), Some(0.0));
        assert!(matches!(out.events.last(), Some(Event::BlowUp { .. })));
        assert!(out.log().lines().last().unwrap().starts_with("blowup"));

        cfg.restart = false;
        assert!(run_with_restart(scalar(1.0), &cfg, fail, None, |_| 0.1, |_| {}).is_err());
    }
}
