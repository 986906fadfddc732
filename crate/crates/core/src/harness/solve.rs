use crate::ddg::{
    project_initial, DgField, Discretization, Operator, QuadraturePolicy, SchemeConfig,
};
use crate::error::Result;
use crate::limiter::{LimiterConfig, ScalingLimiter};
use crate::mesh::{build_mesh_with_pattern, DiagonalPattern};
use crate::models::DiffusionModel;
use crate::real::Real;
use crate::timestep::{compute_dt, run_with_restart, RunOutcome, TimeConfig};

/// Everything needed to solve one problem on one mesh.
#[derive(Clone, Debug)]
pub struct Problem<T> {
    pub model: DiffusionModel<T>,
    pub scheme: SchemeConfig<T>,
    pub n_per_side: usize,
    pub pattern: DiagonalPattern,
    pub quadrature: QuadraturePolicy,
    pub time: TimeConfig<T>,
    pub limiter: Option<LimiterConfig<T>>,
}

impl<T: Real> Problem<T> {
    pub fn discretization(&self) -> Result<Discretization<T>> {
        let mesh = build_mesh_with_pattern(
            self.model.origin,
            self.model.length,
            self.n_per_side,
            self.model.boundary_kind,
            self.pattern,
        )?;
        Discretization::new(mesh, self.scheme.degree, self.quadrature)
    }
}

#[derive(Clone, Debug)]
pub struct Solution<T> {
    pub disc: Discretization<T>,
    pub initial: DgField<T>,
    pub outcome: RunOutcome<T>,
}

/// Projects the initial data and integrates to the final time. `observe`
/// sees every accepted step.
pub fn solve_observed<T: Real, O>(problem: &Problem<T>, observe: O) -> Result<Solution<T>>
where
    O: FnMut(&Discretization<T>, &DgField<T>),
{
    let disc = problem.discretization()?;
    let model = &problem.model;
    let mut initial = project_initial(&disc, |x| model.initial(x));
    let limiter = problem.limiter.map(|c| ScalingLimiter::new(&disc, c));
    if let Some(l) = &limiter {
        l.apply_in_place(&mut initial)?;
    }
    let op = Operator::new(&disc, model, problem.scheme);
    let mut observe = observe;
    let outcome = run_with_restart(
        initial.clone(),
        &problem.time,
        |u| op.apply(u),
        limiter.as_ref(),
        |u| compute_dt(&disc, model, u, &problem.time),
        |u| observe(&disc, u),
    )?;
    Ok(Solution {
        disc,
        initial,
        outcome,
    })
}

pub fn solve<T: Real>(problem: &Problem<T>) -> Result<Solution<T>> {
    solve_observed(problem, |_, _| {})
}
