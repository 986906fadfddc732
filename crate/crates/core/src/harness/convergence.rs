//! Error tables over a sequence of refined meshes.

use super::config::RunConfig;
use super::norms::{l2_error, linf_error, order};
use super::solve::{solve, Solution};
use crate::error::{Error, Result};
use crate::models::DiffusionModel;
use crate::quadrature::volume_rule;
use crate::timestep::RunStatus;
use std::fmt::Write as _;

/// Outcome on one mesh level. `failure` is set when the level could not be
/// solved; its errors are then absent.
#[derive(Clone, Debug, PartialEq)]
pub struct LevelResult {
    pub n_per_side: usize,
    pub steps: usize,
    pub l2: Option<f64>,
    pub linf: Option<f64>,
    pub failure: Option<String>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ErrorReport {
    pub model: String,
    pub variant: String,
    pub degree: usize,
    pub levels: Vec<LevelResult>,
}

/// `L²` and `L∞` errors of a finished run against the model's exact solution.
pub fn solution_errors(
    solution: &Solution<f64>,
    model: &DiffusionModel<f64>,
    l2_exactness: usize,
) -> Result<(f64, f64)> {
    if model.exact.is_none() {
        return Err(Error::MissingExactSolution(model.name.to_string()));
    }
    let u = &solution.outcome.field;
    let t = u.time;
    let exact = |x| model.exact_solution(x, t).unwrap_or(f64::NAN);
    let rule = volume_rule(l2_exactness)?;
    Ok((
        l2_error(&solution.disc, u, exact, &rule),
        linf_error(&solution.disc, u, exact),
    ))
}

fn run_level(config: &RunConfig, n: usize) -> Result<LevelResult> {
    let problem = config.problem(n)?;
    let solution = solve(&problem)?;
    if let RunStatus::BlowUp { time } = solution.outcome.status {
        return Err(Error::Config(format!("run blew up at t={time:e}")));
    }
    let (l2, linf) = solution_errors(&solution, &problem.model, config.l2_exactness())?;
    Ok(LevelResult {
        n_per_side: n,
        steps: solution.outcome.steps,
        l2: Some(l2),
        linf: Some(linf),
        failure: None,
    })
}

/// Solves every level listed in `config.mesh.levels`. A failing level is
/// recorded in the report and does not stop the others.
pub fn convergence_study(config: &RunConfig) -> Result<ErrorReport> {
    convergence_study_with(config, |_| {})
}

/// As [`convergence_study`], calling `progress` after every level.
pub fn convergence_study_with<F: FnMut(&LevelResult)>(
    config: &RunConfig,
    mut progress: F,
) -> Result<ErrorReport> {
    config.validate()?;
    let mut levels = Vec::with_capacity(config.mesh.levels.len());
    for &n in &config.mesh.levels {
        let level = run_level(config, n).unwrap_or_else(|e| LevelResult {
            n_per_side: n,
            steps: 0,
            l2: None,
            linf: None,
            failure: Some(e.to_string()),
        });
        progress(&level);
        levels.push(level);
    }
    Ok(ErrorReport {
        model: config.model.name.clone(),
        variant: config.scheme.variant.clone(),
        degree: config.scheme.degree,
        levels,
    })
}

fn pair_order(a: Option<f64>, b: Option<f64>, ratio: f64) -> Option<f64> {
    match (a, b) {
        (Some(a), Some(b)) if a > 0.0 && b > 0.0 => Some(order(a, b) / ratio.log2()),
        _ => None,
    }
}

impl ErrorReport {
    /// Observed `(L², L∞)` orders between consecutive levels; the first level
    /// has none.
    pub fn orders(&self) -> Vec<(Option<f64>, Option<f64>)> {
        let mut out = vec![(None, None)];
        for w in self.levels.windows(2) {
            let ratio = w[1].n_per_side as f64 / w[0].n_per_side as f64;
            out.push((
                pair_order(w[0].l2, w[1].l2, ratio),
                pair_order(w[0].linf, w[1].linf, ratio),
            ));
        }
        out.truncate(self.levels.len());
        out
    }

    /// `(L², L∞)` orders on the two finest levels.
    pub fn finest_orders(&self) -> (Option<f64>, Option<f64>) {
        self.orders().last().copied().unwrap_or((None, None))
    }

    pub fn to_csv(&self) -> String {
        let mut s =
            String::from("model,variant,degree,n,steps,l2,l2_order,linf,linf_order,failure\n");
        let cell = |v: Option<f64>| v.map(|x| format!("{x:.6e}")).unwrap_or_default();
        for (l, (o2, oi)) in self.levels.iter().zip(self.orders()) {
            let _ = writeln!(
                s,
                "{},{},{},{},{},{},{},{},{},{}",
                self.model,
                self.variant,
                self.degree,
                l.n_per_side,
                l.steps,
                cell(l.l2),
                o2.map(|x| format!("{x:.4}")).unwrap_or_default(),
                cell(l.linf),
                oi.map(|x| format!("{x:.4}")).unwrap_or_default(),
                l.failure.as_deref().unwrap_or("").replace(',', ";"),
            );
        }
        s
    }

    /// Aligned text table with one row per mesh level.
    pub fn to_table(&self) -> String {
        let mut s = format!("{} / {} / k={}\n", self.model, self.variant, self.degree);
        let _ = writeln!(
            s,
            "{:>6} {:>12} {:>7} {:>12} {:>7}",
            "n", "L2 error", "order", "Linf error", "order"
        );
        let err = |v: Option<f64>| v.map(|x| format!("{x:.3e}")).unwrap_or_else(|| "-".into());
        let ord = |v: Option<f64>| v.map(|x| format!("{x:.2}")).unwrap_or_else(|| "-".into());
        for (l, (o2, oi)) in self.levels.iter().zip(self.orders()) {
            let _ = write!(
                s,
                "{:>6} {:>12} {:>7} {:>12} {:>7}",
                l.n_per_side,
                err(l.l2),
                ord(o2),
                err(l.linf),
                ord(oi)
            );
            if let Some(f) = &l.failure {
                let _ = write!(s, "  failed: {f}");
            }
            s.push('\n');
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn level(n: usize, e: Option<f64>) -> LevelResult {
        LevelResult {
            n_per_side: n,
            steps: 1,
            l2: e,
            linf: e.map(|x| 2.0 * x),
            failure: None,
        }
    }

    #[test]
    fn orders_from_synthetic_errors() {
        let report = ErrorReport {
            model: "heat".into(),
            variant: "ddgic".into(),
            degree: 2,
            levels: vec![
                level(5, Some(8e-3)),
                level(10, Some(1e-3)),
                level(20, None),
                level(40, Some(1e-5)),
            ],
        };
        let o = report.orders();
        assert_eq!(o.len(), 4);
        assert_eq!(o[0], (None, None));
        assert!((o[1].0.unwrap() - 3.0).abs() < 1e-12);
        assert!((o[1].1.unwrap() - 3.0).abs() < 1e-12);
        assert_eq!(o[2], (None, None));
        assert_eq!(o[3], (None, None));
        let csv = report.to_csv();
        assert_eq!(csv.lines().count(), 5);
        assert!(csv.lines().nth(2).unwrap().contains("3.0000"));
        assert!(report.to_table().contains("8.000e-3"));
    }

    #[test]
    fn failing_level_does_not_abort() {
        let mut c = RunConfig::default();
        c.scheme.degree = 1;
        c.mesh.levels = vec![2, 4];
        c.time.final_time = 0.5;
        c.time.max_steps = 1;
        let report = convergence_study(&c).unwrap();
        assert_eq!(report.levels.len(), 2);
        assert!(report.levels.iter().all(|l| l.failure.is_some()));
        assert!(report.to_table().contains("failed"));
    }

    #[test]
    fn small_heat_study_converges() {
        let mut c = RunConfig::default();
        c.scheme.degree = 1;
        c.mesh.levels = vec![4, 8];
        c.time.final_time = 0.05;
        let report = convergence_study(&c).unwrap();
        let (o2, _) = report.finest_orders();
        assert!(o2.unwrap() > 1.5, "{}", report.to_table());
    }
}
