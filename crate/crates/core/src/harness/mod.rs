//! Problem setup, error norms, convergence studies, export and the
//! invariant suite.

pub mod config;
pub mod convergence;
pub mod export;
pub mod norms;
pub mod solve;
pub mod stability;
pub mod verify;

pub use config::RunConfig;
pub use convergence::{convergence_study, ErrorReport, LevelResult};
pub use norms::{l2_error, linf_error, order};
pub use solve::{solve, solve_observed, Problem, Solution};
pub use stability::{direction_vector_slack, energy_study, StabilityResult, StabilitySettings};
pub use verify::{run_verify, VerifyReport};
