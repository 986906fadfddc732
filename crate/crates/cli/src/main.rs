//! `ddg2d`: run, convergence, stability and verification drivers.

use clap::{Args, Parser, Subcommand};
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use unified_ddg::harness::convergence::{convergence_study_with, solution_errors};
use unified_ddg::harness::export::{write_csv, write_vtk};
use unified_ddg::harness::{energy_study, run_verify, solve, RunConfig, StabilitySettings};
use unified_ddg::models::ModelName;
use unified_ddg::timestep::RunStatus;
use unified_ddg::{Error, Result};

#[derive(Parser)]
#[command(
    name = "ddg2d",
    version,
    about = "Direct discontinuous Galerkin solvers for 2D nonlinear diffusion"
)]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// TOML run configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Start from the usual settings for a model before applying the file
    /// and overrides.
    #[arg(long, global = true)]
    preset: Option<String>,
    /// Override a configuration key, e.g. `--set scheme.degree=3`.
    #[arg(long = "set", value_name = "KEY=VALUE", global = true)]
    overrides: Vec<String>,
    /// Directory for output files (overrides `output.dir`).
    #[arg(long, global = true)]
    output_dir: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Solve on the first mesh level and write the final field and event log.
    Run,
    /// Solve on every mesh level and tabulate errors and orders.
    Convergence,
    /// Energy-stability study on random initial fields.
    Stability {
        #[arg(long, default_value_t = 20)]
        fields: usize,
        #[arg(long, default_value_t = 100)]
        steps: usize,
    },
    /// Self-checks of the discretisation.
    Verify,
}

fn load(common: &Common) -> Result<RunConfig> {
    let mut base = match &common.preset {
        Some(name) => {
            RunConfig::preset(name.parse::<ModelName>().map_err(Error::Config)?).to_toml()
        }
        None => String::new(),
    };
    if let Some(path) = &common.config {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        base = merge(&base, &text)?;
    }
    let mut overrides = common.overrides.clone();
    if let Some(dir) = &common.output_dir {
        overrides.push(format!("output.dir={:?}", dir.display().to_string()));
    }
    RunConfig::from_toml_with_overrides(&base, &overrides)
}

/// Overlays the keys of `top` on `base`, table by table.
fn merge(base: &str, top: &str) -> Result<String> {
    fn overlay(a: &mut toml::Table, b: toml::Table) {
        for (k, v) in b {
            match (a.get_mut(&k), v) {
                (Some(toml::Value::Table(at)), toml::Value::Table(bt)) => overlay(at, bt),
                (_, v) => {
                    a.insert(k, v);
                }
            }
        }
    }
    let parse = |s: &str| {
        s.parse::<toml::Table>()
            .map_err(|e| Error::Config(e.to_string()))
    };
    let mut a = parse(base)?;
    overlay(&mut a, parse(top)?);
    toml::to_string(&a).map_err(|e| Error::Config(e.to_string()))
}

fn write(path: &Path, text: &str) -> Result<()> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

fn run(config: &RunConfig) -> Result<bool> {
    let dir = &config.output.dir;
    write(&dir.join("config.toml"), &config.to_toml())?;
    let n = config.mesh.levels[0];
    let problem = config.problem(n)?;
    let solution = solve(&problem)?;
    let outcome = &solution.outcome;
    write(&dir.join("events.log"), &outcome.log())?;
    let u = &outcome.field;
    let res = config.output.resolution;
    write_csv(&dir.join("field.csv"), &solution.disc, u, res)?;
    if config.output.vtk {
        write_vtk(&dir.join("field.vtk"), &solution.disc, u, res)?;
    }
    println!(
        "model {} variant {} k={} n={n}",
        config.model.name, config.scheme.variant, config.scheme.degree
    );
    println!("steps {} restarts {}", outcome.steps, outcome.restarts);
    match outcome.status {
        RunStatus::Completed => println!("completed at t={:.9e}", u.time),
        RunStatus::BlowUp { time } => println!("blow-up at t={time:.9e}"),
    }
    if problem.model.exact.is_some() {
        let (l2, linf) = solution_errors(&solution, &problem.model, config.l2_exactness())?;
        println!("L2 error {l2:.6e}  Linf error {linf:.6e}");
    }
    println!("output written to {}", dir.display());
    Ok(true)
}

fn convergence(config: &RunConfig) -> Result<bool> {
    let dir = &config.output.dir;
    write(&dir.join("config.toml"), &config.to_toml())?;
    let report = convergence_study_with(config, |l| match (&l.failure, l.l2, l.linf) {
        (Some(f), _, _) => eprintln!("n={} failed: {f}", l.n_per_side),
        (None, Some(a), Some(b)) => eprintln!("n={} done: L2 {a:.3e} Linf {b:.3e}", l.n_per_side),
        _ => {}
    })?;
    let table = report.to_table();
    write(&dir.join("errors.csv"), &report.to_csv())?;
    write(&dir.join("errors.txt"), &table)?;
    print!("{table}");
    Ok(report.levels.iter().all(|l| l.failure.is_none()))
}

fn stability(config: &RunConfig, fields: usize, steps: usize) -> Result<bool> {
    let settings = StabilitySettings {
        degree: config.scheme.degree,
        variant: config.variant()?,
        fields,
        steps,
        cfl: config.time.cfl,
        seed: config.seed,
        ..Default::default()
    };
    let mut ok = true;
    for name in [ModelName::Heat, ModelName::Anisotropic] {
        let model = name.build(config.model.mu, config.model.exponent);
        let r = energy_study(&model, &settings)?;
        let tag = if r.passed() { "PASS" } else { "FAIL" };
        println!(
            "{tag} {:<12} max energy growth per step {:.3e}, max energy rate {:.3e}",
            r.model, r.max_energy_growth, r.max_energy_rate
        );
        ok &= r.passed();
    }
    Ok(ok)
}

fn verify(config: &RunConfig) -> Result<bool> {
    let report = run_verify(config.seed)?;
    println!("{report}");
    Ok(report.all_passed())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = load(&cli.common).and_then(|config| match cli.command {
        Command::Run => run(&config),
        Command::Convergence => convergence(&config),
        Command::Stability { fields, steps } => stability(&config, fields, steps),
        Command::Verify => verify(&config),
    });
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
