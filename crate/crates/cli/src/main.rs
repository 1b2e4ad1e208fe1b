//! Command line for the disk-in-disk transmission solvers.
//!
//! Subcommands: `solve`, `boundary-profile`, `field-grid`, `sweep`,
//! `validate`. Parameters come from a TOML config file; `--out`, `--tol`
//! and `--threads` override the corresponding config entries. Exit code 0
//! on success, 1 when a validation/agreement check fails, 2 on config or
//! usage errors.

mod config;
mod csvout;
mod tasks;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use crate::config::RunConfig;

#[derive(Parser)]
#[command(
    name = "diskgap",
    version,
    about = "Eccentric disk-in-disk conductivity solvers"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Path to the TOML run configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output file; overrides output.path from the config.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads for sweeps and grids (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Override of the dual-solver agreement tolerance.
    #[arg(long, global = true)]
    tol: Option<f64>,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate the solution at configured points with both exact solvers.
    Solve,
    /// θ-trace of the gradient on ∂D: both exact solvers plus the two
    /// asymptotic formulas.
    BoundaryProfile,
    /// |∇w| on a Cartesian grid over the un-translated domain.
    FieldGrid,
    /// Blow-up rate sweep over an (ε, k) schedule.
    Sweep,
    /// Run the cross-module invariant checks and report pass/fail.
    Validate,
}

fn main() -> ExitCode {
    let cli = Cli::parse();

    if let Some(n) = cli.threads {
        if n == 0 {
            eprintln!("config error: --threads must be at least 1");
            return ExitCode::from(2);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
        {
            eprintln!("config error: cannot set up thread pool: {e}");
            return ExitCode::from(2);
        }
    }
    if let Some(t) = cli.tol {
        if !(t.is_finite() && t > 0.0) {
            eprintln!("config error: --tol must be positive");
            return ExitCode::from(2);
        }
    }

    // validate runs with built-in defaults when no config is given; every
    // other task requires one.
    let cfg = match (&cli.config, &cli.command) {
        (Some(path), _) => match RunConfig::load(path) {
            Ok(cfg) => Some(cfg),
            Err(e) => {
                eprintln!("config error: {e:#}");
                return ExitCode::from(2);
            }
        },
        (None, Command::Validate) => None,
        (None, _) => {
            eprintln!("config error: this task needs --config <file>");
            return ExitCode::from(2);
        }
    };

    let out = cli.out.clone().or_else(|| {
        cfg.as_ref()
            .and_then(|c| c.output.path.clone().map(PathBuf::from))
    });

    let result = match cli.command {
        Command::Solve => tasks::solve::run(cfg.as_ref().unwrap(), out.as_deref(), cli.tol),
        Command::BoundaryProfile => {
            tasks::profile::run(cfg.as_ref().unwrap(), out.as_deref(), cli.tol)
        }
        Command::FieldGrid => tasks::grid::run(cfg.as_ref().unwrap(), out.as_deref()),
        Command::Sweep => tasks::sweep::run(cfg.as_ref().unwrap(), out.as_deref()),
        Command::Validate => tasks::validate::run(cfg.as_ref(), out.as_deref()),
    };

    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("config error: {e:#}");
            ExitCode::from(2)
        }
    }
}
