//! `hilmod`: seeded verification batteries, preserver classification and
//! free Fisher information from the command line.
//!
//! Exit status: 0 when every check passes, 1 when a mathematical check fails,
//! 2 on malformed configuration or input.

mod commands;
mod report;
mod verify;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Parser, Subcommand};
use serde::Serialize;

use hilmod::free_prob::MAX_CONJUGATE_ORDER;
use report::Report;

#[derive(Parser, Debug)]
#[command(name = "hilmod", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Module rank
    #[arg(long, default_value_t = 2, global = true)]
    d: usize,
    /// Number of spectrum points of the coefficient algebra
    #[arg(long, default_value_t = 2, global = true)]
    n: usize,
    #[arg(long, default_value_t = 42, global = true)]
    seed: u64,
    #[arg(long, default_value_t = 100, global = true)]
    trials: usize,
    #[arg(long, env = "HILMOD_TOL", default_value_t = hilmod::DEFAULT_TOL, allow_negative_numbers = true, global = true)]
    tol: f64,
    /// Highest cumulant order checked (at most 6)
    #[arg(long, default_value_t = 5, global = true)]
    max_order: usize,
    #[arg(long, global = true)]
    input: Option<PathBuf>,
    /// Write the report here instead of standard output
    #[arg(long, global = true)]
    output: Option<PathBuf>,
}

#[derive(Subcommand, Debug, Clone, Copy)]
enum Command {
    /// Run every randomized battery
    Verify,
    /// Recover the canonical form of a preserver given by its generator images
    Classify,
    /// Fisher information and conjugate-variable relations of a covariance
    Fisher,
    /// Semicircular moment by recursion and by pairing sum
    Moments {
        /// Number of letters when coefficients are generated from the seed
        #[arg(long, default_value_t = 6)]
        order: usize,
    },
}

#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    pub d: usize,
    pub n: usize,
    pub seed: u64,
    pub trials: usize,
    pub tol: f64,
    pub max_order: usize,
}

impl RunConfig {
    fn from_cli(cli: &Cli) -> anyhow::Result<RunConfig> {
        if cli.d == 0 || cli.n == 0 {
            bail!("--d and --n must be at least 1");
        }
        if !(cli.tol.is_finite() && cli.tol > 0.0) {
            bail!("--tol must be a positive number, got {}", cli.tol);
        }
        if cli.max_order > MAX_CONJUGATE_ORDER {
            bail!("--max-order must be at most {MAX_CONJUGATE_ORDER}");
        }
        Ok(RunConfig { d: cli.d, n: cli.n, seed: cli.seed, trials: cli.trials, tol: cli.tol, max_order: cli.max_order })
    }
}

fn run(cli: &Cli) -> anyhow::Result<Report> {
    let config = RunConfig::from_cli(cli)?;
    let input = cli.input.as_deref();
    let name = match cli.command {
        Command::Verify => "verify",
        Command::Classify => "classify",
        Command::Fisher => "fisher",
        Command::Moments { .. } => "moments",
    };
    let mut report = Report::new(name, serde_json::to_value(&config)?);
    match cli.command {
        Command::Verify if config.trials == 0 => report.warnings.push("trials = 0: nothing to check".into()),
        Command::Verify => verify::run(&config, &mut report),
        Command::Classify => commands::classify_cmd(&config, input, &mut report)?,
        Command::Fisher => commands::fisher_cmd(&config, input, &mut report)?,
        Command::Moments { order } => commands::moments_cmd(&config, input, order, &mut report)?,
    }
    Ok(report)
}

fn emit(report: &Report, output: Option<&std::path::Path>) -> anyhow::Result<()> {
    let text = serde_json::to_string_pretty(report)?;
    match output {
        Some(path) => std::fs::write(path, text + "\n").with_context(|| format!("writing {}", path.display())),
        None => {
            let mut out = std::io::stdout().lock();
            writeln!(out, "{text}")?;
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let report = match run(&cli) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(2);
        }
    };
    for w in &report.warnings {
        eprintln!("warning: {w}");
    }
    if let Err(e) = emit(&report, cli.output.as_deref()) {
        eprintln!("error: {e:#}");
        return ExitCode::from(2);
    }
    if report.pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
