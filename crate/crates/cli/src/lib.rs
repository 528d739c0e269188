//! Command-line front end: scenario files in, CSV and JSON out.
//!
//! Exit codes are 0 on success, 1 when a verification or audit check fails
//! and 2 on usage or configuration errors.

pub mod commands;
pub mod error;
pub mod output;
pub mod scenario;

use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand};

pub use commands::Status;
pub use error::{CliError, ScenarioError};
pub use scenario::{parse_scenario, parse_scenario_str, Scenario, Setup};

use commands::{Axis, AxisRange};

#[derive(Debug, Parser)]
#[command(
    name = "anece",
    version,
    about = "Secure-DoF laboratory for anti-eavesdropping channel estimation"
)]
pub struct Cli {
    /// Scenario file (TOML).
    #[arg(long, global = true)]
    pub scenario: Option<PathBuf>,

    /// Output file; standard output when absent.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    /// Overrides the scenario seed.
    #[arg(long, global = true)]
    pub seed: Option<u64>,

    /// Overrides the scenario Monte Carlo sample count.
    #[arg(long = "mc-samples", global = true)]
    pub mc_samples: Option<usize>,

    /// Lets `verify` run with fewer Monte Carlo samples than is reliable.
    #[arg(long, global = true)]
    pub allow_low_samples: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Prints every closed-form DoF value as one JSON object.
    Formula,
    /// Runs the check suites and writes a CSV report.
    Verify {
        /// Breaks the named identity (test hook).
        #[arg(long, hide = true)]
        tamper: Option<String>,
    },
    /// Evaluates the formulas along one parameter axis.
    Sweep {
        #[arg(long, value_enum)]
        axis: Axis,
        /// Inclusive range `A..B`.
        #[arg(long)]
        range: AxisRange,
    },
    /// Writes pilot matrices and prints their rank audit.
    Pilots,
    /// Compares the schemes on DoF and time slots.
    Compare,
}

/// Parses the scenario and applies the command-line overrides.
pub fn load_scenario(cli: &Cli) -> Result<Scenario, CliError> {
    let path = cli
        .scenario
        .as_ref()
        .ok_or_else(|| CliError::Usage("--scenario <path> is required".into()))?;
    let mut sc = parse_scenario(path)?;
    if let Some(seed) = cli.seed {
        sc.seed = seed;
    }
    if let Some(n) = cli.mc_samples {
        if n == 0 {
            return Err(CliError::Usage("--mc-samples must be ≥ 1".into()));
        }
        sc.mc_samples = n;
    }
    Ok(sc)
}

fn emit(cli: &Cli, text: &str) -> Result<(), CliError> {
    match &cli.out {
        Some(path) => std::fs::write(path, text)?,
        None => std::io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(())
}

pub fn run(cli: &Cli) -> Result<Status, CliError> {
    let sc = load_scenario(cli)?;
    match &cli.command {
        Command::Formula => {
            emit(cli, &commands::cmd_formula(&sc)?)?;
            Ok(Status::Success)
        }
        Command::Verify { tamper } => {
            let (csv, status) =
                commands::cmd_verify(&sc, tamper.as_deref(), cli.allow_low_samples)?;
            emit(cli, &csv)?;
            Ok(status)
        }
        Command::Sweep { axis, range } => {
            emit(cli, &commands::cmd_sweep(&sc, *axis, *range)?)?;
            Ok(Status::Success)
        }
        Command::Pilots => {
            let out = cli
                .out
                .as_ref()
                .ok_or_else(|| CliError::Usage("pilots needs --out <path>".into()))?;
            let (audit, status) = commands::cmd_pilots(&sc, out)?;
            print!("{audit}");
            Ok(status)
        }
        Command::Compare => {
            emit(cli, &commands::cmd_compare(&sc)?)?;
            Ok(Status::Success)
        }
    }
}
