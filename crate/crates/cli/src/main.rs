//! `degenlab` — runs the degenerate-diffusion probes from a TOML config and
//! writes one CSV document per invocation.
//!
//! Exit codes: 0 on success, 1 on configuration or precondition failures
//! (including withheld verdicts), 2 on numerical failures.

mod commands;
mod config;
mod output;

use std::fmt;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};

use crate::config::RunConfig;

/// CLI-level error carrying the documented exit-code mapping.
#[derive(Debug)]
pub enum CliError {
    /// Unreadable, malformed or incomplete configuration.
    Config(String),
    /// Error surfaced by a numeric kernel.
    Core(degenlab::Error),
}

impl CliError {
    pub fn config(msg: impl Into<String>) -> Self {
        CliError::Config(msg.into())
    }

    /// 1 for configuration and precondition failures (withheld verdicts
    /// included), 2 for numerical failures.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 1,
            CliError::Core(e) => match e {
                degenlab::Error::NoConvergence { .. }
                | degenlab::Error::Inconclusive(_)
                | degenlab::Error::IntegratorStall { .. } => 2,
                _ => 1,
            },
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "{m}"),
            CliError::Core(e) => write!(f, "{e}"),
        }
    }
}

impl From<degenlab::Error> for CliError {
    fn from(e: degenlab::Error) -> Self {
        CliError::Core(e)
    }
}

#[derive(Parser)]
#[command(
    name = "degenlab",
    version,
    about = "Degenerate-diffusion laboratory: spectral constants, endpoint \
             classification and uniqueness verdicts as CSV"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Layer sampling and the measured trace-bound constant.
    Geometry(RunArgs),
    /// Degeneracy-condition suprema over a shrinking layer ladder.
    Conditions(RunArgs),
    /// Cutoff normalizations and derivative-bound constants.
    Mollifier(RunArgs),
    /// Weighted first-order quotient minimum on a truncation ladder.
    Hardy(RunArgs),
    /// Weighted second-order quotient minimum on the finest grid.
    Rellich(RunArgs),
    /// Uniqueness verdict from the thresholds plus verified conditions.
    Classify(RunArgs),
    /// Deficiency indices by shooting from the regular endpoint.
    Deficiency(RunArgs),
    /// Parabolic evolution trace of a boundary-layer bump.
    Evolve(RunArgs),
    /// Boundary-singular witness ladder with its three-part check.
    Witness(RunArgs),
    /// One-parameter sweep of another target, one row per value.
    Scan(RunArgs),
}

impl Command {
    fn split(self) -> (&'static str, RunArgs) {
        match self {
            Command::Geometry(a) => ("geometry", a),
            Command::Conditions(a) => ("conditions", a),
            Command::Mollifier(a) => ("mollifier", a),
            Command::Hardy(a) => ("hardy", a),
            Command::Rellich(a) => ("rellich", a),
            Command::Classify(a) => ("classify", a),
            Command::Deficiency(a) => ("deficiency", a),
            Command::Evolve(a) => ("evolve", a),
            Command::Witness(a) => ("witness", a),
            Command::Scan(a) => ("scan", a),
        }
    }
}

#[derive(Args)]
struct RunArgs {
    /// Path to the TOML run configuration.
    config: PathBuf,
    /// Output CSV path; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Significant digits for floats (default 12).
    #[arg(long)]
    precision: Option<usize>,
    /// Scalar config override, e.g. --set coefficient.delta=1.4; repeatable.
    #[arg(long = "set", value_name = "FIELD=VALUE")]
    set: Vec<String>,
}

fn run(name: &str, args: &RunArgs) -> Result<(), CliError> {
    let text = std::fs::read_to_string(&args.config)
        .map_err(|e| CliError::config(format!("cannot read {}: {e}", args.config.display())))?;
    let mut cfg = RunConfig::parse(&text, &args.set)?;
    if let Some(p) = args.precision {
        cfg.precision = p;
    }
    if let Some(out) = &args.out {
        cfg.output = Some(out.display().to_string());
    }
    cfg.validate()?;
    let csv = commands::run(name, &cfg)?;
    match &cfg.output {
        Some(path) => std::fs::write(path, csv)
            .map_err(|e| CliError::config(format!("cannot write {path}: {e}")))?,
        None => print!("{csv}"),
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let (name, args) = cli.command.split();
    match run(name, &args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
