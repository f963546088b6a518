//! `cobdetect`: basis validation, single-state verdicts, threshold scans and
//! reproduction of the worked examples.
//!
//! Exit status is 0 on success, 1 when a validation fails (an invalid basis,
//! a reproduction row off its published threshold, a sampled separable state
//! violating a bound) and 2 on bad input.

mod commands;
mod settings;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use commands::{BasisCommand, VerifyArgs};
use settings::Settings;

#[derive(Debug, Parser)]
#[command(
    name = "cobdetect",
    version,
    about = "Entanglement detection from COB correlation tensors"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// TOML file with defaults for any of the options below.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    #[command(flatten)]
    settings: Settings,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Validate or print a basis.
    #[command(subcommand)]
    Basis(BasisCommand),
    /// Evaluate one criterion on one state, as JSON.
    Verdict,
    /// Evaluate a criterion over the noise parameter and locate the threshold.
    Scan,
    /// Compare computed thresholds of a worked example with the published ones.
    Reproduce {
        /// Example number, 1 to 4.
        example: u8,
    },
    /// Dump the correlation tensor of a state.
    Tensor,
    /// Run a criterion over sampled separable states and report violations.
    Verify(VerifyArgs),
}

fn run(cli: Cli) -> anyhow::Result<bool> {
    let settings = match &cli.config {
        Some(path) => cli.settings.or(Settings::load(path)?),
        None => cli.settings,
    };
    match &cli.command {
        Command::Basis(cmd) => commands::basis(cmd, &settings),
        Command::Verdict => commands::verdict(&settings),
        Command::Scan => commands::scan_cmd(&settings),
        Command::Reproduce { example } => commands::reproduce_cmd(*example, &settings),
        Command::Tensor => commands::tensor(&settings),
        Command::Verify(args) => commands::verify(args, &settings),
    }
}

fn exit_code(err: &anyhow::Error) -> u8 {
    match err.downcast_ref::<cobdetect::Error>() {
        Some(cobdetect::Error::Validation { .. } | cobdetect::Error::NumericalIntegrity(_)) => 1,
        _ => 2,
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code(&err))
        }
    }
}
