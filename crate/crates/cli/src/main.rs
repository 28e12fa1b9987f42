//! `bis-region`: compute achievable-rate boundaries, verify the auxiliary-
//! variable equivalence, check the special-case reductions, and run the
//! random-binning simulation — all from JSON configs into CSV + manifest
//! outputs.
//!
//! Exit codes: 0 success, 2 config error, 3 numerical failure, 4 resource
//! limit, 1 I/O failure.

mod config;
mod modes;
mod output;
mod project;

use std::fmt::Display;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};

use config::{load_config, Mode};
use output::{manifest_path, remove_outputs, write_manifest, Manifest};

#[derive(Debug)]
pub struct CliError {
    pub code: u8,
    pub message: String,
}

impl CliError {
    pub fn config(msg: impl Display) -> Self {
        Self { code: 2, message: msg.to_string() }
    }

    pub fn io(path: &std::path::Path, err: std::io::Error) -> Self {
        Self { code: 1, message: format!("{}: {err}", path.display()) }
    }
}

impl From<bis_core::Error> for CliError {
    fn from(err: bis_core::Error) -> Self {
        let code = match err {
            bis_core::Error::InvalidArgument(_) | bis_core::Error::Infeasible(_) => 2,
            bis_core::Error::NumericalFailure(_) => 3,
            bis_core::Error::ResourceLimit(_) => 4,
        };
        Self { code, message: err.to_string() }
    }
}

#[derive(Parser)]
#[command(
    name = "bis-region",
    version,
    about = "Rate regions and random-binning simulation for biometric identification systems"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct RunArgs {
    /// JSON experiment configuration.
    #[arg(long)]
    config: PathBuf,
    /// Override the config seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Override the config output path.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Override a config field: dotted.path=json-value (repeatable).
    #[arg(long = "override", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Trace the region boundary at a fixed secrecy slice.
    Region(RunArgs),
    /// Verify the one- vs two-auxiliary-variable bound agreement.
    Equivalence(RunArgs),
    /// Run the random-binning Monte Carlo simulation.
    Simulate(RunArgs),
    /// Check the noiseless-enrollment and single-user reductions.
    #[command(name = "special-cases")]
    SpecialCases(RunArgs),
    /// Project a region CSV onto a 2-D plane as a lower envelope.
    Project {
        /// Region CSV produced by the `region` mode.
        #[arg(long)]
        input: PathBuf,
        /// Plane, e.g. rj-ri (first axis minimized per value of the second).
        #[arg(long, default_value = "rj-ri")]
        plane: String,
        #[arg(long)]
        out: PathBuf,
    },
}

fn run_mode(expected: Mode, args: &RunArgs) -> Result<(), CliError> {
    let start = Instant::now();
    let config = load_config(&args.config, &args.overrides, args.seed)?;
    if config.mode != expected {
        return Err(CliError::config(format!(
            "config mode '{}' does not match subcommand '{}'",
            config.mode.name(),
            expected.name()
        )));
    }
    let out = args
        .out
        .clone()
        .or_else(|| config.output.clone())
        .ok_or_else(|| CliError::config("no output path: set 'output' in the config or pass --out"))?;

    let table = modes::execute(&config)?;

    let manifest_out = manifest_path(&out);
    table.write_csv(&out).map_err(|e| {
        remove_outputs(&[&out]);
        e
    })?;
    let manifest = Manifest {
        config: &config,
        mode: config.mode.name(),
        seed: config.seed,
        version: env!("CARGO_PKG_VERSION"),
        wall_time_ms: start.elapsed().as_millis(),
        output: &out,
    };
    write_manifest(&manifest, &manifest_out).map_err(|e| {
        remove_outputs(&[&out, &manifest_out]);
        e
    })?;
    eprintln!(
        "{}: wrote {} ({} rows) and {}",
        config.mode.name(),
        out.display(),
        table.rows.len(),
        manifest_out.display()
    );
    Ok(())
}

fn dispatch(cli: Cli) -> Result<(), CliError> {
    match &cli.command {
        Command::Region(args) => run_mode(Mode::Region, args),
        Command::Equivalence(args) => run_mode(Mode::Equivalence, args),
        Command::Simulate(args) => run_mode(Mode::Simulate, args),
        Command::SpecialCases(args) => run_mode(Mode::SpecialCases, args),
        Command::Project { input, plane, out } => {
            let table = project::project(input, plane)?;
            table.write_csv(out).map_err(|e| {
                remove_outputs(&[out]);
                e
            })?;
            eprintln!("project: wrote {} ({} rows)", out.display(), table.rows.len());
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {}", err.message);
            ExitCode::from(err.code)
        }
    }
}
