//! `lanekeep <command> [--config FILE] [--seed N] [--out DIR]`
//!
//! Exit codes: 0 success, 2 input or configuration error, 3 domain failure.

mod commands;
mod config;

use std::path::PathBuf;

use clap::{Parser, Subcommand};

pub use commands::{
    cmd_compare, cmd_fit_distance, cmd_gen_scene, cmd_park, cmd_simulate, cmd_track, CompareRow, ParkReport, TrackReport,
};
pub use config::{ConfigError, GhostEchoes, ParkingConfig, ScenarioConfig, SceneConfig, SceneKind};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// Bad file, bad config, bad arguments.
    #[error("{0}")]
    Input(String),
    /// Valid input, but the pipeline could not produce an answer.
    #[error("{0}")]
    Domain(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => 2,
            CliError::Domain(_) => 3,
        }
    }
}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> Self {
        CliError::Input(format!("config error at {e}"))
    }
}

pub(crate) fn io_err(path: &std::path::Path, e: impl std::fmt::Display) -> CliError {
    CliError::Input(format!("{}: {e}", path.display()))
}

#[derive(Debug, Parser)]
#[command(name = "lanekeep", version, about = "Lane tracking, closed-loop lane keeping and parallel parking on a synthetic bird's-eye simulator")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// JSON scenario configuration (defaults apply when omitted)
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Overrides the configured RNG seed
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Output directory
    #[arg(long, global = true, default_value = ".")]
    pub out: PathBuf,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Render frames with ground-truth masks and truth.csv
    GenScene,
    /// Run the perception pipeline on one PGM frame
    Track { image: PathBuf },
    /// Ribbon vs sliding-window capture fractions over a generated corpus
    Compare { corpus: PathBuf },
    /// Closed-loop lane keeping; writes trace.csv
    Simulate,
    /// Scan, detect a space, plan and roll out a parallel park
    Park,
    /// Fit the sign-height distance model to a CSV of samples
    FitDistance { samples: PathBuf },
}

fn load_config(cli: &Cli) -> Result<ScenarioConfig, CliError> {
    let cfg = match &cli.config {
        Some(p) => ScenarioConfig::load(p)?,
        None => ScenarioConfig::default(),
    };
    Ok(cfg.with_seed(cli.seed))
}

pub fn execute(cli: &Cli) -> Result<(), CliError> {
    let cfg = load_config(cli)?;
    std::fs::create_dir_all(&cli.out).map_err(|e| io_err(&cli.out, e))?;
    match &cli.command {
        Command::GenScene => cmd_gen_scene(&cfg, &cli.out).map(|_| ()),
        Command::Track { image } => {
            let report = cmd_track(image, &cfg, &cli.out)?;
            println!("{}", serde_json::to_string_pretty(&report).expect("report serializes"));
            Ok(())
        }
        Command::Compare { corpus } => cmd_compare(corpus, &cfg, &cli.out).map(|_| ()),
        Command::Simulate => {
            let trace = cmd_simulate(&cfg, &cli.out)?;
            eprintln!("{} rows, {:?}", trace.rows.len(), trace.outcome);
            Ok(())
        }
        Command::Park => {
            let report = cmd_park(&cfg, &cli.out)?;
            eprintln!("{}", report.status);
            Ok(())
        }
        Command::FitDistance { samples } => {
            let m = cmd_fit_distance(samples, &cli.out)?;
            println!("{}", serde_json::to_string_pretty(&m).expect("model serializes"));
            Ok(())
        }
    }
}

/// Parses `args`, runs the command and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match execute(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
