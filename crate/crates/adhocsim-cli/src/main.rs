//! Command-line front door for the simulation toolkit.
//!
//! Exit codes: 0 on success, 2 on config errors, 3 when a solver fails or
//! routing failures exceed the run threshold, 1 on I/O errors.

use adhocsim_cli::config::{default_config, ConfigError, ExperimentKind};
use adhocsim_cli::runner::{run_and_persist, RunError};
use clap::{Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "adhocsim",
    version,
    about = "Monte Carlo experiments on wireless ad hoc networks with node failures"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// JSON experiment config; built-in defaults are used when omitted.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Base seed override.
    #[arg(long, global = true, value_name = "U64")]
    seed: Option<u64>,

    /// Worker thread override (0 = one per logical CPU).
    #[arg(long, global = true, value_name = "K")]
    workers: Option<usize>,

    /// Output directory override.
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Connectivity probability vs transmission radius.
    ConnectivitySweep,
    /// Connectivity under the sampled channel model.
    ChannelConnectivity,
    /// Capacity over an (n, q) sweep through the full pipeline.
    CapacityScaling,
    /// Delay over an (n, q) sweep through the full pipeline.
    DelayScaling,
    /// Capacity/delay ratio over an (n, q) sweep.
    Tradeoff,
    /// Redundancy-node sizing grid.
    Redundancy,
    /// Per-cell occupancy statistics.
    Occupancy,
}

impl Command {
    fn kind(&self) -> ExperimentKind {
        match self {
            Command::ConnectivitySweep => ExperimentKind::ConnectivitySweep,
            Command::ChannelConnectivity => ExperimentKind::ChannelConnectivity,
            Command::CapacityScaling => ExperimentKind::CapacityScaling,
            Command::DelayScaling => ExperimentKind::DelayScaling,
            Command::Tradeoff => ExperimentKind::Tradeoff,
            Command::Redundancy => ExperimentKind::Redundancy,
            Command::Occupancy => ExperimentKind::Occupancy,
        }
    }
}

fn main() -> ExitCode {
    env_logger::init();
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            match err {
                RunError::Config(_) => ExitCode::from(2),
                RunError::Solver(_) | RunError::RoutingThreshold { .. } => ExitCode::from(3),
                RunError::Io(_) => ExitCode::from(1),
            }
        }
    }
}

fn run(cli: &Cli) -> Result<(), RunError> {
    let kind = cli.command.kind();
    let mut cfg = match &cli.config {
        Some(path) => {
            let cfg = adhocsim_cli::ExperimentConfig::from_path(path)?;
            if let Some(file_kind) = cfg.kind {
                if file_kind != kind {
                    return Err(ConfigError::KindMismatch {
                        config: file_kind.as_str().into(),
                        requested: kind.as_str().into(),
                    }
                    .into());
                }
            }
            cfg
        }
        None => default_config(kind),
    };
    cfg.kind = Some(kind);
    if let Some(seed) = cli.seed {
        cfg.base_seed = seed;
    }
    if let Some(workers) = cli.workers {
        cfg.workers = workers;
    }
    if let Some(out) = &cli.out {
        cfg.out_dir = out.clone();
    }

    let (report, csv_path, meta_path) = run_and_persist(&cfg)?;
    println!(
        "{}: {} rows -> {} ({})",
        kind.as_str(),
        report.rows.len(),
        csv_path.display(),
        meta_path.display()
    );
    Ok(())
}
