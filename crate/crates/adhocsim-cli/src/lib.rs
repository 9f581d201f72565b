//! Experiment runner behind the `adhocsim` command-line tool.
//!
//! [`config::ExperimentConfig`] describes one experiment (which sweep to
//! run, node counts, failure probabilities, radii, trial count, seed, and
//! physical parameters); [`runner::run_experiment`] executes it over a
//! bounded worker pool and returns a [`report::MetricsReport`], which
//! [`runner::run_and_persist`] writes as `<kind>.csv` plus a
//! `<kind>.meta.json` sidecar. Outputs are a pure function of the config and
//! base seed: per-trial seeds are derived deterministically and rows are
//! aggregated in a canonical order, so any worker count produces identical
//! bytes.

pub mod config;
pub mod fit;
pub mod report;
pub mod runner;

pub use config::{ExperimentConfig, ExperimentKind};
pub use report::MetricsReport;
pub use runner::{run_and_persist, run_experiment, RunError};
