//! Executes experiment configs over a bounded worker pool.
//!
//! Every Monte Carlo trial derives its own random stream from
//! `(base_seed, trial_index)` and the aggregation folds per-trial results in
//! trial order, so the produced tables (and the CSV bytes) depend only on
//! the config and seed, never on the worker count or scheduling.

use crate::config::{ChannelConfig, ConfigError, ExperimentConfig, ExperimentKind};
use crate::fit::{self, crossing_point, isotonic_nondecreasing};
use crate::report::MetricsReport;
use adhocsim::deployment::{pair_flows, place_nodes, sample_failures};
use adhocsim::percolation::{build_grid, cell_occupancy_stats, cell_side_for_radius};
use adhocsim::routing::{achieved_rate, cell_loads, route_flow, ReroutePolicy, Route};
use adhocsim::SeedSpec;
use rayon::prelude::*;
use std::path::PathBuf;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum RunError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("solver failed: {0}")]
    Solver(#[from] adhocsim::Error),
    #[error("routing failures exceeded threshold: {failed} of {total} flows unroutable")]
    RoutingThreshold { failed: u64, total: u64 },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Fraction of unroutable flows (over a whole run) above which the run is
/// reported as failed rather than silently producing starved metrics.
const ROUTING_FAILURE_THRESHOLD: f64 = 0.5;

/// Run an experiment and return its result table.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<MetricsReport, RunError> {
    cfg.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.workers)
        .build()
        .expect("worker pool");
    pool.install(|| match cfg.kind().expect("validated") {
        ExperimentKind::ConnectivitySweep => connectivity_sweep(cfg),
        ExperimentKind::ChannelConnectivity => channel_connectivity(cfg),
        ExperimentKind::CapacityScaling
        | ExperimentKind::DelayScaling
        | ExperimentKind::Tradeoff => capacity_pipeline(cfg),
        ExperimentKind::Redundancy => redundancy(cfg),
        ExperimentKind::Occupancy => occupancy(cfg),
    })
}

/// Run an experiment and persist `<kind>.csv` + `<kind>.meta.json`.
pub fn run_and_persist(cfg: &ExperimentConfig) -> Result<(MetricsReport, PathBuf, PathBuf), RunError> {
    let start = std::time::Instant::now();
    let report = run_experiment(cfg)?;
    let fits = scaling_fits(&report);
    let (csv, meta) = crate::report::persist(&report, cfg, fits, start.elapsed().as_secs_f64())?;
    Ok((report, csv, meta))
}

/// Log-log fits of capacity and delay against `n (1-q) / ln n`, recorded in
/// the meta sidecar for the pipeline kinds.
fn scaling_fits(report: &MetricsReport) -> serde_json::Value {
    let mut fits = serde_json::Map::new();
    for metric in ["capacity", "delay"] {
        if report.columns.contains(&metric) {
            if let Ok(fit) = fit::fit_scaling(report, fit::effective_nodes_over_log, metric) {
                fits.insert(
                    metric.to_string(),
                    serde_json::json!({
                        "predictor": "n(1-q)/ln n",
                        "slope": fit.slope,
                        "intercept": fit.intercept,
                        "r_squared": fit.r_squared,
                        "used": fit.used,
                        "excluded": fit.excluded,
                    }),
                );
            }
        }
    }
    serde_json::Value::Object(fits)
}

fn connectivity_sweep(cfg: &ExperimentConfig) -> Result<MetricsReport, RunError> {
    let mut report = MetricsReport::new(
        cfg.kind().expect("validated"),
        vec!["n", "q", "r", "connect_prob", "r50"],
    );
    for &n in &cfg.n_list {
        for &q in &cfg.q_list {
            let radii = cfg.radius.resolve(n, q)?;
            let probs: Vec<f64> = radii
                .iter()
                .map(|&r| {
                    adhocsim::topology::connectivity_probability(
                        n,
                        q,
                        r,
                        cfg.trials,
                        cfg.base_seed,
                    )
                })
                .collect();
            // Common random numbers make the raw curve monotone up to ties;
            // smoothing guards the interpolation anyway.
            let smoothed = isotonic_nondecreasing(&probs);
            let r50 = crossing_point(&radii, &smoothed, 0.5).unwrap_or(f64::NAN);
            for (&r, &p) in radii.iter().zip(&probs) {
                report.push(vec![n as f64, q, r, p, r50]);
            }
        }
    }
    Ok(report)
}

fn channel_connectivity(cfg: &ExperimentConfig) -> Result<MetricsReport, RunError> {
    let channel = cfg.channel.clone().unwrap_or_default();
    let mut report = MetricsReport::new(
        cfg.kind().expect("validated"),
        vec!["n", "q", "alpha", "sigma_db", "r_equiv", "connect_prob"],
    );
    for &n in &cfg.n_list {
        for &q in &cfg.q_list {
            let points = operating_points(cfg, &channel, n, q)?;
            for &alpha in &channel.alpha_list {
                for &(r_equiv, tx_power) in &points {
                    let params = channel.to_params(alpha, tx_power);
                    let prob = adhocsim::channel::channel_connectivity_probability(
                        n,
                        q,
                        &params,
                        cfg.trials,
                        cfg.base_seed,
                    );
                    report.push(vec![
                        n as f64,
                        q,
                        alpha,
                        channel.shadowing_sigma_db,
                        r_equiv,
                        prob,
                    ]);
                }
            }
        }
    }
    Ok(report)
}

/// The sweep of (radius-equivalent, transmit power) pairs for one `(n, q)`.
/// With a fixed transmit power configured there is a single operating point;
/// otherwise the power is derived from each resolved radius at the reference
/// exponent, so all exponents share the same power at each point.
fn operating_points(
    cfg: &ExperimentConfig,
    channel: &ChannelConfig,
    n: usize,
    q: f64,
) -> Result<Vec<(f64, f64)>, ConfigError> {
    if let Some(tx_power) = channel.tx_power_dbm {
        let reference = channel.to_params(channel.alpha_list[0], tx_power);
        let r_equiv = adhocsim::channel::link_threshold_distance(&reference);
        return Ok(vec![(r_equiv, tx_power)]);
    }
    Ok(cfg
        .radius
        .resolve(n, q)?
        .into_iter()
        .map(|r| (r, channel.tx_power_for_reach(r)))
        .collect())
}

/// Per-trial pipeline outcome, aggregated into one row per `(n, q, r)`.
struct TrialOutcome {
    pairs: usize,
    routed: usize,
    failures: usize,
    mean_sd_dist: f64,
    max_load: u32,
    /// Per-flow rate; `None` when nothing was routed.
    rate: Option<f64>,
    delay: f64,
    occ_min: usize,
    occ_mean: f64,
    occ_max: usize,
}

fn capacity_trial(
    n: usize,
    q: f64,
    r: f64,
    phases_per_axis: usize,
    mac: &adhocsim::mac::MacParams,
    seed: SeedSpec,
) -> TrialOutcome {
    let d = place_nodes(n, seed);
    let mask = sample_failures(&d, q, seed).expect("q validated");
    let a = cell_side_for_radius(r).min(1.0);
    let grid = build_grid(&d, &mask, a);
    let occupancy = cell_occupancy_stats(&grid);
    let flows = pair_flows(&mask, seed);

    let policy = ReroutePolicy::default();
    let mut routes: Vec<Route> = Vec::with_capacity(flows.count());
    let mut failures = 0usize;
    for (i, &pair) in flows.pairs().iter().enumerate() {
        match route_flow(&d, &grid, i, pair, &policy) {
            Ok(route) => routes.push(route),
            Err(_) => failures += 1,
        }
    }

    let mean_sd_dist = if flows.is_empty() {
        0.0
    } else {
        flows
            .pairs()
            .iter()
            .map(|&(s, t)| d.position(s).dist(d.position(t)))
            .sum::<f64>()
            / flows.count() as f64
    };

    let loads = cell_loads(&routes, &grid);
    let rate = achieved_rate(&loads, mac, phases_per_axis).ok();
    let delay = adhocsim::routing::measure_delay(&routes, 1.0);

    TrialOutcome {
        pairs: flows.count(),
        routed: routes.len(),
        failures,
        mean_sd_dist,
        max_load: loads.max(),
        rate,
        delay,
        occ_min: occupancy.min,
        occ_mean: occupancy.mean,
        occ_max: occupancy.max,
    }
}

fn capacity_pipeline(cfg: &ExperimentConfig) -> Result<MetricsReport, RunError> {
    let mac = cfg.mac.to_params()?;
    let delta_eff = adhocsim::mac::effective_delta(&mac).expect("validated");
    let phases_per_axis = adhocsim::mac::cluster_size(delta_eff);

    let mut report = MetricsReport::new(
        cfg.kind().expect("validated"),
        vec![
            "n",
            "q",
            "r",
            "trials",
            "pairs",
            "routed",
            "routing_failures",
            "mean_sd_dist",
            "max_load",
            "lambda",
            "capacity",
            "delay",
            "s_over_d",
            "occ_min",
            "occ_mean",
            "occ_max",
        ],
    );

    let mut failed_total = 0u64;
    let mut flows_total = 0u64;
    for &n in &cfg.n_list {
        for &q in &cfg.q_list {
            for r in cfg.radius.resolve(n, q)? {
                let outcomes: Vec<TrialOutcome> = (0..cfg.trials as u64)
                    .into_par_iter()
                    .map(|t| {
                        capacity_trial(
                            n,
                            q,
                            r,
                            phases_per_axis,
                            &mac,
                            SeedSpec::new(cfg.base_seed, t),
                        )
                    })
                    .collect();

                let trials = outcomes.len() as f64;
                let mean = |f: &dyn Fn(&TrialOutcome) -> f64| {
                    outcomes.iter().map(f).sum::<f64>() / trials
                };
                // Per-trial capacity is pairs * rate; trials with nothing
                // routed contribute no rate observation.
                let rated: Vec<(&TrialOutcome, f64)> = outcomes
                    .iter()
                    .filter_map(|o| o.rate.map(|rate| (o, rate)))
                    .collect();
                let (lambda, capacity) = if rated.is_empty() {
                    (f64::NAN, f64::NAN)
                } else {
                    let lambda =
                        rated.iter().map(|(_, rate)| rate).sum::<f64>() / rated.len() as f64;
                    let capacity = rated
                        .iter()
                        .map(|(o, rate)| o.pairs as f64 * rate)
                        .sum::<f64>()
                        / rated.len() as f64;
                    (lambda, capacity)
                };
                let delay = mean(&|o| o.delay);
                failed_total += outcomes.iter().map(|o| o.failures as u64).sum::<u64>();
                flows_total += outcomes.iter().map(|o| o.pairs as u64).sum::<u64>();

                report.push(vec![
                    n as f64,
                    q,
                    r,
                    trials,
                    mean(&|o| o.pairs as f64),
                    mean(&|o| o.routed as f64),
                    mean(&|o| o.failures as f64),
                    mean(&|o| o.mean_sd_dist),
                    mean(&|o| o.max_load as f64),
                    lambda,
                    capacity,
                    delay,
                    capacity / delay,
                    mean(&|o| o.occ_min as f64),
                    mean(&|o| o.occ_mean),
                    mean(&|o| o.occ_max as f64),
                ]);
            }
        }
    }

    if flows_total > 0 && failed_total as f64 > ROUTING_FAILURE_THRESHOLD * flows_total as f64 {
        return Err(RunError::RoutingThreshold {
            failed: failed_total,
            total: flows_total,
        });
    }
    Ok(report)
}

fn redundancy(cfg: &ExperimentConfig) -> Result<MetricsReport, RunError> {
    let mut report = MetricsReport::new(
        cfg.kind().expect("validated"),
        vec!["n", "q", "extra_nodes", "overhead", "residual"],
    );
    for &n in &cfg.n_list {
        for &q in &cfg.q_list {
            let result = adhocsim::analysis::redundancy_to_baseline(n, q)?;
            let nf = n as f64;
            let target = nf / nf.ln();
            let lhs = (nf * (1.0 - q) + result.extra_nodes) / (nf + result.extra_nodes).ln();
            report.push(vec![
                nf,
                q,
                result.extra_nodes,
                result.overhead,
                (lhs - target).abs() / target,
            ]);
        }
    }
    Ok(report)
}

/// Per-`(n, q)` occupancy statistics with the cells tiled at `a = r/sqrt(2)`.
fn occupancy(cfg: &ExperimentConfig) -> Result<MetricsReport, RunError> {
    let mut report = MetricsReport::new(
        cfg.kind().expect("validated"),
        vec![
            "n",
            "q",
            "r",
            "a",
            "cells_per_axis",
            "trials",
            "occ_mean",
            "trial_min_mean",
            "trial_max_mean",
            "cellavg_min",
            "cellavg_max",
            "no_empty_frac",
            "c1_est",
        ],
    );
    for &n in &cfg.n_list {
        for &q in &cfg.q_list {
            for r in cfg.radius.resolve(n, q)? {
                let a = cell_side_for_radius(r).min(1.0);
                struct TrialOcc {
                    min: usize,
                    max: usize,
                    mean: f64,
                    empty_free: bool,
                    per_cell: Vec<u32>,
                }
                let outcomes: Vec<TrialOcc> = (0..cfg.trials as u64)
                    .into_par_iter()
                    .map(|t| {
                        let seed = SeedSpec::new(cfg.base_seed, t);
                        let d = place_nodes(n, seed);
                        let mask = sample_failures(&d, q, seed).expect("q validated");
                        let grid = build_grid(&d, &mask, a);
                        let stats = cell_occupancy_stats(&grid);
                        let k = grid.cells_per_axis();
                        let mut per_cell = vec![0u32; k * k];
                        for iy in 0..k {
                            for ix in 0..k {
                                per_cell[iy * k + ix] = grid.non_faulty_in(ix, iy).len() as u32;
                            }
                        }
                        TrialOcc {
                            min: stats.min,
                            max: stats.max,
                            mean: stats.mean,
                            empty_free: stats.min > 0,
                            per_cell,
                        }
                    })
                    .collect();

                let trials = outcomes.len() as f64;
                let cells = outcomes[0].per_cell.len();
                let mut cell_means = vec![0.0f64; cells];
                for outcome in &outcomes {
                    for (acc, &c) in cell_means.iter_mut().zip(&outcome.per_cell) {
                        *acc += c as f64;
                    }
                }
                for acc in &mut cell_means {
                    *acc /= trials;
                }
                let occ_mean = outcomes.iter().map(|o| o.mean).sum::<f64>() / trials;
                report.push(vec![
                    n as f64,
                    q,
                    r,
                    a,
                    (cells as f64).sqrt(),
                    trials,
                    occ_mean,
                    outcomes.iter().map(|o| o.min as f64).sum::<f64>() / trials,
                    outcomes.iter().map(|o| o.max as f64).sum::<f64>() / trials,
                    cell_means.iter().cloned().fold(f64::INFINITY, f64::min),
                    cell_means.iter().cloned().fold(0.0, f64::max),
                    outcomes.iter().filter(|o| o.empty_free).count() as f64 / trials,
                    occ_mean / (n as f64).ln(),
                ]);
            }
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::default_config;

    fn tiny_capacity_config() -> ExperimentConfig {
        let mut cfg = default_config(ExperimentKind::CapacityScaling);
        cfg.n_list = vec![300];
        cfg.q_list = vec![0.2];
        cfg.trials = 5;
        cfg
    }

    #[test]
    fn capacity_rows_have_consistent_shape() {
        let cfg = tiny_capacity_config();
        let report = run_experiment(&cfg).unwrap();
        assert_eq!(report.rows.len(), 1);
        assert_eq!(report.columns.len(), report.rows[0].len());
        let s = report.value(0, "capacity").unwrap();
        let lambda = report.value(0, "lambda").unwrap();
        let pairs = report.value(0, "pairs").unwrap();
        // S = N_q * lambda holds per trial; with a constant pair count the
        // aggregate keeps the identity to rounding.
        assert!((s - pairs * lambda).abs() / s < 0.2, "s={s} pairs={pairs} lambda={lambda}");
        assert!(report.value(0, "delay").unwrap() > 0.0);
    }

    #[test]
    fn reports_are_worker_count_independent() {
        let mut a = tiny_capacity_config();
        a.workers = 1;
        let mut b = tiny_capacity_config();
        b.workers = 4;
        let ra = run_experiment(&a).unwrap();
        let rb = run_experiment(&b).unwrap();
        assert_eq!(ra.to_csv(), rb.to_csv());
    }

    #[test]
    fn connectivity_sweep_reports_r50() {
        let mut cfg = default_config(ExperimentKind::ConnectivitySweep);
        cfg.n_list = vec![200];
        cfg.q_list = vec![0.3];
        cfg.trials = 60;
        let report = run_experiment(&cfg).unwrap();
        assert_eq!(report.rows.len(), 21);
        let r50 = report.value(0, "r50").unwrap();
        assert!(r50.is_finite() && r50 > 0.0);
        let probs = report.column("connect_prob").unwrap();
        assert!(probs.iter().all(|&p| (0.0..=1.0).contains(&p)));
        assert!(probs.first().unwrap() < &0.1);
        assert!(probs.last().unwrap() > &0.9);
    }

    #[test]
    fn redundancy_grid_matches_solver() {
        let mut cfg = default_config(ExperimentKind::Redundancy);
        cfg.n_list = vec![1000];
        cfg.q_list = vec![0.2];
        let report = run_experiment(&cfg).unwrap();
        let extra = report.value(0, "extra_nodes").unwrap();
        assert!((extra - 230.0).abs() < 3.0);
        assert!(report.value(0, "residual").unwrap() < 1e-6);
    }

    #[test]
    fn occupancy_reports_cell_statistics() {
        let mut cfg = default_config(ExperimentKind::Occupancy);
        cfg.n_list = vec![500];
        cfg.q_list = vec![0.2];
        cfg.trials = 10;
        let report = run_experiment(&cfg).unwrap();
        assert_eq!(report.rows.len(), 1);
        let mean = report.value(0, "occ_mean").unwrap();
        // Expected survivors per cell with a = r/sqrt(2) is ln(n)/2.
        let expect = (500f64).ln() / 2.0;
        assert!((mean - expect).abs() < 1.5, "mean={mean} expect={expect}");
        assert!(report.value(0, "cellavg_min").unwrap() <= mean);
        assert!(report.value(0, "cellavg_max").unwrap() >= mean);
    }

    #[test]
    fn fixed_tx_power_gives_single_operating_point() {
        let mut cfg = default_config(ExperimentKind::ChannelConnectivity);
        cfg.n_list = vec![80];
        cfg.trials = 5;
        let mut channel = cfg.channel.take().unwrap();
        channel.tx_power_dbm = Some(-20.0);
        channel.alpha_list = vec![2.5, 3.0];
        cfg.channel = Some(channel);
        let report = run_experiment(&cfg).unwrap();
        // One row per exponent, sharing the transmit-power-derived reach.
        assert_eq!(report.rows.len(), 2);
        let r_equiv = report.column("r_equiv").unwrap();
        assert_eq!(r_equiv[0], r_equiv[1]);
        assert!(r_equiv[0] > 0.0);
    }

    #[test]
    fn kind_must_be_set() {
        let mut cfg = tiny_capacity_config();
        cfg.kind = None;
        assert!(matches!(
            run_experiment(&cfg),
            Err(RunError::Config(ConfigError::Field { field: "kind", .. }))
        ));
    }
}
