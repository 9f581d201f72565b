//! Physical-layer link models and the SINR interference model.
//!
//! The link model receives at
//! `P_r = P_t - 10 a log10(d) + shadow + fading` (all in dB), where the
//! shadowing term is a `Normal(0, sigma^2)` sample and the Rayleigh-fading
//! power gain is an `Exponential(1)` sample converted to dB. A link exists
//! when `P_r` exceeds the receive threshold; with shadowing and fading off
//! the rule collapses to a pure distance threshold.
//!
//! Distances are unit-square coordinates scaled by
//! [`ChannelParams::distance_scale`] into physical units before entering the
//! path-loss term. With the default scale of 1 the formulas apply to the raw
//! coordinates; note that then all distances are below 1 and a larger
//! path-loss exponent *increases* received power. Physical setups (e.g. a
//! square of side 1000 m) use a scale larger than 1, which restores the usual
//! behavior that steeper path loss hurts connectivity.
//!
//! The SINR model declares a reception successful when the signal power over
//! noise plus simultaneous interference clears a threshold `beta`, with path
//! loss `l(x, y) = dist(x, y)^(-a)` clamped below by a minimum propagation
//! distance.

use crate::deployment::{place_nodes, sample_failures};
use crate::geom::Point;
use crate::seed::{SeedSpec, Stream};
use crate::{Error, Result};
use rand::Rng;
use rand_distr::{Exp1, StandardNormal};
use rayon::prelude::*;

/// Physical-layer parameters.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ChannelParams {
    /// Transmit power in dBm.
    pub tx_power_dbm: f64,
    /// Minimum received power for a successful link, in dBm.
    pub min_rx_power_dbm: f64,
    /// Path-loss exponent `a` (must exceed 2 for the SINR model).
    pub path_loss_exp: f64,
    /// Log-normal shadowing spread in dB (0 disables shadowing).
    pub shadowing_sigma_db: f64,
    /// Whether Rayleigh fading is applied to the link model.
    pub fading: bool,
    /// Minimum propagation distance in unit-square coordinates; shorter
    /// distances are clamped.
    pub min_distance: f64,
    /// Physical length of one unit-square side (1 = use raw coordinates).
    pub distance_scale: f64,
    /// Additive noise power for the SINR model, linear.
    pub noise_power: f64,
    /// SINR threshold `beta`, linear.
    pub sinr_threshold: f64,
    /// Replicate the literal formula that adds the raw exponential fading
    /// gain into the dB sum instead of converting it to dB first.
    pub literal_fading_sum: bool,
}

impl Default for ChannelParams {
    fn default() -> Self {
        ChannelParams {
            tx_power_dbm: 0.0,
            min_rx_power_dbm: -80.0,
            path_loss_exp: 2.5,
            shadowing_sigma_db: 0.0,
            fading: false,
            min_distance: 1e-4,
            distance_scale: 1.0,
            noise_power: 1.0,
            sinr_threshold: 1.0,
            literal_fading_sum: false,
        }
    }
}

/// Received power in dBm at the given distance for explicit shadowing and
/// fading samples.
///
/// `fading_sample` is a linear power gain; it enters as `10 log10(gain)` dB
/// (or raw, in the literal-formula mode) and is ignored when fading is
/// disabled. Distances below the minimum propagation distance are clamped
/// (and logged at debug level).
pub fn received_power_dbm(
    p: &ChannelParams,
    dist: f64,
    shadow_db: f64,
    fading_sample: f64,
) -> f64 {
    let d = if dist < p.min_distance {
        log::debug!(
            "distance {dist} below minimum propagation distance {}; clamped",
            p.min_distance
        );
        p.min_distance
    } else {
        dist
    };
    let fading_db = if !p.fading {
        0.0
    } else if p.literal_fading_sum {
        fading_sample
    } else {
        10.0 * fading_sample.log10()
    };
    p.tx_power_dbm - 10.0 * p.path_loss_exp * (d * p.distance_scale).log10() + shadow_db
        + fading_db
}

/// The distance (in unit-square coordinates) at which the deterministic part
/// of the link budget exactly meets the receive threshold:
/// `10^((P_t - P_min) / (10 a)) / scale`. With shadowing and fading disabled
/// a link exists exactly when the distance is strictly below this value.
pub fn link_threshold_distance(p: &ChannelParams) -> f64 {
    10f64.powf((p.tx_power_dbm - p.min_rx_power_dbm) / (10.0 * p.path_loss_exp))
        / p.distance_scale
}

fn draw_link<R: Rng>(rng: &mut R, dist: f64, p: &ChannelParams) -> bool {
    let shadow = if p.shadowing_sigma_db > 0.0 {
        let z: f64 = rng.sample(StandardNormal);
        z * p.shadowing_sigma_db
    } else {
        0.0
    };
    let fading = if p.fading { rng.sample(Exp1) } else { 1.0 };
    received_power_dbm(p, dist, shadow, fading) > p.min_rx_power_dbm
}

/// Sample whether a link exists between two positions, drawing fresh
/// shadowing and fading for this seed.
pub fn sample_link(a: Point, b: Point, p: &ChannelParams, seed: SeedSpec) -> bool {
    let mut rng = seed.rng(Stream::Channel);
    draw_link(&mut rng, a.dist(b), p)
}

/// SINR at the receiver of `active[idx]` when all pairs in `active` transmit
/// simultaneously with the given linear powers.
pub fn sinr(
    active: &[(Point, Point)],
    idx: usize,
    powers: &[f64],
    p: &ChannelParams,
) -> Result<f64> {
    if active.is_empty() {
        return Err(Error::InvalidParameter("empty active set".into()));
    }
    if p.path_loss_exp <= 2.0 {
        return Err(Error::InvalidParameter(format!(
            "SINR model needs a path-loss exponent above 2, got {}",
            p.path_loss_exp
        )));
    }
    if powers.len() != active.len() {
        return Err(Error::InvalidParameter(format!(
            "{} powers for {} active pairs",
            powers.len(),
            active.len()
        )));
    }
    if idx >= active.len() {
        return Err(Error::InvalidParameter(format!(
            "pair index {idx} out of range"
        )));
    }
    let loss = |a: Point, b: Point| a.dist(b).max(p.min_distance).powf(-p.path_loss_exp);
    let rx = active[idx].1;
    let signal = powers[idx] * loss(active[idx].0, rx);
    let interference: f64 = active
        .iter()
        .zip(powers)
        .enumerate()
        .filter(|&(k, _)| k != idx)
        .map(|(_, (&(tx, _), &pw))| pw * loss(tx, rx))
        .sum();
    Ok(signal / (p.noise_power + interference))
}

/// The interference guard `(48 b 2^(a-2) / (a - 2))^(1/a)` above which any
/// protocol-model-feasible transmission set can also be supported under the
/// SINR model with threshold `b` and a suitable power assignment.
pub fn delta_of_beta(beta: f64, alpha: f64) -> Result<f64> {
    if alpha <= 2.0 {
        return Err(Error::InvalidParameter(format!(
            "path-loss exponent must exceed 2, got {alpha}"
        )));
    }
    if beta <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "SINR threshold must be positive, got {beta}"
        )));
    }
    Ok((48.0 * beta * 2f64.powf(alpha - 2.0) / (alpha - 2.0)).powf(1.0 / alpha))
}

/// Monte Carlo connectivity probability where links come from the sampled
/// channel model instead of the distance rule.
///
/// Per trial, one (shadowing, fading) draw is made per unordered node pair in
/// a fixed order, so both connectivity conditions see the same links and
/// sweeping the transmit power with a fixed seed reuses identical samples.
/// Pairs of two faulty nodes are skipped; they influence neither condition.
pub fn channel_connectivity_probability(
    n: usize,
    q: f64,
    p: &ChannelParams,
    trials: usize,
    base_seed: u64,
) -> f64 {
    assert!(trials >= 1, "at least one trial is required");
    assert!((0.0..=1.0).contains(&q), "q must lie in [0, 1]");
    let connected: usize = (0..trials as u64)
        .into_par_iter()
        .map(|t| {
            let seed = SeedSpec::new(base_seed, t);
            let d = place_nodes(n, seed);
            let mask = sample_failures(&d, q, seed).expect("q validated above");
            channel_connected_once(d.positions(), &mask, p, seed) as usize
        })
        .sum();
    connected as f64 / trials as f64
}

fn channel_connected_once(
    points: &[Point],
    mask: &crate::deployment::FailureMask,
    p: &ChannelParams,
    seed: SeedSpec,
) -> bool {
    let n = points.len();
    if n == 0 {
        return true;
    }
    let survivors: Vec<usize> = mask.non_faulty().collect();
    if survivors.is_empty() {
        return false;
    }

    let mut rng = seed.rng(Stream::Channel);
    let mut adjacency: Vec<Vec<u32>> = vec![Vec::new(); n];
    let mut faulty_covered = vec![false; n];
    for i in 0..n {
        for j in (i + 1)..n {
            if mask.is_faulty(i) && mask.is_faulty(j) {
                continue;
            }
            if draw_link(&mut rng, points[i].dist(points[j]), p) {
                match (mask.is_faulty(i), mask.is_faulty(j)) {
                    (false, false) => {
                        adjacency[i].push(j as u32);
                        adjacency[j].push(i as u32);
                    }
                    (true, false) => faulty_covered[i] = true,
                    (false, true) => faulty_covered[j] = true,
                    (true, true) => unreachable!(),
                }
            }
        }
    }

    if mask.faulty().any(|t| !faulty_covered[t]) {
        return false;
    }

    let mut visited = vec![false; n];
    let mut queue = std::collections::VecDeque::new();
    visited[survivors[0]] = true;
    queue.push_back(survivors[0]);
    let mut reached = 1usize;
    while let Some(i) = queue.pop_front() {
        for &j in &adjacency[i] {
            let j = j as usize;
            if !visited[j] {
                visited[j] = true;
                reached += 1;
                queue.push_back(j);
            }
        }
    }
    reached == survivors.len()
}
