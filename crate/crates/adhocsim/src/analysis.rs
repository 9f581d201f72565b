//! Closed-form scaling values and redundancy-node solvers.
//!
//! Capacity and delay of an `n`-node network with failure probability `q`
//! both scale as `sqrt(n (1-q) / ln n)` (and `(n (1-q) / ln n)^(2/3)` in
//! three dimensions); their ratio is exactly 1 in these order-representative
//! units, reflecting that the capacity/delay trade-off is a constant.
//!
//! A failure-prone `n`-node network also falls short of a failure-free
//! network with the same expected number `n (1-q)` of working nodes by the
//! factor `sqrt(ln(n (1-q)) / ln n)`; the shortfall pays for failure
//! randomness. Restoring the failure-free scaling requires deploying extra
//! always-on relay nodes, and the solvers here size that redundancy.
//!
//! All logarithms are natural. Scaling values carry constant 1; consumers
//! should compare ratios or fitted exponents, never absolute magnitudes.

use crate::{Error, Result};

fn check_n_q(n: usize, q: f64) -> Result<f64> {
    assert!(n >= 2, "need at least two nodes");
    if q >= 1.0 {
        return Err(Error::InvalidParameter(
            "scaling undefined at q = 1 (no survivors)".into(),
        ));
    }
    if q < 0.0 {
        return Err(Error::InvalidParameter(format!("q={q} outside [0, 1)")));
    }
    Ok(n as f64)
}

/// Order-representative network capacity `sqrt(n (1-q) / ln n)`.
pub fn capacity_scaling(n: usize, q: f64) -> Result<f64> {
    let nf = check_n_q(n, q)?;
    Ok((nf * (1.0 - q) / nf.ln()).sqrt())
}

/// Order-representative delay; identical functional form to the capacity, so
/// `capacity_scaling / delay_scaling` is exactly 1.
pub fn delay_scaling(n: usize, q: f64) -> Result<f64> {
    capacity_scaling(n, q)
}

/// Order-representative capacity in three dimensions,
/// `(n (1-q) / ln n)^(2/3)`.
pub fn capacity_scaling_3d(n: usize, q: f64) -> Result<f64> {
    let nf = check_n_q(n, q)?;
    Ok((nf * (1.0 - q) / nf.ln()).powf(2.0 / 3.0))
}

/// Capacity of the failure-prone `n`-node network relative to a failure-free
/// network with `n (1-q)` nodes: `sqrt(ln(n (1-q)) / ln n) <= 1`, with
/// equality only at `q = 0`.
pub fn capacity_loss_ratio(n: usize, q: f64) -> Result<f64> {
    let nf = check_n_q(n, q)?;
    let survivors = nf * (1.0 - q);
    if survivors < 2.0 {
        return Err(Error::InvalidParameter(format!(
            "expected survivor count n(1-q) = {survivors} below 2"
        )));
    }
    Ok((survivors.ln() / nf.ln()).sqrt())
}

/// Result of a redundancy sizing: how many extra always-on relay nodes are
/// needed, and their ratio to the expected failure count `n q`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RedundancyResult {
    /// Extra relay nodes to deploy (continuous; round up in practice).
    pub extra_nodes: f64,
    /// `extra_nodes / (n q)`; above 1 whenever failures cost capacity.
    pub overhead: f64,
}

/// Extra relay nodes restoring the failure-free `n`-node capacity scaling:
/// solves `n / ln n = (n (1-q) + n1) / ln(n + n1)` for `n1`.
///
/// The left-hand residual is monotone in `n1`, so bisection over
/// `[0, 100 n q]` converges unconditionally; the returned root satisfies the
/// equation to a relative residual below 1e-9.
pub fn redundancy_to_baseline(n: usize, q: f64) -> Result<RedundancyResult> {
    assert!(n >= 3, "need at least three nodes");
    if !(q > 0.0 && q < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "failure probability q={q} outside (0, 1)"
        )));
    }
    let nf = n as f64;
    let target = nf / nf.ln();
    let residual = |n1: f64| (nf * (1.0 - q) + n1) / (nf + n1).ln() - target;
    let hi = 100.0 * nf * q;
    if residual(0.0) > 0.0 || residual(hi) < 0.0 {
        return Err(Error::BracketFailure { lo: 0.0, hi });
    }
    let extra = bisect(residual, 0.0, hi);
    Ok(RedundancyResult {
        extra_nodes: extra,
        overhead: extra / (nf * q),
    })
}

/// Extra relay nodes raising the failure-prone capacity to `(1 + boost)`
/// times its value: solves
/// `sqrt((n (1-q) + n1) / ln(n + n1)) = (1 + boost) sqrt(n (1-q) / ln n)`.
pub fn redundancy_for_multiplier(n: usize, q: f64, boost: f64) -> Result<RedundancyResult> {
    assert!(n >= 3, "need at least three nodes");
    if !(0.0..1.0).contains(&q) {
        return Err(Error::InvalidParameter(format!(
            "failure probability q={q} outside [0, 1)"
        )));
    }
    if boost < 0.0 {
        return Err(Error::InvalidParameter(format!(
            "capacity boost must be nonnegative, got {boost}"
        )));
    }
    let nf = n as f64;
    let target = (1.0 + boost) * (1.0 + boost) * nf * (1.0 - q) / nf.ln();
    let residual = |n1: f64| (nf * (1.0 - q) + n1) / (nf + n1).ln() - target;
    if residual(0.0) >= 0.0 {
        // boost = 0 is satisfied with no extra nodes.
        return Ok(RedundancyResult {
            extra_nodes: 0.0,
            overhead: 0.0,
        });
    }
    // Grow the bracket geometrically; the left side increases without bound.
    let mut hi = (nf * q).max(1.0);
    let mut doublings = 0;
    while residual(hi) < 0.0 {
        hi *= 2.0;
        doublings += 1;
        if doublings > 80 {
            return Err(Error::BracketFailure { lo: 0.0, hi });
        }
    }
    let extra = bisect(residual, 0.0, hi);
    Ok(RedundancyResult {
        extra_nodes: extra,
        overhead: if q > 0.0 { extra / (nf * q) } else { f64::INFINITY },
    })
}

/// Bisection on a monotone-increasing residual with a valid sign change.
/// Runs the bracket down to machine-level width, far tighter than the
/// half-node accuracy the callers need.
fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if hi - lo <= 1e-9 * hi.max(1.0) {
            return mid;
        }
        if f(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}
