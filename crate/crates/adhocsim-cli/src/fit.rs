//! Log-log regression and curve utilities for validating scaling laws.

use crate::report::MetricsReport;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum FitError {
    #[error("need at least 3 positive data points, have {available}")]
    NotEnoughData { available: usize },
    #[error("column `{0}` missing from report")]
    MissingColumn(String),
}

/// Ordinary least squares of `ln y` on `ln x`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FitResult {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    /// Points that entered the fit.
    pub used: usize,
    /// Points dropped for non-positive coordinates.
    pub excluded: usize,
}

/// Fit `ln y = slope * ln x + intercept`, excluding non-positive points.
pub fn fit_loglog(points: &[(f64, f64)]) -> Result<FitResult, FitError> {
    let valid: Vec<(f64, f64)> = points
        .iter()
        .filter(|&&(x, y)| x > 0.0 && y > 0.0 && x.is_finite() && y.is_finite())
        .map(|&(x, y)| (x.ln(), y.ln()))
        .collect();
    let excluded = points.len() - valid.len();
    if excluded > 0 {
        log::warn!("fit_loglog: excluded {excluded} non-positive points");
    }
    if valid.len() < 3 {
        return Err(FitError::NotEnoughData {
            available: valid.len(),
        });
    }

    let n = valid.len() as f64;
    let mean_x = valid.iter().map(|p| p.0).sum::<f64>() / n;
    let mean_y = valid.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = valid.iter().map(|p| (p.0 - mean_x).powi(2)).sum();
    let sxy: f64 = valid
        .iter()
        .map(|p| (p.0 - mean_x) * (p.1 - mean_y))
        .sum();
    let syy: f64 = valid.iter().map(|p| (p.1 - mean_y).powi(2)).sum();
    let slope = sxy / sxx;
    let intercept = mean_y - slope * mean_x;
    let r_squared = if syy == 0.0 { 1.0 } else { sxy * sxy / (sxx * syy) };
    Ok(FitResult {
        slope,
        intercept,
        r_squared,
        used: valid.len(),
        excluded,
    })
}

/// Fit a report metric against a predictor computed from the `n` and `q`
/// columns (for example `n (1-q) / ln n` to check capacity scaling).
pub fn fit_scaling<F>(
    report: &MetricsReport,
    predictor: F,
    metric: &str,
) -> Result<FitResult, FitError>
where
    F: Fn(f64, f64) -> f64,
{
    let n = report
        .column("n")
        .ok_or_else(|| FitError::MissingColumn("n".into()))?;
    let q = report
        .column("q")
        .ok_or_else(|| FitError::MissingColumn("q".into()))?;
    let y = report
        .column(metric)
        .ok_or_else(|| FitError::MissingColumn(metric.into()))?;
    let points: Vec<(f64, f64)> = n
        .iter()
        .zip(&q)
        .zip(&y)
        .map(|((&n, &q), &y)| (predictor(n, q), y))
        .collect();
    fit_loglog(&points)
}

/// The standard predictor for capacity and delay scaling checks:
/// `n (1-q) / ln n`.
pub fn effective_nodes_over_log(n: f64, q: f64) -> f64 {
    n * (1.0 - q) / n.ln()
}

/// Pool-adjacent-violators: the least-squares nondecreasing fit to `values`.
pub fn isotonic_nondecreasing(values: &[f64]) -> Vec<f64> {
    // Blocks of (sum, count) merged while out of order.
    let mut blocks: Vec<(f64, usize)> = Vec::with_capacity(values.len());
    for &v in values {
        blocks.push((v, 1));
        while blocks.len() >= 2 {
            let last = blocks[blocks.len() - 1];
            let prev = blocks[blocks.len() - 2];
            if prev.0 / prev.1 as f64 <= last.0 / last.1 as f64 {
                break;
            }
            blocks.pop();
            let merged = (prev.0 + last.0, prev.1 + last.1);
            *blocks.last_mut().expect("nonempty") = merged;
        }
    }
    let mut out = Vec::with_capacity(values.len());
    for (sum, count) in blocks {
        let mean = sum / count as f64;
        out.extend(std::iter::repeat_n(mean, count));
    }
    out
}

/// First crossing of a nondecreasing curve through `target`, linearly
/// interpolated. `None` when the curve never reaches the target.
pub fn crossing_point(xs: &[f64], ys: &[f64], target: f64) -> Option<f64> {
    debug_assert_eq!(xs.len(), ys.len());
    if ys.is_empty() {
        return None;
    }
    if ys[0] >= target {
        return Some(xs[0]);
    }
    for i in 1..ys.len() {
        if ys[i] >= target {
            let (x0, x1, y0, y1) = (xs[i - 1], xs[i], ys[i - 1], ys[i]);
            if y1 == y0 {
                return Some(x1);
            }
            return Some(x0 + (x1 - x0) * (target - y0) / (y1 - y0));
        }
    }
    None
}
