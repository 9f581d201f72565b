//! Geometric graph over non-faulty nodes and network connectivity.
//!
//! Two non-faulty nodes are linked exactly when their Euclidean distance is
//! at most the transmission radius `r`. The network is *connected* when
//!
//! a) the non-faulty nodes form a single connected component, and
//! b) every faulty node has at least one non-faulty node within distance `r`
//!    (so a recovered node can rejoin the network immediately).
//!
//! The critical transmission radius that keeps an `n`-node network with
//! failure probability `q` connected scales as `sqrt((ln n + xi) / ((1-q) n))`;
//! [`estimate_critical_radius`] recovers the empirical crossing point by
//! bisection on Monte Carlo connectivity estimates.

use crate::deployment::{place_nodes, sample_failures, Deployment, FailureMask};
use crate::geom::Point;
use crate::seed::SeedSpec;
use crate::{Error, Result};
use rayon::prelude::*;

/// Uniform-cell spatial hash for radius-bounded neighbor queries.
pub(crate) struct SpatialHash {
    cell: f64,
    k: usize,
    buckets: Vec<Vec<usize>>,
}

impl SpatialHash {
    /// Hash the given node indices with bucket side close to `cell_hint`.
    /// The bucket count is capped near the point count, so degenerate hints
    /// cannot blow up memory; queries widen their bucket scan accordingly.
    pub(crate) fn build(
        points: &[Point],
        nodes: impl Iterator<Item = usize>,
        cell_hint: f64,
    ) -> Self {
        let max_k = ((points.len() as f64).sqrt().ceil() as usize).max(1);
        let k = if cell_hint <= 0.0 {
            1
        } else {
            ((1.0 / cell_hint) as usize).clamp(1, max_k)
        };
        let cell = 1.0 / k as f64;
        let mut hash = SpatialHash {
            cell,
            k,
            buckets: vec![Vec::new(); k * k],
        };
        for i in nodes {
            let (bx, by) = hash.bucket_of(points[i]);
            hash.buckets[by * k + bx].push(i);
        }
        hash
    }

    fn bucket_of(&self, p: Point) -> (usize, usize) {
        let bx = ((p.x / self.cell) as usize).min(self.k - 1);
        let by = ((p.y / self.cell) as usize).min(self.k - 1);
        (bx, by)
    }

    /// Visit every hashed node within distance `r` of `p` (excluding `skip`).
    pub(crate) fn for_each_within<F: FnMut(usize)>(
        &self,
        points: &[Point],
        p: Point,
        r: f64,
        skip: usize,
        mut f: F,
    ) {
        let (bx, by) = self.bucket_of(p);
        let reach = (r / self.cell).ceil() as usize;
        let x0 = bx.saturating_sub(reach);
        let y0 = by.saturating_sub(reach);
        let x1 = (bx + reach).min(self.k - 1);
        let y1 = (by + reach).min(self.k - 1);
        let r_sq = r * r;
        for y in y0..=y1 {
            for x in x0..=x1 {
                for &j in &self.buckets[y * self.k + x] {
                    if j != skip && points[j].dist_sq(p) <= r_sq {
                        f(j);
                    }
                }
            }
        }
    }
}

/// The geometric graph over non-faulty nodes at transmission radius `r`.
#[derive(Clone, Debug)]
pub struct GeomGraph {
    radius: f64,
    non_faulty: Vec<usize>,
    /// Adjacency lists indexed by node id; faulty nodes keep empty lists.
    adjacency: Vec<Vec<usize>>,
}

impl GeomGraph {
    pub fn radius(&self) -> f64 {
        self.radius
    }

    /// Non-faulty node ids, ascending.
    pub fn nodes(&self) -> &[usize] {
        &self.non_faulty
    }

    pub fn neighbors(&self, node: usize) -> &[usize] {
        &self.adjacency[node]
    }

    pub fn contains_edge(&self, a: usize, b: usize) -> bool {
        self.adjacency[a].contains(&b)
    }

    /// Number of undirected edges.
    pub fn edge_count(&self) -> usize {
        self.adjacency.iter().map(Vec::len).sum::<usize>() / 2
    }
}

/// Build the distance-rule graph over non-faulty nodes.
///
/// Uses uniform-cell spatial hashing, so the cost is near-linear in `n` for
/// radii near the connectivity threshold.
pub fn build_graph(d: &Deployment, mask: &FailureMask, r: f64) -> GeomGraph {
    assert!(r > 0.0, "transmission radius must be positive");
    let non_faulty: Vec<usize> = mask.non_faulty().collect();
    let hash = SpatialHash::build(d.positions(), non_faulty.iter().copied(), r);
    let mut adjacency = vec![Vec::new(); d.n()];
    for &i in &non_faulty {
        let mut neighbors = Vec::new();
        hash.for_each_within(d.positions(), d.position(i), r, i, |j| neighbors.push(j));
        neighbors.sort_unstable();
        adjacency[i] = neighbors;
    }
    GeomGraph {
        radius: r,
        non_faulty,
        adjacency,
    }
}

/// Test network connectivity (conditions a and b above) at radius `r`.
///
/// Edge cases: an empty deployment is vacuously connected; a deployment with
/// nodes but no survivors is not (a dead network cannot carry traffic).
pub fn is_connected_def1(d: &Deployment, mask: &FailureMask, r: f64) -> bool {
    assert!(r > 0.0, "transmission radius must be positive");
    if d.n() == 0 {
        return true;
    }
    let survivors: Vec<usize> = mask.non_faulty().collect();
    if survivors.is_empty() {
        return false;
    }

    let points = d.positions();
    let hash = SpatialHash::build(points, survivors.iter().copied(), r);

    // Condition b first: it is O(faulty) and fails fast at small radii.
    for t in mask.faulty() {
        let mut found = false;
        hash.for_each_within(points, points[t], r, t, |_| found = true);
        if !found {
            return false;
        }
    }

    // Condition a: BFS over the survivor subgraph.
    let mut visited = vec![false; d.n()];
    let mut queue = std::collections::VecDeque::new();
    visited[survivors[0]] = true;
    queue.push_back(survivors[0]);
    let mut reached = 1usize;
    while let Some(i) = queue.pop_front() {
        hash.for_each_within(points, points[i], r, i, |j| {
            if !visited[j] {
                visited[j] = true;
                reached += 1;
                queue.push_back(j);
            }
        });
    }
    reached == survivors.len()
}

/// Monte Carlo estimate of the probability that a fresh `(n, q)` deployment
/// is connected at radius `r`.
///
/// Trial `t` uses the stream `(base_seed, t)`, so sweeping `r` or `q` with a
/// fixed `base_seed` applies common random numbers: the estimate is monotone
/// nondecreasing in `r` and nonincreasing in `q`. The Monte Carlo standard
/// error is at most `0.5 / sqrt(trials)`.
pub fn connectivity_probability(n: usize, q: f64, r: f64, trials: usize, base_seed: u64) -> f64 {
    assert!(trials >= 1, "at least one trial is required");
    assert!((0.0..=1.0).contains(&q), "q must lie in [0, 1]");
    let connected: usize = (0..trials as u64)
        .into_par_iter()
        .map(|t| {
            let seed = SeedSpec::new(base_seed, t);
            let d = place_nodes(n, seed);
            let mask = sample_failures(&d, q, seed).expect("q validated above");
            is_connected_def1(&d, &mask, r) as usize
        })
        .sum();
    connected as f64 / trials as f64
}

/// Convention for the critical-radius denominator.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum RadiusConvention {
    /// `sqrt((ln n + xi) / ((1 - q) n))`.
    #[default]
    Plain,
    /// `sqrt((ln n + xi) / (pi (1 - q) n))` — the disk-area variant.
    DiskArea,
}

/// Closed-form critical transmission radius `sqrt((ln n + xi) / ((1-q) n))`.
///
/// Natural logarithm throughout. `xi >= 0` shifts the constant only, not the
/// scaling; 0 is the conventional default.
pub fn critical_radius_closed_form(n: usize, q: f64, xi: f64) -> Result<f64> {
    critical_radius_with(n, q, xi, RadiusConvention::Plain)
}

/// [`critical_radius_closed_form`] with an explicit area convention.
pub fn critical_radius_with(n: usize, q: f64, xi: f64, conv: RadiusConvention) -> Result<f64> {
    assert!(n >= 2, "need at least two nodes");
    assert!(xi >= 0.0, "slack must be nonnegative");
    if q >= 1.0 {
        return Err(Error::InvalidParameter(
            "critical radius undefined at q = 1 (no survivors)".into(),
        ));
    }
    if q < 0.0 {
        return Err(Error::InvalidParameter(format!("q={q} outside [0, 1)")));
    }
    let denom = match conv {
        RadiusConvention::Plain => (1.0 - q) * n as f64,
        RadiusConvention::DiskArea => std::f64::consts::PI * (1.0 - q) * n as f64,
    };
    Ok((((n as f64).ln() + xi) / denom).sqrt())
}

/// Estimate the radius at which the connectivity probability crosses
/// `target_prob`, by bisection over `[0, sqrt(2)]` with common random
/// numbers.
///
/// Returns as soon as the probability at the midpoint is within 0.02 of the
/// target; otherwise the bracket collapses onto the empirical crossing point
/// (40 halvings) and its midpoint is returned, which is the best available
/// estimate when the Monte Carlo curve steps over the target (e.g. at
/// `trials = 1`). Fails with [`Error::NoConvergence`] only when the target is
/// unreachable even at the full diagonal (e.g. `q = 1`).
pub fn estimate_critical_radius(
    n: usize,
    q: f64,
    trials: usize,
    target_prob: f64,
    base_seed: u64,
) -> Result<f64> {
    assert!(
        target_prob > 0.0 && target_prob < 1.0,
        "target probability must lie strictly inside (0, 1)"
    );
    const TOL: f64 = 0.02;
    const MAX_STEPS: usize = 40;
    let sqrt2 = std::f64::consts::SQRT_2;

    // r = 0 is outside is_connected_def1's domain; probe just above zero.
    let mut lo = 1e-9;
    let mut hi = sqrt2;
    let p_lo = connectivity_probability(n, q, lo, trials, base_seed);
    if (p_lo - target_prob).abs() <= TOL || p_lo >= target_prob {
        return Ok(0.0);
    }
    let p_hi = connectivity_probability(n, q, hi, trials, base_seed);
    if (p_hi - target_prob).abs() <= TOL {
        return Ok(hi);
    }
    if p_hi < target_prob {
        return Err(Error::NoConvergence(format!(
            "connectivity probability at the unit-square diagonal is {p_hi}, below the target {target_prob}"
        )));
    }

    for _ in 0..MAX_STEPS {
        let mid = 0.5 * (lo + hi);
        let p = connectivity_probability(n, q, mid, trials, base_seed);
        if (p - target_prob).abs() <= TOL {
            return Ok(mid);
        }
        if p < target_prob {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}
