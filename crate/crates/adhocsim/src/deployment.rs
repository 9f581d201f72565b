//! Node placement, random failures, and source-destination pairing.
//!
//! A deployment is `n` nodes placed uniformly and independently in the unit
//! square. Each node then fails independently with probability `q`; the
//! surviving ("non-faulty") nodes are matched into source-destination pairs
//! by a uniform random matching, so the number of flows is
//! `floor(survivors / 2)`.

use crate::geom::Point;
use crate::seed::{SeedSpec, Stream};
use crate::{Error, Result};
use rand::seq::SliceRandom;
use rand::Rng;

/// Node positions for one trial.
#[derive(Clone, Debug, PartialEq)]
pub struct Deployment {
    positions: Vec<Point>,
}

impl Deployment {
    /// Build a deployment from explicit positions. All coordinates must lie
    /// in the unit square.
    pub fn from_points(positions: Vec<Point>) -> Result<Self> {
        if let Some(p) = positions.iter().find(|p| !p.in_unit_square()) {
            return Err(Error::InvalidParameter(format!(
                "position ({}, {}) outside the unit square",
                p.x, p.y
            )));
        }
        Ok(Deployment { positions })
    }

    pub fn n(&self) -> usize {
        self.positions.len()
    }

    pub fn positions(&self) -> &[Point] {
        &self.positions
    }

    pub fn position(&self, node: usize) -> Point {
        self.positions[node]
    }
}

/// Per-node failure flags drawn at probability `q`.
#[derive(Clone, Debug, PartialEq)]
pub struct FailureMask {
    faulty: Vec<bool>,
    q: f64,
}

impl FailureMask {
    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn len(&self) -> usize {
        self.faulty.len()
    }

    pub fn is_empty(&self) -> bool {
        self.faulty.is_empty()
    }

    pub fn is_faulty(&self, node: usize) -> bool {
        self.faulty[node]
    }

    pub fn faulty_count(&self) -> usize {
        self.faulty.iter().filter(|&&f| f).count()
    }

    pub fn non_faulty_count(&self) -> usize {
        self.len() - self.faulty_count()
    }

    /// Indices of non-faulty nodes, ascending.
    pub fn non_faulty(&self) -> impl Iterator<Item = usize> + '_ {
        self.faulty
            .iter()
            .enumerate()
            .filter(|(_, &f)| !f)
            .map(|(i, _)| i)
    }

    /// Indices of faulty nodes, ascending.
    pub fn faulty(&self) -> impl Iterator<Item = usize> + '_ {
        self.faulty
            .iter()
            .enumerate()
            .filter(|(_, &f)| f)
            .map(|(i, _)| i)
    }

    /// Build a mask from explicit flags (mainly for tests and hand-made
    /// scenarios).
    pub fn from_flags(faulty: Vec<bool>, q: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&q) {
            return Err(Error::InvalidParameter(format!(
                "failure probability q={q} outside [0, 1]"
            )));
        }
        Ok(FailureMask { faulty, q })
    }
}

/// Source-destination pairs over non-faulty nodes.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct FlowSet {
    pairs: Vec<(usize, usize)>,
}

impl FlowSet {
    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    /// Number of flows, `floor(survivors / 2)`.
    pub fn count(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }
}

/// Place `n` iid uniform nodes in the unit square.
pub fn place_nodes(n: usize, seed: SeedSpec) -> Deployment {
    let mut rng = seed.rng(Stream::Placement);
    let positions = (0..n)
        .map(|_| Point::new(rng.random::<f64>(), rng.random::<f64>()))
        .collect();
    Deployment { positions }
}

/// Mark each node faulty independently with probability `q`.
///
/// The mask is produced by comparing one uniform draw per node against `q`,
/// so for a fixed seed the set of faulty nodes is nondecreasing in `q`
/// (coupled sampling). Raising `q` can therefore never help connectivity.
pub fn sample_failures(d: &Deployment, q: f64, seed: SeedSpec) -> Result<FailureMask> {
    if !(0.0..=1.0).contains(&q) {
        return Err(Error::InvalidParameter(format!(
            "failure probability q={q} outside [0, 1]"
        )));
    }
    let mut rng = seed.rng(Stream::Failures);
    let faulty = (0..d.n()).map(|_| rng.random::<f64>() < q).collect();
    Ok(FailureMask { faulty, q })
}

/// Match non-faulty nodes into source-destination pairs uniformly at random.
///
/// With an odd survivor count one uniformly chosen node is left unmatched.
/// Faulty nodes never source or sink traffic.
pub fn pair_flows(mask: &FailureMask, seed: SeedSpec) -> FlowSet {
    let mut survivors: Vec<usize> = mask.non_faulty().collect();
    let mut rng = seed.rng(Stream::Pairing);
    survivors.shuffle(&mut rng);
    let pairs = survivors
        .chunks_exact(2)
        .map(|pair| (pair[0], pair[1]))
        .collect();
    FlowSet { pairs }
}
