//! Protocol interference model and the interference-free TDMA cell schedule.
//!
//! Under the protocol model a transmission from `tx_i` to `rx_i` succeeds
//! when every other simultaneous transmitter `tx_k` keeps
//! `dist(tx_k, rx_i) >= (1 + D') * dist(tx_i, rx_i)`, where `D'` is the
//! effective interference parameter: the raw guard for omnidirectional
//! antennas and `min(guard, sin(beamwidth / 2))` for directional ones.
//!
//! Spatial reuse comes from grouping cells into `M x M` clusters and cycling
//! through the `M^2` positions: cells whose axis indices agree modulo `M`
//! transmit together. `M` strictly greater than `1 + sqrt(2) (2 + D')`
//! guarantees the protocol constraint for every worst-case placement, which
//! [`verify_schedule`] checks directly.

use crate::geom::Point;
use crate::percolation::CellGrid;
use crate::{Error, Result};

/// Antenna configuration of all nodes.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Antenna {
    Omnidirectional,
    /// Directional with the given beamwidth in radians (in `(0, 2*pi]`).
    Directional { beamwidth: f64 },
}

/// MAC-layer parameters.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MacParams {
    /// Interference guard `D >= 0`.
    pub delta: f64,
    pub antenna: Antenna,
    /// Bits transmitted per active slot (`W`).
    pub slot_bits: f64,
}

impl Default for MacParams {
    fn default() -> Self {
        MacParams {
            delta: 1.0,
            antenna: Antenna::Omnidirectional,
            slot_bits: 1.0,
        }
    }
}

/// Effective interference parameter: `delta` for omnidirectional antennas,
/// `min(delta, sin(beamwidth / 2))` for directional ones.
pub fn effective_delta(p: &MacParams) -> Result<f64> {
    if p.delta < 0.0 {
        return Err(Error::InvalidParameter(format!(
            "interference guard must be nonnegative, got {}",
            p.delta
        )));
    }
    if p.slot_bits <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "slot bits must be positive, got {}",
            p.slot_bits
        )));
    }
    match p.antenna {
        Antenna::Omnidirectional => Ok(p.delta),
        Antenna::Directional { beamwidth } => {
            if !(beamwidth > 0.0 && beamwidth <= 2.0 * std::f64::consts::PI) {
                return Err(Error::InvalidParameter(format!(
                    "beamwidth {beamwidth} outside (0, 2*pi]"
                )));
            }
            Ok(p.delta.min((beamwidth / 2.0).sin()))
        }
    }
}

/// Cluster dimension: the smallest integer strictly greater than
/// `1 + sqrt(2) (2 + delta_eff)`. Always at least 3 (in fact at least 4).
pub fn cluster_size(delta_eff: f64) -> usize {
    assert!(delta_eff >= 0.0, "effective guard must be nonnegative");
    let bound = 1.0 + std::f64::consts::SQRT_2 * (2.0 + delta_eff);
    // Strict ceiling: integers step up to the next integer.
    (bound.floor() as usize + 1).max(3)
}

/// TDMA phase assignment over a cell grid with reuse period `m` per axis.
#[derive(Clone, Debug, PartialEq)]
pub struct Schedule {
    m: usize,
    k: usize,
    phases: Vec<u32>,
}

impl Schedule {
    /// Phases per axis (`M`); the schedule cycles through `M^2` slots.
    pub fn phases_per_axis(&self) -> usize {
        self.m
    }

    pub fn phase_count(&self) -> usize {
        self.m * self.m
    }

    /// Phase of cell `(ix, iy)`: `(ix mod M) * M + (iy mod M)`.
    pub fn phase_of(&self, ix: usize, iy: usize) -> u32 {
        self.phases[iy * self.k + ix]
    }

    /// Cells active in the given phase, in row-major order.
    pub fn cells_in_phase(&self, phase: u32) -> Vec<(usize, usize)> {
        (0..self.phases.len())
            .filter(|&i| self.phases[i] == phase)
            .map(|i| (i % self.k, i / self.k))
            .collect()
    }
}

/// Build the cyclic phase assignment for a grid.
pub fn build_tdma(g: &CellGrid, m: usize) -> Schedule {
    assert!(m >= 1, "need at least one phase per axis");
    let k = g.cells_per_axis();
    let phases = (0..k * k)
        .map(|i| {
            let (ix, iy) = (i % k, i / k);
            ((ix % m) * m + (iy % m)) as u32
        })
        .collect();
    Schedule { m, k, phases }
}

/// Outcome of the protocol-model feasibility test for a set of simultaneous
/// transmissions.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ProtocolCheck {
    /// Every cross pair satisfies the `(1 + D')` separation rule.
    pub pairwise_ok: bool,
    /// The guard disks of radius `(D'/2) * link length` around each receiver
    /// are pairwise disjoint (a sufficient condition implying the rule).
    pub guard_disks_disjoint: bool,
}

impl ProtocolCheck {
    pub fn is_feasible(&self) -> bool {
        self.pairwise_ok
    }
}

/// Check whether the transmissions in `active` can share a slot under the
/// protocol model with guard `delta_eff`, at transmission radius `r`.
///
/// Fails with [`Error::InfeasibleLink`] when any pair's own link exceeds `r`.
pub fn protocol_feasible(
    active: &[(Point, Point)],
    delta_eff: f64,
    r: f64,
) -> Result<ProtocolCheck> {
    let mut lengths = Vec::with_capacity(active.len());
    for (index, &(tx, rx)) in active.iter().enumerate() {
        let dist = tx.dist(rx);
        if dist > r {
            return Err(Error::InfeasibleLink { index, dist, radius: r });
        }
        lengths.push(dist);
    }

    let mut pairwise_ok = true;
    'outer: for (i, &(_, rx)) in active.iter().enumerate() {
        for (k, &(tx_k, _)) in active.iter().enumerate() {
            if k == i {
                continue;
            }
            if tx_k.dist(rx) < (1.0 + delta_eff) * lengths[i] {
                pairwise_ok = false;
                break 'outer;
            }
        }
    }

    let mut guard_disks_disjoint = true;
    'disks: for i in 0..active.len() {
        for j in (i + 1)..active.len() {
            let gap = active[i].1.dist(active[j].1);
            if gap < 0.5 * delta_eff * (lengths[i] + lengths[j]) {
                guard_disks_disjoint = false;
                break 'disks;
            }
        }
    }

    Ok(ProtocolCheck {
        pairwise_ok,
        guard_disks_disjoint,
    })
}

/// Verify that a schedule is interference-free for worst-case placements.
///
/// For every pair of co-phased cells the victim receiver sits at the victim
/// cell's corner nearest the interferer, its transmitter at the opposite
/// corner (the longest intra-cell link, capped at `r`), and the interfering
/// transmitter at the interferer cell's point nearest the receiver. The
/// schedule passes when every such pair satisfies the `(1 + D')` rule.
pub fn verify_schedule(g: &CellGrid, s: &Schedule, delta_eff: f64, r: f64) -> bool {
    let k = g.cells_per_axis();
    let a = g.side();
    let lo = |i: usize| i as f64 * a;
    let hi = |i: usize| ((i + 1) as f64 * a).min(1.0);

    let mut by_phase: Vec<Vec<(usize, usize)>> = vec![Vec::new(); s.phase_count()];
    for iy in 0..k {
        for ix in 0..k {
            by_phase[s.phase_of(ix, iy) as usize].push((ix, iy));
        }
    }

    for cells in &by_phase {
        for (vi, &(vx, vy)) in cells.iter().enumerate() {
            for (ii, &(tx_cx, tx_cy)) in cells.iter().enumerate() {
                if vi == ii {
                    continue;
                }
                // Victim cell rectangle and the interferer rectangle.
                let (vx0, vx1, vy0, vy1) = (lo(vx), hi(vx), lo(vy), hi(vy));
                let (ix0, ix1, iy0, iy1) = (lo(tx_cx), hi(tx_cx), lo(tx_cy), hi(tx_cy));

                // Receiver: victim corner nearest the interferer rectangle.
                let corners = [
                    Point::new(vx0, vy0),
                    Point::new(vx1, vy0),
                    Point::new(vx0, vy1),
                    Point::new(vx1, vy1),
                ];
                let rect_dist = |p: Point| {
                    let dx = (ix0 - p.x).max(p.x - ix1).max(0.0);
                    let dy = (iy0 - p.y).max(p.y - iy1).max(0.0);
                    (dx * dx + dy * dy).sqrt()
                };
                let rx = corners
                    .into_iter()
                    .min_by(|a, b| rect_dist(*a).partial_cmp(&rect_dist(*b)).unwrap())
                    .unwrap();
                // Longest link the victim cell can host, capped at r.
                let diag = Point::new(vx1 - vx0, vy1 - vy0).dist(Point::new(0.0, 0.0));
                let link = diag.min(r);
                // Interfering transmitter: nearest point of its cell.
                let tx_k = Point::new(rx.x.clamp(ix0, ix1), rx.y.clamp(iy0, iy1));
                if tx_k.dist(rx) < (1.0 + delta_eff) * link {
                    return false;
                }
            }
        }
    }
    true
}
