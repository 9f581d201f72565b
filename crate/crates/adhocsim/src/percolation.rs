//! Cell tiling of the unit square and its site-percolation view.
//!
//! Tiling the unit square with cells of side `a = r / sqrt(2)` makes any two
//! nodes in 4-adjacent cells (and a fortiori in the same cell) at most `r`
//! apart, so every occupied cell can relay traffic to its lattice neighbors.
//! Treating each cell as a site that is "open" when it contains at least one
//! non-faulty node turns the network into a site-percolation model: routing
//! works whenever the open cells percolate, and the per-cell survivor count
//! concentrates around `Theta(log n)`.

use crate::deployment::{Deployment, FailureMask};
use crate::geom::Point;

/// Cell side for a transmission radius: `r / sqrt(2)`.
pub fn cell_side_for_radius(r: f64) -> f64 {
    r * std::f64::consts::FRAC_1_SQRT_2
}

/// The unit square tiled into `k x k` cells of side `a`, with per-cell
/// occupant lists split by failure state.
///
/// Cell `(ix, iy)` covers `[ix*a, (ix+1)*a) x [iy*a, (iy+1)*a)`; the last row
/// and column absorb the closed upper boundary (and are narrower than `a`
/// when `1/a` is not an integer). The linear cell index is `iy * k + ix`.
#[derive(Clone, Debug)]
pub struct CellGrid {
    side: f64,
    k: usize,
    total_nodes: usize,
    non_faulty: Vec<Vec<usize>>,
    faulty: Vec<Vec<usize>>,
}

impl CellGrid {
    pub fn side(&self) -> f64 {
        self.side
    }

    /// Cells per axis, `ceil(1 / a)`.
    pub fn cells_per_axis(&self) -> usize {
        self.k
    }

    pub fn cell_count(&self) -> usize {
        self.k * self.k
    }

    pub fn total_nodes(&self) -> usize {
        self.total_nodes
    }

    /// Linear index of cell `(ix, iy)`.
    pub fn index(&self, ix: usize, iy: usize) -> usize {
        debug_assert!(ix < self.k && iy < self.k);
        iy * self.k + ix
    }

    /// Cell coordinates containing a point; the right/top boundary belongs
    /// to the last cell.
    pub fn cell_of(&self, p: Point) -> (usize, usize) {
        let ix = ((p.x / self.side) as usize).min(self.k - 1);
        let iy = ((p.y / self.side) as usize).min(self.k - 1);
        (ix, iy)
    }

    pub fn non_faulty_in(&self, ix: usize, iy: usize) -> &[usize] {
        &self.non_faulty[self.index(ix, iy)]
    }

    pub fn faulty_in(&self, ix: usize, iy: usize) -> &[usize] {
        &self.faulty[self.index(ix, iy)]
    }

    /// Whether the cell holds at least one non-faulty node.
    pub fn is_occupied(&self, ix: usize, iy: usize) -> bool {
        !self.non_faulty[self.index(ix, iy)].is_empty()
    }

    /// Number of cells holding at least one non-faulty node.
    pub fn occupied_count(&self) -> usize {
        self.non_faulty.iter().filter(|c| !c.is_empty()).count()
    }

    /// The cell's relay node: the non-faulty occupant nearest the cell
    /// center, ties broken by lowest index.
    pub fn relay_node(&self, d: &Deployment, ix: usize, iy: usize) -> Option<usize> {
        let cx = (ix as f64 + 0.5) * self.side;
        let cy = (iy as f64 + 0.5) * self.side;
        let center = Point::new(cx.min(1.0), cy.min(1.0));
        self.non_faulty[self.index(ix, iy)]
            .iter()
            .copied()
            .min_by(|&a, &b| {
                d.position(a)
                    .dist_sq(center)
                    .partial_cmp(&d.position(b).dist_sq(center))
                    .unwrap()
                    .then(a.cmp(&b))
            })
    }
}

/// Assign every node of the deployment to its cell.
pub fn build_grid(d: &Deployment, mask: &FailureMask, a: f64) -> CellGrid {
    assert!(a > 0.0 && a <= 1.0, "cell side must lie in (0, 1]");
    assert_eq!(d.n(), mask.len(), "mask length must match deployment");
    let k = (1.0 / a).ceil() as usize;
    let mut grid = CellGrid {
        side: a,
        k,
        total_nodes: d.n(),
        non_faulty: vec![Vec::new(); k * k],
        faulty: vec![Vec::new(); k * k],
    };
    for (i, &p) in d.positions().iter().enumerate() {
        let (ix, iy) = grid.cell_of(p);
        let idx = grid.index(ix, iy);
        if mask.is_faulty(i) {
            grid.faulty[idx].push(i);
        } else {
            grid.non_faulty[idx].push(i);
        }
    }
    grid
}

/// Exact min/max/mean of non-faulty occupants over all cells.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OccupancyStats {
    pub min: usize,
    pub max: usize,
    pub mean: f64,
}

pub fn cell_occupancy_stats(g: &CellGrid) -> OccupancyStats {
    let mut min = usize::MAX;
    let mut max = 0usize;
    let mut sum = 0usize;
    for cell in &g.non_faulty {
        min = min.min(cell.len());
        max = max.max(cell.len());
        sum += cell.len();
    }
    if g.non_faulty.is_empty() {
        min = 0;
    }
    OccupancyStats {
        min,
        max,
        mean: sum as f64 / g.cell_count() as f64,
    }
}

/// How to decide that the site-percolation view of a grid is connected.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum ConnectivityRule {
    /// Every cell holds a non-faulty node (so the full lattice relays).
    /// Routing along source-destination lines assumes relay-capable cells,
    /// which is why this strict rule is the default.
    #[default]
    AllCellsOccupied,
    /// The occupied cells form a single nonempty 4-connected component.
    /// Useful for phase-transition studies where isolated defects are
    /// tolerable.
    OccupiedComponent,
}

/// Strict site-percolation connectivity: no cell is empty of non-faulty
/// nodes (an empty cell is a routing defect).
pub fn site_percolation_connected(g: &CellGrid) -> bool {
    site_percolation_connected_with(g, ConnectivityRule::AllCellsOccupied)
}

/// Site-percolation connectivity under an explicit rule.
pub fn site_percolation_connected_with(g: &CellGrid, rule: ConnectivityRule) -> bool {
    match rule {
        ConnectivityRule::AllCellsOccupied => g.occupied_count() == g.cell_count(),
        ConnectivityRule::OccupiedComponent => {
            let occupied = g.occupied_count();
            if occupied == 0 {
                return false;
            }
            let k = g.cells_per_axis();
            let start = (0..g.cell_count())
                .find(|&i| !g.non_faulty[i].is_empty())
                .expect("occupied > 0");
            let mut visited = vec![false; g.cell_count()];
            let mut queue = std::collections::VecDeque::new();
            visited[start] = true;
            queue.push_back(start);
            let mut reached = 1usize;
            while let Some(idx) = queue.pop_front() {
                let (ix, iy) = (idx % k, idx / k);
                let mut push = |jx: usize, jy: usize| {
                    let j = jy * k + jx;
                    if !visited[j] && !g.non_faulty[j].is_empty() {
                        visited[j] = true;
                        reached += 1;
                        queue.push_back(j);
                    }
                };
                if ix + 1 < k {
                    push(ix + 1, iy);
                }
                if ix > 0 {
                    push(ix - 1, iy);
                }
                if iy + 1 < k {
                    push(ix, iy + 1);
                }
                if iy > 0 {
                    push(ix, iy - 1);
                }
            }
            reached == occupied
        }
    }
}

/// Site-percolation parameters: the lattice-critical failure probability and
/// the occupancy constant relating per-cell survivor counts to `log n`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PercolationParams {
    /// Critical site failure probability of the square lattice, ~0.4073.
    pub critical_failure_prob: f64,
    /// Constant `c1` in the per-cell occupancy `c1 * ln n`.
    pub occupancy_constant: f64,
}

impl Default for PercolationParams {
    fn default() -> Self {
        PercolationParams {
            critical_failure_prob: 0.4073,
            occupancy_constant: 1.0,
        }
    }
}

/// Phase condition for the node failure probability: with `c1 * ln n`
/// survivors per cell, a cell goes empty with probability `q^(c1 ln n)`, and
/// the lattice percolates when that is below the critical value, i.e. when
/// `q < q_c^(1 / (c1 ln n))`.
pub fn phase_condition(n: usize, q: f64, params: &PercolationParams) -> bool {
    assert!(n >= 2, "need at least two nodes");
    let threshold = params
        .critical_failure_prob
        .powf(1.0 / (params.occupancy_constant * (n as f64).ln()));
    q < threshold
}

/// Estimate the occupancy constant of a grid as
/// `(mean non-faulty occupancy) / ln(total nodes)`.
pub fn estimate_occupancy_constant(g: &CellGrid) -> f64 {
    assert!(g.total_nodes() >= 2, "need at least two nodes");
    cell_occupancy_stats(g).mean / (g.total_nodes() as f64).ln()
}
