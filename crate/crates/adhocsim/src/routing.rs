//! Multi-hop routing of flows through grid cells.
//!
//! Each flow's packets follow the straight segment joining its source and
//! destination ("the S-D line"), relayed once per cell through the
//! 4-connected supercover of that segment. A cell with no non-faulty node
//! cannot relay; routing detours around it through a parallel lane of cells
//! and falls back to a breadth-first search over non-empty cells when no
//! nearby lane is clear. A flow fails only when its endpoints are separated
//! by empty cells entirely (a percolation defect).
//!
//! Cell loads count how many routes traverse each cell. Because a cell is
//! active once per `M^2` TDMA slots and shares that slot among its routes,
//! the most loaded cell sets the feasible per-flow rate
//! `W / (M^2 * max load)`; the delay of a flow is one constant slot per hop.

use crate::deployment::Deployment;
use crate::geom::Point;
use crate::mac::MacParams;
use crate::percolation::CellGrid;
use crate::{Error, Result};
use std::collections::VecDeque;

/// How far off the S-D line a local detour may shift before routing falls
/// back to a breadth-first search.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ReroutePolicy {
    pub max_lateral_offset: usize,
}

impl Default for ReroutePolicy {
    fn default() -> Self {
        ReroutePolicy {
            max_lateral_offset: 4,
        }
    }
}

/// A routed flow: the ordered cells its packets traverse.
#[derive(Clone, Debug, PartialEq)]
pub struct Route {
    flow: usize,
    cells: Vec<(usize, usize)>,
    rerouted: bool,
}

impl Route {
    pub fn flow(&self) -> usize {
        self.flow
    }

    /// Traversed cells, source cell first, destination cell last;
    /// consecutive cells are 4-neighbors.
    pub fn cells(&self) -> &[(usize, usize)] {
        &self.cells
    }

    /// Hop count: one less than the number of traversed cells.
    pub fn hops(&self) -> usize {
        self.cells.len() - 1
    }

    /// Whether any detour or fallback search was needed.
    pub fn rerouted(&self) -> bool {
        self.rerouted
    }
}

/// The 4-connected supercover of the segment from `src` to `dst`: every cell
/// the segment passes through, with the horizontal-step cell inserted first
/// whenever the segment crosses a cell corner exactly.
pub fn cells_on_segment(src: Point, dst: Point, g: &CellGrid) -> Vec<(usize, usize)> {
    debug_assert!(src.in_unit_square() && dst.in_unit_square());
    let a = g.side();
    let start = g.cell_of(src);
    let target = g.cell_of(dst);
    let mut cells = vec![start];
    if start == target {
        return cells;
    }

    let ddx = dst.x - src.x;
    let ddy = dst.y - src.y;
    let step_x: isize = if ddx > 0.0 {
        1
    } else if ddx < 0.0 {
        -1
    } else {
        0
    };
    let step_y: isize = if ddy > 0.0 {
        1
    } else if ddy < 0.0 {
        -1
    } else {
        0
    };

    let (mut ix, mut iy) = (start.0 as isize, start.1 as isize);
    // Parametric positions (in [0, 1] along the segment) of the next x and y
    // cell boundaries in the direction of travel.
    let mut t_max_x = if step_x == 0 {
        f64::INFINITY
    } else {
        let boundary = if step_x > 0 { (ix + 1) as f64 * a } else { ix as f64 * a };
        (boundary - src.x) / ddx
    };
    let mut t_max_y = if step_y == 0 {
        f64::INFINITY
    } else {
        let boundary = if step_y > 0 { (iy + 1) as f64 * a } else { iy as f64 * a };
        (boundary - src.y) / ddy
    };
    let t_delta_x = if step_x == 0 { f64::INFINITY } else { a / ddx.abs() };
    let t_delta_y = if step_y == 0 { f64::INFINITY } else { a / ddy.abs() };

    let k = g.cells_per_axis() as isize;
    let limit = 4 * k as usize + 8;
    let push = |cells: &mut Vec<(usize, usize)>, ix: isize, iy: isize| {
        debug_assert!(ix >= 0 && ix < k && iy >= 0 && iy < k);
        cells.push((ix as usize, iy as usize));
    };

    for _ in 0..limit {
        if (ix as usize, iy as usize) == target {
            return cells;
        }
        if t_max_x < t_max_y {
            ix += step_x;
            t_max_x += t_delta_x;
            push(&mut cells, ix, iy);
        } else if t_max_y < t_max_x {
            iy += step_y;
            t_max_y += t_delta_y;
            push(&mut cells, ix, iy);
        } else {
            // Exact corner crossing: insert the horizontal-step cell first.
            ix += step_x;
            t_max_x += t_delta_x;
            push(&mut cells, ix, iy);
            if (ix as usize, iy as usize) == target {
                return cells;
            }
            iy += step_y;
            t_max_y += t_delta_y;
            push(&mut cells, ix, iy);
        }
    }

    // Floating-point drift could in principle stall the walk; finish along
    // the axes deterministically.
    debug_assert!(false, "grid walk exceeded its step budget");
    while (ix as usize) != target.0 {
        ix += step_x;
        push(&mut cells, ix, iy);
    }
    while (iy as usize) != target.1 {
        iy += step_y;
        push(&mut cells, ix, iy);
    }
    cells
}

/// Route one flow along its S-D line, detouring around empty cells.
///
/// Both endpoint cells must be occupied (they contain the endpoints, which
/// are non-faulty). Fails with [`Error::RoutingFailure`] when the destination
/// cannot be reached over non-empty cells at all.
pub fn route_flow(
    d: &Deployment,
    g: &CellGrid,
    flow: usize,
    pair: (usize, usize),
    policy: &ReroutePolicy,
) -> Result<Route> {
    let src = d.position(pair.0);
    let dst = d.position(pair.1);
    let line = cells_on_segment(src, dst, g);
    debug_assert!(g.is_occupied(line[0].0, line[0].1), "source cell empty");
    debug_assert!(
        g.is_occupied(line[line.len() - 1].0, line[line.len() - 1].1),
        "destination cell empty"
    );

    let mut cells = vec![line[0]];
    let mut rerouted = false;
    let mut pos = 0;
    while pos < line.len() - 1 {
        let next = pos + 1;
        if g.is_occupied(line[next].0, line[next].1) {
            cells.push(line[next]);
            pos = next;
            continue;
        }
        rerouted = true;
        // The destination cell is occupied, so a resume point always exists.
        let resume = match (next..line.len()).find(|&j| g.is_occupied(line[j].0, line[j].1)) {
            Some(j) => j,
            None => return Err(Error::RoutingFailure { flow }),
        };
        if let Some(detour) = lateral_detour(g, src, dst, &line, pos, resume, policy) {
            cells.extend(detour);
            pos = resume;
        } else if let Some(path) = bfs_path(g, line[pos], line[resume]) {
            cells.extend(path.into_iter().skip(1));
            pos = resume;
        } else if let Some(path) = bfs_path(g, line[pos], line[line.len() - 1]) {
            cells.extend(path.into_iter().skip(1));
            pos = line.len() - 1;
        } else {
            return Err(Error::RoutingFailure { flow });
        }
    }

    Ok(Route {
        flow,
        cells,
        rerouted,
    })
}

/// Try to bypass the empty stretch `line[start+1..resume]` through a parallel
/// lane of occupied cells, shifting at most `policy.max_lateral_offset` cells
/// off the line. Only straight (single-axis) stretches are handled; bent
/// stretches go to the BFS fallback. Returns the cells to append after
/// `line[start]`, ending with `line[resume]`.
fn lateral_detour(
    g: &CellGrid,
    src: Point,
    dst: Point,
    line: &[(usize, usize)],
    start: usize,
    resume: usize,
    policy: &ReroutePolicy,
) -> Option<Vec<(usize, usize)>> {
    let k = g.cells_per_axis();
    let seg = &line[start..=resume];
    let horizontal = seg.iter().all(|c| c.1 == seg[0].1);
    let vertical = seg.iter().all(|c| c.0 == seg[0].0);
    if !horizontal && !vertical {
        return None;
    }

    // Preferred side: the lateral neighbor of the first empty cell whose
    // center lies nearer the S-D line; ties take the lower cell index.
    let first_empty = line[start + 1];
    let center = |c: (usize, usize)| {
        Point::new(
            ((c.0 as f64 + 0.5) * g.side()).min(1.0),
            ((c.1 as f64 + 0.5) * g.side()).min(1.0),
        )
    };
    let line_dist = |p: Point| {
        let vx = dst.x - src.x;
        let vy = dst.y - src.y;
        let len = (vx * vx + vy * vy).sqrt();
        if len == 0.0 {
            return p.dist(src);
        }
        ((p.x - src.x) * vy - (p.y - src.y) * vx).abs() / len
    };
    let neighbor = |c: (usize, usize), side: isize| -> Option<(usize, usize)> {
        let (nx, ny) = if horizontal {
            (c.0 as isize, c.1 as isize + side)
        } else {
            (c.0 as isize + side, c.1 as isize)
        };
        (nx >= 0 && ny >= 0 && (nx as usize) < k && (ny as usize) < k)
            .then_some((nx as usize, ny as usize))
    };
    let preferred: isize = {
        let plus = neighbor(first_empty, 1).map(|c| line_dist(center(c)));
        let minus = neighbor(first_empty, -1).map(|c| line_dist(center(c)));
        match (plus, minus) {
            (Some(pd), Some(md)) if pd < md => 1,
            (Some(pd), Some(md)) if md < pd => -1,
            // Tie: -1 always has the lower linear index iy * k + ix.
            (Some(_), Some(_)) => -1,
            (Some(_), None) => 1,
            _ => -1,
        }
    };

    for offset in 1..=policy.max_lateral_offset as isize {
        for side in [preferred, -preferred] {
            if let Some(path) = try_lane(g, seg, horizontal, side * offset) {
                return Some(path);
            }
        }
    }
    None
}

/// Build the detour path through the lane at the given signed offset,
/// when every cell of it is occupied and in bounds.
fn try_lane(
    g: &CellGrid,
    seg: &[(usize, usize)],
    horizontal: bool,
    offset: isize,
) -> Option<Vec<(usize, usize)>> {
    let k = g.cells_per_axis() as isize;
    let shift = |c: (usize, usize), o: isize| -> Option<(usize, usize)> {
        let (nx, ny) = if horizontal {
            (c.0 as isize, c.1 as isize + o)
        } else {
            (c.0 as isize + o, c.1 as isize)
        };
        (nx >= 0 && ny >= 0 && nx < k && ny < k).then_some((nx as usize, ny as usize))
    };

    let entry = seg[0];
    let exit = *seg.last().expect("stretch has at least two cells");
    let step = if offset > 0 { 1 } else { -1 };
    let mut path = Vec::new();
    // Out from the entry cell to the lane.
    let mut o = step;
    loop {
        path.push(shift(entry, o)?);
        if o == offset {
            break;
        }
        o += step;
    }
    // Along the lane, skipping the entry column already covered.
    for c in &seg[1..] {
        path.push(shift(*c, offset)?);
    }
    // Back down to the line at the exit cell.
    let mut o = offset - step;
    while o != 0 {
        path.push(shift(exit, o)?);
        o -= step;
    }
    path.push(exit);

    path.iter()
        .all(|&(ix, iy)| g.is_occupied(ix, iy))
        .then_some(path)
}

/// Shortest path between two cells over occupied cells (4-adjacency), by
/// breadth-first search with a fixed neighbor order.
fn bfs_path(
    g: &CellGrid,
    from: (usize, usize),
    to: (usize, usize),
) -> Option<Vec<(usize, usize)>> {
    let k = g.cells_per_axis();
    if !g.is_occupied(from.0, from.1) || !g.is_occupied(to.0, to.1) {
        return None;
    }
    let idx = |c: (usize, usize)| c.1 * k + c.0;
    let mut parent: Vec<u32> = vec![u32::MAX; k * k];
    let mut queue = VecDeque::new();
    parent[idx(from)] = idx(from) as u32;
    queue.push_back(from);
    while let Some(c) = queue.pop_front() {
        if c == to {
            let mut path = vec![to];
            let mut cur = idx(to);
            while parent[cur] as usize != cur {
                cur = parent[cur] as usize;
                path.push((cur % k, cur / k));
            }
            path.reverse();
            return Some(path);
        }
        let neighbors = [
            (c.0 as isize + 1, c.1 as isize),
            (c.0 as isize - 1, c.1 as isize),
            (c.0 as isize, c.1 as isize + 1),
            (c.0 as isize, c.1 as isize - 1),
        ];
        for (nx, ny) in neighbors {
            if nx < 0 || ny < 0 || nx as usize >= k || ny as usize >= k {
                continue;
            }
            let n = (nx as usize, ny as usize);
            if parent[idx(n)] == u32::MAX && g.is_occupied(n.0, n.1) {
                parent[idx(n)] = idx(c) as u32;
                queue.push_back(n);
            }
        }
    }
    None
}

/// Per-cell route counts: how many routes traverse each cell (each route
/// counts once per cell it visits).
#[derive(Clone, Debug, PartialEq)]
pub struct LoadMap {
    k: usize,
    counts: Vec<u32>,
}

impl LoadMap {
    pub fn count_at(&self, ix: usize, iy: usize) -> u32 {
        self.counts[iy * self.k + ix]
    }

    pub fn counts(&self) -> &[u32] {
        &self.counts
    }

    /// The bottleneck load.
    pub fn max(&self) -> u32 {
        self.counts.iter().copied().max().unwrap_or(0)
    }

    /// Total cell visits across all routes.
    pub fn total(&self) -> u64 {
        self.counts.iter().map(|&c| c as u64).sum()
    }
}

/// Count route traversals per cell.
pub fn cell_loads(routes: &[Route], g: &CellGrid) -> LoadMap {
    let k = g.cells_per_axis();
    let mut counts = vec![0u32; k * k];
    let mut seen = Vec::new();
    for route in routes {
        seen.clear();
        seen.extend(route.cells().iter().map(|&(ix, iy)| iy * k + ix));
        seen.sort_unstable();
        seen.dedup();
        for &idx in &seen {
            counts[idx] += 1;
        }
    }
    LoadMap { k, counts }
}

/// The per-flow rate the bottleneck cell can sustain: each cell transmits
/// once per `m^2` slots and splits its slot among the routes through it.
pub fn achieved_rate(loads: &LoadMap, mac: &MacParams, m: usize) -> Result<f64> {
    let max = loads.max();
    if max == 0 {
        return Err(Error::UndefinedRate);
    }
    Ok(mac.slot_bits / ((m * m) as f64 * max as f64))
}

/// Mean end-to-end delay: hops times a constant per-hop slot time. Returns 0
/// for an empty route list.
pub fn measure_delay(routes: &[Route], slot_time: f64) -> f64 {
    if routes.is_empty() {
        return 0.0;
    }
    let total_hops: usize = routes.iter().map(Route::hops).sum();
    slot_time * total_hops as f64 / routes.len() as f64
}
