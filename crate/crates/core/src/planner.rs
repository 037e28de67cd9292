//! Occupancy-grid mapping from lidar, obstacle inflation, A* search and
//! line-of-sight path simplification.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::f64::consts::SQRT_2;
use std::fmt::Write as _;

use crate::environment::{raycast, Bounds, Environment};
use crate::error::{Error, Result};
use crate::governor::PathSpec;
use crate::metric::Vec2;

/// Default clearance added around occupied cells before planning, in meters.
pub const DEFAULT_INFLATION: f64 = 0.3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CellState {
    Unknown,
    Free,
    Occupied,
}

impl CellState {
    fn symbol(self) -> char {
        match self {
            CellState::Unknown => 'U',
            CellState::Free => 'F',
            CellState::Occupied => 'O',
        }
    }

    fn from_symbol(c: char) -> Option<Self> {
        match c {
            'U' => Some(CellState::Unknown),
            'F' => Some(CellState::Free),
            'O' => Some(CellState::Occupied),
            _ => None,
        }
    }
}

pub type Cell = (usize, usize);

#[derive(Debug, Clone, PartialEq)]
pub struct OccupancyGrid {
    origin: Vec2,
    resolution: f64,
    width: usize,
    height: usize,
    cells: Vec<CellState>,
}

impl OccupancyGrid {
    /// An all-unknown grid whose cell `(0, 0)` has its lower-left corner at `origin`.
    pub fn new(origin: Vec2, resolution: f64, width: usize, height: usize) -> Result<Self> {
        if !(resolution > 0.0 && resolution.is_finite()) || width == 0 || height == 0 || !origin.is_finite() {
            return Err(Error::InvalidParameters(format!(
                "grid needs positive resolution and size, got {resolution} m, {width}x{height}"
            )));
        }
        Ok(Self { origin, resolution, width, height, cells: vec![CellState::Unknown; width * height] })
    }

    /// Smallest grid covering `bounds`.
    pub fn covering(bounds: &Bounds, resolution: f64) -> Result<Self> {
        let w = (bounds.width() / resolution).ceil().max(1.0) as usize;
        let h = (bounds.height() / resolution).ceil().max(1.0) as usize;
        Self::new(bounds.min, resolution, w, h)
    }

    pub fn origin(&self) -> Vec2 {
        self.origin
    }

    pub fn resolution(&self) -> f64 {
        self.resolution
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn cell_of(&self, p: Vec2) -> Option<Cell> {
        let fx = ((p.x - self.origin.x) / self.resolution).floor();
        let fy = ((p.y - self.origin.y) / self.resolution).floor();
        (fx >= 0.0 && fy >= 0.0 && fx < self.width as f64 && fy < self.height as f64).then_some((fx as usize, fy as usize))
    }

    pub fn center(&self, (i, j): Cell) -> Vec2 {
        self.origin + Vec2::new((i as f64 + 0.5) * self.resolution, (j as f64 + 0.5) * self.resolution)
    }

    pub fn get(&self, (i, j): Cell) -> CellState {
        self.cells[j * self.width + i]
    }

    pub fn set(&mut self, (i, j): Cell, state: CellState) {
        self.cells[j * self.width + i] = state;
    }

    pub fn is_free(&self, c: Cell) -> bool {
        self.get(c) == CellState::Free
    }

    pub fn count(&self, state: CellState) -> usize {
        self.cells.iter().filter(|&&c| c == state).count()
    }

    pub fn cells(&self) -> impl Iterator<Item = (Cell, CellState)> + '_ {
        self.cells.iter().enumerate().map(move |(k, &s)| ((k % self.width, k / self.width), s))
    }

    /// Text dump: a header `width height resolution origin_x origin_y`, then one
    /// row of `U`/`F`/`O` per grid row, top row first.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{} {} {} {} {}", self.width, self.height, self.resolution, self.origin.x, self.origin.y);
        for j in (0..self.height).rev() {
            out.extend((0..self.width).map(|i| self.get((i, j)).symbol()));
            out.push('\n');
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let bad = |m: &str| Error::InvalidParameters(format!("grid dump: {m}"));
        let mut lines = text.lines();
        let header: Vec<&str> = lines.next().ok_or_else(|| bad("missing header"))?.split_whitespace().collect();
        if header.len() != 5 {
            return Err(bad("header needs five fields"));
        }
        let num = |s: &str| s.parse::<f64>().map_err(|_| bad("malformed number"));
        let width: usize = header[0].parse().map_err(|_| bad("malformed width"))?;
        let height: usize = header[1].parse().map_err(|_| bad("malformed height"))?;
        let mut grid = Self::new(Vec2::new(num(header[3])?, num(header[4])?), num(header[2])?, width, height)?;
        let rows: Vec<&str> = lines.collect();
        if rows.len() != height {
            return Err(bad("row count does not match height"));
        }
        for (r, row) in rows.iter().enumerate() {
            let j = height - 1 - r;
            let chars: Vec<char> = row.chars().collect();
            if chars.len() != width {
                return Err(bad("row length does not match width"));
            }
            for (i, &c) in chars.iter().enumerate() {
                grid.set((i, j), CellState::from_symbol(c).ok_or_else(|| bad("unknown cell symbol"))?);
            }
        }
        Ok(grid)
    }

    /// Cells crossed by the segment `a → b`, in order, clipped to the grid.
    ///
    /// With `supercover` set, both side cells are reported where the segment
    /// passes exactly through a cell corner.
    pub fn traverse(&self, a: Vec2, b: Vec2, supercover: bool) -> Vec<Cell> {
        let res = self.resolution;
        let gx = (a.x - self.origin.x) / res;
        let gy = (a.y - self.origin.y) / res;
        let ex = (b.x - self.origin.x) / res;
        let ey = (b.y - self.origin.y) / res;
        let (dx, dy) = (ex - gx, ey - gy);
        let mut ix = gx.floor() as i64;
        let mut iy = gy.floor() as i64;
        let end_x = ex.floor() as i64;
        let end_y = ey.floor() as i64;
        let step_x: i64 = if dx > 0.0 { 1 } else { -1 };
        let step_y: i64 = if dy > 0.0 { 1 } else { -1 };
        let t_delta_x = if dx != 0.0 { 1.0 / dx.abs() } else { f64::INFINITY };
        let t_delta_y = if dy != 0.0 { 1.0 / dy.abs() } else { f64::INFINITY };
        let mut t_max_x = if dx > 0.0 {
            (ix as f64 + 1.0 - gx) / dx
        } else if dx < 0.0 {
            (gx - ix as f64) / -dx
        } else {
            f64::INFINITY
        };
        let mut t_max_y = if dy > 0.0 {
            (iy as f64 + 1.0 - gy) / dy
        } else if dy < 0.0 {
            (gy - iy as f64) / -dy
        } else {
            f64::INFINITY
        };

        let in_grid = |x: i64, y: i64| x >= 0 && y >= 0 && (x as usize) < self.width && (y as usize) < self.height;
        let mut out = Vec::new();
        let push = |x: i64, y: i64, out: &mut Vec<Cell>| {
            if in_grid(x, y) {
                out.push((x as usize, y as usize));
            }
        };
        push(ix, iy, &mut out);
        let max_steps = (end_x - ix).unsigned_abs() + (end_y - iy).unsigned_abs();
        for _ in 0..max_steps {
            if (ix, iy) == (end_x, end_y) {
                break;
            }
            let tie = (t_max_x - t_max_y).abs() <= 1e-12;
            if tie && supercover {
                push(ix + step_x, iy, &mut out);
                push(ix, iy + step_y, &mut out);
            }
            if tie {
                ix += step_x;
                iy += step_y;
                t_max_x += t_delta_x;
                t_max_y += t_delta_y;
            } else if t_max_x < t_max_y {
                ix += step_x;
                t_max_x += t_delta_x;
            } else {
                iy += step_y;
                t_max_y += t_delta_y;
            }
            if t_max_x.min(t_max_y) > 1.0 + 1e-12 && (ix, iy) != (end_x, end_y) {
                // Rounding pushed past the end cell.
                break;
            }
            push(ix, iy, &mut out);
        }
        out
    }
}

/// One sweep of range returns from a common origin.
#[derive(Debug, Clone, PartialEq)]
pub struct LidarScan {
    pub origin: Vec2,
    pub angles: Vec<f64>,
    pub ranges: Vec<f64>,
    pub max_range: f64,
}

impl LidarScan {
    pub fn new(origin: Vec2, angles: Vec<f64>, ranges: Vec<f64>, max_range: f64) -> Result<Self> {
        if angles.len() != ranges.len() {
            return Err(Error::InvalidParameters("scan angles and ranges differ in length".into()));
        }
        if !(max_range > 0.0) || ranges.iter().any(|&r| !(r > 0.0 && r <= max_range)) {
            return Err(Error::InvalidParameters("scan ranges must lie in (0, max_range]".into()));
        }
        Ok(Self { origin, angles, ranges, max_range })
    }

    /// Noise-free scan of `env` with `beams` evenly spaced beams.
    pub fn simulate(env: &Environment, origin: Vec2, beams: usize, max_range: f64) -> Self {
        let angles: Vec<f64> = (0..beams).map(|i| std::f64::consts::TAU * i as f64 / beams as f64).collect();
        let ranges = angles.iter().map(|&a| raycast(env, origin, a, max_range)).collect();
        Self { origin, angles, ranges, max_range }
    }

    /// Endpoints of beams that hit something.
    pub fn hit_points(&self) -> impl Iterator<Item = Vec2> + '_ {
        self.angles
            .iter()
            .zip(&self.ranges)
            .filter(|(_, &r)| r < self.max_range)
            .map(|(&a, &r)| self.origin + Vec2::from_angle(a) * r)
    }
}

/// Marks cells along each beam free and the return cell occupied.
///
/// Occupied cells are never cleared again.
pub fn integrate_scan_in_place(grid: &mut OccupancyGrid, scan: &LidarScan) {
    for (&angle, &range) in scan.angles.iter().zip(&scan.ranges) {
        let end = scan.origin + Vec2::from_angle(angle) * range;
        let cells = grid.traverse(scan.origin, end, false);
        let hit = range < scan.max_range;
        let terminal = grid.cell_of(end);
        for &c in &cells {
            if hit && Some(c) == terminal {
                grid.set(c, CellState::Occupied);
            } else if grid.get(c) == CellState::Unknown {
                grid.set(c, CellState::Free);
            }
        }
    }
}

pub fn integrate_scan(grid: &OccupancyGrid, scan: &LidarScan) -> OccupancyGrid {
    let mut out = grid.clone();
    integrate_scan_in_place(&mut out, scan);
    out
}

/// Grows every occupied cell by a disk of radius `robot_margin`. Unknown cells stay unknown.
pub fn inflate(grid: &OccupancyGrid, robot_margin: f64) -> OccupancyGrid {
    let mut out = grid.clone();
    let r = robot_margin.max(0.0) / grid.resolution;
    let reach = r.ceil() as i64;
    if reach == 0 {
        return out;
    }
    let r_sq = r * r + 1e-9;
    let offsets: Vec<(i64, i64)> = (-reach..=reach)
        .flat_map(|di| (-reach..=reach).map(move |dj| (di, dj)))
        .filter(|&(di, dj)| ((di * di + dj * dj) as f64) <= r_sq)
        .collect();
    for ((i, j), state) in grid.cells() {
        if state != CellState::Occupied {
            continue;
        }
        for &(di, dj) in &offsets {
            let (x, y) = (i as i64 + di, j as i64 + dj);
            if x >= 0 && y >= 0 && (x as usize) < grid.width && (y as usize) < grid.height {
                out.set((x as usize, y as usize), CellState::Occupied);
            }
        }
    }
    out
}

/// Grid used for search: unknown cells count as occupied, then everything
/// occupied is inflated by `robot_margin`.
pub fn planning_grid(grid: &OccupancyGrid, robot_margin: f64) -> OccupancyGrid {
    let mut blocked = grid.clone();
    for c in blocked.cells.iter_mut() {
        if *c == CellState::Unknown {
            *c = CellState::Occupied;
        }
    }
    inflate(&blocked, robot_margin)
}

/// Path cost in straight and diagonal moves; compared as `straight + √2·diagonal`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct MoveCount {
    pub straight: u32,
    pub diagonal: u32,
}

impl MoveCount {
    pub fn value(&self) -> f64 {
        self.straight as f64 + SQRT_2 * self.diagonal as f64
    }
}

#[derive(Debug, Clone, Copy)]
struct Open {
    f: f64,
    g: MoveCount,
    index: usize,
}

impl PartialEq for Open {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Open {}
impl PartialOrd for Open {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Open {
    // Min-heap on f, then on index for determinism.
    fn cmp(&self, other: &Self) -> Ordering {
        other.f.total_cmp(&self.f).then_with(|| other.index.cmp(&self.index))
    }
}

const NEIGHBORS: [(i64, i64); 8] = [(1, 0), (-1, 0), (0, 1), (0, -1), (1, 1), (1, -1), (-1, 1), (-1, -1)];

/// 8-connected neighbors reachable from `c`; diagonal moves may not cut an
/// untraversable corner.
pub fn neighbors(grid: &OccupancyGrid, c: Cell) -> impl Iterator<Item = (Cell, bool)> + '_ {
    neighbors_by(grid, c, |s| s == CellState::Free)
}

fn neighbors_by<'a>(
    grid: &'a OccupancyGrid,
    (i, j): Cell,
    passable: impl Fn(CellState) -> bool + Copy + 'a,
) -> impl Iterator<Item = (Cell, bool)> + 'a {
    NEIGHBORS.iter().filter_map(move |&(di, dj)| {
        let (x, y) = (i as i64 + di, j as i64 + dj);
        let inside = |x: i64, y: i64| x >= 0 && y >= 0 && (x as usize) < grid.width && (y as usize) < grid.height;
        if !inside(x, y) || !passable(grid.get((x as usize, y as usize))) {
            return None;
        }
        let diagonal = di != 0 && dj != 0;
        if diagonal
            && !(passable(grid.get(((i as i64 + di) as usize, j))) && passable(grid.get((i, (j as i64 + dj) as usize))))
        {
            return None;
        }
        Some(((x as usize, y as usize), diagonal))
    })
}

/// Octile distance in cells.
pub fn octile(a: Cell, b: Cell) -> f64 {
    let dx = a.0.abs_diff(b.0) as f64;
    let dy = a.1.abs_diff(b.1) as f64;
    dx.max(dy) + (SQRT_2 - 1.0) * dx.min(dy)
}

/// Result of a grid search: cell centers from start to target and the path cost.
#[derive(Debug, Clone, PartialEq)]
pub struct GridPath {
    pub cells: Vec<Cell>,
    pub points: Vec<Vec2>,
    pub moves: MoveCount,
    /// Cost in meters.
    pub cost: f64,
}

fn reconstruct(grid: &OccupancyGrid, parent: &[usize], moves: MoveCount, target: usize) -> GridPath {
    let mut idx = vec![target];
    while parent[*idx.last().unwrap()] != usize::MAX {
        idx.push(parent[*idx.last().unwrap()]);
    }
    idx.reverse();
    let cells: Vec<Cell> = idx.iter().map(|&k| (k % grid.width, k / grid.width)).collect();
    let points = cells.iter().map(|&c| grid.center(c)).collect();
    GridPath { cells, points, moves, cost: moves.value() * grid.resolution }
}

/// Uniform-cost flood from `start` over free cells.
fn flood(
    grid: &OccupancyGrid,
    start: Cell,
    passable: impl Fn(CellState) -> bool + Copy,
) -> (Vec<Option<MoveCount>>, Vec<usize>) {
    let n = grid.width * grid.height;
    let mut best: Vec<Option<MoveCount>> = vec![None; n];
    let mut parent = vec![usize::MAX; n];
    let mut closed = vec![false; n];
    let s = start.1 * grid.width + start.0;
    best[s] = Some(MoveCount::default());
    let mut heap = BinaryHeap::new();
    heap.push(Open { f: 0.0, g: MoveCount::default(), index: s });
    while let Some(Open { g, index, .. }) = heap.pop() {
        if closed[index] {
            continue;
        }
        closed[index] = true;
        for (nb, diagonal) in neighbors_by(grid, (index % grid.width, index / grid.width), passable) {
            let k = nb.1 * grid.width + nb.0;
            let mut ng = g;
            if diagonal {
                ng.diagonal += 1;
            } else {
                ng.straight += 1;
            }
            if best[k].is_none_or(|b| ng.value() < b.value()) {
                best[k] = Some(ng);
                parent[k] = index;
                heap.push(Open { f: ng.value(), g: ng, index: k });
            }
        }
    }
    (best, parent)
}

/// 8-connected A* with the octile heuristic over free cells.
///
/// The start cell is always expanded, whatever its state. When the goal cell
/// is not free, the reachable free cell nearest to the goal becomes the target.
pub fn astar(grid: &OccupancyGrid, start: Vec2, goal: Vec2) -> Result<GridPath> {
    let start_cell = grid.cell_of(start).ok_or(Error::NoPath)?;
    let goal_cell = grid.cell_of(goal).filter(|&c| grid.is_free(c));
    let Some(goal_cell) = goal_cell else {
        return nearest_reachable(grid, start_cell, goal);
    };
    let w = grid.width;
    let n = w * grid.height;
    let s = start_cell.1 * w + start_cell.0;
    let t = goal_cell.1 * w + goal_cell.0;
    let mut best: Vec<Option<MoveCount>> = vec![None; n];
    let mut parent = vec![usize::MAX; n];
    let mut closed = vec![false; n];
    best[s] = Some(MoveCount::default());
    let mut heap = BinaryHeap::new();
    heap.push(Open { f: octile(start_cell, goal_cell), g: MoveCount::default(), index: s });
    while let Some(Open { g, index, .. }) = heap.pop() {
        if closed[index] {
            continue;
        }
        if index == t {
            #[cfg(test)]
            assert_admissible(grid, goal_cell, &closed);
            return Ok(reconstruct(grid, &parent, g, t));
        }
        closed[index] = true;
        for (nb, diagonal) in neighbors(grid, (index % w, index / w)) {
            let k = nb.1 * w + nb.0;
            if closed[k] {
                continue;
            }
            let mut ng = g;
            if diagonal {
                ng.diagonal += 1;
            } else {
                ng.straight += 1;
            }
            if best[k].is_none_or(|b| ng.value() < b.value()) {
                best[k] = Some(ng);
                parent[k] = index;
                heap.push(Open { f: ng.value() + octile(nb, goal_cell), g: ng, index: k });
            }
        }
    }
    Err(Error::NoPath)
}

/// Checks the heuristic against the true cost-to-go of every expanded cell.
#[cfg(test)]
fn assert_admissible(grid: &OccupancyGrid, goal: Cell, expanded: &[bool]) {
    let (to_go, _) = flood(grid, goal, |s| s == CellState::Free);
    for (k, _) in expanded.iter().enumerate().filter(|(_, &e)| e) {
        let c = (k % grid.width, k / grid.width);
        let h = octile(c, goal);
        if let Some(truth) = to_go[k] {
            assert!(h <= truth.value() + 1e-12, "heuristic {h} exceeds cost {} at {c:?}", truth.value());
        }
    }
}

fn nearest_reachable(grid: &OccupancyGrid, start: Cell, goal: Vec2) -> Result<GridPath> {
    let (best, parent) = flood(grid, start, |s| s == CellState::Free);
    let s = start.1 * grid.width + start.0;
    let target = best
        .iter()
        .enumerate()
        .filter_map(|(k, m)| m.map(|m| (k, m)))
        .filter(|&(k, _)| k != s)
        .min_by(|a, b| {
            let da = grid.center((a.0 % grid.width, a.0 / grid.width)).distance(goal);
            let db = grid.center((b.0 % grid.width, b.0 / grid.width)).distance(goal);
            da.total_cmp(&db).then(a.1.value().total_cmp(&b.1.value())).then(a.0.cmp(&b.0))
        });
    let Some((t, moves)) = target else {
        return Err(Error::NoPath);
    };
    // Moving away from the goal is not progress.
    let start_dist = grid.center(start).distance(goal);
    if grid.center((t % grid.width, t / grid.width)).distance(goal) >= start_dist {
        return Err(Error::NoPath);
    }
    Ok(reconstruct(grid, &parent, moves, t))
}

/// Plans from `start` toward `goal` through known-free cells of `grid`
/// inflated by `robot_margin`.
///
/// While the goal is not reachable, the target is the reachable cell with the
/// shortest optimistic route to the goal, one that may cross unknown cells.
pub fn plan_toward(grid: &OccupancyGrid, start: Vec2, goal: Vec2, robot_margin: f64) -> Result<GridPath> {
    let planning = planning_grid(grid, robot_margin);
    if let Ok(path) = astar(&planning, start, goal) {
        if planning.cell_of(goal) == path.cells.last().copied() {
            return Ok(path);
        }
    }
    let start_cell = planning.cell_of(start).ok_or(Error::NoPath)?;
    let Some(goal_cell) = planning.cell_of(goal) else {
        return nearest_reachable(&planning, start_cell, goal);
    };
    let (to_goal, _) = flood(&inflate(grid, robot_margin), goal_cell, |s| s != CellState::Occupied);
    let (best, parent) = flood(&planning, start_cell, |s| s == CellState::Free);
    let w = planning.width;
    let s = start_cell.1 * w + start_cell.0;
    let target = (0..best.len())
        .filter_map(|k| Some((k, best[k]?, to_goal[k]?)))
        .min_by(|a, b| a.2.value().total_cmp(&b.2.value()).then(a.1.value().total_cmp(&b.1.value())).then(a.0.cmp(&b.0)));
    match target {
        Some((k, moves, _)) if k != s => Ok(reconstruct(&planning, &parent, moves, k)),
        Some(_) => Err(Error::NoPath),
        None => nearest_reachable(&planning, start_cell, goal),
    }
}

/// True when every cell touched by `a → b` is free or is the `allowed` cell.
pub fn line_of_sight(grid: &OccupancyGrid, a: Vec2, b: Vec2, allowed: Option<Cell>) -> bool {
    grid.traverse(a, b, true).into_iter().all(|c| grid.is_free(c) || Some(c) == allowed)
}

/// Greedy line-of-sight shortcutting of a cell path.
pub fn simplify_path(cells: &[Vec2], grid: &OccupancyGrid) -> Result<PathSpec> {
    if cells.is_empty() {
        return Err(Error::InvalidPath("empty cell path".into()));
    }
    let start_cell = grid.cell_of(cells[0]);
    let mut kept = vec![cells[0]];
    let mut i = 0;
    while i + 1 < cells.len() {
        let mut j = i + 1;
        while j + 1 < cells.len() && line_of_sight(grid, cells[i], cells[j + 1], start_cell) {
            j += 1;
        }
        kept.push(cells[j]);
        i = j;
    }
    kept.dedup();
    PathSpec::new(kept)
}

/// Polyline length.
pub fn polyline_length(points: &[Vec2]) -> f64 {
    points.windows(2).map(|w| w[0].distance(w[1])).sum()
}
