use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sddm_core::environment::{Bounds, Environment, Obstacle};
use sddm_core::metric::Vec2;
use sddm_core::planner::*;
use sddm_core::Error;

fn random_grid(rng: &mut ChaCha8Rng, w: usize, h: usize, density: f64) -> OccupancyGrid {
    let mut g = OccupancyGrid::new(Vec2::ZERO, 0.2, w, h).unwrap();
    for j in 0..h {
        for i in 0..w {
            let s = if rng.gen_bool(density) { CellState::Occupied } else { CellState::Free };
            g.set((i, j), s);
        }
    }
    g
}

/// Plain Dijkstra over (straight, diagonal) move counts with a sorted map as the queue.
fn dijkstra(grid: &OccupancyGrid, start: Cell, goal: Cell) -> Option<MoveCount> {
    let key = |m: MoveCount| ((m.value() * 1e9).round() as u64, m.straight, m.diagonal);
    let mut dist: BTreeMap<Cell, MoveCount> = BTreeMap::new();
    let mut queue: BTreeMap<(u64, u32, u32, Cell), MoveCount> = BTreeMap::new();
    dist.insert(start, MoveCount::default());
    queue.insert((0, 0, 0, start), MoveCount::default());
    while let Some(((_, _, _, c), m)) = queue.pop_first() {
        if c == goal {
            return Some(m);
        }
        if dist.get(&c).is_some_and(|d| d.value() < m.value()) {
            continue;
        }
        for (nb, diagonal) in neighbors(grid, c) {
            let mut n = m;
            if diagonal {
                n.diagonal += 1
            } else {
                n.straight += 1
            }
            if dist.get(&nb).is_none_or(|d| n.value() < d.value()) {
                dist.insert(nb, n);
                let (a, b, d) = key(n);
                queue.insert((a, b, d, nb), n);
            }
        }
    }
    None
}

#[test]
fn astar_matches_dijkstra() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut solved = 0;
    for _ in 0..50 {
        let (w, h) = (rng.gen_range(10..40), rng.gen_range(10..40));
        let density = rng.gen_range(0.05..0.35);
        let mut grid = random_grid(&mut rng, w, h, density);
        let s = (rng.gen_range(0..w), rng.gen_range(0..h));
        let g = (rng.gen_range(0..w), rng.gen_range(0..h));
        grid.set(s, CellState::Free);
        grid.set(g, CellState::Free);
        let oracle = dijkstra(&grid, s, g);
        match astar(&grid, grid.center(s), grid.center(g)) {
            Ok(path) => {
                let oracle = oracle.expect("astar found a path the oracle did not");
                assert_eq!(path.moves, oracle);
                assert_eq!(path.cost, oracle.value() * grid.resolution());
                assert_eq!(path.cells.first(), Some(&s));
                assert_eq!(path.cells.last(), Some(&g));
                for w in path.cells.windows(2) {
                    assert!(neighbors(&grid, w[0]).any(|(c, _)| c == w[1]));
                }
                solved += 1;
            }
            Err(e) => {
                assert_eq!(e, Error::NoPath);
                assert!(oracle.is_none());
            }
        }
    }
    assert!(solved >= 25, "only {solved} solvable grids");
}

#[test]
fn simplified_paths_stay_free_and_are_no_longer() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..30 {
        let mut grid = random_grid(&mut rng, 30, 30, 0.15);
        grid.set((0, 0), CellState::Free);
        grid.set((29, 29), CellState::Free);
        let Ok(path) = astar(&grid, grid.center((0, 0)), grid.center((29, 29))) else { continue };
        if path.points.len() < 2 {
            continue;
        }
        let simple = simplify_path(&path.points, &grid).unwrap();
        assert!(simple.length() <= polyline_length(&path.points) + 1e-9);
        for seg in simple.waypoints().windows(2) {
            assert!(line_of_sight(&grid, seg[0], seg[1], None));
        }
    }
}

#[test]
fn mapped_free_cells_are_free_space() {
    let env = Environment::new(
        vec![
            Obstacle::circle(Vec2::new(4.0, 3.0), 1.0).unwrap(),
            Obstacle::circle(Vec2::new(7.0, 6.5), 0.8).unwrap(),
            Obstacle::segment(Vec2::new(2.0, 7.0), Vec2::new(5.0, 8.0)).unwrap(),
        ],
        Bounds::new(Vec2::ZERO, Vec2::new(10.0, 10.0)).unwrap(),
    );
    let mut grid = OccupancyGrid::covering(&env.bounds, 0.1).unwrap();
    for origin in [Vec2::new(1.0, 1.0), Vec2::new(8.0, 2.0), Vec2::new(5.0, 5.5)] {
        integrate_scan_in_place(&mut grid, &LidarScan::simulate(&env, origin, 720, 8.0));
    }
    // A beam crossed every free cell, so each one meets free space: no cell
    // center sits deeper inside an obstacle than half a cell diagonal.
    let half_diag = grid.resolution() * std::f64::consts::SQRT_2 / 2.0;
    let mut checked = 0;
    for (c, s) in grid.cells() {
        if s != CellState::Free {
            continue;
        }
        let p = grid.center(c);
        for o in &env.obstacles {
            if let Obstacle::Circle(circle) = o {
                assert!(p.distance(circle.center) >= circle.radius - half_diag - 1e-12, "cell {c:?}");
            }
        }
        checked += 1;
    }
    assert!(checked > 1000);
    // Every hit lands on an obstacle and its cell is occupied.
    let scan = LidarScan::simulate(&env, Vec2::new(1.0, 1.0), 360, 8.0);
    for p in scan.hit_points() {
        assert!(env.obstacles.iter().any(|o| o.distance(p) < 1e-6));
        assert_eq!(grid.get(grid.cell_of(p).unwrap()), CellState::Occupied);
    }
}
