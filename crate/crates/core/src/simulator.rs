//! Fixed-step simulation of the robot-governor loop with safety monitoring.

use std::fmt;
use std::io::{self, Write};
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::environment::{clearance, free_space_contains, segment_collides, Bounds, Environment, Obstacle};
use crate::error::{Error, Result};
use crate::governor::{
    assess, baseline_energy_zone, governor_input, local_projected_goal, robot_input, ControllerParams, PathSpec,
    ProjectedGoal, RobotGovernorState, SafetyAssessment,
};
use crate::metric::Vec2;
use crate::planner::{integrate_scan_in_place, plan_toward, planning_grid, simplify_path, CellState, LidarScan, OccupancyGrid};

pub const MAX_DT: f64 = 0.05;
pub const DEFAULT_DT: f64 = 0.005;
pub const DEFAULT_T_MAX: f64 = 120.0;
pub const GOAL_POSITION_TOLERANCE: f64 = 0.05;
pub const GOAL_SPEED_TOLERANCE: f64 = 0.05;

/// A held governor with the robot settled for this long ends the run.
const STALL_TIME: f64 = 2.0;
const SETTLED: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Controller {
    /// Directional metric `Q[g − x]` with the exact output peak.
    Sddm,
    /// Euclidean ball driven by `k‖x − g‖² + ½‖ẋ‖²`.
    EuclideanEnergy,
}

impl Controller {
    pub fn name(self) -> &'static str {
        match self {
            Controller::Sddm => "sddm",
            Controller::EuclideanEnergy => "euclid",
        }
    }
}

impl fmt::Display for Controller {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Controller {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sddm" => Ok(Controller::Sddm),
            "euclid" | "euclidean" => Ok(Controller::EuclideanEnergy),
            _ => Err(Error::InvalidScenario(format!("unknown controller '{s}' (expected sddm or euclid)"))),
        }
    }
}

/// Lidar mapping and replanning toward a goal point in an initially unknown world.
#[derive(Debug, Clone, PartialEq)]
pub struct MappingConfig {
    pub goal: Vec2,
    pub beams: usize,
    pub max_range: f64,
    pub resolution: f64,
    pub inflation: f64,
    pub scan_period: f64,
    pub replan_period: f64,
}

impl MappingConfig {
    pub fn new(goal: Vec2) -> Self {
        Self {
            goal,
            beams: 360,
            max_range: 8.0,
            resolution: 0.1,
            inflation: crate::planner::DEFAULT_INFLATION,
            scan_period: 0.1,
            replan_period: 0.5,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Route {
    Path(PathSpec),
    Mapping(MappingConfig),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub name: String,
    pub env: Environment,
    pub route: Route,
    pub initial: RobotGovernorState,
    pub params: ControllerParams,
    pub dt: f64,
    pub t_max: f64,
    pub controller: Controller,
    /// Run the load-time safety checks.
    pub validate: bool,
    pub seed: u64,
}

impl Scenario {
    pub fn new(name: impl Into<String>, env: Environment, route: Route, initial: RobotGovernorState) -> Self {
        Self {
            name: name.into(),
            env,
            route,
            initial,
            params: ControllerParams::default(),
            dt: DEFAULT_DT,
            t_max: DEFAULT_T_MAX,
            controller: Controller::Sddm,
            validate: true,
            seed: 0,
        }
    }

    /// Robot and governor at rest at the start of `path`.
    pub fn on_path(name: impl Into<String>, env: Environment, path: PathSpec) -> Self {
        let start = path.start();
        Self::new(name, env, Route::Path(path), RobotGovernorState::at_rest(start))
    }

    pub fn with_controller(mut self, controller: Controller) -> Self {
        self.controller = controller;
        self
    }

    pub fn with_validation(mut self) -> Self {
        self.validate = true;
        self
    }

    pub fn goal(&self) -> Vec2 {
        match &self.route {
            Route::Path(p) => p.end(),
            Route::Mapping(m) => m.goal,
        }
    }

    /// Load-time checks. With `validate` off only the numeric ranges are enforced.
    pub fn check(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidScenario(m));
        if !(self.dt > 0.0 && self.dt <= MAX_DT) {
            return bad(format!("dt must lie in (0, {MAX_DT}], got {}", self.dt));
        }
        if !(self.t_max > 0.0 && self.t_max.is_finite()) {
            return bad(format!("t_max must be positive, got {}", self.t_max));
        }
        self.params.validate()?;
        if !self.initial.is_finite() {
            return bad("initial state is not finite".into());
        }
        if let Route::Mapping(m) = &self.route {
            if m.beams == 0 || !(m.max_range > 0.0) || !(m.resolution > 0.0) || !(m.inflation >= 0.0) {
                return bad("mapping needs beams, max_range and resolution > 0 and inflation >= 0".into());
            }
            if !(m.scan_period > 0.0 && m.replan_period > 0.0) {
                return bad("scan and replan periods must be positive".into());
            }
            if !self.env.bounds.contains(m.goal) || !self.env.bounds.contains(self.initial.robot_pos) {
                return bad("start and goal must lie inside the workspace bounds".into());
            }
        }
        if !self.validate {
            return Ok(());
        }
        for (what, p) in [("robot", self.initial.robot_pos), ("governor", self.initial.gov_pos)] {
            if !free_space_contains(&self.env, p) {
                return bad(format!("initial {what} position is inside an obstacle"));
            }
        }
        if let Route::Path(path) = &self.route {
            for (i, w) in path.waypoints().windows(2).enumerate() {
                if segment_collides(&self.env, w[0], w[1]) {
                    return bad(format!("path segment {i} passes through an obstacle"));
                }
            }
        }
        let a = assessment(self.controller, &self.initial, &self.env, &self.params)?;
        if !(a.delta_e > 0.0) {
            return bad(format!("initial state is not safe (margin {})", a.delta_e));
        }
        if let Route::Path(path) = &self.route {
            local_projected_goal(path, &a)
                .map_err(|_| Error::InvalidScenario("no point of the path lies in the initial safe zone".into()))?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Status {
    GoalReached,
    Timeout,
    Collision,
    NoFeasibleAlpha,
}

impl Status {
    pub fn name(self) -> &'static str {
        match self {
            Status::GoalReached => "GoalReached",
            Status::Timeout => "Timeout",
            Status::Collision => "Collision",
            Status::NoFeasibleAlpha => "NoFeasibleAlpha",
        }
    }
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Monitored quantities at one sample time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogRow {
    pub t: f64,
    pub robot_pos: Vec2,
    pub robot_vel: Vec2,
    pub gov_pos: Vec2,
    /// Governor input `u_g` applied from this sample on.
    pub gov_vel: Vec2,
    /// `NaN` until the first feasible projection.
    pub alpha_star: f64,
    pub eta: f64,
    pub delta: f64,
    pub delta_e: f64,
    /// Metric distance from the governor to the nearest known obstacle.
    pub dist_q: f64,
    /// Euclidean clearance of the robot in the true environment.
    pub dist_euclid: f64,
}

pub const CSV_HEADER: &str = "t,robot_pos_x,robot_pos_y,robot_vel_x,robot_vel_y,gov_pos_x,gov_pos_y,gov_vel_x,gov_vel_y,\
alpha_star,eta,delta,delta_e,dist_q,dist_euclid";

#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryLog {
    pub rows: Vec<LogRow>,
    pub status: Status,
    /// Every path followed during the run, in order; a single entry without mapping.
    pub paths: Vec<PathSpec>,
    /// Final occupancy grid in mapping mode.
    pub grid: Option<OccupancyGrid>,
    pub controller: Controller,
}

impl TrajectoryLog {
    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "{CSV_HEADER}")?;
        for r in &self.rows {
            writeln!(
                w,
                "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
                r.t,
                r.robot_pos.x,
                r.robot_pos.y,
                r.robot_vel.x,
                r.robot_vel.y,
                r.gov_pos.x,
                r.gov_pos.y,
                r.gov_vel.x,
                r.gov_vel.y,
                r.alpha_star,
                r.eta,
                r.delta,
                r.delta_e,
                r.dist_q,
                r.dist_euclid
            )?;
        }
        Ok(())
    }

    pub fn to_csv(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("ascii output")
    }

    pub fn final_time(&self) -> f64 {
        self.rows.last().map_or(0.0, |r| r.t)
    }
}

/// Safety assessment of the selected controller.
pub fn assessment(
    controller: Controller,
    state: &RobotGovernorState,
    env: &Environment,
    params: &ControllerParams,
) -> Result<SafetyAssessment> {
    match controller {
        Controller::Sddm => assess(state, env, params),
        Controller::EuclideanEnergy => baseline_energy_zone(state, env, params),
    }
}

/// Time derivative of the robot-governor state with the projected goal held at `goal_bar`.
pub fn dynamics(state: &RobotGovernorState, goal_bar: Vec2, params: &ControllerParams) -> RobotGovernorState {
    RobotGovernorState {
        robot_pos: state.robot_vel,
        robot_vel: robot_input(state, params),
        gov_pos: governor_input(state, goal_bar, params.kg),
    }
}

fn axpy(s: &RobotGovernorState, h: f64, d: &RobotGovernorState) -> RobotGovernorState {
    RobotGovernorState {
        robot_pos: s.robot_pos + d.robot_pos * h,
        robot_vel: s.robot_vel + d.robot_vel * h,
        gov_pos: s.gov_pos + d.gov_pos * h,
    }
}

/// One classical Runge-Kutta step.
pub fn rk4_step(state: &RobotGovernorState, goal_bar: Vec2, params: &ControllerParams, dt: f64) -> RobotGovernorState {
    let k1 = dynamics(state, goal_bar, params);
    let k2 = dynamics(&axpy(state, 0.5 * dt, &k1), goal_bar, params);
    let k3 = dynamics(&axpy(state, 0.5 * dt, &k2), goal_bar, params);
    let k4 = dynamics(&axpy(state, dt, &k3), goal_bar, params);
    let combine = |a: Vec2, b: Vec2, c: Vec2, d: Vec2| (a + (b + c) * 2.0 + d) * (dt / 6.0);
    RobotGovernorState {
        robot_pos: state.robot_pos + combine(k1.robot_pos, k2.robot_pos, k3.robot_pos, k4.robot_pos),
        robot_vel: state.robot_vel + combine(k1.robot_vel, k2.robot_vel, k3.robot_vel, k4.robot_vel),
        gov_pos: state.gov_pos + combine(k1.gov_pos, k2.gov_pos, k3.gov_pos, k4.gov_pos),
    }
}

/// Control decision at one instant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Decision {
    pub assessment: SafetyAssessment,
    pub goal: ProjectedGoal,
    /// The governor holds because no path point lies in a non-degenerate zone.
    pub held: bool,
}

/// Safety assessment and projected goal; a missing path or an infeasible
/// projection holds the governor in place.
pub fn decide(
    controller: Controller,
    state: &RobotGovernorState,
    known: &Environment,
    path: Option<&PathSpec>,
    params: &ControllerParams,
) -> Result<Decision> {
    let assessment = assessment(controller, state, known, params)?;
    let hold = ProjectedGoal { alpha: None, goal: state.gov_pos };
    let Some(path) = path else {
        return Ok(Decision { assessment, goal: hold, held: true });
    };
    match local_projected_goal(path, &assessment) {
        Ok(goal) => Ok(Decision { assessment, goal, held: false }),
        Err(Error::NoFeasibleAlpha) => Ok(Decision { assessment, goal: hold, held: true }),
        Err(e) => Err(e),
    }
}

struct Mapper {
    config: MappingConfig,
    grid: OccupancyGrid,
    seen: Vec<bool>,
    cloud: Vec<Vec2>,
    scan_every: u64,
    replan_every: u64,
}

impl Mapper {
    fn new(config: &MappingConfig, bounds: &Bounds, dt: f64) -> Result<Self> {
        let pad = Vec2::new(config.resolution, config.resolution);
        let padded = Bounds::new(bounds.min - pad, bounds.max + pad)?;
        let grid = OccupancyGrid::covering(&padded, config.resolution)?;
        let seen = vec![false; grid.width() * grid.height()];
        let every = |period: f64| ((period / dt).round() as u64).max(1);
        Ok(Self {
            scan_every: every(config.scan_period),
            replan_every: every(config.replan_period),
            config: config.clone(),
            grid,
            seen,
            cloud: Vec::new(),
        })
    }

    /// Scans the true world from `origin`; returns true if new returns appeared.
    fn sense(&mut self, world: &Environment, origin: Vec2) -> bool {
        let scan = LidarScan::simulate(world, origin, self.config.beams, self.config.max_range);
        integrate_scan_in_place(&mut self.grid, &scan);
        let mut fresh = false;
        for p in scan.hit_points() {
            if let Some(c) = self.grid.cell_of(p) {
                let k = c.1 * self.grid.width() + c.0;
                if !self.seen[k] {
                    self.seen[k] = true;
                    self.cloud.push(p);
                    fresh = true;
                }
            }
        }
        fresh
    }

    fn known(&self, bounds: Bounds) -> Environment {
        let obstacles = Obstacle::point_cloud(self.cloud.clone()).into_iter().collect();
        Environment::new(obstacles, bounds)
    }

    fn blocks(&self, path: &PathSpec) -> bool {
        path.waypoints()
            .windows(2)
            .any(|w| self.grid.traverse(w[0], w[1], true).into_iter().any(|c| self.grid.get(c) == CellState::Occupied))
    }

    fn plan(&self, from: Vec2) -> Option<PathSpec> {
        let grid = planning_grid(&self.grid, self.config.inflation);
        let found = plan_toward(&self.grid, from, self.config.goal, self.config.inflation).ok()?;
        let mut points = found.points;
        points[0] = from;
        if grid.cell_of(self.config.goal) == found.cells.last().copied() {
            *points.last_mut().unwrap() = self.config.goal;
        }
        if points.len() == 1 {
            points.push(self.config.goal);
        }
        simplify_path(&points, &grid).ok()
    }
}

/// Stepwise simulation of one scenario.
pub struct Simulator<'a> {
    scenario: &'a Scenario,
    state: RobotGovernorState,
    step_index: u64,
    path: Option<PathSpec>,
    paths: Vec<PathSpec>,
    known: Environment,
    mapper: Option<Mapper>,
    alpha: f64,
    held_steps: u64,
    collided: bool,
    rows: Vec<LogRow>,
    status: Option<Status>,
}

impl<'a> Simulator<'a> {
    pub fn new(scenario: &'a Scenario) -> Result<Self> {
        scenario.check()?;
        let (path, mapper, known) = match &scenario.route {
            Route::Path(p) => (Some(p.clone()), None, scenario.env.clone()),
            Route::Mapping(m) => (None, Some(Mapper::new(m, &scenario.env.bounds, scenario.dt)?), Environment::empty(scenario.env.bounds)),
        };
        Ok(Self {
            scenario,
            state: scenario.initial,
            step_index: 0,
            paths: path.iter().cloned().collect(),
            path,
            known,
            mapper,
            alpha: f64::NAN,
            held_steps: 0,
            collided: !free_space_contains(&scenario.env, scenario.initial.robot_pos),
            rows: Vec::new(),
            status: None,
        })
    }

    pub fn state(&self) -> &RobotGovernorState {
        &self.state
    }

    pub fn path(&self) -> Option<&PathSpec> {
        self.path.as_ref()
    }

    pub fn status(&self) -> Option<Status> {
        self.status
    }

    pub fn time(&self) -> f64 {
        self.step_index as f64 * self.scenario.dt
    }

    fn update_map(&mut self) {
        let Some(mapper) = self.mapper.as_mut() else { return };
        let n = self.step_index;
        let mut replan = n.is_multiple_of(mapper.replan_every);
        if n.is_multiple_of(mapper.scan_every) && mapper.sense(&self.scenario.env, self.state.robot_pos) {
            self.known = mapper.known(self.scenario.env.bounds);
            replan |= self.path.as_ref().is_none_or(|p| mapper.blocks(p));
        }
        if replan {
            if let Some(p) = mapper.plan(self.state.gov_pos) {
                self.paths.push(p.clone());
                self.path = Some(p);
            }
        }
    }

    /// Logs the current sample and advances one step; returns the terminal status once set.
    pub fn step(&mut self) -> Result<Option<Status>> {
        if self.status.is_some() {
            return Ok(self.status);
        }
        self.update_map();
        let sc = self.scenario;
        let decision = decide(sc.controller, &self.state, &self.known, self.path.as_ref(), &sc.params)?;
        if let Some(a) = decision.goal.alpha {
            self.alpha = a;
        }
        let a = &decision.assessment;
        let t = self.time();
        self.rows.push(LogRow {
            t,
            robot_pos: self.state.robot_pos,
            robot_vel: self.state.robot_vel,
            gov_pos: self.state.gov_pos,
            gov_vel: governor_input(&self.state, decision.goal.goal, sc.params.kg),
            alpha_star: self.alpha,
            eta: a.eta,
            delta: a.delta,
            delta_e: a.delta_e,
            dist_q: a.dist_sq.sqrt(),
            dist_euclid: clearance(&sc.env, self.state.robot_pos),
        });

        let settled = (self.state.robot_pos - self.state.gov_pos).norm() <= SETTLED && self.state.robot_vel.norm() <= SETTLED;
        self.held_steps = if decision.held && settled { self.held_steps + 1 } else { 0 };
        let status = if self.collided {
            Some(Status::Collision)
        } else if self.state.robot_pos.distance(sc.goal()) <= GOAL_POSITION_TOLERANCE
            && self.state.robot_vel.norm() <= GOAL_SPEED_TOLERANCE
        {
            Some(Status::GoalReached)
        } else if self.held_steps as f64 * sc.dt >= STALL_TIME {
            Some(Status::NoFeasibleAlpha)
        } else if (self.step_index + 1) as f64 * sc.dt > sc.t_max {
            Some(Status::Timeout)
        } else {
            None
        };
        if status.is_some() {
            self.status = status;
            return Ok(status);
        }

        let next = rk4_step(&self.state, decision.goal.goal, &sc.params, sc.dt);
        if !next.is_finite() {
            return Err(Error::InvalidScenario(format!("state diverged at t = {t}")));
        }
        self.collided = segment_collides(&sc.env, self.state.robot_pos, next.robot_pos);
        self.state = next;
        self.step_index += 1;
        Ok(None)
    }

    pub fn finish(self) -> TrajectoryLog {
        TrajectoryLog {
            rows: self.rows,
            status: self.status.unwrap_or(Status::Timeout),
            paths: self.paths,
            grid: self.mapper.map(|m| m.grid),
            controller: self.scenario.controller,
        }
    }
}

/// Runs `scenario` to a terminal status.
pub fn run(scenario: &Scenario) -> Result<TrajectoryLog> {
    let mut sim = Simulator::new(scenario)?;
    while sim.step()?.is_none() {}
    Ok(sim.finish())
}

/// Circles scattered uniformly in `bounds`, disjoint from each other and at
/// least `clearance` away from `path`.
pub fn scatter_circles(
    seed: u64,
    count: usize,
    radius: (f64, f64),
    clearance: f64,
    bounds: &Bounds,
    path: &PathSpec,
) -> Result<Vec<Obstacle>> {
    if !(radius.0 > 0.0 && radius.1 >= radius.0) {
        return Err(Error::InvalidScenario(format!("bad radius range {:?}", radius)));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut placed: Vec<(Vec2, f64)> = Vec::new();
    for _ in 0..10_000 * count.max(1) {
        if placed.len() == count {
            break;
        }
        let r = if radius.1 > radius.0 { rng.gen_range(radius.0..radius.1) } else { radius.0 };
        let c = Vec2::new(rng.gen_range(bounds.min.x..bounds.max.x), rng.gen_range(bounds.min.y..bounds.max.y));
        let clear_of_path = path.distance_to(c) >= r + clearance;
        let disjoint = placed.iter().all(|&(o, s)| o.distance(c) >= r + s);
        if clear_of_path && disjoint {
            placed.push((c, r));
        }
    }
    if placed.len() < count {
        return Err(Error::InvalidScenario(format!("could only place {} of {count} circles", placed.len())));
    }
    placed.into_iter().map(|(c, r)| Obstacle::circle(c, r)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn open_world() -> Environment {
        Environment::empty(Bounds::new(Vec2::new(-10.0, -10.0), Vec2::new(10.0, 10.0)).unwrap())
    }

    fn straight(len: f64) -> PathSpec {
        PathSpec::new(vec![Vec2::ZERO, Vec2::new(len, 0.0)]).unwrap()
    }

    #[test]
    fn equilibrium_is_fixed() {
        let params = ControllerParams::default();
        let s = RobotGovernorState::at_rest(Vec2::new(5.0, 0.0));
        assert_eq!(rk4_step(&s, s.gov_pos, &params, 0.01), s);
    }

    #[test]
    fn open_world_reaches_goal() {
        let sc = Scenario::on_path("open", open_world(), straight(5.0));
        let log = run(&sc).unwrap();
        assert_eq!(log.status, Status::GoalReached);
        for w in log.rows.windows(2) {
            assert!(w[1].t > w[0].t);
        }
        assert_eq!(log.rows[1].t, sc.dt);
    }

    #[test]
    fn controller_names_round_trip() {
        for c in [Controller::Sddm, Controller::EuclideanEnergy] {
            assert_eq!(c.name().parse::<Controller>().unwrap(), c);
        }
        assert!("pid".parse::<Controller>().is_err());
    }

    #[test]
    fn load_checks() {
        let wall = Obstacle::segment(Vec2::new(2.0, -1.0), Vec2::new(2.0, 1.0)).unwrap();
        let env = Environment::new(vec![wall], open_world().bounds);
        let sc = Scenario::on_path("blocked", env, straight(5.0));
        assert!(matches!(sc.check(), Err(Error::InvalidScenario(_))));
        // The governor never crosses the wall on its own.
        let mut bypass = sc.clone();
        bypass.validate = false;
        bypass.t_max = 10.0;
        assert_eq!(run(&bypass).unwrap().status, Status::Timeout);
        // Launched at the wall, the robot overshoots into it.
        bypass.initial.robot_vel = Vec2::new(20.0, 0.0);
        assert!(bypass.clone().with_validation().check().is_err());
        assert_eq!(run(&bypass).unwrap().status, Status::Collision);
        let mut coarse = Scenario::on_path("dt", open_world(), straight(5.0));
        coarse.dt = 0.1;
        assert!(coarse.check().is_err());
    }

    #[test]
    fn csv_has_fixed_header() {
        let mut sc = Scenario::on_path("open", open_world(), straight(1.0));
        sc.t_max = 0.02;
        let log = run(&sc).unwrap();
        assert_eq!(log.status, Status::Timeout);
        let csv = log.to_csv();
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some(CSV_HEADER));
        assert_eq!(lines.count(), log.rows.len());
        assert_eq!(log.rows.len(), 5);
    }

    #[test]
    fn scatter_keeps_clear_of_path() {
        let b = Bounds::new(Vec2::ZERO, Vec2::new(20.0, 20.0)).unwrap();
        let path = PathSpec::new(vec![Vec2::new(1.0, 1.0), Vec2::new(19.0, 19.0)]).unwrap();
        let circles = scatter_circles(3, 8, (0.5, 1.5), 0.5, &b, &path).unwrap();
        assert_eq!(circles.len(), 8);
        for o in &circles {
            assert!(path.waypoints().windows(2).all(|w| !segment_collides(&Environment::new(vec![o.clone()], b), w[0], w[1])));
        }
        assert_eq!(circles, scatter_circles(3, 8, (0.5, 1.5), 0.5, &b, &path).unwrap());
    }
}
