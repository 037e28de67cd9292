//! Robot-governor control law.
//!
//! Each control step the governor measures its directional distance to the
//! nearest obstacle, subtracts the predicted robot excursion `δ`, and uses the
//! remaining leeway `ΔE` as the level of a local safe zone around itself. The
//! farthest path point inside that zone becomes the governor's target.

use std::f64::consts::SQRT_2;

use crate::bounds::{bound, build_double_integrator, exact_peak, DoubleIntegratorGains, StateVec};
use crate::environment::{dist_q_env, Environment};
use crate::error::{Error, Result};
use crate::metric::{directional_matrix, Ellipsoid, SymMat2, Vec2};

/// Robot position, robot velocity and governor position.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct RobotGovernorState {
    pub robot_pos: Vec2,
    pub robot_vel: Vec2,
    pub gov_pos: Vec2,
}

impl RobotGovernorState {
    pub fn new(robot_pos: Vec2, robot_vel: Vec2, gov_pos: Vec2) -> Self {
        Self { robot_pos, robot_vel, gov_pos }
    }

    /// Robot at rest on top of the governor.
    pub fn at_rest(p: Vec2) -> Self {
        Self::new(p, Vec2::ZERO, p)
    }

    /// `(x − g, ẋ)`
    pub fn relative(&self) -> StateVec {
        StateVec::new(self.robot_pos - self.gov_pos, self.robot_vel)
    }

    pub fn is_finite(&self) -> bool {
        self.robot_pos.is_finite() && self.robot_vel.is_finite() && self.gov_pos.is_finite()
    }
}

/// Piecewise-linear path `r: [0, 1] → R²`, parameterized proportionally to arc length.
#[derive(Debug, Clone, PartialEq)]
pub struct PathSpec {
    waypoints: Vec<Vec2>,
    cumulative: Vec<f64>,
}

impl PathSpec {
    pub fn new(waypoints: Vec<Vec2>) -> Result<Self> {
        if waypoints.len() < 2 {
            return Err(Error::InvalidPath("a path needs at least two waypoints".into()));
        }
        if waypoints.iter().any(|w| !w.is_finite()) {
            return Err(Error::InvalidPath("non-finite waypoint".into()));
        }
        let mut cumulative = Vec::with_capacity(waypoints.len());
        cumulative.push(0.0);
        for pair in waypoints.windows(2) {
            let len = pair[0].distance(pair[1]);
            if len == 0.0 {
                return Err(Error::InvalidPath("consecutive waypoints coincide".into()));
            }
            cumulative.push(cumulative.last().unwrap() + len);
        }
        Ok(Self { waypoints, cumulative })
    }

    pub fn waypoints(&self) -> &[Vec2] {
        &self.waypoints
    }

    pub fn length(&self) -> f64 {
        *self.cumulative.last().unwrap()
    }

    pub fn start(&self) -> Vec2 {
        self.waypoints[0]
    }

    pub fn end(&self) -> Vec2 {
        *self.waypoints.last().unwrap()
    }

    pub fn segment_count(&self) -> usize {
        self.waypoints.len() - 1
    }

    /// `r(α)`
    pub fn point_at(&self, alpha: f64) -> Vec2 {
        let s = alpha.clamp(0.0, 1.0) * self.length();
        let i = match self.cumulative.binary_search_by(|c| c.total_cmp(&s)) {
            Ok(i) => i.min(self.segment_count() - 1),
            Err(i) => i.saturating_sub(1).min(self.segment_count() - 1),
        };
        let seg_len = self.cumulative[i + 1] - self.cumulative[i];
        self.waypoints[i].lerp(self.waypoints[i + 1], (s - self.cumulative[i]) / seg_len)
    }

    /// Path parameter of the point `τ` of the way along segment `i`.
    fn alpha_on_segment(&self, i: usize, tau: f64) -> f64 {
        let seg_len = self.cumulative[i + 1] - self.cumulative[i];
        ((self.cumulative[i] + tau * seg_len) / self.length()).clamp(0.0, 1.0)
    }

    /// Euclidean distance from `p` to the polyline.
    pub fn distance_to(&self, p: Vec2) -> f64 {
        self.waypoints
            .windows(2)
            .map(|w| crate::environment::dist_q_segment(&SymMat2::IDENTITY, p, &crate::environment::Segment::new(w[0], w[1])).0)
            .fold(f64::INFINITY, f64::min)
    }
}

/// How the predicted excursion `δ` is obtained each step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BoundMode {
    /// Exact output peak (closed form when critically damped).
    #[default]
    Analytic,
    /// Invariant-ellipsoid certificate.
    Relaxed,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ControllerParams {
    pub k: f64,
    pub zeta: f64,
    pub kg: f64,
    pub c1: f64,
    pub c2: f64,
    pub bound_mode: BoundMode,
}

impl Default for ControllerParams {
    /// `k = kg = 1`, `ζ = 2√2`, `c1 = 1`, `c2 = 4`.
    fn default() -> Self {
        Self { k: 1.0, zeta: 2.0 * SQRT_2, kg: 1.0, c1: 1.0, c2: 4.0, bound_mode: BoundMode::Analytic }
    }
}

impl ControllerParams {
    pub fn validate(&self) -> Result<()> {
        DoubleIntegratorGains::new(self.k, self.zeta)?;
        // kg = 0 is allowed: it pins the governor in place.
        if !(self.kg >= 0.0 && self.kg.is_finite()) {
            return Err(Error::InvalidGains(format!("kg must be non-negative, got {}", self.kg)));
        }
        if !(self.c1 > 0.0 && self.c2 > self.c1 && self.c2.is_finite()) {
            return Err(Error::InvalidParameters(format!("need 0 < c1 < c2, got c1={}, c2={}", self.c1, self.c2)));
        }
        Ok(())
    }

    pub fn gains(&self) -> Result<DoubleIntegratorGains> {
        DoubleIntegratorGains::new(self.k, self.zeta)
    }
}

/// Safety margin of the current state and the resulting local safe zone.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SafetyAssessment {
    /// Metric used for distances and the zone (`Q[g − x]`, or `I` for the baseline).
    pub q: SymMat2,
    /// Exact output peak of the current state.
    pub eta: f64,
    /// Excursion bound entering the margin.
    pub delta: f64,
    /// Squared metric distance from the governor to the nearest obstacle (`+∞` if none).
    pub dist_sq: f64,
    /// `dist_sq − delta`
    pub delta_e: f64,
    /// `E_Q(g, max(0, ΔE))`
    pub safe_zone: Ellipsoid,
}

fn compose(q: SymMat2, eta: f64, delta: f64, dist_sq: f64, gov: Vec2) -> Result<SafetyAssessment> {
    let delta_e = dist_sq - delta;
    let safe_zone = Ellipsoid::new(gov, q, delta_e.max(0.0))?;
    Ok(SafetyAssessment { q, eta, delta, dist_sq, delta_e, safe_zone })
}

/// Directional safety assessment with `Q = Q[g − x]`.
pub fn assess(state: &RobotGovernorState, env: &Environment, params: &ControllerParams) -> Result<SafetyAssessment> {
    let dm = directional_matrix(state.gov_pos - state.robot_pos, params.c1, params.c2)?;
    let sys = build_double_integrator(params.gains()?, &dm.q)?;
    let rel = state.relative();
    let (eta, delta) = match params.bound_mode {
        BoundMode::Analytic => {
            let eta = if rel.is_zero() { 0.0 } else { exact_peak(&sys, &rel)?.eta };
            (eta, eta)
        }
        BoundMode::Relaxed => {
            let b = bound(&sys, &rel)?;
            (b.eta, b.delta)
        }
    };
    let dist = dist_q_env(&dm.q, state.gov_pos, env).dist;
    compose(dm.q, eta, delta, dist * dist, state.gov_pos)
}

/// `E = k‖x − g‖² + ½‖ẋ‖²`
pub fn energy(state: &RobotGovernorState, k: f64) -> f64 {
    k * (state.robot_pos - state.gov_pos).norm_sq() + 0.5 * state.robot_vel.norm_sq()
}

/// Euclidean-ball safe zone driven by the robot's total energy.
pub fn baseline_energy_zone(state: &RobotGovernorState, env: &Environment, params: &ControllerParams) -> Result<SafetyAssessment> {
    let e = energy(state, params.k);
    let dist = dist_q_env(&SymMat2::IDENTITY, state.gov_pos, env).dist;
    compose(SymMat2::IDENTITY, e, e, dist * dist, state.gov_pos)
}

/// The governor's chase target.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProjectedGoal {
    /// Path parameter of the goal; `None` when the zone is degenerate and the governor holds.
    pub alpha: Option<f64>,
    pub goal: Vec2,
}

/// Largest `α` with `r(α)` inside the safe zone.
///
/// Segments are scanned from the end of the path; on each one the zone
/// membership `(r − g)ᵀQ(r − g) ≤ level` is a quadratic inequality in the
/// segment parameter. A zone of level zero yields `ḡ = g`.
pub fn local_projected_goal(path: &PathSpec, assessment: &SafetyAssessment) -> Result<ProjectedGoal> {
    let zone = &assessment.safe_zone;
    if zone.level == 0.0 {
        return Ok(ProjectedGoal { alpha: None, goal: zone.center });
    }
    if zone.level == f64::INFINITY {
        return Ok(ProjectedGoal { alpha: Some(1.0), goal: path.end() });
    }
    let q = &zone.q;
    let wp = path.waypoints();
    for i in (0..path.segment_count()).rev() {
        let e = wp[i + 1] - wp[i];
        let w = wp[i] - zone.center;
        let qe = q.mul_vec(e);
        let a = e.dot(qe);
        let b = 2.0 * w.dot(qe);
        let c = crate::metric::quad_norm_sq(q, w) - zone.level;
        let disc = b * b - 4.0 * a * c;
        if disc < 0.0 {
            continue;
        }
        let sq = disc.sqrt();
        // Stable roots of a τ² + b τ + c with a > 0.
        let qq = -0.5 * (b + if b >= 0.0 { sq } else { -sq });
        let (mut lo, mut hi) = if qq != 0.0 { (qq / a, c / qq) } else { (0.0, 0.0) };
        if lo > hi {
            std::mem::swap(&mut lo, &mut hi);
        }
        if hi < 0.0 || lo > 1.0 {
            continue;
        }
        let tau = hi.min(1.0);
        let alpha = path.alpha_on_segment(i, tau);
        let goal = if tau >= 1.0 { wp[i + 1] } else { wp[i].lerp(wp[i + 1], tau) };
        return Ok(ProjectedGoal { alpha: Some(alpha), goal });
    }
    Err(Error::NoFeasibleAlpha)
}

/// `u_g = −kg (g − ḡ)`
pub fn governor_input(state: &RobotGovernorState, goal: Vec2, kg: f64) -> Vec2 {
    (state.gov_pos - goal) * -kg
}

/// `u = −2k (x − g) − ζ ẋ`
pub fn robot_input(state: &RobotGovernorState, params: &ControllerParams) -> Vec2 {
    (state.robot_pos - state.gov_pos) * (-2.0 * params.k) - state.robot_vel * params.zeta
}
