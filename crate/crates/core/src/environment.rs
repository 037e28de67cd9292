//! Obstacles, the free-space predicate, Q-metric distance queries and lidar raycasting.

use crate::error::{Error, Result};
use crate::metric::{eig_sym2, quad_norm_sq, SymMat2, Vec2};

/// Points within this distance of a wall or point obstacle count as contact.
pub const CONTACT_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Circle {
    pub center: Vec2,
    pub radius: f64,
}

/// Zero-thickness wall.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Segment {
    pub a: Vec2,
    pub b: Vec2,
}

impl Segment {
    pub fn new(a: Vec2, b: Vec2) -> Self {
        Self { a, b }
    }

    pub fn point_at(&self, t: f64) -> Vec2 {
        self.a.lerp(self.b, t)
    }

    pub fn length(&self) -> f64 {
        self.a.distance(self.b)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Obstacle {
    Circle(Circle),
    Segment(Segment),
    PointCloud(Vec<Vec2>),
}

impl Obstacle {
    pub fn circle(center: Vec2, radius: f64) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite()) || !center.is_finite() {
            return Err(Error::InvalidObstacle(format!("circle radius must be positive, got {radius}")));
        }
        Ok(Obstacle::Circle(Circle { center, radius }))
    }

    pub fn segment(a: Vec2, b: Vec2) -> Result<Self> {
        if a == b || !a.is_finite() || !b.is_finite() {
            return Err(Error::InvalidObstacle("segment endpoints must be distinct and finite".into()));
        }
        Ok(Obstacle::Segment(Segment { a, b }))
    }

    pub fn point_cloud(points: Vec<Vec2>) -> Result<Self> {
        if points.is_empty() || points.iter().any(|p| !p.is_finite()) {
            return Err(Error::InvalidObstacle("point cloud must be non-empty and finite".into()));
        }
        Ok(Obstacle::PointCloud(points))
    }

    /// Q-metric distance from `p` to this obstacle and the closest point on it.
    pub fn dist_q(&self, q: &SymMat2, p: Vec2) -> (f64, Vec2) {
        match self {
            Obstacle::Circle(c) => dist_q_circle(q, p, c),
            Obstacle::Segment(s) => dist_q_segment(q, p, s),
            Obstacle::PointCloud(points) => {
                let (d2, w) = points
                    .iter()
                    .map(|&w| (quad_norm_sq(q, p - w), w))
                    .fold((f64::INFINITY, p), |best, cur| if cur.0 < best.0 { cur } else { best });
                (d2.sqrt(), w)
            }
        }
    }

    /// Euclidean distance from `p` to the obstacle (zero inside a circle).
    pub fn distance(&self, p: Vec2) -> f64 {
        self.dist_q(&SymMat2::IDENTITY, p).0
    }

    pub fn contains(&self, p: Vec2) -> bool {
        match self {
            Obstacle::Circle(c) => p.distance(c.center) <= c.radius,
            _ => self.distance(p) <= CONTACT_TOLERANCE,
        }
    }
}

/// Axis-aligned workspace rectangle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bounds {
    pub min: Vec2,
    pub max: Vec2,
}

impl Bounds {
    pub fn new(min: Vec2, max: Vec2) -> Result<Self> {
        if !(min.x < max.x && min.y < max.y) || !min.is_finite() || !max.is_finite() {
            return Err(Error::InvalidParameters("workspace bounds are degenerate".into()));
        }
        Ok(Self { min, max })
    }

    pub fn contains(&self, p: Vec2) -> bool {
        p.x >= self.min.x && p.x <= self.max.x && p.y >= self.min.y && p.y <= self.max.y
    }

    pub fn width(&self) -> f64 {
        self.max.x - self.min.x
    }

    pub fn height(&self) -> f64 {
        self.max.y - self.min.y
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Environment {
    pub obstacles: Vec<Obstacle>,
    pub bounds: Bounds,
}

/// Result of a nearest-obstacle query.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Proximity {
    /// `+∞` when the environment has no obstacles.
    pub dist: f64,
    pub witness: Vec2,
    pub obstacle: Option<usize>,
}

impl Environment {
    pub fn new(obstacles: Vec<Obstacle>, bounds: Bounds) -> Self {
        Self { obstacles, bounds }
    }

    pub fn empty(bounds: Bounds) -> Self {
        Self::new(Vec::new(), bounds)
    }
}

pub fn dist_q_point(q: &SymMat2, p: Vec2, point: Vec2) -> f64 {
    quad_norm_sq(q, p - point).sqrt()
}

/// The minimizer of a quadratic in the segment parameter, clamped to `[0, 1]`.
pub fn dist_q_segment(q: &SymMat2, p: Vec2, seg: &Segment) -> (f64, Vec2) {
    let e = seg.b - seg.a;
    let w = p - seg.a;
    let qe = q.mul_vec(e);
    let denom = e.dot(qe);
    let t = if denom > 0.0 { (w.dot(qe) / denom).clamp(0.0, 1.0) } else { 0.0 };
    let witness = seg.point_at(t);
    (dist_q_point(q, p, witness), witness)
}

/// Q-distance to a closed disk.
///
/// Outside the disk the minimizer is `u(μ) = c + (Q + μI)⁻¹ Q (p − c)` for the
/// multiplier `μ ≥ 0` with `‖u(μ) − c‖ = r`; the norm is decreasing in `μ`, so
/// the root is bracketed and found by safeguarded Newton steps.
pub fn dist_q_circle(q: &SymMat2, p: Vec2, circle: &Circle) -> (f64, Vec2) {
    let w = p - circle.center;
    let r = circle.radius;
    if w.norm() <= r {
        return (0.0, p);
    }
    let eig = eig_sym2(q);
    let (l1, l2) = (eig.lambda_min, eig.lambda_max);
    // Coordinates of w in the eigenbasis.
    let (w1, w2) = (w.dot(eig.v_min), w.dot(eig.v_max));
    let y = |mu: f64| (l1 * w1 / (l1 + mu), l2 * w2 / (l2 + mu));
    let radius_at = |mu: f64| {
        let (a, b) = y(mu);
        a.hypot(b)
    };

    let mut lo = 0.0;
    let mut hi = l2.max(1.0);
    while radius_at(hi) > r {
        lo = hi;
        hi *= 2.0;
    }
    // Newton on φ(μ) = 1/r − 1/‖y(μ)‖, which is nearly linear in μ.
    let mut mu = 0.5 * (lo + hi);
    for _ in 0..200 {
        let (a, b) = y(mu);
        let n = a.hypot(b);
        if (n - r).abs() <= 1e-12 * r {
            break;
        }
        if n > r {
            lo = mu;
        } else {
            hi = mu;
        }
        // d‖y‖/dμ = −(a²/(l1+μ) + b²/(l2+μ)) / ‖y‖
        let dn = -(a * a / (l1 + mu) + b * b / (l2 + mu)) / n;
        let phi = 1.0 / r - 1.0 / n;
        let dphi = dn / (n * n);
        let mut next = mu - phi / dphi;
        if !(next > lo && next < hi) || !next.is_finite() {
            next = 0.5 * (lo + hi);
        }
        if (next - mu).abs() <= 1e-15 * mu.max(1.0) {
            mu = next;
            break;
        }
        mu = next;
    }
    let (a, b) = y(mu);
    let offset = eig.v_min * a + eig.v_max * b;
    // Snap onto the circle exactly.
    let witness = circle.center + offset * (r / offset.norm());
    (dist_q_point(q, p, witness), witness)
}

/// Nearest obstacle in the Q-metric over the whole environment.
pub fn dist_q_env(q: &SymMat2, p: Vec2, env: &Environment) -> Proximity {
    let mut best = Proximity { dist: f64::INFINITY, witness: p, obstacle: None };
    for (i, obstacle) in env.obstacles.iter().enumerate() {
        let (dist, witness) = obstacle.dist_q(q, p);
        if dist < best.dist {
            best = Proximity { dist, witness, obstacle: Some(i) };
        }
    }
    best
}

/// Euclidean clearance from `p` to the nearest obstacle.
pub fn clearance(env: &Environment, p: Vec2) -> f64 {
    dist_q_env(&SymMat2::IDENTITY, p, env).dist
}

fn ray_circle(origin: Vec2, dir: Vec2, c: &Circle) -> Option<f64> {
    let m = origin - c.center;
    let b = m.dot(dir);
    let cc = m.norm_sq() - c.radius * c.radius;
    let disc = b * b - cc;
    if disc < 0.0 {
        return None;
    }
    let sq = disc.sqrt();
    [-b - sq, -b + sq].into_iter().find(|&t| t > CONTACT_TOLERANCE)
}

fn ray_segment(origin: Vec2, dir: Vec2, s: &Segment) -> Option<f64> {
    let e = s.b - s.a;
    let denom = dir.cross(e);
    let w = s.a - origin;
    if denom.abs() <= 1e-15 * e.norm() {
        // Parallel: only a collinear overlap can be hit; take the nearest endpoint ahead.
        if w.cross(dir).abs() > CONTACT_TOLERANCE {
            return None;
        }
        let ta = w.dot(dir);
        let tb = (s.b - origin).dot(dir);
        return [ta.min(tb), ta.max(tb)].into_iter().find(|&t| t > CONTACT_TOLERANCE);
    }
    let t = w.cross(e) / denom;
    let u = w.cross(dir) / denom;
    (t > CONTACT_TOLERANCE && (-CONTACT_TOLERANCE..=1.0 + CONTACT_TOLERANCE).contains(&u)).then_some(t)
}

fn ray_point(origin: Vec2, dir: Vec2, p: Vec2) -> Option<f64> {
    let w = p - origin;
    let t = w.dot(dir);
    (t > CONTACT_TOLERANCE && w.cross(dir).abs() <= CONTACT_TOLERANCE).then_some(t)
}

/// Range to the first obstacle boundary along the beam, or `max_range` on a miss.
pub fn raycast(env: &Environment, origin: Vec2, angle: f64, max_range: f64) -> f64 {
    let dir = Vec2::from_angle(angle);
    let mut best = max_range;
    for obstacle in &env.obstacles {
        let hit = match obstacle {
            Obstacle::Circle(c) => ray_circle(origin, dir, c),
            Obstacle::Segment(s) => ray_segment(origin, dir, s),
            Obstacle::PointCloud(points) => {
                points.iter().filter_map(|&p| ray_point(origin, dir, p)).reduce(f64::min)
            }
        };
        if let Some(t) = hit {
            best = best.min(t);
        }
    }
    best
}

/// True iff `p` is strictly outside every obstacle.
pub fn free_space_contains(env: &Environment, p: Vec2) -> bool {
    env.obstacles.iter().all(|o| !o.contains(p))
}

/// True iff the straight motion from `p0` to `p1` touches an obstacle.
pub fn segment_collides(env: &Environment, p0: Vec2, p1: Vec2) -> bool {
    if !free_space_contains(env, p0) || !free_space_contains(env, p1) {
        return true;
    }
    let len = p0.distance(p1);
    if len == 0.0 {
        return false;
    }
    let dir = (p1 - p0) * (1.0 / len);
    raycast(env, p0, dir.y.atan2(dir.x), len) < len
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::FRAC_PI_2;

    fn bounds() -> Bounds {
        Bounds::new(Vec2::new(-10.0, -10.0), Vec2::new(10.0, 10.0)).unwrap()
    }

    #[test]
    fn point_distances() {
        assert_eq!(dist_q_point(&SymMat2::IDENTITY, Vec2::ZERO, Vec2::new(3.0, 4.0)), 5.0);
        assert_eq!(dist_q_point(&SymMat2::diag(1.0, 4.0), Vec2::ZERO, Vec2::new(0.0, 1.0)), 2.0);
    }

    #[test]
    fn lateral_wall_in_directional_metric() {
        // Moving along (1, 1)/√2 with a wall parallel to the motion through (0.5, −0.5).
        let q = crate::metric::directional_matrix(Vec2::new(1.0, 1.0), 1.0, 4.0).unwrap().q;
        let wall = Segment::new(Vec2::new(-1.0, -2.0), Vec2::new(2.0, 1.0));
        let (_, witness) = dist_q_segment(&SymMat2::IDENTITY, Vec2::ZERO, &wall);
        assert_abs_diff_eq!(witness.norm(), 0.5f64.sqrt(), epsilon = 1e-12);
        assert_abs_diff_eq!(dist_q_point(&q, Vec2::ZERO, witness), 2f64.sqrt(), epsilon = 1e-12);
        // The lateral wall is also the Q-nearest point of that wall.
        let (d, w) = dist_q_segment(&q, Vec2::ZERO, &wall);
        assert_abs_diff_eq!(d, 2f64.sqrt(), epsilon = 1e-12);
        assert_abs_diff_eq!(w.distance(witness), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn segment_distances() {
        let seg = Segment::new(Vec2::new(-1.0, 0.0), Vec2::new(1.0, 0.0));
        assert_eq!(dist_q_segment(&SymMat2::IDENTITY, Vec2::new(0.0, 1.0), &seg), (1.0, Vec2::ZERO));
        assert_eq!(dist_q_segment(&SymMat2::diag(1.0, 4.0), Vec2::new(0.0, 1.0), &seg), (2.0, Vec2::ZERO));
        assert_eq!(dist_q_segment(&SymMat2::IDENTITY, Vec2::new(2.0, 0.0), &seg), (1.0, Vec2::new(1.0, 0.0)));
    }

    #[test]
    fn circle_distances() {
        let unit = Circle { center: Vec2::ZERO, radius: 1.0 };
        let (d, w) = dist_q_circle(&SymMat2::IDENTITY, Vec2::new(3.0, 0.0), &unit);
        assert_abs_diff_eq!(d, 2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(w.x, 1.0, epsilon = 1e-12);

        let (d, _) = dist_q_circle(&SymMat2::scaled_identity(4.0), Vec2::new(2.0, 2.0), &unit);
        assert_abs_diff_eq!(d, 2.0 * (8f64.sqrt() - 1.0), epsilon = 1e-10);

        let (d, w) = dist_q_circle(&SymMat2::diag(1.0, 4.0), Vec2::new(0.0, 3.0), &unit);
        assert_abs_diff_eq!(d, 4.0, epsilon = 1e-10);
        assert_abs_diff_eq!(w.y, 1.0, epsilon = 1e-10);

        let inside = Vec2::new(0.2, 0.1);
        assert_eq!(dist_q_circle(&SymMat2::IDENTITY, inside, &unit), (0.0, inside));
    }

    #[test]
    fn environment_queries() {
        let env = Environment::empty(bounds());
        let prox = dist_q_env(&SymMat2::IDENTITY, Vec2::ZERO, &env);
        assert_eq!(prox.dist, f64::INFINITY);
        assert_eq!(prox.obstacle, None);
        assert!(free_space_contains(&env, Vec2::new(1.0, 1.0)));

        let single = Environment::new(vec![Obstacle::point_cloud(vec![Vec2::new(3.0, 4.0)]).unwrap()], bounds());
        let q = SymMat2::new(2.0, 0.5, 1.0);
        assert_eq!(dist_q_env(&q, Vec2::ZERO, &single).dist, dist_q_point(&q, Vec2::ZERO, Vec2::new(3.0, 4.0)));
    }

    #[test]
    fn raycasts() {
        let env = Environment::new(
            vec![
                Obstacle::circle(Vec2::new(5.0, 0.0), 1.0).unwrap(),
                Obstacle::segment(Vec2::new(-1.0, 2.0), Vec2::new(1.0, 2.0)).unwrap(),
            ],
            bounds(),
        );
        assert_abs_diff_eq!(raycast(&env, Vec2::ZERO, 0.0, 10.0), 4.0, epsilon = 1e-12);
        assert_abs_diff_eq!(raycast(&env, Vec2::ZERO, FRAC_PI_2, 10.0), 2.0, epsilon = 1e-12);
        assert_eq!(raycast(&env, Vec2::ZERO, std::f64::consts::PI, 10.0), 10.0);
    }

    #[test]
    fn free_space_predicate() {
        let env = Environment::new(
            vec![
                Obstacle::circle(Vec2::ZERO, 1.0).unwrap(),
                Obstacle::segment(Vec2::new(2.0, -1.0), Vec2::new(2.0, 1.0)).unwrap(),
            ],
            bounds(),
        );
        assert!(!free_space_contains(&env, Vec2::new(0.5, 0.0)));
        assert!(!free_space_contains(&env, Vec2::new(2.0 + 1e-12, 0.3)));
        assert!(free_space_contains(&env, Vec2::new(1.5, 0.0)));
        assert!(segment_collides(&env, Vec2::new(1.5, 0.0), Vec2::new(2.5, 0.0)));
        assert!(!segment_collides(&env, Vec2::new(1.5, 0.0), Vec2::new(1.5, 0.9)));
    }

    #[test]
    fn invalid_obstacles() {
        assert!(Obstacle::circle(Vec2::ZERO, 0.0).is_err());
        assert!(Obstacle::segment(Vec2::ZERO, Vec2::ZERO).is_err());
        assert!(Obstacle::point_cloud(vec![]).is_err());
        assert!(Bounds::new(Vec2::ZERO, Vec2::new(0.0, 1.0)).is_err());
    }
}
