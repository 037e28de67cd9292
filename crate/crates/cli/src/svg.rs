//! SVG plots of runs: obstacles, paths, trajectories, safe zones and velocity ticks.

use std::fmt::Write as _;

use sddm_core::environment::{Environment, Obstacle};
use sddm_core::governor::ControllerParams;
use sddm_core::metric::{directional_matrix, Ellipsoid, SymMat2, Vec2};
use sddm_core::planner::{CellState, OccupancyGrid};
use sddm_core::simulator::{Controller, LogRow, TrajectoryLog};

const ZONES_PER_RUN: usize = 30;
const ARROWS_PER_RUN: usize = 120;
const TRAJECTORY_POINTS: usize = 2000;
/// Speed tick length per unit speed, in meters per (m/s).
const TICK_SCALE: f64 = 0.5;

pub struct Plot {
    body: String,
    env: Environment,
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

fn polyline(points: impl Iterator<Item = Vec2>) -> String {
    points.map(|p| format!("{:.4},{:.4}", p.x, p.y)).collect::<Vec<_>>().join(" ")
}

fn stride(len: usize, wanted: usize) -> usize {
    (len / wanted.max(1)).max(1)
}

/// Zone metric of a logged sample.
fn zone_metric(controller: Controller, row: &LogRow, params: &ControllerParams) -> SymMat2 {
    match controller {
        Controller::Sddm => directional_matrix(row.gov_pos - row.robot_pos, params.c1, params.c2)
            .map(|d| d.q)
            .unwrap_or(SymMat2::IDENTITY),
        Controller::EuclideanEnergy => SymMat2::IDENTITY,
    }
}

impl Plot {
    pub fn new(env: &Environment) -> Self {
        Self { body: String::new(), env: env.clone() }
    }

    pub fn grid(&mut self, grid: &OccupancyGrid) {
        let r = grid.resolution();
        let _ = writeln!(self.body, r##"<g id="grid" stroke="none">"##);
        for (c, s) in grid.cells() {
            let fill = match s {
                CellState::Unknown => continue,
                CellState::Free => "#f4f4f4",
                CellState::Occupied => "#222222",
            };
            let o = grid.center(c) - Vec2::new(r / 2.0, r / 2.0);
            let _ = writeln!(self.body, r#"<rect x="{:.4}" y="{:.4}" width="{r}" height="{r}" fill="{fill}"/>"#, o.x, o.y);
        }
        self.body.push_str("</g>\n");
    }

    pub fn obstacles(&mut self) {
        self.body.push_str("<g id=\"obstacles\" fill=\"#555555\" stroke=\"#c0392b\">\n");
        for o in &self.env.obstacles {
            let _ = match o {
                Obstacle::Circle(c) => writeln!(
                    self.body,
                    r#"<circle cx="{:.4}" cy="{:.4}" r="{:.4}" stroke="none"/>"#,
                    c.center.x, c.center.y, c.radius
                ),
                Obstacle::Segment(s) => writeln!(
                    self.body,
                    r#"<line x1="{:.4}" y1="{:.4}" x2="{:.4}" y2="{:.4}" stroke-width="0.08"/>"#,
                    s.a.x, s.a.y, s.b.x, s.b.y
                ),
                Obstacle::PointCloud(points) => {
                    for p in points {
                        let _ = writeln!(self.body, r#"<circle cx="{:.4}" cy="{:.4}" r="0.04" stroke="none"/>"#, p.x, p.y);
                    }
                    Ok(())
                }
            };
        }
        self.body.push_str("</g>\n");
    }

    pub fn paths(&mut self, log: &TrajectoryLog) {
        self.body.push_str("<g id=\"paths\" fill=\"none\" stroke=\"#1f3a93\" stroke-width=\"0.05\">\n");
        let n = log.paths.len();
        for (i, p) in log.paths.iter().enumerate() {
            let opacity = if i + 1 == n { 1.0 } else { 0.25 };
            let _ = writeln!(
                self.body,
                r#"<polyline points="{}" stroke-opacity="{opacity}"/>"#,
                polyline(p.waypoints().iter().copied())
            );
        }
        self.body.push_str("</g>\n");
    }

    pub fn zones(&mut self, log: &TrajectoryLog, params: &ControllerParams, color: &str) {
        let _ = writeln!(
            self.body,
            r#"<g id="zones-{}" fill="{color}" fill-opacity="0.12" stroke="{color}" stroke-width="0.02">"#,
            log.controller
        );
        for row in log.rows.iter().step_by(stride(log.rows.len(), ZONES_PER_RUN)) {
            let level = row.delta_e.max(0.0);
            if level == 0.0 || !level.is_finite() {
                continue;
            }
            let q = zone_metric(log.controller, row, params);
            let Ok(zone) = Ellipsoid::new(row.gov_pos, q, level) else { continue };
            let (major, minor, dir) = zone.semi_axes();
            let angle = dir.y.atan2(dir.x).to_degrees();
            let _ = writeln!(
                self.body,
                r#"<ellipse cx="{:.4}" cy="{:.4}" rx="{major:.4}" ry="{minor:.4}" transform="rotate({angle:.3} {:.4} {:.4})"/>"#,
                row.gov_pos.x, row.gov_pos.y, row.gov_pos.x, row.gov_pos.y
            );
        }
        self.body.push_str("</g>\n");
    }

    pub fn trajectory(&mut self, log: &TrajectoryLog, color: &str) {
        let rows = &log.rows;
        let step = stride(rows.len(), TRAJECTORY_POINTS);
        let pts = rows.iter().step_by(step).chain(rows.last()).map(|r| r.robot_pos);
        let _ = writeln!(
            self.body,
            r#"<polyline id="trajectory-{}" points="{}" fill="none" stroke="{color}" stroke-width="0.06"/>"#,
            log.controller,
            polyline(pts)
        );
        // Speed ticks perpendicular to the motion.
        let _ = writeln!(self.body, r##"<g id="speed-{}" stroke="#c026d3" stroke-width="0.03">"##, log.controller);
        for r in rows.iter().step_by(stride(rows.len(), ARROWS_PER_RUN)) {
            let speed = r.robot_vel.norm();
            if speed < 1e-6 {
                continue;
            }
            let tip = r.robot_pos + r.robot_vel.perp() * TICK_SCALE;
            let _ = writeln!(
                self.body,
                r#"<line x1="{:.4}" y1="{:.4}" x2="{:.4}" y2="{:.4}"/>"#,
                r.robot_pos.x, r.robot_pos.y, tip.x, tip.y
            );
        }
        self.body.push_str("</g>\n");
    }

    pub fn markers(&mut self, start: Vec2, goal: Vec2) {
        let _ = writeln!(self.body, r##"<circle cx="{:.4}" cy="{:.4}" r="0.2" fill="#e74c3c"/>"##, start.x, start.y);
        let _ = writeln!(self.body, r##"<circle cx="{:.4}" cy="{:.4}" r="0.2" fill="#27ae60"/>"##, goal.x, goal.y);
    }

    pub fn finish(self, title: &str) -> String {
        let b = self.env.bounds;
        let (w, h) = (b.width(), b.height());
        let px = 900.0;
        let scale = px / w.max(h);
        let mut out = String::new();
        let _ = writeln!(out, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
        let _ = writeln!(
            out,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{:.0}" height="{:.0}" viewBox="{} {} {} {}">"#,
            w * scale,
            h * scale,
            b.min.x,
            b.min.y,
            w,
            h
        );
        let _ = writeln!(out, "<title>{}</title>", escape(title));
        let _ = writeln!(
            out,
            r#"<rect x="{}" y="{}" width="{w}" height="{h}" fill="white" stroke="black" stroke-width="0.05"/>"#,
            b.min.x, b.min.y
        );
        let _ = writeln!(out, r#"<g transform="matrix(1 0 0 -1 0 {})">"#, b.min.y + b.max.y);
        out.push_str(&self.body);
        out.push_str("</g>\n</svg>\n");
        out
    }
}

/// Plot of a single run.
pub fn run_plot(title: &str, env: &Environment, log: &TrajectoryLog, params: &ControllerParams, goal: Vec2) -> String {
    let mut plot = Plot::new(env);
    if let Some(g) = &log.grid {
        plot.grid(g);
    }
    plot.obstacles();
    plot.paths(log);
    plot.zones(log, params, "#f1c40f");
    plot.trajectory(log, "#2e8b57");
    if let Some(first) = log.rows.first() {
        plot.markers(first.robot_pos, goal);
    }
    plot.finish(title)
}

/// Overlay of several runs of one scenario.
pub fn comparison_plot(title: &str, env: &Environment, logs: &[&TrajectoryLog], goal: Vec2) -> String {
    const COLORS: [&str; 4] = ["#2e8b57", "#e67e22", "#8e44ad", "#2980b9"];
    let mut plot = Plot::new(env);
    plot.obstacles();
    if let Some(first) = logs.first() {
        plot.paths(first);
    }
    for (log, color) in logs.iter().zip(COLORS.iter().cycle()) {
        plot.trajectory(log, color);
    }
    if let Some(first) = logs.first().and_then(|l| l.rows.first()) {
        plot.markers(first.robot_pos, goal);
    }
    plot.finish(title)
}
