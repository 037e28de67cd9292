//! Run summaries and comparison tables.

use std::fmt::Write as _;

use sddm_core::simulator::{Controller, Status, TrajectoryLog};

#[derive(Debug, Clone, PartialEq)]
pub struct RunReport {
    pub controller: Controller,
    pub status: Status,
    pub completion_time: f64,
    /// Distance traveled by the robot.
    pub path_length: f64,
    pub mean_speed: f64,
    pub max_speed: f64,
    pub min_clearance: f64,
    pub min_delta_e: f64,
    /// Rows where `eta` exceeded `delta` by more than `1e-9`.
    pub bound_violations: usize,
}

impl RunReport {
    pub fn from_log(log: &TrajectoryLog) -> Self {
        let rows = &log.rows;
        let speeds: Vec<f64> = rows.iter().map(|r| r.robot_vel.norm()).collect();
        let path_length = rows.windows(2).map(|w| w[0].robot_pos.distance(w[1].robot_pos)).sum();
        Self {
            controller: log.controller,
            status: log.status,
            completion_time: log.final_time(),
            path_length,
            mean_speed: if speeds.is_empty() { 0.0 } else { speeds.iter().sum::<f64>() / speeds.len() as f64 },
            max_speed: speeds.iter().copied().fold(0.0, f64::max),
            min_clearance: rows.iter().map(|r| r.dist_euclid).fold(f64::INFINITY, f64::min),
            min_delta_e: rows.iter().map(|r| r.delta_e).fold(f64::INFINITY, f64::min),
            bound_violations: rows.iter().filter(|r| r.eta > r.delta + 1e-9).count(),
        }
    }

    fn fields(&self) -> [(&'static str, String); 9] {
        [
            ("controller", self.controller.to_string()),
            ("status", self.status.to_string()),
            ("completion_time_s", format!("{:.3}", self.completion_time)),
            ("path_length_m", format!("{:.3}", self.path_length)),
            ("mean_speed_mps", format!("{:.4}", self.mean_speed)),
            ("max_speed_mps", format!("{:.4}", self.max_speed)),
            ("min_clearance_m", format!("{:.4}", self.min_clearance)),
            ("min_delta_e", format!("{:.4}", self.min_delta_e)),
            ("bound_violations", self.bound_violations.to_string()),
        ]
    }

    pub fn to_text(&self, scenario: &str) -> String {
        let mut out = format!("scenario: {scenario}\n");
        for (k, v) in self.fields() {
            let _ = writeln!(out, "{k}: {v}");
        }
        out
    }
}

/// Side-by-side table of several runs.
pub fn comparison_text(scenario: &str, reports: &[RunReport]) -> String {
    let mut out = format!("scenario: {scenario}\n");
    let columns: Vec<[(&str, String); 9]> = reports.iter().map(RunReport::fields).collect();
    for i in 0..9 {
        let _ = write!(out, "{:<18}", columns.first().map_or("", |c| c[i].0));
        for c in &columns {
            let _ = write!(out, " {:>16}", c[i].1);
        }
        out.push('\n');
    }
    if let Some(r) = completion_ratio(reports) {
        let _ = writeln!(out, "completion_time_ratio: {r:.4}");
    }
    out
}

/// `time(first) / time(second)` when both reached the goal.
pub fn completion_ratio(reports: &[RunReport]) -> Option<f64> {
    match reports {
        [a, b, ..] if a.status == Status::GoalReached && b.status == Status::GoalReached => {
            Some(a.completion_time / b.completion_time)
        }
        _ => None,
    }
}

pub fn comparison_csv(reports: &[RunReport]) -> String {
    let mut out = String::from(
        "controller,status,completion_time,path_length,mean_speed,max_speed,min_clearance,min_delta_e,bound_violations\n",
    );
    for r in reports {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{}",
            r.controller,
            r.status,
            r.completion_time,
            r.path_length,
            r.mean_speed,
            r.max_speed,
            r.min_clearance,
            r.min_delta_e,
            r.bound_violations
        );
    }
    out
}
