//! Subcommand implementations. Each returns the process exit code.

use std::fs;
use std::path::Path;

use sddm_core::simulator::{run, Controller, Scenario, Status, TrajectoryLog};

use crate::boundcheck;
use crate::report::{comparison_csv, comparison_text, completion_ratio, RunReport};
use crate::scenario_file::{ParseError, ScenarioFile};
use crate::svg;

pub const EXIT_OK: u8 = 0;
/// I/O failures and numerical breakdowns during a run.
pub const EXIT_INTERNAL: u8 = 1;
pub const EXIT_INPUT: u8 = 2;
pub const EXIT_COLLISION: u8 = 3;
pub const EXIT_TIMEOUT: u8 = 4;
pub const EXIT_INFEASIBLE: u8 = 5;
pub const EXIT_BOUND_VIOLATION: u8 = 6;

pub fn status_code(status: Status) -> u8 {
    match status {
        Status::GoalReached => EXIT_OK,
        Status::Collision => EXIT_COLLISION,
        Status::Timeout => EXIT_TIMEOUT,
        Status::NoFeasibleAlpha => EXIT_INFEASIBLE,
    }
}

fn report_code(r: &RunReport) -> u8 {
    match status_code(r.status) {
        EXIT_OK if r.bound_violations > 0 => EXIT_BOUND_VIOLATION,
        code => code,
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct Overrides {
    pub dt: Option<f64>,
    pub controller: Option<Controller>,
    pub seed: Option<u64>,
}

/// Parses, applies overrides, then validates.
pub fn load(file: &Path, overrides: Overrides) -> Result<Scenario, ParseError> {
    let mut sc = ScenarioFile::load(file)?.build(overrides.seed)?;
    if let Some(dt) = overrides.dt {
        sc.dt = dt;
    }
    if let Some(c) = overrides.controller {
        sc.controller = c;
    }
    sc.check().map_err(|e| ParseError { line: 0, message: e.to_string() })?;
    Ok(sc)
}

fn write_files(out: &Path, files: &[(&str, &str)]) -> std::io::Result<()> {
    fs::create_dir_all(out)?;
    for (name, content) in files {
        fs::write(out.join(name), content)?;
    }
    Ok(())
}

fn simulate(sc: &Scenario) -> Result<TrajectoryLog, u8> {
    run(sc).map_err(|e| {
        eprintln!("error: simulation of '{}' failed: {e}", sc.name);
        EXIT_INTERNAL
    })
}

pub fn cmd_run(file: &Path, out: &Path, overrides: Overrides) -> u8 {
    let sc = match load(file, overrides) {
        Ok(sc) => sc,
        Err(e) => {
            eprintln!("error: {}: {e}", file.display());
            return EXIT_INPUT;
        }
    };
    let log = match simulate(&sc) {
        Ok(log) => log,
        Err(code) => return code,
    };
    let report = RunReport::from_log(&log);
    let text = report.to_text(&sc.name);
    let plot = svg::run_plot(&sc.name, &sc.env, &log, &sc.params, sc.goal());
    let csv = log.to_csv();
    if let Err(e) = write_files(out, &[("trajectory.csv", &csv), ("report.txt", &text), ("plot.svg", &plot)]) {
        eprintln!("error: writing to {}: {e}", out.display());
        return EXIT_INTERNAL;
    }
    print!("{text}");
    report_code(&report)
}

pub fn cmd_compare(file: &Path, out: &Path, seed: Option<u64>) -> u8 {
    let sc = match load(file, Overrides { seed, ..Default::default() }) {
        Ok(sc) => sc,
        Err(e) => {
            eprintln!("error: {}: {e}", file.display());
            return EXIT_INPUT;
        }
    };
    let sddm = sc.clone().with_controller(Controller::Sddm);
    let euclid = sc.clone().with_controller(Controller::EuclideanEnergy);
    let (a, b) = rayon::join(|| simulate(&sddm), || simulate(&euclid));
    let (a, b) = match (a, b) {
        (Ok(a), Ok(b)) => (a, b),
        (Err(code), _) | (_, Err(code)) => return code,
    };
    let reports = [RunReport::from_log(&a), RunReport::from_log(&b)];
    let text = comparison_text(&sc.name, &reports);
    let plot = svg::comparison_plot(&sc.name, &sc.env, &[&a, &b], sc.goal());
    let files = [
        ("trajectory_sddm.csv", a.to_csv()),
        ("trajectory_euclid.csv", b.to_csv()),
        ("comparison.csv", comparison_csv(&reports)),
        ("report.txt", text.clone()),
        ("plot.svg", plot),
    ];
    let refs: Vec<(&str, &str)> = files.iter().map(|(n, c)| (*n, c.as_str())).collect();
    if let Err(e) = write_files(out, &refs) {
        eprintln!("error: writing to {}: {e}", out.display());
        return EXIT_INTERNAL;
    }
    print!("{text}");
    if completion_ratio(&reports).is_none() {
        println!("completion_time_ratio: n/a");
    }
    reports.iter().map(report_code).find(|&c| c != EXIT_OK).unwrap_or(EXIT_OK)
}

pub fn cmd_boundcheck(count: usize, seed: u64, out: &Path) -> u8 {
    if count == 0 {
        eprintln!("error: --count must be at least 1");
        return EXIT_INPUT;
    }
    let rows = match boundcheck::sweep(count, seed) {
        Ok(rows) => rows,
        Err(e) => {
            eprintln!("error: bound sweep failed: {e}");
            return EXIT_INTERNAL;
        }
    };
    let s = boundcheck::summarize(&rows);
    let summary = format!(
        "cases: {}\nviolations: {}\nmedian_ratio: {:.4}\nmax_ratio: {:.4}\nmax_oracle_gap: {:.3e}\n",
        s.cases, s.violations, s.median_ratio, s.max_ratio, s.max_oracle_gap
    );
    if let Err(e) = write_files(out, &[("boundcheck.csv", &boundcheck::to_csv(&rows)), ("summary.txt", &summary)]) {
        eprintln!("error: writing to {}: {e}", out.display());
        return EXIT_INTERNAL;
    }
    print!("{summary}");
    for r in rows.iter().filter(|r| !r.ordered()) {
        eprintln!(
            "violation in case {}: k={} zeta={} q=[{}, {}; {}, {}] s0=({}, {}, {}, {}) sampled={} eta={} delta={}",
            r.case.index,
            r.case.gains.k,
            r.case.gains.zeta,
            r.case.q.a11,
            r.case.q.a12,
            r.case.q.a12,
            r.case.q.a22,
            r.case.s0.pos_err.x,
            r.case.s0.pos_err.y,
            r.case.s0.vel.x,
            r.case.s0.vel.y,
            r.sampled,
            r.eta,
            r.delta
        );
    }
    if s.median_ratio > boundcheck::MEDIAN_RATIO_GATE {
        eprintln!("median ratio {:.4} exceeds {}", s.median_ratio, boundcheck::MEDIAN_RATIO_GATE);
    }
    if s.passes() {
        EXIT_OK
    } else {
        EXIT_BOUND_VIOLATION
    }
}
