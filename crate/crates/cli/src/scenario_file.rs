//! Line-oriented scenario files.
//!
//! ```text
//! file    := line*
//! line    := blank | comment | section | entry
//! comment := '#' any*
//! section := '[' name ']'
//! entry   := key '=' value
//! value   := word (whitespace word)*
//! ```
//!
//! Sections and their keys (`*` marks keys that may repeat):
//!
//! | section        | keys |
//! |----------------|------|
//! | `[scenario]`   | `name`, `controller` (`sddm`/`euclid`), `dt`, `t_max`, `seed`, `validate` (`true`/`false`) |
//! | `[controller]` | `k`, `zeta` (number or `critical`), `kg`, `c1`, `c2`, `bound` (`analytic`/`relaxed`) |
//! | `[workspace]`  | `min = x y`, `max = x y` |
//! | `[obstacles]`  | `circle* = x y r`, `segment* = x1 y1 x2 y2`, `rect* = x0 y0 x1 y1` (four segments), `points* = x y x y …` |
//! | `[scatter]`    | `count`, `radius = rmin rmax`, `clearance`: seeded random circles kept clear of the path |
//! | `[path]`       | `waypoint* = x y` |
//! | `[initial]`    | `robot = x y`, `velocity = vx vy`, `governor = x y` |
//! | `[mapping]`    | `goal = x y`, `beams`, `max_range`, `resolution`, `inflation`, `scan_period`, `replan_period` |
//!
//! Exactly one of `[path]` and `[mapping]` must be present. Without
//! `[initial]`, robot and governor start at rest at the first waypoint.
//! Lengths are meters, times seconds, angles radians.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use sddm_core::environment::{Bounds, Environment, Obstacle};
use sddm_core::governor::{BoundMode, ControllerParams, PathSpec, RobotGovernorState};
use sddm_core::metric::Vec2;
use sddm_core::simulator::{scatter_circles, Controller, MappingConfig, Route, Scenario, DEFAULT_DT, DEFAULT_T_MAX};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    /// 1-based line number; 0 for errors not tied to a line.
    pub line: usize,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.line > 0 {
            write!(f, "line {}: {}", self.line, self.message)
        } else {
            f.write_str(&self.message)
        }
    }
}

impl std::error::Error for ParseError {}

fn err<T>(line: usize, message: impl Into<String>) -> Result<T, ParseError> {
    Err(ParseError { line, message: message.into() })
}

const SCHEMA: &[(&str, &[&str])] = &[
    ("scenario", &["name", "controller", "dt", "t_max", "seed", "validate"]),
    ("controller", &["k", "zeta", "kg", "c1", "c2", "bound"]),
    ("workspace", &["min", "max"]),
    ("obstacles", &["circle", "segment", "rect", "points"]),
    ("scatter", &["count", "radius", "clearance"]),
    ("path", &["waypoint"]),
    ("initial", &["robot", "velocity", "governor"]),
    ("mapping", &["goal", "beams", "max_range", "resolution", "inflation", "scan_period", "replan_period"]),
];

const REPEATABLE: &[&str] = &["circle", "segment", "rect", "points", "waypoint"];

#[derive(Debug, Clone, PartialEq)]
struct Entry {
    line: usize,
    value: String,
}

impl Entry {
    fn numbers(&self) -> Result<Vec<f64>, ParseError> {
        self.value
            .split_whitespace()
            .map(|w| match w.parse::<f64>() {
                Ok(x) if x.is_finite() => Ok(x),
                _ => err(self.line, format!("'{w}' is not a finite number")),
            })
            .collect()
    }

    fn fixed<const N: usize>(&self) -> Result<[f64; N], ParseError> {
        let v = self.numbers()?;
        v.clone().try_into().or_else(|_| err(self.line, format!("expected {N} numbers, got {}", v.len())))
    }

    fn number(&self) -> Result<f64, ParseError> {
        Ok(self.fixed::<1>()?[0])
    }

    fn vec2(&self) -> Result<Vec2, ParseError> {
        let [x, y] = self.fixed::<2>()?;
        Ok(Vec2::new(x, y))
    }

    fn integer(&self) -> Result<u64, ParseError> {
        self.value.parse().or_else(|_| err(self.line, format!("'{}' is not a non-negative integer", self.value)))
    }
}

/// Parsed but not yet assembled scenario: sections of keyed entries.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ScenarioFile {
    sections: BTreeMap<String, (usize, BTreeMap<String, Vec<Entry>>)>,
}

impl ScenarioFile {
    pub fn parse(text: &str) -> Result<Self, ParseError> {
        let mut file = ScenarioFile::default();
        let mut current: Option<String> = None;
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            if let Some(rest) = content.strip_prefix('[') {
                let Some(name) = rest.strip_suffix(']') else {
                    return err(line, "section header is missing ']'");
                };
                let name = name.trim();
                if !SCHEMA.iter().any(|(s, _)| *s == name) {
                    return err(line, format!("unknown section [{name}]"));
                }
                if file.sections.contains_key(name) {
                    return err(line, format!("section [{name}] appears twice"));
                }
                file.sections.insert(name.to_string(), (line, BTreeMap::new()));
                current = Some(name.to_string());
                continue;
            }
            let Some((key, value)) = content.split_once('=') else {
                return err(line, "expected 'key = value'");
            };
            let (key, value) = (key.trim(), value.trim());
            let Some(section) = current.as_ref() else {
                return err(line, "entry before any section header");
            };
            let allowed = SCHEMA.iter().find(|(s, _)| s == section).unwrap().1;
            if !allowed.contains(&key) {
                return err(line, format!("unknown key '{key}' in [{section}]"));
            }
            if value.is_empty() {
                return err(line, format!("key '{key}' has no value"));
            }
            let entries = file.sections.get_mut(section).unwrap().1.entry(key.to_string()).or_default();
            if !entries.is_empty() && !REPEATABLE.contains(&key) {
                return err(line, format!("key '{key}' given twice"));
            }
            entries.push(Entry { line, value: value.to_string() });
        }
        Ok(file)
    }

    pub fn load(path: &Path) -> Result<Self, ParseError> {
        let text = std::fs::read_to_string(path)
            .or_else(|e| err(0, format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    fn has(&self, section: &str) -> bool {
        self.sections.contains_key(section)
    }

    fn section_line(&self, section: &str) -> usize {
        self.sections.get(section).map_or(0, |s| s.0)
    }

    fn one(&self, section: &str, key: &str) -> Option<&Entry> {
        self.sections.get(section).and_then(|s| s.1.get(key)).and_then(|v| v.first())
    }

    fn all(&self, section: &str, key: &str) -> &[Entry] {
        self.sections.get(section).and_then(|s| s.1.get(key)).map_or(&[], |v| v.as_slice())
    }

    /// Entries of `section` in file order, across keys.
    fn ordered(&self, section: &str) -> Vec<(&str, &Entry)> {
        let mut out: Vec<(&str, &Entry)> = self
            .sections
            .get(section)
            .map(|s| s.1.iter().flat_map(|(k, v)| v.iter().map(move |e| (k.as_str(), e))).collect())
            .unwrap_or_default();
        out.sort_by_key(|(_, e)| e.line);
        out
    }

    fn number_or(&self, section: &str, key: &str, default: f64) -> Result<f64, ParseError> {
        self.one(section, key).map_or(Ok(default), Entry::number)
    }

    /// Assembles the scenario; `seed` overrides the file's seed.
    pub fn build(&self, seed: Option<u64>) -> Result<Scenario, ParseError> {
        let seed = match seed {
            Some(s) => s,
            None => self.one("scenario", "seed").map_or(Ok(0), Entry::integer)?,
        };
        let name = self.one("scenario", "name").map_or("scenario".to_string(), |e| e.value.clone());

        let (Some(min), Some(max)) = (self.one("workspace", "min"), self.one("workspace", "max")) else {
            return err(self.section_line("workspace"), "[workspace] needs min and max");
        };
        let bounds = Bounds::new(min.vec2()?, max.vec2()?)
            .or_else(|e| err(max.line, e.to_string()))?;

        let mut obstacles = Vec::new();
        for (key, e) in self.ordered("obstacles") {
            let built = match key {
                "circle" => {
                    let [x, y, r] = e.fixed::<3>()?;
                    vec![Obstacle::circle(Vec2::new(x, y), r)]
                }
                "segment" => {
                    let [x1, y1, x2, y2] = e.fixed::<4>()?;
                    vec![Obstacle::segment(Vec2::new(x1, y1), Vec2::new(x2, y2))]
                }
                "rect" => {
                    let [x0, y0, x1, y1] = e.fixed::<4>()?;
                    let c = [Vec2::new(x0, y0), Vec2::new(x1, y0), Vec2::new(x1, y1), Vec2::new(x0, y1)];
                    (0..4).map(|i| Obstacle::segment(c[i], c[(i + 1) % 4])).collect()
                }
                _ => {
                    let v = e.numbers()?;
                    if v.is_empty() || v.len() % 2 != 0 {
                        return err(e.line, "points needs an even, non-zero count of coordinates");
                    }
                    vec![Obstacle::point_cloud(v.chunks(2).map(|c| Vec2::new(c[0], c[1])).collect())]
                }
            };
            for o in built {
                obstacles.push(o.or_else(|x| err(e.line, x.to_string()))?);
            }
        }

        let route = match (self.has("path"), self.has("mapping")) {
            (true, true) => return err(self.section_line("mapping"), "[path] and [mapping] are mutually exclusive"),
            (false, false) => return err(0, "scenario needs a [path] or a [mapping] section"),
            (true, false) => {
                let wps = self.all("path", "waypoint").iter().map(Entry::vec2).collect::<Result<Vec<_>, _>>()?;
                let line = self.section_line("path");
                Route::Path(PathSpec::new(wps).or_else(|e| err(line, e.to_string()))?)
            }
            (false, true) => {
                let line = self.section_line("mapping");
                let goal = self.one("mapping", "goal").ok_or(ParseError { line, message: "[mapping] needs goal".into() })?;
                let mut m = MappingConfig::new(goal.vec2()?);
                if let Some(b) = self.one("mapping", "beams") {
                    m.beams = b.integer()? as usize;
                }
                m.max_range = self.number_or("mapping", "max_range", m.max_range)?;
                m.resolution = self.number_or("mapping", "resolution", m.resolution)?;
                m.inflation = self.number_or("mapping", "inflation", m.inflation)?;
                m.scan_period = self.number_or("mapping", "scan_period", m.scan_period)?;
                m.replan_period = self.number_or("mapping", "replan_period", m.replan_period)?;
                Route::Mapping(m)
            }
        };

        if self.has("scatter") {
            let line = self.section_line("scatter");
            let Route::Path(path) = &route else {
                return err(line, "[scatter] needs a [path] to keep clear of");
            };
            let count = self.one("scatter", "count").map_or(Ok(0), Entry::integer)? as usize;
            let radius = match self.one("scatter", "radius") {
                Some(e) => {
                    let [a, b] = e.fixed::<2>()?;
                    (a, b)
                }
                None => (0.5, 1.0),
            };
            let clearance = self.number_or("scatter", "clearance", 0.5)?;
            let circles = scatter_circles(seed, count, radius, clearance, &bounds, path).or_else(|e| err(line, e.to_string()))?;
            obstacles.extend(circles);
        }

        let initial = {
            let start = match &route {
                Route::Path(p) => Some(p.start()),
                Route::Mapping(_) => None,
            };
            let robot = match self.one("initial", "robot") {
                Some(e) => e.vec2()?,
                None => start.ok_or(ParseError { line: 0, message: "mapping scenarios need [initial] robot".into() })?,
            };
            let velocity = self.one("initial", "velocity").map_or(Ok(Vec2::ZERO), Entry::vec2)?;
            let governor = self.one("initial", "governor").map_or(Ok(robot), Entry::vec2)?;
            RobotGovernorState::new(robot, velocity, governor)
        };

        let mut params = ControllerParams::default();
        params.k = self.number_or("controller", "k", params.k)?;
        params.zeta = match self.one("controller", "zeta") {
            Some(e) if e.value == "critical" => (8.0 * params.k).sqrt(),
            Some(e) => e.number()?,
            None => (8.0 * params.k).sqrt(),
        };
        params.kg = self.number_or("controller", "kg", params.kg)?;
        params.c1 = self.number_or("controller", "c1", params.c1)?;
        params.c2 = self.number_or("controller", "c2", params.c2)?;
        if let Some(e) = self.one("controller", "bound") {
            params.bound_mode = match e.value.as_str() {
                "analytic" => BoundMode::Analytic,
                "relaxed" => BoundMode::Relaxed,
                other => return err(e.line, format!("unknown bound '{other}' (expected analytic or relaxed)")),
            };
        }

        let controller = match self.one("scenario", "controller") {
            Some(e) => e.value.parse::<Controller>().or_else(|x| err(e.line, x.to_string()))?,
            None => Controller::Sddm,
        };
        let validate = match self.one("scenario", "validate") {
            Some(e) => match e.value.as_str() {
                "true" => true,
                "false" => false,
                _ => return err(e.line, "validate must be true or false"),
            },
            None => true,
        };

        let mut sc = Scenario::new(name, Environment::new(obstacles, bounds), route, initial);
        sc.params = params;
        sc.dt = self.number_or("scenario", "dt", DEFAULT_DT)?;
        sc.t_max = self.number_or("scenario", "t_max", DEFAULT_T_MAX)?;
        sc.controller = controller;
        sc.validate = validate;
        sc.seed = seed;
        Ok(sc)
    }
}

/// Parses, assembles and validates a scenario file.
pub fn load_scenario(path: &Path, seed: Option<u64>) -> Result<Scenario, ParseError> {
    let sc = ScenarioFile::load(path)?.build(seed)?;
    sc.check().or_else(|e| err(0, e.to_string()))?;
    Ok(sc)
}
