//! Randomized check of the ordering `sampled peak ≤ η ≤ δ`.

use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use sddm_core::bounds::{
    build_double_integrator, exact_peak, relaxed_peak, ClosedLoopSystem, DoubleIntegratorGains, Mat4, StateVec,
};
use sddm_core::metric::{directional_matrix, SymMat2, Vec2};

pub const ORDERING_SLACK: f64 = 1e-9;
pub const MEDIAN_RATIO_GATE: f64 = 2.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundCase {
    pub index: usize,
    pub gains: DoubleIntegratorGains,
    pub q: SymMat2,
    pub s0: StateVec,
}

/// Case `index` of the sweep seeded by `seed`. Case 0 is the equilibrium.
pub fn random_case(seed: u64, index: usize) -> BoundCase {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    let k = rng.gen_range(0.25..4.0);
    let critical = (8.0_f64 * k).sqrt();
    let zeta = if rng.gen_bool(0.5) { critical } else { critical * rng.gen_range(0.6..1.8) };
    let c1 = rng.gen_range(0.5..2.0);
    let v = Vec2::from_angle(rng.gen_range(0.0..std::f64::consts::TAU));
    let q = directional_matrix(v, c1, c1 * rng.gen_range(1.5..6.0)).expect("valid gains").q;
    let mut draw = || Vec2::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
    let s0 = if index == 0 { StateVec::new(Vec2::ZERO, Vec2::ZERO) } else { StateVec::new(draw(), draw()) };
    let gains = DoubleIntegratorGains::new(k, zeta).expect("positive gains");
    BoundCase { index, gains, q, s0 }
}

/// Largest output sample on a uniform grid of step `1e-3 / ρ(Ā)` over
/// `[0, 40 / |Re λ|]`, then refined by golden section around the best sample.
pub fn sampled_peak(sys: &ClosedLoopSystem, s0: &StateVec) -> f64 {
    let s = s0.to_vector();
    let a: Mat4 = *sys.a_bar();
    let horizon = 40.0 / sys.spectral_abscissa().abs();
    let h = 1e-3 / sys.spectral_radius();
    let step = (a * h).exp();
    let n = (horizon / h).ceil() as usize;
    let (mut best, mut best_i) = (sys.output_form(&s), 0usize);
    let mut x = s;
    for i in 1..=n {
        x = step * x;
        let v = sys.output_form(&x);
        if v > best {
            best = v;
            best_i = i;
        }
    }
    let at = |t: f64| sys.output_form(&((a * t).exp() * s));
    let (mut lo, mut hi) = ((best_i.saturating_sub(1)) as f64 * h, (best_i + 1) as f64 * h);
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = hi - r * (hi - lo);
    let mut d = lo + r * (hi - lo);
    let (mut fc, mut fd) = (at(c), at(d));
    for _ in 0..80 {
        if fc > fd {
            hi = d;
            d = c;
            fd = fc;
            c = hi - r * (hi - lo);
            fc = at(c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + r * (hi - lo);
            fd = at(d);
        }
    }
    best.max(fc).max(fd)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundRow {
    pub case: BoundCase,
    pub sampled: f64,
    pub eta: f64,
    pub delta: f64,
}

impl BoundRow {
    pub fn ordered(&self) -> bool {
        self.sampled <= self.eta + ORDERING_SLACK && self.eta <= self.delta + ORDERING_SLACK
    }

    /// `δ / η`, or `None` at the equilibrium.
    pub fn ratio(&self) -> Option<f64> {
        (self.eta > 0.0).then(|| self.delta / self.eta)
    }

    /// `|sampled − η| / η`
    pub fn oracle_gap(&self) -> f64 {
        if self.eta > 0.0 {
            (self.sampled - self.eta).abs() / self.eta
        } else {
            self.sampled.abs()
        }
    }
}

pub fn evaluate(case: BoundCase) -> sddm_core::Result<BoundRow> {
    let sys = build_double_integrator(case.gains, &case.q)?;
    if case.s0.is_zero() {
        return Ok(BoundRow { case, sampled: 0.0, eta: 0.0, delta: 0.0 });
    }
    let eta = exact_peak(&sys, &case.s0)?.eta;
    let delta = relaxed_peak(&sys, &case.s0)?;
    Ok(BoundRow { case, sampled: sampled_peak(&sys, &case.s0), eta, delta })
}

/// Evaluates cases `0..count` in parallel; rows come back in case order.
pub fn sweep(count: usize, seed: u64) -> sddm_core::Result<Vec<BoundRow>> {
    (0..count).into_par_iter().map(|i| evaluate(random_case(seed, i))).collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepSummary {
    pub cases: usize,
    pub violations: usize,
    pub median_ratio: f64,
    pub max_ratio: f64,
    pub max_oracle_gap: f64,
}

impl SweepSummary {
    pub fn passes(&self) -> bool {
        self.violations == 0 && !(self.median_ratio > MEDIAN_RATIO_GATE)
    }
}

pub fn median(values: &mut [f64]) -> f64 {
    if values.is_empty() {
        return f64::NAN;
    }
    values.sort_by(f64::total_cmp);
    let m = values.len() / 2;
    if values.len() % 2 == 1 {
        values[m]
    } else {
        0.5 * (values[m - 1] + values[m])
    }
}

pub fn summarize(rows: &[BoundRow]) -> SweepSummary {
    let mut ratios: Vec<f64> = rows.iter().filter_map(BoundRow::ratio).collect();
    SweepSummary {
        cases: rows.len(),
        violations: rows.iter().filter(|r| !r.ordered()).count(),
        max_ratio: ratios.iter().copied().fold(f64::NAN, f64::max),
        median_ratio: median(&mut ratios),
        max_oracle_gap: rows.iter().map(BoundRow::oracle_gap).fold(0.0, f64::max),
    }
}

pub const CSV_HEADER: &str = "case,k,zeta,q11,q12,q22,pos_err_x,pos_err_y,vel_x,vel_y,sampled,eta,delta";

pub fn to_csv(rows: &[BoundRow]) -> String {
    let mut out = format!("{CSV_HEADER}\n");
    for r in rows {
        let c = &r.case;
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{},{},{}",
            c.index,
            c.gains.k,
            c.gains.zeta,
            c.q.a11,
            c.q.a12,
            c.q.a22,
            c.s0.pos_err.x,
            c.s0.pos_err.y,
            c.s0.vel.x,
            c.s0.vel.y,
            r.sampled,
            r.eta,
            r.delta
        );
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn equilibrium_row_is_zero() {
        let rows = sweep(1, 7).unwrap();
        assert_eq!((rows[0].sampled, rows[0].eta, rows[0].delta), (0.0, 0.0, 0.0));
        assert!(rows[0].ordered());
    }

    #[test]
    fn cases_do_not_depend_on_count() {
        assert_eq!(random_case(3, 5), random_case(3, 5));
        assert_ne!(random_case(3, 5), random_case(4, 5));
    }

    #[test]
    fn median_of_even_and_odd() {
        assert_eq!(median(&mut [3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median(&mut [4.0, 1.0, 2.0, 3.0]), 2.5);
    }
}
