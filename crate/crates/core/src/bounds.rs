//! Output-peak bounds for the stabilized robot.
//!
//! For a Hurwitz closed loop `ṡ = Ā s`, `z = C s` the output peak
//! `η = max_{t≥0} ‖z(t)‖²` is computed exactly (closed form for the critically
//! damped double integrator, sampled and refined otherwise). An upper bound
//! `δ ≥ η` is certified by an invariant ellipsoid `ξᵀUξ ≤ 1` through `s0`
//! whose matrix satisfies the Lyapunov inequality `ĀᵀU + UĀ ⪯ 0`.

use nalgebra::{Matrix2x4, Matrix4, SMatrix, SVector, Vector4};

use crate::error::{Error, Result};
use crate::metric::{eig_sym2, SymMat2, Vec2};

pub type Mat4 = Matrix4<f64>;
pub type Vec4 = Vector4<f64>;
pub type OutputMatrix = Matrix2x4<f64>;

/// Relative tolerance on `ζ² = 8k` for the closed-form peak.
pub const CRITICAL_DAMPING_TOLERANCE: f64 = 1e-9;

/// Sampling horizon is this many decay time constants of the slowest mode.
const HORIZON_TIME_CONSTANTS: f64 = 40.0;

const GOLDEN: f64 = 0.618_033_988_749_894_9;

/// PD gains of `ẍ = −2k(x − g) − ζẋ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DoubleIntegratorGains {
    pub k: f64,
    pub zeta: f64,
}

impl DoubleIntegratorGains {
    pub fn new(k: f64, zeta: f64) -> Result<Self> {
        if !(k > 0.0 && k.is_finite() && zeta > 0.0 && zeta.is_finite()) {
            return Err(Error::InvalidGains(format!("k={k}, zeta={zeta} must be positive and finite")));
        }
        Ok(Self { k, zeta })
    }

    /// Gains with `ζ = √(8k)`.
    pub fn critically_damped(k: f64) -> Result<Self> {
        Self::new(k, (8.0 * k).sqrt())
    }

    pub fn is_critically_damped(&self) -> bool {
        (self.zeta * self.zeta - 8.0 * self.k).abs() <= CRITICAL_DAMPING_TOLERANCE * (8.0 * self.k).max(1.0)
    }

    /// The repeated closed-loop eigenvalue `−ζ/2` of the critically damped case.
    pub fn repeated_eigenvalue(&self) -> f64 {
        -0.5 * self.zeta
    }
}

/// Relative position and velocity `(x − g, ẋ)`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct StateVec {
    pub pos_err: Vec2,
    pub vel: Vec2,
}

impl StateVec {
    pub fn new(pos_err: Vec2, vel: Vec2) -> Self {
        Self { pos_err, vel }
    }

    pub fn to_vector(&self) -> Vec4 {
        Vec4::new(self.pos_err.x, self.pos_err.y, self.vel.x, self.vel.y)
    }

    pub fn from_vector(s: &Vec4) -> Self {
        Self::new(Vec2::new(s[0], s[1]), Vec2::new(s[2], s[3]))
    }

    pub fn is_zero(&self) -> bool {
        self.pos_err == Vec2::ZERO && self.vel == Vec2::ZERO
    }

    pub fn scaled(&self, alpha: f64) -> Self {
        Self::new(self.pos_err * alpha, self.vel * alpha)
    }
}

/// A validated Hurwitz closed loop with a two-dimensional output.
#[derive(Debug, Clone, PartialEq)]
pub struct ClosedLoopSystem {
    a_bar: Mat4,
    c_out: OutputMatrix,
    spectral_abscissa: f64,
    spectral_radius: f64,
}

impl ClosedLoopSystem {
    pub fn new(a_bar: Mat4, c_out: OutputMatrix) -> Result<Self> {
        if a_bar.iter().chain(c_out.iter()).any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameters("non-finite system matrix".into()));
        }
        let eigs = a_bar.complex_eigenvalues();
        let spectral_abscissa = eigs.iter().map(|e| e.re).fold(f64::NEG_INFINITY, f64::max);
        let spectral_radius = eigs.iter().map(|e| e.norm()).fold(0.0, f64::max);
        if !(spectral_abscissa < 0.0) {
            return Err(Error::NotHurwitz(spectral_abscissa));
        }
        Ok(Self { a_bar, c_out, spectral_abscissa, spectral_radius })
    }

    pub fn a_bar(&self) -> &Mat4 {
        &self.a_bar
    }

    pub fn c_out(&self) -> &OutputMatrix {
        &self.c_out
    }

    /// Largest real part of the closed-loop spectrum (negative).
    pub fn spectral_abscissa(&self) -> f64 {
        self.spectral_abscissa
    }

    pub fn spectral_radius(&self) -> f64 {
        self.spectral_radius
    }

    /// `‖z‖² = sᵀ (CᵀC) s`
    pub fn output_form(&self, s: &Vec4) -> f64 {
        (self.c_out * s).norm_squared()
    }

    /// Position block of `CᵀC`, i.e. the metric `Q` when `C = Q^{1/2}[I 0]`.
    pub fn position_metric(&self) -> SymMat2 {
        let ctc = self.c_out.transpose() * self.c_out;
        SymMat2::new(ctc[(0, 0)], 0.5 * (ctc[(0, 1)] + ctc[(1, 0)]), ctc[(1, 1)])
    }

    /// Recovers `(k, ζ)` when `Ā` has the per-axis PD double-integrator structure
    /// and the output only reads positions.
    pub fn double_integrator_gains(&self) -> Option<DoubleIntegratorGains> {
        let a = &self.a_bar;
        let k = -0.5 * a[(2, 0)];
        let zeta = -a[(2, 2)];
        let expected = Mat4::new(
            0.0, 0.0, 1.0, 0.0, //
            0.0, 0.0, 0.0, 1.0, //
            -2.0 * k, 0.0, -zeta, 0.0, //
            0.0, -2.0 * k, 0.0, -zeta,
        );
        let velocity_free = (0..2).all(|r| self.c_out[(r, 2)] == 0.0 && self.c_out[(r, 3)] == 0.0);
        if *a == expected && velocity_free {
            DoubleIntegratorGains::new(k, zeta).ok()
        } else {
            None
        }
    }
}

/// `Ā = [[0, I], [−2k·I, −ζ·I]]`, `C = [Q^{1/2}, 0]`.
pub fn build_double_integrator(gains: DoubleIntegratorGains, q: &SymMat2) -> Result<ClosedLoopSystem> {
    let gains = DoubleIntegratorGains::new(gains.k, gains.zeta)?;
    if !q.is_positive_definite() {
        return Err(Error::InvalidParameters("output metric must be positive definite".into()));
    }
    let (k2, z) = (2.0 * gains.k, gains.zeta);
    let a_bar = Mat4::new(
        0.0, 0.0, 1.0, 0.0, //
        0.0, 0.0, 0.0, 1.0, //
        -k2, 0.0, -z, 0.0, //
        0.0, -k2, 0.0, -z,
    );
    let r = q.sqrt();
    let c_out = OutputMatrix::new(
        r.a11, r.a12, 0.0, 0.0, //
        r.a12, r.a22, 0.0, 0.0,
    );
    ClosedLoopSystem::new(a_bar, c_out)
}

/// Exact output peak and the first time it is attained.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PeakTime {
    pub eta: f64,
    pub argmax_t: f64,
}

/// Exact peak plus the relaxed certificate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OutputPeakBound {
    pub eta: f64,
    pub delta: f64,
    pub argmax_t: f64,
}

/// Real roots of `a t² + b t + c`, computed without cancellation.
fn quadratic_roots(a: f64, b: f64, c: f64) -> Vec<f64> {
    let scale = a.abs().max(b.abs()).max(c.abs());
    if scale == 0.0 {
        return Vec::new();
    }
    if a.abs() <= 1e-14 * scale {
        return if b != 0.0 { vec![-c / b] } else { Vec::new() };
    }
    let disc = b * b - 4.0 * a * c;
    if disc < 0.0 {
        return Vec::new();
    }
    let q = -0.5 * (b + b.signum() * disc.sqrt());
    if q == 0.0 {
        return vec![0.0];
    }
    vec![q / a, c / q]
}

/// Closed-form peak for the critically damped double integrator.
///
/// Per axis `x(t) − g = (a + b t) e^{λt}` with `a = x0 − g` and `b = ẋ0 − λa`,
/// so `‖z(t)‖² = e^{2λt}(p0 + p1 t + p2 t²)` and its stationary points are the
/// nonnegative roots of `2λp2 t² + (2λp1 + 2p2) t + (2λp0 + p1)`.
pub fn exact_peak_critically_damped(sys: &ClosedLoopSystem, s0: &StateVec, lambda: f64) -> Result<PeakTime> {
    let gains = sys
        .double_integrator_gains()
        .ok_or_else(|| Error::NotCriticallyDamped("system is not a PD double integrator".into()))?;
    if !gains.is_critically_damped() {
        return Err(Error::NotCriticallyDamped(format!(
            "zeta^2 = {} but 8k = {}",
            gains.zeta * gains.zeta,
            8.0 * gains.k
        )));
    }
    if (lambda - gains.repeated_eigenvalue()).abs() > CRITICAL_DAMPING_TOLERANCE * gains.zeta.max(1.0) {
        return Err(Error::NotCriticallyDamped(format!(
            "lambda={lambda} differs from -zeta/2={}",
            gains.repeated_eigenvalue()
        )));
    }
    let q = sys.position_metric();
    let a = s0.pos_err;
    let b = s0.vel - a * lambda;
    let qa = q.mul_vec(a);
    let qb = q.mul_vec(b);
    let p0 = a.dot(qa);
    let p1 = 2.0 * a.dot(qb);
    let p2 = b.dot(qb);
    let form = |t: f64| (2.0 * lambda * t).exp() * (p0 + t * (p1 + t * p2));

    let mut best = PeakTime { eta: p0, argmax_t: 0.0 };
    for t in quadratic_roots(2.0 * lambda * p2, 2.0 * lambda * p1 + 2.0 * p2, 2.0 * lambda * p0 + p1) {
        if t > 0.0 && t.is_finite() {
            let value = form(t);
            if value > best.eta {
                best = PeakTime { eta: value, argmax_t: t };
            }
        }
    }
    Ok(best)
}

/// Golden-section maximization of `f` on `[lo, hi]`; returns `(t, f(t))`.
fn golden_max(mut lo: f64, mut hi: f64, tol: f64, f: impl Fn(f64) -> f64) -> (f64, f64) {
    let mut x1 = hi - GOLDEN * (hi - lo);
    let mut x2 = lo + GOLDEN * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    while hi - lo > tol {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + GOLDEN * (hi - lo);
            f2 = f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - GOLDEN * (hi - lo);
            f1 = f(x1);
        }
    }
    if f1 >= f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

/// Golden-section minimization; returns `(x, f(x))`.
fn golden_min(lo: f64, hi: f64, tol: f64, f: impl Fn(f64) -> f64) -> (f64, f64) {
    let (x, v) = golden_max(lo, hi, tol, |x| -f(x));
    (x, -v)
}

/// Output peak of an arbitrary Hurwitz system by dense propagation with the
/// matrix exponential, refining each competitive local maximum by golden section.
pub fn exact_peak_general(sys: &ClosedLoopSystem, s0: &StateVec) -> PeakTime {
    let s = s0.to_vector();
    let z0 = sys.output_form(&s);
    if s == Vec4::zeros() {
        return PeakTime { eta: 0.0, argmax_t: 0.0 };
    }
    let horizon = HORIZON_TIME_CONSTANTS / sys.spectral_abscissa().abs();
    let mut h = horizon / 4000.0;
    if sys.spectral_radius() > 0.0 {
        h = h.min(0.1 / sys.spectral_radius());
    }
    let steps = ((horizon / h).ceil() as usize).min(400_000);
    let h = horizon / steps as f64;
    let step = (sys.a_bar() * h).exp();

    let mut states = Vec::with_capacity(steps + 1);
    let mut values = Vec::with_capacity(steps + 1);
    let mut cur = s;
    states.push(cur);
    values.push(z0);
    for _ in 0..steps {
        cur = step * cur;
        values.push(sys.output_form(&cur));
        states.push(cur);
    }

    let (mut best_i, mut best) = (0, z0);
    for (i, &v) in values.iter().enumerate() {
        if v > best {
            best = v;
            best_i = i;
        }
    }
    let mut result = PeakTime { eta: best, argmax_t: best_i as f64 * h };

    let cutoff = 0.99 * best;
    for i in 0..steps {
        let v = values[i];
        if v < cutoff || v < values[i + 1] || (i > 0 && v < values[i - 1]) {
            continue;
        }
        // The bracket starts one sample back, or at t = 0 for the first sample.
        let first = i.saturating_sub(1);
        let width = if i == 0 { h } else { 2.0 * h };
        let base = states[first];
        let (tau, refined) = golden_max(0.0, width, 1e-10, |tau| {
            sys.output_form(&((sys.a_bar() * tau).exp() * base))
        });
        if refined > result.eta {
            result = PeakTime { eta: refined, argmax_t: first as f64 * h + tau };
        }
    }
    result
}

const SYM_INDEX: [(usize, usize); 10] =
    [(0, 0), (0, 1), (0, 2), (0, 3), (1, 1), (1, 2), (1, 3), (2, 2), (2, 3), (3, 3)];

fn sym_slot(i: usize, j: usize) -> usize {
    let (i, j) = if i <= j { (i, j) } else { (j, i) };
    SYM_INDEX.iter().position(|&p| p == (i, j)).unwrap()
}

/// Solves `ĀᵀP + PĀ = −S` over the ten independent entries of a symmetric `P`.
pub fn lyapunov_solve(a_bar: &Mat4, s_rhs: &Mat4) -> Result<Mat4> {
    let abscissa = a_bar.complex_eigenvalues().iter().map(|e| e.re).fold(f64::NEG_INFINITY, f64::max);
    if !(abscissa < 0.0) {
        return Err(Error::SingularSystem(format!("Lyapunov operator: A is not Hurwitz (max Re = {abscissa})")));
    }
    let mut m = SMatrix::<f64, 10, 10>::zeros();
    let mut rhs = SVector::<f64, 10>::zeros();
    for (row, &(i, j)) in SYM_INDEX.iter().enumerate() {
        // (ĀᵀP)_ij = Σ_k Ā_ki P_kj ; (PĀ)_ij = Σ_k P_ik Ā_kj
        for k in 0..4 {
            m[(row, sym_slot(k, j))] += a_bar[(k, i)];
            m[(row, sym_slot(i, k))] += a_bar[(k, j)];
        }
        rhs[row] = -0.5 * (s_rhs[(i, j)] + s_rhs[(j, i)]);
    }
    let sol = m
        .lu()
        .solve(&rhs)
        .ok_or_else(|| Error::SingularSystem("Lyapunov linear system is singular".into()))?;
    let mut p = Mat4::zeros();
    for (slot, &(i, j)) in SYM_INDEX.iter().enumerate() {
        p[(i, j)] = sol[slot];
        p[(j, i)] = sol[slot];
    }
    Ok(p)
}

/// Parameters of the feasible Lyapunov family
/// `S(θ) = R(φ)diag(1, σ)R(φ)ᵀ ⊗ R(ψ)diag(1, μ)R(ψ)ᵀ + εI`,
/// with `σ`, `μ` stored as natural logarithms.
#[derive(Debug, Clone, Copy, PartialEq)]
struct FamilyParams([f64; 4]);

const FAMILY_EPS: f64 = 1e-10;
const FAMILY_SWEEPS: usize = 50;
const FAMILY_TOL: f64 = 1e-6;
const LOG_LIMIT: f64 = 20.0;
/// Half-widths of the first line-search brackets: angles, then log-scales.
const FAMILY_HALF_WIDTH: [f64; 4] = [std::f64::consts::FRAC_PI_2, 10.0, std::f64::consts::FRAC_PI_2, 10.0];

fn rotated_diag(angle: f64, second: f64) -> [[f64; 2]; 2] {
    let (s, c) = angle.sin_cos();
    [[c * c + second * s * s, c * s * (1.0 - second)], [c * s * (1.0 - second), s * s + second * c * c]]
}

impl FamilyParams {
    fn rhs(&self) -> Mat4 {
        let [phi, log_sigma, psi, log_mu] = self.0;
        let block = rotated_diag(phi, log_sigma.clamp(-LOG_LIMIT, LOG_LIMIT).exp());
        let space = rotated_diag(psi, log_mu.clamp(-LOG_LIMIT, LOG_LIMIT).exp());
        Mat4::from_fn(|r, c| {
            let v = block[r / 2][c / 2] * space[r % 2][c % 2];
            if r == c {
                v + FAMILY_EPS
            } else {
                v
            }
        })
    }
}

/// `δ` certified by the invariant ellipsoid from one family member, or `None`
/// if the member is numerically unusable.
fn family_delta(sys: &ClosedLoopSystem, s: &Vec4, theta: &FamilyParams) -> Option<f64> {
    let p = lyapunov_solve(sys.a_bar(), &theta.rhs()).ok()?;
    let level = (s.transpose() * p * s)[(0, 0)];
    let p_inv = p.cholesky()?.inverse();
    let out = sys.c_out() * p_inv * sys.c_out().transpose();
    let sym = SymMat2::new(out[(0, 0)], 0.5 * (out[(0, 1)] + out[(1, 0)]), out[(1, 1)]);
    let delta = level * eig_sym2(&sym).lambda_max;
    (delta.is_finite() && level > 0.0).then_some(delta)
}

/// Upper bound on the output peak from the best member of a feasible family of
/// invariant ellipsoids, minimized by coordinate descent with golden-section
/// line searches. Every evaluated member is a valid certificate.
pub fn relaxed_peak(sys: &ClosedLoopSystem, s0: &StateVec) -> Result<f64> {
    if s0.is_zero() {
        return Ok(0.0);
    }
    let s = s0.to_vector();
    let eval = |theta: &FamilyParams| family_delta(sys, &s, theta).unwrap_or(f64::INFINITY);

    let metric = eig_sym2(&sys.position_metric());
    let metric_angle = metric.v_min.y.atan2(metric.v_min.x);
    let metric_ratio = if metric.lambda_min > 0.0 { (metric.lambda_max / metric.lambda_min).ln() } else { 0.0 };
    let energy_like = -10.0;
    let starts = [
        FamilyParams([std::f64::consts::FRAC_PI_2, energy_like, metric_angle, metric_ratio]),
        FamilyParams([std::f64::consts::FRAC_PI_2, energy_like, 0.0, 0.0]),
        FamilyParams([1.0, -3.0, 0.5, 0.0]),
    ];

    let mut best = f64::INFINITY;
    for start in starts {
        let mut theta = start;
        let mut value = eval(&theta);
        for _ in 0..FAMILY_SWEEPS {
            let mut moved = 0.0_f64;
            for i in 0..4 {
                let center = theta.0[i];
                let w = FAMILY_HALF_WIDTH[i];
                let (x, v) = golden_min(center - w, center + w, FAMILY_TOL, |x| {
                    let mut trial = theta;
                    trial.0[i] = x;
                    eval(&trial)
                });
                if v < value {
                    theta.0[i] = x;
                    value = v;
                    moved = moved.max((x - center).abs());
                }
            }
            if moved < FAMILY_TOL {
                break;
            }
        }
        best = best.min(value);
    }
    if best.is_finite() {
        Ok(best)
    } else {
        Err(Error::SingularSystem("no usable invariant ellipsoid in the family".into()))
    }
}

/// Exact peak (closed form when critically damped) together with the relaxed certificate.
pub fn bound(sys: &ClosedLoopSystem, s0: &StateVec) -> Result<OutputPeakBound> {
    if s0.is_zero() {
        return Ok(OutputPeakBound { eta: 0.0, delta: 0.0, argmax_t: 0.0 });
    }
    let peak = exact_peak(sys, s0)?;
    let delta = relaxed_peak(sys, s0)?;
    debug_assert!(delta >= peak.eta - 1e-9 * peak.eta.max(1.0), "relaxed bound below exact peak");
    Ok(OutputPeakBound { eta: peak.eta, delta: delta.max(peak.eta), argmax_t: peak.argmax_t })
}

/// Exact peak, routed to the closed form whenever the system is a critically
/// damped PD double integrator.
pub fn exact_peak(sys: &ClosedLoopSystem, s0: &StateVec) -> Result<PeakTime> {
    match sys.double_integrator_gains() {
        Some(g) if g.is_critically_damped() => exact_peak_critically_damped(sys, s0, g.repeated_eigenvalue()),
        _ => Ok(exact_peak_general(sys, s0)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::SQRT_2;

    fn nominal_gains() -> DoubleIntegratorGains {
        DoubleIntegratorGains::new(1.0, 2.0 * SQRT_2).unwrap()
    }

    #[test]
    fn double_integrator_structure() {
        let sys = build_double_integrator(nominal_gains(), &SymMat2::IDENTITY).unwrap();
        assert_eq!(sys.c_out(), &OutputMatrix::new(1.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0));
        assert_relative_eq!(sys.spectral_abscissa(), -SQRT_2, max_relative = 1e-6);
        let g = sys.double_integrator_gains().unwrap();
        assert!(g.is_critically_damped());
        assert_eq!(g.repeated_eigenvalue(), -SQRT_2);
    }

    #[test]
    fn underdamped_still_hurwitz() {
        let sys = build_double_integrator(DoubleIntegratorGains::new(1.0, 1.0).unwrap(), &SymMat2::IDENTITY).unwrap();
        assert_relative_eq!(sys.spectral_abscissa(), -0.5, max_relative = 1e-12);
        assert!(!sys.double_integrator_gains().unwrap().is_critically_damped());
    }

    #[test]
    fn rejects_bad_gains() {
        assert!(DoubleIntegratorGains::new(0.0, 1.0).is_err());
        assert!(DoubleIntegratorGains::new(1.0, -1.0).is_err());
        let unstable = Mat4::identity();
        assert!(matches!(
            ClosedLoopSystem::new(unstable, OutputMatrix::zeros()),
            Err(Error::NotHurwitz(_))
        ));
    }

    #[test]
    fn equilibrium_has_zero_peak() {
        let sys = build_double_integrator(nominal_gains(), &SymMat2::IDENTITY).unwrap();
        let p = exact_peak_critically_damped(&sys, &StateVec::default(), -SQRT_2).unwrap();
        assert_eq!((p.eta, p.argmax_t), (0.0, 0.0));
        assert_eq!(exact_peak_general(&sys, &StateVec::default()).eta, 0.0);
        assert_eq!(bound(&sys, &StateVec::default()).unwrap(), OutputPeakBound { eta: 0.0, delta: 0.0, argmax_t: 0.0 });
    }

    #[test]
    fn released_from_rest_peaks_at_start() {
        let sys = build_double_integrator(nominal_gains(), &SymMat2::IDENTITY).unwrap();
        let s0 = StateVec::new(Vec2::new(-2.0, 0.0), Vec2::ZERO);
        let p = exact_peak_critically_damped(&sys, &s0, -SQRT_2).unwrap();
        assert_eq!(p.eta, 4.0);
        assert_eq!(p.argmax_t, 0.0);
    }

    #[test]
    fn closed_form_requires_critical_damping() {
        let sys = build_double_integrator(DoubleIntegratorGains::new(1.0, 1.0).unwrap(), &SymMat2::IDENTITY).unwrap();
        let s0 = StateVec::new(Vec2::new(1.0, 0.0), Vec2::ZERO);
        assert!(matches!(exact_peak_critically_damped(&sys, &s0, -0.5), Err(Error::NotCriticallyDamped(_))));
        let crit = build_double_integrator(nominal_gains(), &SymMat2::IDENTITY).unwrap();
        assert!(exact_peak_critically_damped(&crit, &s0, -1.0).is_err());
    }

    #[test]
    fn lyapunov_scalar_cases() {
        let p = lyapunov_solve(&(-Mat4::identity()), &(2.0 * Mat4::identity())).unwrap();
        assert!((p - Mat4::identity()).abs().max() < 1e-14);

        let a = Mat4::from_diagonal(&Vec4::new(-1.0, -2.0, -3.0, -4.0));
        let p = lyapunov_solve(&a, &Mat4::identity()).unwrap();
        let expected = Mat4::from_diagonal(&Vec4::new(0.5, 0.25, 1.0 / 6.0, 0.125));
        assert!((p - expected).abs().max() < 1e-14);
    }

    #[test]
    fn lyapunov_residual_on_double_integrator() {
        let sys = build_double_integrator(nominal_gains(), &SymMat2::IDENTITY).unwrap();
        let s = Mat4::identity();
        let p = lyapunov_solve(sys.a_bar(), &s).unwrap();
        let residual = sys.a_bar().transpose() * p + p * sys.a_bar() + s;
        assert!(residual.abs().max() <= 1e-9 * s.abs().max());
        assert_eq!(p, p.transpose());
        assert!(p.cholesky().is_some());
    }

    #[test]
    fn lyapunov_rejects_unstable() {
        assert!(matches!(lyapunov_solve(&Mat4::identity(), &Mat4::identity()), Err(Error::SingularSystem(_))));
    }

    #[test]
    fn quadratic_root_edge_cases() {
        assert!(quadratic_roots(0.0, 0.0, 0.0).is_empty());
        assert_eq!(quadratic_roots(0.0, 2.0, -4.0), vec![2.0]);
        assert!(quadratic_roots(1.0, 0.0, 1.0).is_empty());
        let mut r = quadratic_roots(1.0, -3.0, 2.0);
        r.sort_by(f64::total_cmp);
        assert_eq!(r, vec![1.0, 2.0]);
    }
}
