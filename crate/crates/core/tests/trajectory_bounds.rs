use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sddm_core::bounds::*;
use sddm_core::metric::{directional_matrix, SymMat2, Vec2};
use std::f64::consts::SQRT_2;

/// Independent oracle: classical RK4 on `ṡ = Ā s`, returning the max of `‖Cs‖²`
/// over the grid together with every sampled state.
fn rk4_oracle(sys: &ClosedLoopSystem, s0: &StateVec, dt: f64, horizon: f64) -> (f64, Vec<(f64, Vec4)>) {
    let a = *sys.a_bar();
    let mut s = s0.to_vector();
    let mut t = 0.0;
    let mut best = sys.output_form(&s);
    let mut samples = vec![(0.0, s)];
    let n = (horizon / dt).ceil() as usize;
    for _ in 0..n {
        let k1 = a * s;
        let k2 = a * (s + k1 * (dt / 2.0));
        let k3 = a * (s + k2 * (dt / 2.0));
        let k4 = a * (s + k3 * dt);
        s += (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (dt / 6.0);
        t += dt;
        best = best.max(sys.output_form(&s));
        samples.push((t, s));
    }
    (best, samples)
}

fn nominal_system(q: &SymMat2) -> ClosedLoopSystem {
    build_double_integrator(DoubleIntegratorGains::new(1.0, 2.0 * SQRT_2).unwrap(), q).unwrap()
}

fn random_hurwitz(rng: &mut ChaCha8Rng) -> ClosedLoopSystem {
    loop {
        let m = Mat4::from_fn(|_, _| rng.gen_range(-1.5..1.5));
        let abscissa = m.complex_eigenvalues().iter().map(|e| e.re).fold(f64::NEG_INFINITY, f64::max);
        let a = m - Mat4::identity() * (abscissa + rng.gen_range(0.2..1.5));
        let c = OutputMatrix::from_fn(|_, _| rng.gen_range(-1.0..1.0));
        if let Ok(sys) = ClosedLoopSystem::new(a, c) {
            return sys;
        }
    }
}

fn random_state(rng: &mut ChaCha8Rng) -> StateVec {
    StateVec::new(
        Vec2::new(rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0)),
        Vec2::new(rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0)),
    )
}

#[test]
fn figure_scenario_matches_dense_oracle() {
    // Governor at the origin, robot at (−2, 0) moving with (0, 2).
    let q = directional_matrix(Vec2::new(2.0, 0.0), 1.0, 4.0).unwrap().q;
    let sys = nominal_system(&q);
    let s0 = StateVec::new(Vec2::new(-2.0, 0.0), Vec2::new(0.0, 2.0));
    let exact = exact_peak_critically_damped(&sys, &s0, -SQRT_2).unwrap();
    let (oracle, _) = rk4_oracle(&sys, &s0, 1e-4, 20.0 / SQRT_2);
    assert!(oracle <= exact.eta + 1e-9);
    assert!((exact.eta - oracle).abs() <= 1e-6 * exact.eta, "{} vs {oracle}", exact.eta);
    let delta = relaxed_peak(&sys, &s0).unwrap();
    assert!(delta >= exact.eta - 1e-9);
    assert!(delta / exact.eta <= 3.0, "ratio {}", delta / exact.eta);
}

#[test]
fn general_path_agrees_with_closed_form() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..40 {
        let k = rng.gen_range(0.3..3.0);
        let gains = DoubleIntegratorGains::critically_damped(k).unwrap();
        let s0 = random_state(&mut rng);
        let q = directional_matrix(-s0.pos_err, 1.0, rng.gen_range(1.5..8.0)).unwrap().q;
        let sys = build_double_integrator(gains, &q).unwrap();
        let closed = exact_peak_critically_damped(&sys, &s0, gains.repeated_eigenvalue()).unwrap();
        let sampled = exact_peak_general(&sys, &s0);
        assert!(
            (closed.eta - sampled.eta).abs() <= 1e-8 * closed.eta,
            "closed {} sampled {}",
            closed.eta,
            sampled.eta
        );
    }
}

#[test]
fn general_path_dominates_coarse_oracle_on_random_systems() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..20 {
        let sys = random_hurwitz(&mut rng);
        let s0 = random_state(&mut rng);
        let peak = exact_peak_general(&sys, &s0);
        let horizon = 40.0 / sys.spectral_abscissa().abs();
        let (oracle, _) = rk4_oracle(&sys, &s0, 1e-3, horizon);
        assert!(peak.eta >= oracle - 1e-9, "{} < {oracle}", peak.eta);
        assert!(peak.eta <= oracle * (1.0 + 1e-5) + 1e-12);
    }
}

#[test]
fn relaxed_bound_orders_above_exact_on_random_systems() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..100 {
        let sys = random_hurwitz(&mut rng);
        let s0 = random_state(&mut rng);
        let b = bound(&sys, &s0).unwrap();
        let raw = relaxed_peak(&sys, &s0).unwrap();
        assert!(raw >= b.eta - 1e-9, "delta {raw} < eta {}", b.eta);
        assert!(b.delta >= b.eta);
    }
}

#[test]
fn containment_of_position_trajectory() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..25 {
        let s0 = random_state(&mut rng);
        let dm = directional_matrix(-s0.pos_err, 1.0, 4.0).unwrap();
        let sys = nominal_system(&dm.q);
        let b = bound(&sys, &s0).unwrap();
        let (_, samples) = rk4_oracle(&sys, &s0, 1e-3 / SQRT_2, 40.0 / SQRT_2);
        for (_, s) in samples {
            let x = Vec2::new(s[0], s[1]);
            assert!(sddm_core::metric::quad_norm_sq(&dm.q, x) <= b.delta + 1e-9);
        }
    }
}

#[test]
fn peaks_scale_quadratically() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for _ in 0..10 {
        let s0 = random_state(&mut rng);
        let q = directional_matrix(-s0.pos_err, 1.0, 4.0).unwrap().q;
        let sys = nominal_system(&q);
        for alpha in [2.0, 0.5] {
            let base = bound(&sys, &s0).unwrap();
            let scaled = bound(&sys, &s0.scaled(alpha)).unwrap();
            assert_eq!(scaled.eta, base.eta * alpha * alpha);
            assert!((scaled.delta - base.delta * alpha * alpha).abs() <= 1e-12 * scaled.delta);
        }
    }
}

#[test]
fn median_ratio_is_modest() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let mut ratios = Vec::new();
    for _ in 0..100 {
        let k = rng.gen_range(0.25..4.0);
        let s0 = random_state(&mut rng);
        let q = directional_matrix(-s0.pos_err, 1.0, rng.gen_range(1.5..8.0)).unwrap().q;
        let sys = build_double_integrator(DoubleIntegratorGains::critically_damped(k).unwrap(), &q).unwrap();
        let b = bound(&sys, &s0).unwrap();
        ratios.push(b.delta / b.eta);
    }
    ratios.sort_by(f64::total_cmp);
    let median = ratios[ratios.len() / 2];
    eprintln!("median {median} max {}", ratios.last().unwrap());
    assert!(median <= 2.0);
}
