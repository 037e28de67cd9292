use proptest::prelude::*;
use sddm_core::metric::{directional_matrix, eig_sym2, quad_norm_sq, SymMat2, Vec2};

fn close(a: &SymMat2, b: &SymMat2, tol: f64) -> bool {
    (a.a11 - b.a11).abs() <= tol && (a.a12 - b.a12).abs() <= tol && (a.a22 - b.a22).abs() <= tol
}

fn direction() -> impl Strategy<Value = Vec2> {
    (0.0..std::f64::consts::TAU, 1e-6..1e3f64).prop_map(|(th, r)| Vec2::from_angle(th) * r)
}

fn gains() -> impl Strategy<Value = (f64, f64)> {
    (0.05..10.0f64, 1.01..20.0f64).prop_map(|(c1, ratio)| (c1, c1 * ratio))
}

proptest! {
    #[test]
    fn eigenstructure((c1, c2) in gains(), v in direction()) {
        let q = directional_matrix(v, c1, c2).unwrap().q;
        prop_assert!(q.is_positive_definite());
        let e = eig_sym2(&q);
        prop_assert!((e.lambda_min - c1).abs() <= 1e-10 * c2.max(1.0));
        prop_assert!((e.lambda_max - c2).abs() <= 1e-10 * c2.max(1.0));
        let u = v * (1.0 / v.norm());
        prop_assert!(e.v_min.cross(u).abs() <= 1e-9);
        prop_assert!((quad_norm_sq(&q, u) - c1).abs() <= 1e-10 * c2);
        prop_assert!((quad_norm_sq(&q, u.perp()) - c2).abs() <= 1e-10 * c2);
    }

    #[test]
    fn lower_bound_on_form((c1, c2) in gains(), v in direction(), x in -50.0..50.0f64, y in -50.0..50.0f64) {
        let q = directional_matrix(v, c1, c2).unwrap().q;
        let p = Vec2::new(x, y);
        prop_assert!(quad_norm_sq(&q, p) >= c1 * p.norm_sq() * (1.0 - 1e-12));
    }

    #[test]
    fn rotation_equivariance((c1, c2) in gains(), v in direction(), theta in -7.0..7.0f64) {
        let q = directional_matrix(v, c1, c2).unwrap().q;
        let rotated = directional_matrix(v.rotate(theta), c1, c2).unwrap().q;
        prop_assert!(close(&rotated, &q.rotated(theta), 1e-12 * c2.max(1.0)));
    }

    #[test]
    fn scale_invariance((c1, c2) in gains(), v in direction(), alpha in 1e-3..1e3f64) {
        let q = directional_matrix(v, c1, c2).unwrap().q;
        let scaled = directional_matrix(v * alpha, c1, c2).unwrap().q;
        prop_assert!(close(&q, &scaled, 1e-12 * c2.max(1.0)));
    }
}
