use proptest::prelude::*;

use eigenbound::bounds::{
    admissible_radius, ball_eigenvalue_bound, bullet_divergence_floor, div_lower_bound, hadamard_bound,
    main_lemma_bound, mckean_bound, BallContext, BulletForm, CurvatureBound,
};

fn kappa() -> impl Strategy<Value = f64> {
    prop_oneof![(-6.0f64..-0.01), Just(0.0), (0.01f64..6.0)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn hadamard_at_zero_beta_equals_mckean(m in 2usize..16, a in 1e-3f64..1e3) {
        prop_assert_eq!(hadamard_bound(m, a, 0.0).unwrap().value, mckean_bound(m, a).unwrap().value);
    }

    #[test]
    fn ball_bound_is_main_lemma_of_floor(m in 2usize..8, k in kappa(), h in 0.0f64..3.0, frac in 0.01f64..0.99) {
        let ctx = BallContext::constant(m, m + 1, f64::INFINITY, k, h).unwrap();
        let cap = admissible_radius(&ctx).unwrap().radius;
        let r = if cap.is_finite() { cap * frac } else { 50.0 * frac };
        let ball = ball_eigenvalue_bound(&ctx, r).unwrap();
        let (floor, tag, regime, hv) = bullet_divergence_floor(&ctx, r).unwrap();
        prop_assert_eq!(ball.value, main_lemma_bound(floor, 1.0).unwrap().value);
        if tag.form() != Some(BulletForm::Uniform) {
            prop_assert_eq!(floor, div_lower_bound(m, regime, r, hv).unwrap());
        }
    }

    #[test]
    fn admissible_radius_is_the_supremum(m in 2usize..8, k in kappa(), h in 0.0f64..3.0) {
        let ctx = BallContext::constant(m, m + 1, f64::INFINITY, k, h).unwrap();
        let cap = admissible_radius(&ctx).unwrap().radius;
        if cap.is_finite() {
            prop_assert!(ball_eigenvalue_bound(&ctx, cap * (1.0 - 1e-9)).is_ok());
            prop_assert!(ball_eigenvalue_bound(&ctx, cap).is_err());
            prop_assert!(ball_eigenvalue_bound(&ctx, cap * (1.0 + 1e-9)).is_err());
        } else {
            prop_assert!(ball_eigenvalue_bound(&ctx, 1e6).is_ok());
        }
    }

    #[test]
    fn uniform_floor_lies_below_the_coth_floor(m in 2usize..8, k in 0.01f64..6.0, frac in 0.0f64..0.99, r in 0.01f64..40.0) {
        let h = frac * (m - 1) as f64 * k;
        let ctx = BallContext::constant(m, m + 1, f64::INFINITY, -k * k, h).unwrap();
        let (floor, ..) = bullet_divergence_floor(&ctx, r).unwrap();
        let exact = div_lower_bound(m, CurvatureBound::negative(k).unwrap(), r, h).unwrap();
        prop_assert!(floor <= exact);
        prop_assert!(floor > 0.0);
    }
}
