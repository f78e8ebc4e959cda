use driftheat::battery::standard_battery;
use driftheat::transfer::{
    flow_norm_identity, heat_apply, schur_identity_sweep, schur_row_constant, FlowInitial,
};
use proptest::prelude::*;

#[test]
fn flow_norm_identity_on_battery() {
    for (name, v) in standard_battery(99, 20).unwrap() {
        for t in [0.5, 1.0, 3.0] {
            let c = flow_norm_identity(&v, t).unwrap();
            assert!(c.residual < 1e-8, "{name} t={t}: {c:?}");
            assert!(c.ratio_to_initial <= 1.0 + 1e-8, "{name}");
        }
    }
}

#[test]
fn schur_rows_for_all_listed_times() {
    for n in 1..=3usize {
        let samples: Vec<Vec<f64>> = (0..20)
            .map(|i| (0..n).map(|j| -3.0 + 0.3 * i as f64 + 0.17 * j as f64).collect())
            .collect();
        for tau in [0.0, 0.25, 0.5, 0.9] {
            let r = schur_row_constant(tau, n, &samples, 40).unwrap();
            assert!((r.c_x - r.c_x_closed).abs() < 1e-6, "{r:?}");
            assert!((r.c_y - r.c_y_closed).abs() < 1e-6);
            assert!(r.c_x_variance < 1e-16 && r.c_y_variance < 1e-16);
            assert!((r.bound - 1.0).abs() < 1e-6);
        }
    }
}

#[test]
fn schur_identity_holds_for_many_seeds() {
    for seed in 0..5 {
        assert!(schur_identity_sweep(seed, 1000).unwrap() < 1e-10);
    }
}

proptest! {
    #[test]
    fn heat_kernel_preserves_affine_data(tau in -0.9f64..0.9, x in -4.0f64..4.0, a in -2.0f64..2.0) {
        let p = driftheat::poly::Poly::constant(1, a).add(&driftheat::poly::Poly::coordinate(1, 0));
        let got = heat_apply(&FlowInitial::Polynomial(p), tau, &[x], 4).unwrap();
        prop_assert!((got - (a + x)).abs() < 1e-9);
    }

    #[test]
    fn heat_kernel_on_reverse_profile(tau in -0.5f64..0.5, x in -2.0f64..2.0, c0 in 2.0f64..4.0) {
        let u0 = FlowInitial::Reverse { c0, dim: 1 };
        let got = heat_apply(&u0, tau, &[x], 48).unwrap();
        let want = u0.exact(tau, &[x]).unwrap();
        prop_assert!((got / want - 1.0).abs() < 1e-6);
    }
}
