use loewner_core::spectra::{
    beta_closed_form, branch_thresholds, branch_value, frobenius_lambda, gamma, gamma_roots, ode_lambda,
    q_of_gamma, rec3_coeffs, truncation_curve, Branch, DEFAULT_DELTA,
};
use loewner_core::Version;
use proptest::prelude::*;

proptest! {
    #[test]
    fn gamma_round_trips(kappa in 0.05..20.0f64, u in 0.0..1.0f64) {
        let qmax = (kappa + 4.0).powi(2) / (8.0 * kappa);
        let q = -10.0 + (qmax + 10.0) * u;
        let g = gamma(q, kappa).unwrap();
        prop_assert!((q_of_gamma(g, kappa) - q).abs() < 1e-12 * (1.0 + q.abs()));
        let (lo, hi) = gamma_roots(q, kappa).unwrap();
        prop_assert!(lo <= hi);
        prop_assert!((q_of_gamma(hi, kappa) - q).abs() < 1e-12 * (1.0 + q.abs()));
    }

    #[test]
    fn b0_plus_c0_vanishes(g in -5.0..5.0f64, kappa in 0.01..20.0f64) {
        let r = rec3_coeffs(0, g, kappa);
        prop_assert!((r.b + r.c).abs() < 1e-12 * (1.0 + r.b.abs()));
    }

    #[test]
    fn truncation_points_lie_on_the_curve(m in 0usize..8, g in 0.55..3.0f64) {
        let p = truncation_curve(Version::Interior, m, g).unwrap();
        let a = rec3_coeffs(-(m as i64), g, p.kappa).a;
        prop_assert!(a.abs() < 1e-12 * (1.0 + p.kappa * (m as f64 + g).powi(2)));
        prop_assert!((q_of_gamma(g, p.kappa) - p.q).abs() < 1e-12 * (1.0 + p.q.abs()));
    }

    #[test]
    fn spectrum_is_continuous(kappa in 0.2..10.0f64, u in 0.0..1.0f64, exterior in any::<bool>()) {
        let v = if exterior { Version::Exterior } else { Version::Interior };
        let (lo, hi) = branch_thresholds(v, kappa);
        let q = lo - 2.0 + (hi - lo + 3.0) * u;
        let e = 1e-7;
        let a = beta_closed_form(v, q - e, kappa).unwrap().beta;
        let b = beta_closed_form(v, q + e, kappa).unwrap().beta;
        prop_assert!((a - b).abs() < 1e-4);
    }
}

#[test]
fn branch_joins_on_reference_kappas() {
    for v in [Version::Interior, Version::Exterior] {
        for kappa in [1.0, 2.0, 4.0, 6.0, 8.0] {
            let (lo, hi) = branch_thresholds(v, kappa);
            let low = branch_value(v, Branch::Low, lo, kappa).unwrap();
            let mid = branch_value(v, Branch::Middle, lo, kappa).unwrap();
            assert!((low - mid).abs() < 1e-10);
            let mid = branch_value(v, Branch::Middle, hi, kappa).unwrap();
            let high = branch_value(v, Branch::High, hi, kappa).unwrap();
            assert!((mid - high).abs() < 1e-10, "{v} κ={kappa}: {mid} vs {high}");
        }
    }
}

#[test]
fn scalar_system_equals_high_branch() {
    for k in 1..=20 {
        let g = 0.75 + 1.25 * k as f64 / 20.0;
        let p = truncation_curve(Version::Interior, 0, g).unwrap();
        let lambda = frobenius_lambda(0, g, p.kappa).unwrap().lambda_max;
        let want = 3.0 * g * g / (2.0 * g - 1.0);
        assert!((lambda - want).abs() < 1e-10);
        let b = beta_closed_form(Version::Interior, p.q, p.kappa).unwrap();
        assert_eq!(b.branch, Branch::High);
        assert!((b.beta - want).abs() < 1e-10);
    }
}

#[test]
fn eigen_and_ode_routes_agree() {
    for m in [0usize, 1] {
        for g in [0.8, 1.0, 1.25] {
            let p = truncation_curve(Version::Interior, m, g).unwrap();
            let a = frobenius_lambda(m, g, p.kappa).unwrap().lambda_max;
            let b = ode_lambda(m, g, p.kappa, DEFAULT_DELTA).unwrap();
            assert!((a - b.lambda).abs() < 1e-4, "M={m} γ={g}: {a} vs {}", b.lambda);
            assert!(b.fit_residual < 1e-3);
        }
    }
}

#[test]
fn beta_equals_lambda_above_critical_q() {
    for m in 1..4usize {
        for k in 0..6 {
            let g = 0.9 + 0.2 * k as f64;
            let p = truncation_curve(Version::Interior, m, g).unwrap();
            let b = beta_closed_form(Version::Interior, p.q, p.kappa).unwrap();
            if b.branch != Branch::High {
                continue;
            }
            let l = frobenius_lambda(m, g, p.kappa).unwrap().lambda_max;
            assert!((l - b.beta).abs() < 1e-9, "M={m} γ={g}: λ={l} β={}", b.beta);
        }
    }
}
