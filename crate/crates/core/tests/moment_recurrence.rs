use loewner_core::numeric::Rational;
use loewner_core::recurrence::{
    build_grid, closed_form_reference, coefficients, diagonal_beta_estimate, rho_eval, EtaProfile, MomentGrid,
    TheoremCase,
};
use loewner_core::Version;
use num_complex::Complex64;
use proptest::prelude::*;

fn r(n: i64) -> Rational {
    Rational::from_integer(n.into())
}

fn ratio(p: i64, q: i64) -> Rational {
    Rational::new(p.into(), q.into())
}

fn theorem_grid(eta: &str, n: usize) -> MomentGrid<Rational> {
    build_grid(Version::Interior, &eta.parse().unwrap(), r(2), n).unwrap()
}

fn profile() -> impl Strategy<Value = EtaProfile> {
    prop_oneof![
        (0i64..40).prop_map(|k| format!("brownian:{k}/4").parse().unwrap()),
        (1i64..40).prop_map(|k| format!("uniform:{k}/5").parse().unwrap()),
        (prop::collection::vec(0i64..20, 0..5), 0i64..20).prop_map(|(v, t)| {
            let head: Vec<String> = v.iter().map(|x| format!("{x}/3")).collect();
            format!("table:{};{t}/3", head.join(",")).parse().unwrap()
        }),
    ]
}

#[test]
fn case_one_grids_agree_across_profiles() {
    let grids: Vec<_> = ["brownian:6", "uniform:3", "table:3;7"]
        .iter()
        .map(|e| theorem_grid(e, 32))
        .collect();
    for g in &grids[1..] {
        for i in 1..=32 {
            for j in 1..=32 {
                assert_eq!(g.get(i, j), grids[0].get(i, j), "({i},{j})");
            }
        }
    }
    for i in 1..=32 {
        assert_eq!(*grids[0].get(i, i), r(i * i));
    }
}

#[test]
fn case_two_agrees_on_diagonal_and_corner_only() {
    let grids: Vec<_> = ["brownian:2", "uniform:1", "table:1;7"]
        .iter()
        .map(|e| theorem_grid(e, 32))
        .collect();
    for g in &grids {
        for i in 1..=32i64 {
            assert_eq!(*g.get(i, i), r(i * i * i));
        }
        assert_eq!(*g.get(2, 1), r(-2));
        assert_eq!(*g.get(1, 2), r(-2));
    }
    // Every other entry sees η₂ through θ₂, which vanishes only for η₂ = 4;
    // the Brownian grid then follows the closed form, whose ρ_31 is 1.
    assert_eq!(*grids[0].get(3, 1), r(1));
    for (i, j) in [(3, 1), (3, 2), (4, 3)] {
        assert_ne!(grids[1].get(i, j), grids[0].get(i, j), "({i},{j})");
        assert_ne!(grids[2].get(i, j), grids[1].get(i, j), "({i},{j})");
    }
}

#[test]
fn case_two_full_grid_matches_closed_form_for_brownian() {
    let g = theorem_grid("brownian:2", 24);
    let w = Complex64::new(0.3, 0.2);
    let want = closed_form_reference(TheoremCase::Two, w, w.conj()).unwrap();
    let got = rho_eval(&g, w).unwrap();
    assert!((got.value - want.re).abs() < 1e-12);
}

#[test]
fn exterior_zero_driver_expansion() {
    let g = build_grid(Version::Exterior, &"table:;0".parse().unwrap(), r(2), 4).unwrap();
    for i in -1..=4i64 {
        for j in -1..=4i64 {
            let want = match (i, j) {
                (-1, -1) | (1, 1) => r(1),
                (1, -1) | (-1, 1) => r(-1),
                _ => r(0),
            };
            assert_eq!(*g.get(i, j), want, "({i},{j})");
        }
    }
}

#[test]
fn diagonal_slopes_on_large_float_grids() {
    for (eta, beta) in [("brownian:6", 3.0), ("brownian:2", 4.0)] {
        let g = build_grid(Version::Interior, &eta.parse().unwrap(), 2.0, 512).unwrap();
        let b = diagonal_beta_estimate(&g).unwrap();
        assert!((b.beta - beta).abs() <= 0.02, "{eta}: {b:?}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn exact_grids_symmetric_and_resubstitute(
        eta in profile(),
        qn in -8i64..=12,
        n in 1usize..9,
        exterior in any::<bool>(),
    ) {
        let version = if exterior { Version::Exterior } else { Version::Interior };
        let g = build_grid(version, &eta, ratio(qn, 2), n).unwrap();
        for i in g.indices() {
            for j in g.indices() {
                prop_assert_eq!(g.get(i, j), g.get(j, i));
            }
        }
        prop_assert_eq!(g.max_residual(), 0.0);
    }

    #[test]
    fn float_grids_resubstitute(eta in profile(), q in -3.0..4.0f64, n in 1usize..48, exterior in any::<bool>()) {
        let version = if exterior { Version::Exterior } else { Version::Interior };
        let g = build_grid(version, &eta, q, n).unwrap();
        prop_assert!(g.max_residual() < 1e-10);
    }

    #[test]
    fn pivots_negative_off_boundary(eta in profile(), qn in -20i64..20, i in -1i64..30, j in -1i64..30, exterior in any::<bool>()) {
        let (version, lo) = if exterior { (Version::Exterior, -1) } else { (Version::Interior, 1) };
        prop_assume!(i >= lo && j >= lo && (i, j) != (lo, lo));
        let c = coefficients(version, i, j, &ratio(qn, 3), &|m| eta.eval_exact(m));
        prop_assert!(c[0][0] < r(0));
    }

    #[test]
    fn q_zero_is_delta(eta in profile(), n in 1usize..10, exterior in any::<bool>()) {
        let version = if exterior { Version::Exterior } else { Version::Interior };
        let g = build_grid(version, &eta, r(0), n).unwrap();
        let lo = g.lowest();
        for i in g.indices() {
            for j in g.indices() {
                let want = if (i, j) == (lo, lo) { r(1) } else { r(0) };
                prop_assert_eq!(g.get(i, j), &want);
            }
        }
    }

    #[test]
    fn interior_series_at_origin_is_one(eta in profile(), q in -2.0..3.0f64) {
        let g = build_grid(Version::Interior, &eta, q, 6).unwrap();
        prop_assert_eq!(rho_eval(&g, Complex64::new(0.0, 0.0)).unwrap().value, 1.0);
    }
}
