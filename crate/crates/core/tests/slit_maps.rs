use loewner_core::slit::{chain_eval, spike_map, whole_plane_map, MapChain, SpikeEvent};
use loewner_core::Version;
use num_complex::Complex64;
use proptest::prelude::*;
use std::f64::consts::PI;

fn polar(r: f64, a: f64) -> Complex64 {
    Complex64::from_polar(r, a)
}

fn chain() -> impl Strategy<Value = MapChain> {
    prop::collection::vec((-PI..PI, 0.01..0.2f64), 1..=8).prop_map(|ev| {
        MapChain::new(
            ev.into_iter()
                .map(|(angle, duration)| SpikeEvent { angle, duration })
                .collect(),
        )
        .unwrap()
    })
}

proptest! {
    #[test]
    fn non_slit_arc_stays_on_circle(t in 0.001..3.0f64, u in 0.0..1.0f64, lower in any::<bool>()) {
        // cos(arg w) < 2e^{−t} − 1, kept away from the slit-base endpoints
        let edge = (2.0 * (-t).exp() - 1.0).acos();
        let a = edge + (PI - edge) * (0.001 + 0.998 * u);
        let w = polar(1.0, if lower { -a } else { a });
        let h = spike_map(w, t).unwrap();
        prop_assert!((h.value.norm() - 1.0).abs() < 1e-12, "|h| = {}", h.value.norm());
    }

    #[test]
    fn conjugation_symmetry(r in 1.0001..5.0f64, a in -PI..PI, t in 0.0..3.0f64) {
        let w = polar(r, a);
        let h = spike_map(w, t).unwrap();
        let g = spike_map(w.conj(), t).unwrap();
        prop_assert!((g.value - h.value.conj()).norm() <= 1e-12 * h.value.norm());
        prop_assert!((g.derivative - h.derivative.conj()).norm() <= 1e-12 * h.derivative.norm().max(1.0));
    }

    #[test]
    fn derivative_matches_central_difference(c in chain(), r in 1.5..3.0f64, a in -PI..PI, tip in any::<bool>()) {
        let w = polar(r, a);
        let s = chain_eval(&c, w, tip).unwrap();
        let h = 1e-6;
        let fd = (chain_eval(&c, w + h, tip).unwrap().value - chain_eval(&c, w - h, tip).unwrap().value) / (2.0 * h);
        prop_assert!((fd - s.derivative).norm() < 1e-7 * s.derivative.norm(), "{} vs {}", fd, s.derivative);
    }

    #[test]
    fn capacity(c in chain(), a in -PI..PI) {
        let w = polar(1e6, a);
        let s = chain_eval(&c, w, false).unwrap();
        prop_assert!(((s.value / w).norm() - c.total_time().exp()).abs() < 1e-4 * c.total_time().exp());
    }

    #[test]
    fn inversion_is_an_involution(c in chain(), r in 1.2..4.0f64, a in -PI..PI) {
        let w = polar(r, a);
        let ext = whole_plane_map(&c, w, Version::Exterior, true).unwrap();
        let int = whole_plane_map(&c, 1.0 / w, Version::Interior, true).unwrap();
        prop_assert!((int.value * ext.value - 1.0).norm() < 1e-12);
    }
}

#[test]
fn semiflow_at_reference_point() {
    let w = Complex64::new(2.0, 1.0);
    let inner = spike_map(w, 0.7).unwrap();
    let outer = spike_map(inner.value, 0.3).unwrap();
    let direct = spike_map(w, 1.0).unwrap();
    assert!((outer.value - direct.value).norm() < 1e-12);
    assert!((outer.derivative * inner.derivative - direct.derivative).norm() < 1e-12);
}

#[test]
fn zero_driver_converges_geometrically() {
    let sup_error = |horizon: f64| {
        let c = MapChain::new(vec![SpikeEvent { angle: 0.0, duration: horizon }]).unwrap();
        (0..32)
            .map(|k| {
                let w = polar(2.0, 2.0 * PI * k as f64 / 32.0);
                let s = whole_plane_map(&c, w, Version::Exterior, false).unwrap();
                (s.value - (w + 1.0).powi(2) / w).norm()
            })
            .fold(0.0, f64::max)
    };
    let errs: Vec<f64> = [4.0, 8.0, 16.0].iter().map(|&t| sup_error(t)).collect();
    assert!(errs[1] <= errs[0] / 2.0 && errs[2] <= errs[1] / 2.0, "{errs:?}");
    assert!(errs[2] < 1e-6);
}
