use crate::{Error, Result};
use num_complex::Complex64;

/// A value of a conformal map together with its derivative at the same
/// point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComplexSample {
    pub value: Complex64,
    pub derivative: Complex64,
}

impl ComplexSample {
    pub fn identity(w: Complex64) -> Self {
        ComplexSample {
            value: w,
            derivative: Complex64::new(1.0, 0.0),
        }
    }
}

/// Radicand magnitude (relative to `(|w|+1)²`) below which the point is
/// treated as a slit-base singularity.
pub const SLIT_BASE_TOLERANCE: f64 = 1e-14;

/// `√((w+1)² − 4e^{-t}w)` on the branch that behaves like `w + 1` at
/// infinity.
///
/// In `|w| > 1` that branch is `(w+1)·√(1−u)` with the principal root and
/// `u = 4e^{-t}w/(w+1)²`, which never meets the cut there; the sign is read
/// off `Re(s·conj(w+1)) ≥ 0`. On the far arc of the unit circle the root is
/// purely imaginary and the limit from outside has `Im(s·conj(w+1))` of the
/// same sign as `Im w`.
fn branch_sqrt(radicand: Complex64, wp1: Complex64, w: Complex64) -> Complex64 {
    let s = radicand.sqrt();
    let p = s * wp1.conj();
    let scale = p.norm();
    if scale == 0.0 {
        return s;
    }
    if p.re.abs() <= 1e-10 * scale {
        let want = if w.im >= 0.0 { 1.0 } else { -1.0 };
        if p.im * want < 0.0 {
            -s
        } else {
            s
        }
    } else if p.re < 0.0 {
        -s
    } else {
        s
    }
}

/// The elementary slit map
/// `h(w,t) = e^t (w+1)(w+1+√((w+1)²−4e^{-t}w))/(2w) − 1`
/// and its derivative in `w`.
///
/// `h(·,t)` maps the exterior of the unit disc onto the exterior of the
/// disc with a radial slit along `[1, h(1,t)]`; `w = 1` is the pre-image
/// of the slit tip.
pub fn spike_map(w: Complex64, t: f64) -> Result<ComplexSample> {
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::invalid("t", "must be finite and ≥ 0"));
    }
    if t == 0.0 {
        return Ok(ComplexSample::identity(w));
    }
    spike_map_scaled(w, t.exp(), (-t).exp())
}

/// [`spike_map`] with `e^t` and `e^{-t}` supplied by the caller.
pub(crate) fn spike_map_scaled(w: Complex64, exp_t: f64, exp_neg_t: f64) -> Result<ComplexSample> {
    if w.norm_sqr() == 0.0 {
        return Err(Error::invalid("w", "the slit map is singular at w = 0"));
    }
    let one = Complex64::new(1.0, 0.0);
    let wp1 = w + one;
    let radicand = wp1 * wp1 - 4.0 * exp_neg_t * w;
    let scale = (w.norm() + 1.0).powi(2);
    if radicand.norm() <= SLIT_BASE_TOLERANCE * scale {
        return Err(Error::SlitBase { w });
    }
    let s = branch_sqrt(radicand, wp1, w);
    let num = wp1 * (wp1 + s);
    let value = exp_t * num / (2.0 * w) - one;
    // d√R/dw = R'/(2√R) with R' = 2(w+1) − 4e^{-t}.
    let ds = (wp1 - 2.0 * exp_neg_t) / s;
    let dnum = (wp1 + s) + wp1 * (one + ds);
    let derivative = exp_t * (dnum * w - num) / (2.0 * w * w);
    Ok(ComplexSample { value, derivative })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::E;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn zero_time_is_identity() {
        let w = c(1.3, -0.4);
        let s = spike_map(w, 0.0).unwrap();
        assert_eq!(s.value, w);
        assert_eq!(s.derivative, c(1.0, 0.0));
    }

    #[test]
    fn grows_like_e_to_the_t_at_infinity() {
        let w = c(1e6, 0.0);
        let s = spike_map(w, 1.0).unwrap();
        assert!((s.value / w - E).norm() < 1e-5);
    }

    #[test]
    fn tip_distance_is_two_root_t_for_short_times() {
        let t = 1e-8;
        let h = spike_map(c(1.0, 0.0), t).unwrap().value;
        assert!(((h.norm() - 1.0) / t.sqrt() - 2.0).abs() < 1e-3);
    }

    #[test]
    fn semiflow_property() {
        let w = c(2.0, 1.0);
        let inner = spike_map(w, 0.7).unwrap().value;
        let twice = spike_map(inner, 0.3).unwrap().value;
        let once = spike_map(w, 1.0).unwrap().value;
        assert!((twice - once).norm() < 1e-12);
    }

    #[test]
    fn slit_base_points_are_rejected() {
        // R = 0 where cos θ = 2e^{-t} − 1 on the unit circle.
        let t: f64 = 0.5;
        let theta = (2.0 * (-t).exp() - 1.0).acos();
        let w = Complex64::from_polar(1.0, theta);
        assert!(matches!(spike_map(w, t), Err(Error::SlitBase { .. })));
    }

    #[test]
    fn slit_side_maps_to_the_real_segment() {
        // The arc around w = 1 maps onto both sides of the slit [1, h(1,t)].
        let t = 0.4;
        let tip = spike_map(c(1.0, 0.0), t).unwrap().value;
        for theta in [0.05, 0.2, -0.3] {
            let h = spike_map(Complex64::from_polar(1.0, theta), t).unwrap().value;
            assert!(h.im.abs() < 1e-12);
            assert!(h.re >= 1.0 - 1e-12 && h.re <= tip.re + 1e-12);
        }
    }

    #[test]
    fn negative_real_axis_point() {
        // h(−1, t) = −1: the antipode of the slit stays fixed.
        let h = spike_map(c(-1.0, 0.0), 0.8).unwrap().value;
        assert!((h - c(-1.0, 0.0)).norm() < 1e-12);
        let h = spike_map(c(-3.0, 0.0), 0.8).unwrap().value;
        assert!(h.im.abs() < 1e-12 && h.re < -3.0);
    }
}
