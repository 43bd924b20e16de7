use super::grid::MomentGrid;
use super::scalar::Scalar;
use crate::{Error, Result, Version};
use num_complex::Complex64;
use serde::Serialize;

/// Tail estimates above this fraction of the value raise a warning.
pub const TAIL_WARNING_FRACTION: f64 = 0.01;

#[derive(Debug, Clone, Serialize)]
pub struct RhoValue {
    pub value: f64,
    /// Imaginary residue of the truncated sum (zero for symmetric grids).
    pub imag: f64,
    pub tail_bound: f64,
    pub warning: Option<String>,
}

/// Sums `Σ ρ_ij x^{i−lo} x̄^{j−lo}` with `x = w` (interior) or `1/w`
/// (exterior), i.e. the series at `(w, w̄)` up to the overall
/// `w w̄` power of the exterior Laurent expansion.
pub fn rho_eval<S: Scalar>(grid: &MomentGrid<S>, w: Complex64) -> Result<RhoValue> {
    if !(w.re.is_finite() && w.im.is_finite()) {
        return Err(Error::invalid("w", "must be finite"));
    }
    let x = match grid.version() {
        Version::Interior if w.norm() < 1.0 => w,
        Version::Exterior if w.norm() > 1.0 => 1.0 / w,
        Version::Interior => return Err(Error::Domain(format!("interior series needs |w| < 1, got {w}"))),
        Version::Exterior => return Err(Error::Domain(format!("exterior series needs |w| > 1, got {w}"))),
    };
    let dim = grid.dim();
    let mut pow = vec![Complex64::new(1.0, 0.0); dim];
    for k in 1..dim {
        pow[k] = pow[k - 1] * x;
    }
    let lo = grid.lowest();
    let mut total = Complex64::new(0.0, 0.0);
    let mut last_shell = 0.0;
    for (a, i) in grid.indices().enumerate() {
        for (b, j) in grid.indices().enumerate() {
            let rho = grid.get(i, j).to_f64();
            if rho == 0.0 {
                continue;
            }
            let t = rho * pow[a] * pow[b].conj();
            total += t;
            if a.max(b) == dim - 1 {
                last_shell += t.norm();
            }
        }
    }
    // ratio of consecutive diagonal terms extrapolated as a geometric tail
    let n = grid.size() as i64;
    let x2 = x.norm_sqr();
    let top = grid.get(n, n).to_f64().abs();
    let below = if n > lo { grid.get(n - 1, n - 1).to_f64().abs() } else { 0.0 };
    let tail_bound = if top == 0.0 {
        0.0
    } else if below == 0.0 {
        f64::INFINITY
    } else {
        let ratio = top / below * x2;
        if ratio < 1.0 {
            last_shell * ratio / (1.0 - ratio)
        } else {
            f64::INFINITY
        }
    };
    let value = total.re;
    let warning = (tail_bound > TAIL_WARNING_FRACTION * value.abs()).then(|| {
        format!("tail estimate {tail_bound:.3e} exceeds 1% of the truncated value {value:.6e}")
    });
    Ok(RhoValue {
        value,
        imag: total.im,
        tail_bound,
        warning,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::Rational;
    use crate::recurrence::build_grid;

    #[test]
    fn case_one_at_half() {
        let g = build_grid(Version::Interior, &"uniform:3".parse().unwrap(), 2.0, 64).unwrap();
        let v = rho_eval(&g, Complex64::new(0.5, 0.0)).unwrap();
        assert!((v.value - 16.0 / 27.0).abs() <= v.tail_bound.max(1e-14));
        assert!(v.warning.is_none());
    }

    #[test]
    fn origin_is_one() {
        let g = build_grid(
            Version::Interior,
            &"brownian:3/2".parse().unwrap(),
            Rational::from_integer(3.into()),
            10,
        )
        .unwrap();
        let v = rho_eval(&g, Complex64::new(0.0, 0.0)).unwrap();
        assert_eq!(v.value, 1.0);
    }

    #[test]
    fn exterior_zero_driver_at_two() {
        let g = build_grid(Version::Exterior, &"table:;0".parse().unwrap(), 2.0, 8).unwrap();
        let v = rho_eval(&g, Complex64::new(2.0, 0.0)).unwrap();
        assert!((v.value - 9.0 / 16.0).abs() < 1e-15);
    }

    #[test]
    fn domain_checks() {
        let g = build_grid(Version::Interior, &"uniform:3".parse().unwrap(), 2.0, 4).unwrap();
        assert!(rho_eval(&g, Complex64::new(1.5, 0.0)).is_err());
        let g = build_grid(Version::Exterior, &"uniform:3".parse().unwrap(), 2.0, 4).unwrap();
        assert!(rho_eval(&g, Complex64::new(0.5, 0.0)).is_err());
    }
}
