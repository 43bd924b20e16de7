use crate::{Error, Result};
use num_complex::Complex64;
use serde::Serialize;
use std::fmt;
use std::str::FromStr;

/// The two exactly solvable interior points at `q = 2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum TheoremCase {
    /// `η₁ = 3`: `ρ = (1−w)(1−w̄)/(1−ww̄)³`, `β(2) = 3`.
    One,
    /// `η₁ = 1`: `ρ = (1−w)(1−w̄)(θ₀ + (w+w̄)θ₁)`, `β(2) = 4`.
    Two,
}

impl TheoremCase {
    pub fn eta_one(self) -> i64 {
        match self {
            TheoremCase::One => 3,
            TheoremCase::Two => 1,
        }
    }

    pub fn beta(self) -> i64 {
        match self {
            TheoremCase::One => 3,
            TheoremCase::Two => 4,
        }
    }

    /// `(θ₀, θ₁)` at `ξ`.
    pub fn thetas(self, xi: Complex64) -> (Complex64, Complex64) {
        let u = Complex64::new(1.0, 0.0) - xi;
        match self {
            TheoremCase::One => (u.powi(-3), Complex64::new(0.0, 0.0)),
            TheoremCase::Two => ((1.0 + xi) / u.powi(4), -u.powi(-4)),
        }
    }

    /// `(θ₀′, θ₁′)` at `ξ`.
    pub fn theta_derivatives(self, xi: Complex64) -> (Complex64, Complex64) {
        let u = Complex64::new(1.0, 0.0) - xi;
        match self {
            TheoremCase::One => (3.0 * u.powi(-4), Complex64::new(0.0, 0.0)),
            TheoremCase::Two => ((5.0 + 3.0 * xi) / u.powi(5), -4.0 * u.powi(-5)),
        }
    }
}

impl fmt::Display for TheoremCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TheoremCase::One => "1",
            TheoremCase::Two => "2",
        })
    }
}

impl FromStr for TheoremCase {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "1" => Ok(TheoremCase::One),
            "2" => Ok(TheoremCase::Two),
            other => Err(Error::parse(other, "case must be 1 or 2")),
        }
    }
}

/// `ρ(w, w̄)` for the exactly solved cases; `w` and `w̄` are independent.
pub fn closed_form_reference(case: TheoremCase, w: Complex64, wbar: Complex64) -> Result<Complex64> {
    let xi = w * wbar;
    if xi.norm() >= 1.0 {
        return Err(Error::Pole { xi });
    }
    let (t0, t1) = case.thetas(xi);
    Ok((1.0 - w) * (1.0 - wbar) * (t0 + (w + wbar) * t1))
}
