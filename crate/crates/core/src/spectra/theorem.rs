use crate::numeric::Rational;
use crate::recurrence::{build_grid, EtaProfile, TheoremCase};
use crate::{Result, Version};
use num_bigint::BigInt;
use num_complex::Complex64;
use serde::Serialize;

pub const ODE_POINTS: usize = 100;
pub const ODE_XI_MAX: f64 = 0.99;
pub const ODE_RESIDUAL_LIMIT: f64 = 1e-12;
pub const DIAGONAL_CHECKED: usize = 32;

#[derive(Debug, Clone, Serialize)]
pub struct TheoremReport {
    pub case: TheoremCase,
    pub eta: String,
    /// Largest relative residual of the θ-system on the ξ grid.
    pub ode_residual: f64,
    pub diagonal_checked: usize,
    pub diagonal_exact: bool,
    pub theta0_at_zero: f64,
    pub theta1_at_zero: f64,
    pub failures: Vec<String>,
}

impl TheoremReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Residuals `(value, term-magnitude sum)` of the θ-equations at `ξ`.
fn theta_residuals(case: TheoremCase, xi: f64) -> Vec<(f64, f64)> {
    let z = Complex64::new(xi, 0.0);
    let (t0, t1) = case.thetas(z);
    let (d0, d1) = case.theta_derivatives(z);
    let (t0, t1, d0, d1) = (t0.re, t1.re, d0.re, d1.re);
    match case {
        TheoremCase::One => {
            let terms = [(xi - 1.0) * d0, 3.0 * t0];
            vec![(terms.iter().sum(), terms.iter().map(|t| t.abs()).sum())]
        }
        TheoremCase::Two => {
            let first = [(xi - 1.0) * d0, 3.0 * t0, -2.0 * t1];
            let second = [xi * (xi - 1.0) * d1, (3.0 * xi - 1.0) * t1, -t0];
            [first.as_slice(), second.as_slice()]
                .iter()
                .map(|ts| (ts.iter().sum(), ts.iter().map(|t| t.abs()).sum()))
                .collect()
        }
    }
}

/// Diagonal `ρ_ii`, `i = 1..=n`, read off the closed form as the
/// `ξ^{i−1}` coefficients of `(1+ξ)θ₀ − 2ξθ₁`.
pub fn closed_form_diagonal(case: TheoremCase, n: usize) -> Vec<BigInt> {
    let binom = |top: i64, k: i64| -> BigInt {
        if top < k || k < 0 {
            return BigInt::from(0);
        }
        (0..k).fold(BigInt::from(1), |acc, j| acc * (top - j) / (j + 1))
    };
    // series coefficients of θ₀ and θ₁
    let theta = |k: i64| -> (BigInt, BigInt) {
        match case {
            TheoremCase::One => (binom(k + 2, 2), BigInt::from(0)),
            TheoremCase::Two => (binom(k + 3, 3) + binom(k + 2, 3), -binom(k + 3, 3)),
        }
    };
    (0..n as i64)
        .map(|k| {
            let (a, _) = theta(k);
            let (a_prev, b_prev) = if k > 0 { theta(k - 1) } else { (BigInt::from(0), BigInt::from(0)) };
            a + a_prev - 2 * b_prev
        })
        .collect()
}

/// Checks the exactly solved `q = 2` interior case against its θ-system,
/// the exact grid and the normalisation at the origin.
pub fn verify_q2_theorem(case: TheoremCase) -> Result<TheoremReport> {
    let mut failures = Vec::new();
    let ode_residual = (0..ODE_POINTS)
        .map(|k| ODE_XI_MAX * k as f64 / (ODE_POINTS - 1) as f64)
        .flat_map(|xi| theta_residuals(case, xi))
        .map(|(r, scale)| r.abs() / scale.max(f64::MIN_POSITIVE))
        .fold(0.0, f64::max);
    if ode_residual >= ODE_RESIDUAL_LIMIT {
        failures.push(format!("θ-system residual {ode_residual:e} >= {ODE_RESIDUAL_LIMIT:e}"));
    }

    let kappa = 2 * case.eta_one();
    let eta: EtaProfile = format!("brownian:{kappa}").parse()?;
    let grid = build_grid(
        Version::Interior,
        &eta,
        Rational::from_integer(2.into()),
        DIAGONAL_CHECKED,
    )?;
    let power = (case.beta() - 1) as u32;
    let series = closed_form_diagonal(case, DIAGONAL_CHECKED);
    let mut diagonal_exact = true;
    for i in 1..=DIAGONAL_CHECKED as i64 {
        let want = Rational::from_integer(BigInt::from(i).pow(power));
        let got = grid.get(i, i);
        let from_series = Rational::from_integer(series[(i - 1) as usize].clone());
        if *got != want || from_series != want {
            diagonal_exact = false;
            failures.push(format!("ρ_{i}{i}: grid {got}, closed form {from_series}, expected {want}"));
        }
    }

    let (t0, t1) = case.thetas(Complex64::new(0.0, 0.0));
    if t0.re != 1.0 {
        failures.push(format!("θ₀(0) = {} != 1", t0.re));
    }
    if !t1.re.is_finite() {
        failures.push("θ₁(0) is not finite".into());
    }
    Ok(TheoremReport {
        case,
        eta: eta.to_string(),
        ode_residual,
        diagonal_checked: DIAGONAL_CHECKED,
        diagonal_exact,
        theta0_at_zero: t0.re,
        theta1_at_zero: t1.re,
        failures,
    })
}
