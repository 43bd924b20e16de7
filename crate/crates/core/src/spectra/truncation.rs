use crate::{Error, Result, Version};
use serde::Serialize;
use std::io::Write;

/// Relative tolerance for the `A_{−M} = 0` consistency check.
pub const CURVE_TOLERANCE: f64 = 1e-12;

/// Coefficients `(A_n, B_n, C_n)` of the three-term differential recurrence.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Rec3 {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

pub fn rec3_coeffs(n: i64, gamma: f64, kappa: f64) -> Rec3 {
    let n = n as f64;
    let g = gamma;
    Rec3 {
        a: 0.5 * kappa * (n - g).powi(2) + n - 3.0 * g - 0.5 * kappa * g * (1.0 - g),
        b: -kappa * (n * n + g * g - g) + 6.0 * g,
        c: 0.5 * kappa * (n * n - 2.0 * g + 2.0 * g * g) - n - 6.0 * g,
    }
}

/// Magnitude scale of `A_n` used to judge `A_n ≈ 0`.
pub(crate) fn a_scale(n: i64, gamma: f64, kappa: f64) -> f64 {
    let n = n as f64;
    1.0 + 0.5 * kappa * ((n - gamma).powi(2) + (gamma * (1.0 - gamma)).abs()) + n.abs() + 3.0 * gamma.abs()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TruncationPoint {
    pub version: Version,
    #[serde(rename = "M")]
    pub m: usize,
    pub gamma: f64,
    pub kappa: f64,
    pub q: f64,
}

/// The `(κ, q)` at which the expansion terminates at order `m`.
pub fn truncation_curve(version: Version, m: usize, gamma: f64) -> Result<TruncationPoint> {
    if !gamma.is_finite() {
        return Err(Error::invalid("gamma", "must be finite"));
    }
    let mf = m as f64;
    let g = gamma;
    let (num, den) = match version {
        Version::Interior => (2.0 * (mf + 3.0 * g), mf * mf + 2.0 * mf * g + 2.0 * g * g - g),
        Version::Exterior => (2.0 * (mf - g), mf * mf + 2.0 * mf * g + g),
    };
    if den.abs() <= 1e-14 * (1.0 + mf * mf + g * g) {
        return Err(Error::TruncationPole { m, gamma });
    }
    let kappa = num / den;
    if kappa <= 0.0 {
        return Err(Error::invalid(
            "gamma",
            format!("M = {m}, γ = {gamma} gives κ = {kappa} <= 0"),
        ));
    }
    let q = g * (mf + g) * (2.0 * mf + 1.0 + g) / den;
    if version == Version::Interior {
        let a = rec3_coeffs(-(m as i64), g, kappa).a;
        if a.abs() > CURVE_TOLERANCE * a_scale(-(m as i64), g, kappa) {
            return Err(Error::OffCurve {
                m,
                gamma,
                kappa,
                residual: a,
            });
        }
    }
    Ok(TruncationPoint {
        version,
        m,
        gamma,
        kappa,
        q,
    })
}

/// One row of the truncation CSV. Missing extractor values print empty.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TruncationRow {
    pub point: TruncationPoint,
    pub lambda_frobenius: Option<f64>,
    pub lambda_ode: Option<f64>,
    pub beta_closed_form: Option<f64>,
}

pub fn write_truncation_csv<W: Write>(rows: &[TruncationRow], mut out: W) -> std::io::Result<()> {
    let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
    writeln!(out, "M,gamma,kappa,q,lambda_frobenius,lambda_ode,beta_closed_form")?;
    for r in rows {
        let p = &r.point;
        writeln!(
            out,
            "{},{},{},{},{},{},{}",
            p.m,
            p.gamma,
            p.kappa,
            p.q,
            opt(r.lambda_frobenius),
            opt(r.lambda_ode),
            opt(r.beta_closed_form)
        )?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectra::q_of_gamma;

    #[test]
    fn curve_examples() {
        let p = truncation_curve(Version::Interior, 0, 1.0).unwrap();
        assert_eq!((p.kappa, p.q), (6.0, 2.0));
        let p = truncation_curve(Version::Interior, 1, 1.0).unwrap();
        assert_eq!((p.kappa, p.q), (2.0, 2.0));
        assert!(matches!(
            truncation_curve(Version::Interior, 0, 0.5),
            Err(Error::TruncationPole { .. })
        ));
        assert!(truncation_curve(Version::Exterior, 0, 1.0).is_err());
    }

    #[test]
    fn curve_points_are_consistent_with_gamma() {
        for m in 0..4 {
            for k in 0..10 {
                let g = 0.8 + 0.1 * k as f64;
                let p = truncation_curve(Version::Interior, m, g).unwrap();
                assert!((q_of_gamma(g, p.kappa) - p.q).abs() < 1e-12 * (1.0 + p.q.abs()));
            }
        }
    }

    #[test]
    fn rec3_examples() {
        for n in -3..=3 {
            let r = rec3_coeffs(n, 1.0, 2.0);
            assert_eq!(r.a, (n * n - n - 2) as f64);
        }
        assert_eq!(rec3_coeffs(-1, 1.0, 2.0).a, 0.0);
        assert_eq!(rec3_coeffs(0, 1.0, 2.0).b, 6.0);
        for (g, k) in [(0.3, 1.0), (1.7, 5.5), (-2.0, 0.1)] {
            let r = rec3_coeffs(0, g, k);
            assert!((r.b + r.c).abs() < 1e-12);
        }
    }
}
