use crate::{Error, Result, Version};
use serde::Serialize;
use std::fmt;

fn check_kappa(kappa: f64) -> Result<()> {
    if kappa > 0.0 && kappa.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid("kappa", format!("must be positive and finite, got {kappa}")))
    }
}

/// Both roots of `q = 2γ + κγ/2 − κγ²/2`, smaller first.
pub fn gamma_roots(q: f64, kappa: f64) -> Result<(f64, f64)> {
    check_kappa(kappa)?;
    if !q.is_finite() {
        return Err(Error::invalid("q", "must be finite"));
    }
    let disc = (kappa + 4.0).powi(2) - 8.0 * q * kappa;
    if disc < 0.0 {
        return Err(Error::Domain(format!(
            "no real γ at q = {q}, κ = {kappa}: q exceeds (κ+4)²/(8κ)"
        )));
    }
    let root = disc.sqrt();
    Ok(((kappa + 4.0 - root) / (2.0 * kappa), (kappa + 4.0 + root) / (2.0 * kappa)))
}

/// Tip exponent, the root continuous through `γ(0) = 0`.
pub fn gamma(q: f64, kappa: f64) -> Result<f64> {
    gamma_roots(q, kappa).map(|r| r.0)
}

/// Inverse of [`gamma`].
pub fn q_of_gamma(gamma: f64, kappa: f64) -> f64 {
    2.0 * gamma + 0.5 * kappa * gamma - 0.5 * kappa * gamma * gamma
}

/// `Q(κ)` (interior) or `Q⁺(κ)` (exterior).
pub fn critical_q(version: Version, kappa: f64) -> f64 {
    match version {
        Version::Interior => {
            (kappa * kappa + 8.0 * kappa + 12.0 - 2.0 * (2.0 * kappa * kappa + 16.0 * kappa + 36.0).sqrt())
                / (16.0 * kappa)
        }
        Version::Exterior => -(kappa + 4.0).powi(2) * (kappa + 8.0) / 128.0,
    }
}

/// Lower and upper branch thresholds in `q`.
pub fn branch_thresholds(version: Version, kappa: f64) -> (f64, f64) {
    let low = -1.0 - 3.0 * kappa / 8.0;
    let high = match version {
        Version::Interior => critical_q(Version::Interior, kappa),
        Version::Exterior => 3.0 * (kappa + 4.0).powi(2) / (32.0 * kappa),
    };
    (low, high)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Branch {
    Low,
    Middle,
    High,
}

impl fmt::Display for Branch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Branch::Low => "low",
            Branch::Middle => "middle",
            Branch::High => "high",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpectrumPoint {
    pub q: f64,
    pub kappa: f64,
    pub beta: f64,
    pub branch: Branch,
}

/// Value of a named branch, whether or not `q` lies in its range.
pub fn branch_value(version: Version, branch: Branch, q: f64, kappa: f64) -> Result<f64> {
    check_kappa(kappa)?;
    Ok(match branch {
        Branch::Low => {
            let g = gamma(q, kappa)?;
            0.5 * kappa * g * g - 2.0 * g - 1.0
        }
        Branch::Middle => {
            let g = gamma(q, kappa)?;
            0.5 * kappa * g * g
        }
        Branch::High => match version {
            Version::Interior => {
                let disc = 1.0 + 2.0 * q * kappa;
                if disc < 0.0 {
                    return Err(Error::Domain(format!("1 + 2qκ < 0 at q = {q}")));
                }
                3.0 * q - 0.5 - 0.5 * disc.sqrt()
            }
            Version::Exterior => q - (kappa + 4.0).powi(2) / (16.0 * kappa),
        },
    })
}

/// Piecewise β(q) with its branch tag.
pub fn beta_closed_form(version: Version, q: f64, kappa: f64) -> Result<SpectrumPoint> {
    check_kappa(kappa)?;
    if !q.is_finite() {
        return Err(Error::invalid("q", "must be finite"));
    }
    let (lo, hi) = branch_thresholds(version, kappa);
    let branch = if q <= lo {
        Branch::Low
    } else if q <= hi {
        Branch::Middle
    } else {
        Branch::High
    };
    Ok(SpectrumPoint {
        q,
        kappa,
        beta: branch_value(version, branch, q, kappa)?,
        branch,
    })
}
