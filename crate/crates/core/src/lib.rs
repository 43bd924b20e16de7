//! Integral-means spectra and derivative moments of whole-plane
//! Lévy–Loewner evolutions.
//!
//! Three independent routes to the same numbers live side by side:
//!
//! * [`slit`]: Monte-Carlo composition of elementary slit maps driven by
//!   sampled [`levy`] paths;
//! * [`recurrence`]: the nine-term recurrence for the Taylor/Laurent
//!   coefficients of `⟨|F′|^q⟩`, solved exactly over big rationals or in
//!   floating point;
//! * [`spectra`]: closed-form β-spectra, truncation curves and the
//!   tridiagonal/ODE extraction of blow-up exponents.
//!
//! [`multifractal`] holds the Legendre-transform calculus relating β(q),
//! f(α), τ(q) and D(q).

pub mod error;
pub mod levy;
pub mod multifractal;
pub mod numeric;
pub mod recurrence;
pub mod slit;
pub mod spectra;

pub use error::{Error, Result};

use serde::Serialize;
use std::fmt;
use std::str::FromStr;

/// Which whole-plane problem a quantity refers to.
///
/// `Exterior` is the bounded version (growth from the origin outward,
/// maps defined for `|w| > 1`); `Interior` is its inversion, growing from
/// infinity inward, with maps defined on the unit disc.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Version {
    Interior,
    Exterior,
}

impl fmt::Display for Version {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Version::Interior => "interior",
            Version::Exterior => "exterior",
        })
    }
}

impl FromStr for Version {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "interior" | "unbounded" => Ok(Version::Interior),
            "exterior" | "bounded" => Ok(Version::Exterior),
            other => Err(Error::parse(other, "expected `interior` or `exterior`")),
        }
    }
}
