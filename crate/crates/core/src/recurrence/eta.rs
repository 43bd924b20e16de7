use crate::levy::LevyDescriptor;
use crate::numeric::{parse_rational, rational_from_f64, rational_to_f64, Rational};
use crate::{Error, Result};
use num_traits::{Signed, Zero};
use std::fmt;
use std::str::FromStr;

/// Characteristic exponents `η_m` feeding the recurrence coefficients.
#[derive(Debug, Clone, PartialEq)]
pub enum EtaProfile {
    Levy(LevyDescriptor),
    /// `η_1, η_2, …` given directly; every `|m|` past the table takes `tail`.
    Table { values: Vec<Rational>, tail: Rational },
}

impl EtaProfile {
    pub fn table(values: &[f64], tail: f64) -> Result<Self> {
        let p = EtaProfile::Table {
            values: values.iter().map(|&x| rational_from_f64(x)).collect::<Result<_>>()?,
            tail: rational_from_f64(tail)?,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            EtaProfile::Levy(d) => d.validate(),
            EtaProfile::Table { values, tail } => {
                if values.iter().chain(std::iter::once(tail)).any(|v| v.is_negative()) {
                    Err(Error::invalid("eta", "exponents must be non-negative"))
                } else {
                    Ok(())
                }
            }
        }
    }

    pub fn eval_exact(&self, m: i64) -> Rational {
        if m == 0 {
            return Rational::zero();
        }
        match self {
            EtaProfile::Levy(d) => d.characteristic_exponent_exact(m),
            EtaProfile::Table { values, tail } => {
                let k = m.unsigned_abs() as usize;
                values.get(k - 1).unwrap_or(tail).clone()
            }
        }
    }

    pub fn eval(&self, m: i64) -> f64 {
        match self {
            EtaProfile::Levy(d) if m != 0 => d.characteristic_exponent(m),
            _ => rational_to_f64(&self.eval_exact(m)),
        }
    }
}

impl From<LevyDescriptor> for EtaProfile {
    fn from(d: LevyDescriptor) -> Self {
        EtaProfile::Levy(d)
    }
}

impl fmt::Display for EtaProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EtaProfile::Levy(d) => d.fmt(f),
            EtaProfile::Table { values, tail } => {
                f.write_str("table:")?;
                for (k, v) in values.iter().enumerate() {
                    if k > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{v}")?;
                }
                write!(f, ";{tail}")
            }
        }
    }
}

/// Accepts every Lévy descriptor form plus `table:η1,η2,…;tail`.
impl FromStr for EtaProfile {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let Some(body) = s.strip_prefix("table:") else {
            return Ok(EtaProfile::Levy(s.parse()?));
        };
        let (head, tail) = body
            .split_once(';')
            .ok_or_else(|| Error::parse(s, "table needs `;tail`"))?;
        let values = head
            .split(',')
            .map(str::trim)
            .filter(|v| !v.is_empty())
            .map(parse_rational)
            .collect::<Result<Vec<_>>>()?;
        let p = EtaProfile::Table {
            values,
            tail: parse_rational(tail.trim())?,
        };
        p.validate()?;
        Ok(p)
    }
}
