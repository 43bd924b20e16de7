//! Driftless symmetric Lévy processes on the unit circle.
//!
//! A process is described by its characteristic exponents
//! `η_m`, defined through `⟨e^{imL(t)}⟩ = e^{-tη_m}`. Brownian motion of
//! temperature κ has `η_m = κm²/2`; a compound-Poisson process with rate
//! `r` and jump law with Fourier coefficients `ĵ_m` has
//! `η_m = r(1 − ĵ_m)`. Exponents of independent components add.

use crate::numeric::{parse_rational, rational_from_f64, rational_to_f64, Rational};
use crate::{Error, Result};
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp, StandardNormal};
use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

/// Default number of angular cells used to invert a tabulated jump law.
pub const DEFAULT_JUMP_CELLS: usize = 4096;

#[derive(Debug, Clone, PartialEq)]
pub enum LevyDescriptor {
    /// Brownian motion with `⟨(B(t+τ) − B(t))²⟩ = κ|τ|`.
    Brownian { kappa: Rational },
    /// Compound Poisson with jumps uniform on the circle.
    UniformJump { rate: Rational },
    /// Compound Poisson with a symmetric jump law given by its cosine
    /// coefficients `ĵ_1, ĵ_2, …` (missing coefficients are zero).
    TabulatedJump {
        rate: Rational,
        jump_fourier: Vec<Rational>,
        cells: usize,
    },
    Mixture(Vec<LevyDescriptor>),
}

impl LevyDescriptor {
    pub fn brownian(kappa: f64) -> Result<Self> {
        let d = LevyDescriptor::Brownian {
            kappa: rational_from_f64(kappa)?,
        };
        d.validate()?;
        Ok(d)
    }

    pub fn uniform_jump(rate: f64) -> Result<Self> {
        let d = LevyDescriptor::UniformJump {
            rate: rational_from_f64(rate)?,
        };
        d.validate()?;
        Ok(d)
    }

    pub fn tabulated_jump(rate: f64, jump_fourier: &[f64]) -> Result<Self> {
        let d = LevyDescriptor::TabulatedJump {
            rate: rational_from_f64(rate)?,
            jump_fourier: jump_fourier
                .iter()
                .map(|&j| rational_from_f64(j))
                .collect::<Result<_>>()?,
            cells: DEFAULT_JUMP_CELLS,
        };
        d.validate()?;
        Ok(d)
    }

    pub fn mixture(components: Vec<LevyDescriptor>) -> Result<Self> {
        let d = LevyDescriptor::Mixture(components);
        d.validate()?;
        Ok(d)
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            LevyDescriptor::Brownian { kappa } => {
                if kappa.is_negative() {
                    return Err(Error::invalid("kappa", "must be ≥ 0"));
                }
            }
            LevyDescriptor::UniformJump { rate } => {
                if !rate.is_positive() {
                    return Err(Error::invalid("rate", "must be > 0"));
                }
            }
            LevyDescriptor::TabulatedJump {
                rate,
                jump_fourier,
                cells,
            } => {
                if !rate.is_positive() {
                    return Err(Error::invalid("rate", "must be > 0"));
                }
                if let Some((m, _)) = jump_fourier
                    .iter()
                    .enumerate()
                    .find(|(_, j)| j.abs() > Rational::one())
                {
                    return Err(Error::invalid(
                        "jump_fourier",
                        format!("|ĵ_{}| exceeds 1", m + 1),
                    ));
                }
                if *cells < 2 {
                    return Err(Error::invalid("cells", "need at least 2 angular cells"));
                }
            }
            LevyDescriptor::Mixture(parts) => {
                if parts.is_empty() {
                    return Err(Error::invalid("mixture", "needs at least one component"));
                }
                for p in parts {
                    p.validate()?;
                }
            }
        }
        Ok(())
    }

    /// `η_m` as an exact rational.
    pub fn characteristic_exponent_exact(&self, m: i64) -> Rational {
        if m == 0 {
            return Rational::zero();
        }
        let m = m.unsigned_abs();
        match self {
            LevyDescriptor::Brownian { kappa } => {
                let m2 = Rational::from_integer((m * m).into());
                kappa * m2 / Rational::from_integer(2.into())
            }
            LevyDescriptor::UniformJump { rate } => rate.clone(),
            LevyDescriptor::TabulatedJump {
                rate, jump_fourier, ..
            } => {
                let j = jump_fourier
                    .get(m as usize - 1)
                    .cloned()
                    .unwrap_or_else(Rational::zero);
                rate * (Rational::one() - j)
            }
            LevyDescriptor::Mixture(parts) => parts
                .iter()
                .map(|p| p.characteristic_exponent_exact(m as i64))
                .fold(Rational::zero(), |a, b| a + b),
        }
    }

    pub fn characteristic_exponent(&self, m: i64) -> f64 {
        rational_to_f64(&self.characteristic_exponent_exact(m))
    }

    /// Total Brownian temperature over all components.
    fn brownian_kappa(&self) -> f64 {
        match self {
            LevyDescriptor::Brownian { kappa } => rational_to_f64(kappa),
            LevyDescriptor::Mixture(parts) => parts.iter().map(|p| p.brownian_kappa()).sum(),
            _ => 0.0,
        }
    }

    fn jump_components(&self, out: &mut Vec<JumpSampler>) -> Result<()> {
        match self {
            LevyDescriptor::Brownian { .. } => {}
            LevyDescriptor::UniformJump { rate } => out.push(JumpSampler {
                rate: rational_to_f64(rate),
                law: JumpLaw::Uniform,
            }),
            LevyDescriptor::TabulatedJump {
                rate,
                jump_fourier,
                cells,
            } => out.push(JumpSampler {
                rate: rational_to_f64(rate),
                law: JumpLaw::tabulated(jump_fourier, *cells)?,
            }),
            LevyDescriptor::Mixture(parts) => {
                for p in parts {
                    p.jump_components(out)?;
                }
            }
        }
        Ok(())
    }
}

impl fmt::Display for LevyDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LevyDescriptor::Brownian { kappa } => write!(f, "brownian:{kappa}"),
            LevyDescriptor::UniformJump { rate } => write!(f, "uniform:{rate}"),
            LevyDescriptor::TabulatedJump {
                rate,
                jump_fourier,
                cells,
            } => {
                write!(f, "jump:{rate}:")?;
                for (k, j) in jump_fourier.iter().enumerate() {
                    if k > 0 {
                        f.write_str(";")?;
                    }
                    write!(f, "{j}")?;
                }
                if *cells != DEFAULT_JUMP_CELLS {
                    write!(f, "@{cells}")?;
                }
                Ok(())
            }
            LevyDescriptor::Mixture(parts) => {
                f.write_str("mix(")?;
                for (k, p) in parts.iter().enumerate() {
                    if k > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{p}")?;
                }
                f.write_str(")")
            }
        }
    }
}

/// Splits on commas that are not nested inside parentheses.
pub(crate) fn split_top_level(s: &str) -> Result<Vec<&str>> {
    let mut parts = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    for (k, c) in s.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => {
                depth -= 1;
                if depth < 0 {
                    return Err(Error::parse(s, "unbalanced parentheses"));
                }
            }
            ',' if depth == 0 => {
                parts.push(s[start..k].trim());
                start = k + 1;
            }
            _ => {}
        }
    }
    if depth != 0 {
        return Err(Error::parse(s, "unbalanced parentheses"));
    }
    parts.push(s[start..].trim());
    Ok(parts)
}

impl FromStr for LevyDescriptor {
    type Err = Error;

    /// Textual forms: `brownian:<kappa>`, `uniform:<rate>`,
    /// `jump:<rate>:<j1>;<j2>;…[@cells]`, `mix(<d>,<d>,…)`.
    fn from_str(input: &str) -> Result<Self> {
        let s = input.trim();
        let d = if let Some(inner) = s.strip_prefix("mix(").and_then(|r| r.strip_suffix(')')) {
            let parts = split_top_level(inner)?
                .into_iter()
                .map(str::parse)
                .collect::<Result<Vec<_>>>()?;
            LevyDescriptor::Mixture(parts)
        } else {
            let (kind, rest) = s
                .split_once(':')
                .ok_or_else(|| Error::parse(input, "expected `<kind>:<parameter>`"))?;
            match kind.trim() {
                "brownian" | "sle" => LevyDescriptor::Brownian {
                    kappa: parse_rational(rest)?,
                },
                "uniform" => LevyDescriptor::UniformJump {
                    rate: parse_rational(rest)?,
                },
                "jump" => {
                    let (rate, coeffs) = rest.split_once(':').unwrap_or((rest, ""));
                    let (coeffs, cells) = match coeffs.split_once('@') {
                        Some((c, n)) => (
                            c,
                            n.trim()
                                .parse()
                                .map_err(|_| Error::parse(input, "bad cell count"))?,
                        ),
                        None => (coeffs, DEFAULT_JUMP_CELLS),
                    };
                    let jump_fourier = coeffs
                        .split(';')
                        .filter(|c| !c.trim().is_empty())
                        .map(parse_rational)
                        .collect::<Result<_>>()?;
                    LevyDescriptor::TabulatedJump {
                        rate: parse_rational(rate)?,
                        jump_fourier,
                        cells,
                    }
                }
                other => return Err(Error::parse(input, format!("unknown process `{other}`"))),
            }
        };
        d.validate()?;
        Ok(d)
    }
}

#[derive(Debug, Clone)]
enum JumpLaw {
    Uniform,
    /// Inverse CDF over equal cells on `(−π, π]`.
    Tabulated { cdf: Vec<f64> },
}

impl JumpLaw {
    fn tabulated(jump_fourier: &[Rational], cells: usize) -> Result<Self> {
        let coeffs: Vec<f64> = jump_fourier.iter().map(rational_to_f64).collect();
        let width = 2.0 * PI / cells as f64;
        let mut density = Vec::with_capacity(cells);
        for k in 0..cells {
            let phi = -PI + (k as f64 + 0.5) * width;
            let p = 1.0
                + 2.0
                    * coeffs
                        .iter()
                        .enumerate()
                        .map(|(m, j)| j * ((m + 1) as f64 * phi).cos())
                        .sum::<f64>();
            density.push(p);
        }
        let max = density.iter().cloned().fold(0.0, f64::max);
        if density.iter().any(|&p| p < -1e-9 * max.max(1.0)) {
            return Err(Error::invalid(
                "jump_fourier",
                "coefficients do not define a nonnegative jump density",
            ));
        }
        let mut cdf = Vec::with_capacity(cells);
        let mut acc = 0.0;
        for p in density {
            acc += p.max(0.0);
            cdf.push(acc);
        }
        for c in &mut cdf {
            *c /= acc;
        }
        Ok(JumpLaw::Tabulated { cdf })
    }

    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match self {
            JumpLaw::Uniform => -PI + 2.0 * PI * rng.random::<f64>(),
            JumpLaw::Tabulated { cdf } => {
                let u: f64 = rng.random();
                let k = cdf.partition_point(|&c| c < u).min(cdf.len() - 1);
                let width = 2.0 * PI / cdf.len() as f64;
                -PI + (k as f64 + rng.random::<f64>()) * width
            }
        }
    }
}

#[derive(Debug, Clone)]
struct JumpSampler {
    rate: f64,
    law: JumpLaw,
}

/// One constant piece of a driver path.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Segment {
    pub duration: f64,
    pub level: f64,
}

/// Right-continuous piecewise-constant driver starting at `L(0) = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct DriverPath {
    pub segments: Vec<Segment>,
    pub total_duration: f64,
    /// `L(horizon)`: the level after the increment over the last segment.
    pub end_level: f64,
}

impl DriverPath {
    /// `L(t)` for `0 ≤ t < total_duration`; `end_level` at the horizon.
    pub fn level_at(&self, t: f64) -> f64 {
        let mut start = 0.0;
        for seg in &self.segments {
            let end = start + seg.duration;
            if t < end {
                return seg.level;
            }
            start = end;
        }
        self.end_level
    }

    pub fn write_csv<W: std::io::Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "duration,level")?;
        for s in &self.segments {
            writeln!(out, "{},{}", s.duration, s.level)?;
        }
        Ok(())
    }
}

/// Generator for path number `index` of an ensemble seeded with `seed`.
/// Streams are independent of evaluation order and worker count.
pub fn path_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Samples a driver on `[0, horizon]`: Brownian components in steps of at
/// most `max_step`, jump components exactly at exponential arrival times.
pub fn sample_path(d: &LevyDescriptor, horizon: f64, max_step: f64, seed: u64) -> Result<DriverPath> {
    sample_path_with(d, horizon, max_step, &mut path_rng(seed, 0))
}

pub fn sample_path_with<R: Rng + ?Sized>(
    d: &LevyDescriptor,
    horizon: f64,
    max_step: f64,
    rng: &mut R,
) -> Result<DriverPath> {
    if !horizon.is_finite() || horizon <= 0.0 {
        return Err(Error::invalid("horizon", "must be finite and > 0"));
    }
    if !max_step.is_finite() || max_step <= 0.0 {
        return Err(Error::invalid("max_step", "must be finite and > 0"));
    }
    let kappa = d.brownian_kappa();
    let mut jumps = Vec::new();
    d.jump_components(&mut jumps)?;

    // (time, jump angle) for every breakpoint; Brownian grid points carry 0.
    let mut breaks: Vec<(f64, f64)> = Vec::new();
    if kappa > 0.0 {
        let steps = (horizon / max_step).ceil().max(1.0) as usize;
        let dt = horizon / steps as f64;
        breaks.extend((1..steps).map(|k| (k as f64 * dt, 0.0)));
    }
    for j in &jumps {
        let exp = Exp::new(j.rate).map_err(|e| Error::invalid("rate", e.to_string()))?;
        let mut t = 0.0;
        loop {
            t += exp.sample(rng);
            if t >= horizon {
                break;
            }
            breaks.push((t, j.law.sample(rng)));
        }
    }
    breaks.sort_by(|a, b| a.0.total_cmp(&b.0));

    let sigma = kappa.sqrt();
    let gaussian = |dt: f64, rng: &mut R| -> f64 {
        if kappa > 0.0 {
            sigma * dt.sqrt() * Distribution::<f64>::sample(&StandardNormal, rng)
        } else {
            0.0
        }
    };
    let mut segments = Vec::with_capacity(breaks.len() + 1);
    let mut level = 0.0;
    let mut start = 0.0;
    for (t, jump) in breaks {
        let dt = t - start;
        if dt <= 0.0 {
            // Coincident arrivals: fold into the current breakpoint.
            level += jump;
            continue;
        }
        segments.push(Segment {
            duration: dt,
            level,
        });
        level += gaussian(dt, rng) + jump;
        start = t;
    }
    let dt = horizon - start;
    segments.push(Segment {
        duration: dt,
        level,
    });
    let end_level = level + gaussian(dt, rng);
    let total_duration = segments.iter().map(|s| s.duration).sum();
    Ok(DriverPath {
        segments,
        total_duration,
        end_level,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn brownian_exponent_is_kappa_m_squared_over_two() {
        let d = LevyDescriptor::brownian(6.0).unwrap();
        assert_eq!(d.characteristic_exponent(1), 3.0);
        assert_eq!(
            d.characteristic_exponent_exact(3),
            Rational::from_integer(27.into())
        );
    }

    #[test]
    fn zero_mode_vanishes() {
        for d in ["brownian:6", "uniform:3", "jump:2:0.5;0.25", "mix(brownian:2,uniform:1)"] {
            let d: LevyDescriptor = d.parse().unwrap();
            assert_eq!(d.characteristic_exponent(0), 0.0);
        }
    }

    #[test]
    fn uniform_jump_exponent_matches_quadrature() {
        // η_m = rate·(1 − ĵ(m)), with ĵ(m) = (1/2π)∫cos(mφ)dφ by midpoint rule.
        let rate = 3.0;
        let n = 20_000;
        let h = 2.0 * PI / n as f64;
        let jhat: f64 = (0..n)
            .map(|k| (2.0 * (-PI + (k as f64 + 0.5) * h)).cos() * h)
            .sum::<f64>()
            / (2.0 * PI);
        let oracle = rate * (1.0 - jhat);
        let d = LevyDescriptor::uniform_jump(rate).unwrap();
        assert!((d.characteristic_exponent(2) - oracle).abs() < 1e-10);
        assert_eq!(d.characteristic_exponent(2), 3.0);
    }

    #[test]
    fn mixture_adds_exponents() {
        let d: LevyDescriptor = "mix(brownian:2,uniform:1)".parse().unwrap();
        assert_eq!(d.characteristic_exponent(2), 4.0 + 1.0);
    }

    #[test]
    fn descriptor_text_round_trips() {
        for s in ["brownian:6", "uniform:1/3", "jump:2:1/2;1/4", "mix(brownian:2,mix(uniform:1,brownian:1/2))"] {
            let d: LevyDescriptor = s.parse().unwrap();
            assert_eq!(d.to_string(), s);
            assert_eq!(d.to_string().parse::<LevyDescriptor>().unwrap(), d);
        }
    }

    #[test]
    fn rejects_bad_descriptors() {
        assert!("brownian:-1".parse::<LevyDescriptor>().is_err());
        assert!("uniform:0".parse::<LevyDescriptor>().is_err());
        assert!("jump:1:1.5".parse::<LevyDescriptor>().is_err());
        assert!("mix()".parse::<LevyDescriptor>().is_err());
        assert!("cauchy:1".parse::<LevyDescriptor>().is_err());
        assert!("mix(brownian:1".parse::<LevyDescriptor>().is_err());
    }

    #[test]
    fn rejects_non_finite_sampling_knobs() {
        let d = LevyDescriptor::brownian(2.0).unwrap();
        assert!(sample_path(&d, f64::NAN, 0.1, 1).is_err());
        assert!(sample_path(&d, 1.0, f64::INFINITY, 1).is_err());
        assert!(sample_path(&d, 1.0, 0.0, 1).is_err());
    }

    #[test]
    fn path_starts_at_zero_and_durations_sum() {
        let d: LevyDescriptor = "mix(brownian:2,uniform:3)".parse().unwrap();
        let p = sample_path(&d, 2.0, 0.01, 7).unwrap();
        assert_eq!(p.segments[0].level, 0.0);
        assert!(p.segments.iter().all(|s| s.duration > 0.0 && s.duration <= 0.01 + 1e-15));
        assert!((p.total_duration - 2.0).abs() < 1e-12);
        assert_eq!(p.level_at(0.0), 0.0);
    }

    #[test]
    fn sampling_is_deterministic_per_seed() {
        let d: LevyDescriptor = "mix(brownian:2,uniform:3)".parse().unwrap();
        let a = sample_path(&d, 1.0, 0.05, 42).unwrap();
        let b = sample_path(&d, 1.0, 0.05, 42).unwrap();
        let c = sample_path(&d, 1.0, 0.05, 43).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn jump_only_paths_have_one_segment_per_arrival() {
        let d = LevyDescriptor::uniform_jump(3.0).unwrap();
        let p = sample_path(&d, 2.0, 1e-3, 5).unwrap();
        // No Brownian grid: segments are separated by jumps only.
        for w in p.segments.windows(2) {
            assert_ne!(w[0].level, w[1].level);
        }
    }

    #[test]
    fn tabulated_law_with_negative_density_is_rejected_at_sampling() {
        let d: LevyDescriptor = "jump:1:1;1;1".parse().unwrap();
        assert!(sample_path(&d, 1.0, 0.1, 1).is_err());
    }
}
