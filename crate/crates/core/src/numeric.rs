//! Small numeric utilities shared across modules: exact decimal parsing
//! into big rationals and order-fixed summation.

use crate::{Error, Result};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub type Rational = BigRational;

/// Parses `p/q`, integers and decimal literals (with optional exponent)
/// into an exact rational. `0.1` becomes `1/10`, not its binary expansion.
pub fn parse_rational(input: &str) -> Result<Rational> {
    let s = input.trim();
    if s.is_empty() {
        return Err(Error::parse(input, "empty number"));
    }
    if let Some((p, q)) = s.split_once('/') {
        let p = parse_rational(p)?;
        let q = parse_rational(q)?;
        if q.is_zero() {
            return Err(Error::parse(input, "zero denominator"));
        }
        return Ok(p / q);
    }
    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(pos) => {
            let e: i32 = s[pos + 1..]
                .parse()
                .map_err(|_| Error::parse(input, "bad exponent"))?;
            (&s[..pos], e)
        }
        None => (s, 0),
    };
    let (negative, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(Error::parse(input, "no digits"));
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return Err(Error::parse(input, "not a number"));
    }
    let all: String = format!("{int_part}{frac_part}");
    let numer: BigInt = if all.is_empty() {
        BigInt::zero()
    } else {
        all.parse().map_err(|_| Error::parse(input, "not a number"))?
    };
    let scale = exponent - frac_part.len() as i32;
    let ten = BigInt::from(10u32);
    let mut r = Rational::from_integer(numer);
    if scale >= 0 {
        r *= Rational::from_integer(num_traits::pow(ten, scale as usize));
    } else {
        r /= Rational::from_integer(num_traits::pow(ten, (-scale) as usize));
    }
    Ok(if negative { -r } else { r })
}

/// The rational whose decimal expansion is the shortest round-trip
/// representation of `x`.
pub fn rational_from_f64(x: f64) -> Result<Rational> {
    if !x.is_finite() {
        return Err(Error::parse(x.to_string(), "not finite"));
    }
    parse_rational(&format!("{x:e}"))
}

pub fn rational_to_f64(r: &Rational) -> f64 {
    if let Some(v) = r.to_f64() {
        if v.is_finite() {
            return v;
        }
    }
    // Huge numerators/denominators: scale down by bit shifting.
    let shift = (r.numer().bits() as i64 - r.denom().bits() as i64).clamp(-1000, 1000);
    let scaled = if shift >= 0 {
        r / Rational::from_integer(BigInt::one() << shift as usize)
    } else {
        r * Rational::from_integer(BigInt::one() << (-shift) as usize)
    };
    scaled.to_f64().unwrap_or(f64::NAN) * 2f64.powi(shift as i32)
}

pub fn is_integer(r: &Rational) -> bool {
    r.denom().is_one()
}

pub fn abs_rational(r: &Rational) -> Rational {
    r.abs()
}

/// Pairwise (cascade) summation with a fixed tree shape that depends only
/// on `values.len()`, so results are bit-stable across thread counts.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    const LEAF: usize = 8;
    if values.len() <= LEAF {
        return values.iter().sum();
    }
    let mid = values.len() / 2;
    pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
}

/// Sample mean and standard error of the mean, both through
/// [`pairwise_sum`].
pub fn mean_and_std_error(values: &[f64]) -> (f64, f64) {
    let n = values.len();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = pairwise_sum(values) / n as f64;
    if n < 2 {
        return (mean, f64::NAN);
    }
    let sq: Vec<f64> = values.iter().map(|v| (v - mean) * (v - mean)).collect();
    let var = pairwise_sum(&sq) / (n - 1) as f64;
    (mean, (var / n as f64).sqrt())
}

/// Ordinary least squares fit `y = slope·x + intercept`; returns
/// `(slope, intercept, max |residual|)`.
pub fn linear_fit(xs: &[f64], ys: &[f64]) -> (f64, f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let (mut sxx, mut sxy) = (0.0, 0.0);
    for (x, y) in xs.iter().zip(ys) {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let resid = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| (y - slope * x - intercept).abs())
        .fold(0.0, f64::max);
    (slope, intercept, resid)
}
