use crate::numeric::{rational_to_f64, Rational};
use num_traits::{One, Signed, Zero};
use serde::Serialize;
use std::fmt::Debug;
use std::ops::Neg;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ScalarKind {
    Exact,
    Float,
}

/// Field the recurrence is solved over: big rationals (exact) or `f64`.
pub trait Scalar: Clone + Debug + PartialEq + Send + Sync + Zero + One + Neg<Output = Self> {
    const KIND: ScalarKind;

    fn from_rational(r: &Rational) -> Self;

    fn from_int(n: i64) -> Self;

    fn to_f64(&self) -> f64;

    /// `p/q` for rationals (`p` when integral), shortest round-trip decimal
    /// for floats.
    fn to_text(&self) -> String;

    fn is_negative(&self) -> bool;

    fn add_ref(&self, other: &Self) -> Self;

    fn sub_ref(&self, other: &Self) -> Self;

    fn mul_ref(&self, other: &Self) -> Self;

    fn div_ref(&self, other: &Self) -> Self;

    /// `Σ a_k·b_k`. With `compensated`, floats accumulate in twice the
    /// working precision.
    fn dot(pairs: &[(&Self, &Self)], compensated: bool) -> Self {
        let _ = compensated;
        pairs
            .iter()
            .fold(Self::zero(), |acc, (a, b)| acc.add_ref(&a.mul_ref(b)))
    }
}

impl Scalar for Rational {
    const KIND: ScalarKind = ScalarKind::Exact;

    fn from_rational(r: &Rational) -> Self {
        r.clone()
    }

    fn from_int(n: i64) -> Self {
        Rational::from_integer(n.into())
    }

    fn to_f64(&self) -> f64 {
        rational_to_f64(self)
    }

    fn to_text(&self) -> String {
        self.to_string()
    }

    fn is_negative(&self) -> bool {
        Signed::is_negative(self)
    }

    fn add_ref(&self, other: &Self) -> Self {
        self + other
    }

    fn sub_ref(&self, other: &Self) -> Self {
        self - other
    }

    fn mul_ref(&self, other: &Self) -> Self {
        self * other
    }

    fn div_ref(&self, other: &Self) -> Self {
        self / other
    }
}

impl Scalar for f64 {
    const KIND: ScalarKind = ScalarKind::Float;

    fn from_rational(r: &Rational) -> Self {
        rational_to_f64(r)
    }

    fn from_int(n: i64) -> Self {
        n as f64
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn to_text(&self) -> String {
        self.to_string()
    }

    fn is_negative(&self) -> bool {
        *self < 0.0
    }

    fn add_ref(&self, other: &Self) -> Self {
        self + other
    }

    fn sub_ref(&self, other: &Self) -> Self {
        self - other
    }

    fn mul_ref(&self, other: &Self) -> Self {
        self * other
    }

    fn div_ref(&self, other: &Self) -> Self {
        self / other
    }

    fn dot(pairs: &[(&Self, &Self)], compensated: bool) -> Self {
        if !compensated {
            return pairs.iter().map(|(a, b)| *a * *b).sum();
        }
        // Dot2: error-free products (fma) and TwoSum accumulation.
        let (mut s, mut c) = (0.0f64, 0.0f64);
        for (a, b) in pairs {
            let p = **a * **b;
            let pe = a.mul_add(**b, -p);
            let t = s + p;
            let z = t - s;
            let se = (s - (t - z)) + (p - z);
            s = t;
            c += se + pe;
        }
        s + c
    }
}
