//! Probability masses in exact (rational) or floating-point form.

use std::fmt;
use std::ops::{Add, Div, Mul, Sub};

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Arbitrary-precision rational number.
pub type Rational = BigRational;

/// Slack used when comparing float masses.
pub const FLOAT_SLACK: f64 = 1e-12;

/// Arithmetic mode of a distribution.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Exact,
    Float,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Mode::Exact => f.write_str("exact"),
            Mode::Float => f.write_str("float"),
        }
    }
}

/// Scalar type that a distribution stores its masses in.
///
/// Implemented for [`Rational`] (exact mode) and `f64` (float mode).
pub trait Mass:
    Clone
    + PartialEq
    + PartialOrd
    + fmt::Debug
    + Send
    + Sync
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
{
    const MODE: Mode;

    fn zero() -> Self;
    fn one() -> Self;
    fn from_rational(r: &Rational) -> Self;
    fn from_ratio(num: &BigUint, den: &BigUint) -> Self;
    fn from_u64_ratio(num: u64, den: u64) -> Self {
        Self::from_ratio(&BigUint::from(num), &BigUint::from(den))
    }
    fn from_f64(x: f64) -> Self;
    fn abs(&self) -> Self;
    fn to_f64(&self) -> f64;
    fn is_zero(&self) -> bool;
    fn is_negative(&self) -> bool;
    /// Equality, or agreement within [`FLOAT_SLACK`] in float mode.
    fn close_to(&self, other: &Self) -> bool;
    fn into_prob(self) -> Prob;
}

impl Mass for Rational {
    const MODE: Mode = Mode::Exact;

    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn from_rational(r: &Rational) -> Self {
        r.clone()
    }
    fn from_ratio(num: &BigUint, den: &BigUint) -> Self {
        Rational::new(BigInt::from(num.clone()), BigInt::from(den.clone()))
    }
    fn from_f64(x: f64) -> Self {
        Rational::from_float(x).unwrap_or_default()
    }
    fn abs(&self) -> Self {
        Signed::abs(self)
    }
    fn to_f64(&self) -> f64 {
        rational_to_f64(self)
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn is_negative(&self) -> bool {
        Signed::is_negative(self)
    }
    fn close_to(&self, other: &Self) -> bool {
        self == other
    }
    fn into_prob(self) -> Prob {
        Prob::Exact(self)
    }
}

impl Mass for f64 {
    const MODE: Mode = Mode::Float;

    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn from_rational(r: &Rational) -> Self {
        rational_to_f64(r)
    }
    fn from_ratio(num: &BigUint, den: &BigUint) -> Self {
        rational_to_f64(&Rational::from_ratio(num, den))
    }
    fn from_f64(x: f64) -> Self {
        x
    }
    fn abs(&self) -> Self {
        f64::abs(*self)
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn is_zero(&self) -> bool {
        *self == 0.0
    }
    fn is_negative(&self) -> bool {
        *self < 0.0
    }
    fn close_to(&self, other: &Self) -> bool {
        (self - other).abs() <= FLOAT_SLACK
    }
    fn into_prob(self) -> Prob {
        Prob::Float(self)
    }
}

/// A probability value tagged with its arithmetic mode.
#[derive(Debug, Clone, PartialEq)]
pub enum Prob {
    Exact(Rational),
    Float(f64),
}

impl Prob {
    pub fn to_f64(&self) -> f64 {
        match self {
            Prob::Exact(r) => rational_to_f64(r),
            Prob::Float(x) => *x,
        }
    }

    pub fn exact(&self) -> Option<&Rational> {
        match self {
            Prob::Exact(r) => Some(r),
            Prob::Float(_) => None,
        }
    }

    /// `"num/den"` for exact values, decimal rendering for floats.
    pub fn render(&self) -> String {
        match self {
            Prob::Exact(r) => render_rational(r),
            Prob::Float(x) => format!("{x}"),
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        match self {
            Prob::Exact(r) => serde_json::Value::String(render_rational(r)),
            Prob::Float(x) => serde_json::json!(x),
        }
    }
}

impl fmt::Display for Prob {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

/// Renders a rational as `"num/den"` (always with an explicit denominator).
pub fn render_rational(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Parses `"num/den"` or a plain integer.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let parse_int = |t: &str| {
        t.trim()
            .parse::<BigInt>()
            .map_err(|_| Error::Parse(format!("bad rational {s:?}")))
    };
    match s.split_once('/') {
        Some((a, b)) => {
            let den = parse_int(b)?;
            if den.is_zero() {
                return Err(Error::Parse(format!("zero denominator in {s:?}")));
            }
            Ok(Rational::new(parse_int(a)?, den))
        }
        None => Ok(Rational::from_integer(parse_int(s)?)),
    }
}

/// Converts a rational to the nearest-ish f64, robust to huge numerators/denominators.
pub fn rational_to_f64(r: &Rational) -> f64 {
    if let (Some(a), Some(b)) = (r.numer().to_f64(), r.denom().to_f64()) {
        if a.is_finite() && b.is_finite() && b != 0.0 {
            return a / b;
        }
    }
    let (sign, num) = (r.numer().sign(), r.numer().magnitude().clone());
    let den = r.denom().magnitude().clone();
    let s = if sign == num_bigint::Sign::Minus { -1.0 } else { 1.0 };
    s * biguint_ratio_f64(&num, &den)
}

/// Ratio of two big naturals as f64 without overflow.
pub fn biguint_ratio_f64(num: &BigUint, den: &BigUint) -> f64 {
    if num.is_zero() {
        return 0.0;
    }
    let shift_n = num.bits().saturating_sub(60);
    let shift_d = den.bits().saturating_sub(60);
    let a = (num >> shift_n).to_f64().unwrap_or(f64::NAN);
    let b = (den >> shift_d).to_f64().unwrap_or(f64::NAN);
    a / b * 2f64.powi(shift_n as i32 - shift_d as i32)
}

/// log2 of a positive big natural, accurate to double precision.
pub fn log2_biguint(x: &BigUint) -> f64 {
    let shift = x.bits().saturating_sub(60);
    let top = (x >> shift).to_f64().unwrap_or(f64::NAN);
    top.log2() + shift as f64
}

pub fn pow2(k: u64) -> BigUint {
    BigUint::one() << k
}

/// `1 / 2^k` as an exact rational.
pub fn inv_pow2(k: u64) -> Rational {
    Rational::new(BigInt::one(), BigInt::from(pow2(k)))
}

/// Binomial coefficient C(n, k) (zero when k > n).
pub fn binomial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc = acc * BigUint::from(n - i) / BigUint::from(i + 1);
    }
    acc
}

/// Row `C(n, 0), ..., C(n, n)`.
pub fn binomial_row(n: u64) -> Vec<BigUint> {
    let mut row = Vec::with_capacity(n as usize + 1);
    let mut c = BigUint::one();
    row.push(c.clone());
    for k in 0..n {
        c = c * BigUint::from(n - k) / BigUint::from(k + 1);
        row.push(c.clone());
    }
    row
}

pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn lcm_u64(values: impl IntoIterator<Item = u64>) -> u64 {
    values.into_iter().fold(1u64, |acc, v| acc.lcm(&v))
}
