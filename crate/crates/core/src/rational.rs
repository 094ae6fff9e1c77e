//! Exact rational numbers for thresholds and densities.
//!
//! Every comparison of a count against a fractional quantity (`count < c·N`,
//! `(d − ε)·|S| ≤ deg`) goes through this type so that verdicts do not depend
//! on floating-point rounding.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Sub};
use std::str::FromStr;

use num_bigint::{BigInt, Sign};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Rational(BigRational);

impl Rational {
    pub fn new(numer: i64, denom: i64) -> Result<Self> {
        if denom == 0 {
            return Err(Error::arg("zero denominator"));
        }
        Ok(Rational(BigRational::new(numer.into(), denom.into())))
    }

    pub fn from_integer(n: i64) -> Self {
        Rational(BigRational::from_integer(n.into()))
    }

    pub fn zero() -> Self {
        Rational(BigRational::zero())
    }

    pub fn one() -> Self {
        Rational(BigRational::one())
    }

    /// Converts through the shortest decimal representation of `x`, so
    /// `0.6_f64` becomes exactly `3/5` rather than its binary neighbour.
    pub fn from_f64(x: f64) -> Result<Self> {
        if !x.is_finite() {
            return Err(Error::arg(format!("non-finite value {x}")));
        }
        format!("{x}").parse()
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_positive(&self) -> bool {
        self.0.is_positive()
    }

    pub fn pow(&self, exp: u32) -> Self {
        Rational(num_traits::pow(self.0.clone(), exp as usize))
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or_else(|| 10f64.powf(self.log10()))
    }

    /// Base-10 logarithm, accurate for values far outside the `f64` range.
    /// Returns `-inf` for zero and NaN for negative values.
    pub fn log10(&self) -> f64 {
        match self.0.numer().sign() {
            Sign::NoSign => f64::NEG_INFINITY,
            Sign::Minus => f64::NAN,
            Sign::Plus => bigint_log10(self.0.numer()) - bigint_log10(self.0.denom()),
        }
    }

    /// `floor(self · k)`, saturating into `i64`.
    pub fn floor_times(&self, k: u64) -> i64 {
        let scaled = &self.0 * BigRational::from_integer(k.into());
        saturate(scaled.floor().to_integer())
    }

    /// `ceil(self · k)`, saturating into `i64`.
    pub fn ceil_times(&self, k: u64) -> i64 {
        let scaled = &self.0 * BigRational::from_integer(k.into());
        saturate(scaled.ceil().to_integer())
    }

    /// Whether `count < self · k`.
    pub fn count_below(&self, count: u64, k: u64) -> bool {
        let lhs = BigInt::from(count) * self.0.denom();
        let rhs = self.0.numer() * BigInt::from(k);
        lhs < rhs
    }

    /// Whether `count ≤ self · k`.
    pub fn count_at_most(&self, count: u64, k: u64) -> bool {
        let lhs = BigInt::from(count) * self.0.denom();
        let rhs = self.0.numer() * BigInt::from(k);
        lhs <= rhs
    }

    /// Orders the fraction `num/den` (with `den > 0`) relative to `self`.
    pub fn cmp_fraction(&self, num: i128, den: i128) -> Ordering {
        debug_assert!(den > 0);
        let lhs = BigInt::from(num) * self.0.denom();
        let rhs = self.0.numer() * BigInt::from(den);
        lhs.cmp(&rhs)
    }

    pub fn as_big(&self) -> &BigRational {
        &self.0
    }
}

fn saturate(x: BigInt) -> i64 {
    x.to_i64().unwrap_or(if x.is_negative() { i64::MIN } else { i64::MAX })
}

fn bigint_log10(x: &BigInt) -> f64 {
    let bits = x.bits();
    if bits <= 1000 {
        return x.to_f64().unwrap_or(f64::NAN).abs().log10();
    }
    let shift = bits - 64;
    let top: BigInt = x.abs() >> shift;
    top.to_f64().unwrap_or(f64::NAN).log10() + shift as f64 * std::f64::consts::LOG10_2
}

impl FromStr for Rational {
    type Err = Error;

    /// Accepts integers, decimals (`0.125`, `-1.5e-3`) and fractions (`3/8`).
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::arg(format!("not a rational number: {s:?}"));
        if let Some((n, d)) = s.split_once('/') {
            let n: BigInt = n.trim().parse().map_err(|_| bad())?;
            let d: BigInt = d.trim().parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(bad());
            }
            return Ok(Rational(BigRational::new(n, d)));
        }
        let (mantissa, exponent) = match s.find(['e', 'E']) {
            Some(pos) => {
                let e: i32 = s[pos + 1..].parse().map_err(|_| bad())?;
                (&s[..pos], e)
            }
            None => (s, 0),
        };
        let (negative, mantissa) = match mantissa.strip_prefix('-') {
            Some(rest) => (true, rest),
            None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
        };
        let (int_part, frac_part) = mantissa.split_once('.').unwrap_or((mantissa, ""));
        if int_part.is_empty() && frac_part.is_empty() {
            return Err(bad());
        }
        if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
            return Err(bad());
        }
        let digits: BigInt = format!("0{int_part}{frac_part}").parse().map_err(|_| bad())?;
        let scale = exponent - frac_part.len() as i32;
        let ten = BigInt::from(10);
        let mut value = BigRational::from_integer(digits);
        if scale >= 0 {
            value *= BigRational::from_integer(num_traits::pow(ten, scale as usize));
        } else {
            value /= BigRational::from_integer(num_traits::pow(ten, (-scale) as usize));
        }
        if negative {
            value = -value;
        }
        Ok(Rational(value))
    }
}

impl Default for Rational {
    fn default() -> Self {
        Rational::zero()
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_integer() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl Add for &Rational {
    type Output = Rational;
    fn add(self, rhs: &Rational) -> Rational {
        Rational(&self.0 + &rhs.0)
    }
}

impl Sub for &Rational {
    type Output = Rational;
    fn sub(self, rhs: &Rational) -> Rational {
        Rational(&self.0 - &rhs.0)
    }
}

impl Mul for &Rational {
    type Output = Rational;
    fn mul(self, rhs: &Rational) -> Rational {
        Rational(&self.0 * &rhs.0)
    }
}

impl Div for &Rational {
    type Output = Rational;
    /// Panics on division by zero.
    fn div(self, rhs: &Rational) -> Rational {
        assert!(!rhs.is_zero(), "division by zero");
        Rational(&self.0 / &rhs.0)
    }
}

impl Serialize for Rational {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Rational {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Int(i64),
            Float(f64),
            Text(String),
        }
        let parsed = match Repr::deserialize(deserializer)? {
            Repr::Int(n) => Ok(Rational::from_integer(n)),
            Repr::Float(x) => Rational::from_f64(x),
            Repr::Text(s) => s.parse(),
        };
        parsed.map_err(serde::de::Error::custom)
    }
}
