//! Nonnegative magnitudes that are square roots of rationals.
//!
//! Archimedean size bounds such as X = c·√p are irrational in the census and
//! HNP settings, so a bound is stored through its exact square. Every
//! comparison against a rational is then decided exactly.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::arith::{self, exact_sqrt, format_rational, parse_rational};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SizeBound {
    square: BigRational,
}

impl SizeBound {
    pub fn from_rational(v: BigRational) -> Result<Self> {
        if v.is_negative() {
            return Err(Error::Parse(format!("size bound must be nonnegative, got {v}")));
        }
        Ok(SizeBound { square: &v * &v })
    }

    pub fn from_square(square: BigRational) -> Result<Self> {
        if square.is_negative() {
            return Err(Error::Parse(format!("square of a size bound must be nonnegative, got {square}")));
        }
        Ok(SizeBound { square })
    }

    pub fn zero() -> Self {
        SizeBound { square: BigRational::zero() }
    }

    pub fn square(&self) -> &BigRational {
        &self.square
    }

    pub fn is_zero(&self) -> bool {
        self.square.is_zero()
    }

    /// The exact value when it is rational.
    pub fn as_rational(&self) -> Option<BigRational> {
        exact_sqrt(&self.square)
    }

    /// |k| · self
    pub fn scale(&self, k: &BigRational) -> SizeBound {
        SizeBound { square: &self.square * k * k }
    }

    pub fn mul(&self, other: &SizeBound) -> SizeBound {
        SizeBound { square: &self.square * &other.square }
    }

    pub fn half(&self) -> SizeBound {
        self.scale(&arith::rat(1, 2))
    }

    /// Compares sqrt(square) with a rational.
    pub fn cmp_rational(&self, r: &BigRational) -> Ordering {
        if r.is_negative() {
            return Ordering::Greater;
        }
        self.square.cmp(&(r * r))
    }

    /// Compares with an integer-valued norm: is |z|^2 = `norm` within this bound squared?
    pub fn admits_norm(&self, norm: &BigInt) -> bool {
        BigRational::from_integer(norm.clone()) <= self.square
    }

    pub fn min(&self, other: &SizeBound) -> SizeBound {
        if self.square <= other.square { self.clone() } else { other.clone() }
    }

    /// Rational lower bound, accurate to 2^-bits.
    pub fn lower(&self, bits: u32) -> BigRational {
        self.as_rational().unwrap_or_else(|| arith::sqrt_lower(&self.square, bits))
    }

    /// Rational upper bound, accurate to 2^-bits.
    pub fn upper(&self, bits: u32) -> BigRational {
        self.as_rational().unwrap_or_else(|| arith::sqrt_upper(&self.square, bits))
    }

    pub fn to_f64(&self) -> f64 {
        arith::rational_to_f64(&self.square).sqrt()
    }
}

impl PartialOrd for SizeBound {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for SizeBound {
    fn cmp(&self, other: &Self) -> Ordering {
        self.square.cmp(&other.square)
    }
}

impl fmt::Display for SizeBound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.as_rational() {
            Some(v) => write!(f, "{}", format_rational(&v)),
            None => write!(f, "sqrt({})", format_rational(&self.square)),
        }
    }
}

impl FromStr for SizeBound {
    type Err = Error;

    /// Accepts "p/q", decimals, and "sqrt(p/q)".
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if let Some(inner) = s.strip_prefix("sqrt(").and_then(|r| r.strip_suffix(')')) {
            return SizeBound::from_square(parse_rational(inner)?);
        }
        SizeBound::from_rational(parse_rational(s)?)
    }
}

impl Serialize for SizeBound {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for SizeBound {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

impl From<u32> for SizeBound {
    fn from(v: u32) -> Self {
        SizeBound { square: BigRational::from_integer(BigInt::from(v) * BigInt::from(v)) }
    }
}

/// c·√p as a bound, the census and worked-example shape.
pub fn scaled_sqrt(c: &BigRational, p: &BigInt) -> SizeBound {
    SizeBound { square: c * c * BigRational::from_integer(p.clone()) }
}

impl SizeBound {
    pub fn one() -> Self {
        SizeBound { square: BigRational::one() }
    }
}
