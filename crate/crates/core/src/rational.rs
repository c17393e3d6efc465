//! Exact scalars: arbitrary-precision rationals and the extended half-line.

use std::cmp::Ordering;
use std::fmt;

use num::{BigInt, BigRational, Integer, One, Signed, Zero};
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

pub type Rational = BigRational;

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn ratio(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// Parses `p/q`, `-p/q` or a plain integer.
pub fn parse_rational(token: &str) -> Option<Rational> {
    let (num, den) = match token.split_once('/') {
        Some((n, d)) => (n, d),
        None => (token, "1"),
    };
    let num: BigInt = num.parse().ok()?;
    let den: BigInt = den.parse().ok()?;
    if !den.is_positive() {
        return None;
    }
    Some(Rational::new(num, den))
}

/// Greatest common divisor of positive rationals: the largest `a` such that
/// every input is an integer multiple of `a`.
pub fn rational_gcd<'a, I>(values: I) -> Option<Rational>
where
    I: IntoIterator<Item = &'a Rational>,
{
    let mut num = BigInt::zero();
    let mut den = BigInt::one();
    let mut seen = false;
    for v in values {
        seen = true;
        num = num.gcd(v.numer());
        den = den.lcm(v.denom());
    }
    if !seen || num.is_zero() {
        return None;
    }
    Some(Rational::new(num, den))
}

pub fn serialize_rational<S: Serializer>(value: &Rational, s: S) -> Result<S::Ok, S::Error> {
    s.collect_str(value)
}

pub fn serialize_rationals<S: Serializer>(values: &[Rational], s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(values.iter().map(|v| v.to_string()))
}

/// A point of `[-∞, +∞]` restricted to what measures and distribution
/// functions need: a finite rational or `+∞`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum ExtendedReal {
    Finite(Rational),
    Infinite,
}

impl ExtendedReal {
    pub fn zero() -> Self {
        ExtendedReal::Finite(Rational::zero())
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, ExtendedReal::Finite(_))
    }

    pub fn finite(&self) -> Option<&Rational> {
        match self {
            ExtendedReal::Finite(v) => Some(v),
            ExtendedReal::Infinite => None,
        }
    }

    pub fn add(&self, other: &ExtendedReal) -> ExtendedReal {
        match (self, other) {
            (ExtendedReal::Finite(a), ExtendedReal::Finite(b)) => ExtendedReal::Finite(a + b),
            _ => ExtendedReal::Infinite,
        }
    }

    pub fn sub(&self, other: &ExtendedReal) -> Result<ExtendedReal> {
        match (self, other) {
            (ExtendedReal::Finite(a), ExtendedReal::Finite(b)) => Ok(ExtendedReal::Finite(a - b)),
            (ExtendedReal::Infinite, ExtendedReal::Finite(_)) => Ok(ExtendedReal::Infinite),
            (_, ExtendedReal::Infinite) => Err(Error::UndefinedArithmetic(
                "cannot subtract +inf from an extended real",
            )),
        }
    }

    /// Parses a rational or the literal `inf`.
    pub fn parse(token: &str) -> Option<ExtendedReal> {
        match token {
            "inf" | "+inf" | "∞" => Some(ExtendedReal::Infinite),
            t => parse_rational(t).map(ExtendedReal::Finite),
        }
    }
}

impl From<Rational> for ExtendedReal {
    fn from(v: Rational) -> Self {
        ExtendedReal::Finite(v)
    }
}

impl PartialOrd for ExtendedReal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for ExtendedReal {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (ExtendedReal::Finite(a), ExtendedReal::Finite(b)) => a.cmp(b),
            (ExtendedReal::Finite(_), ExtendedReal::Infinite) => Ordering::Less,
            (ExtendedReal::Infinite, ExtendedReal::Finite(_)) => Ordering::Greater,
            (ExtendedReal::Infinite, ExtendedReal::Infinite) => Ordering::Equal,
        }
    }
}

impl fmt::Display for ExtendedReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtendedReal::Finite(v) => write!(f, "{v}"),
            ExtendedReal::Infinite => write!(f, "inf"),
        }
    }
}

impl Serialize for ExtendedReal {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}
