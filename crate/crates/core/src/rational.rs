//! Exact rationals.
//!
//! A thin newtype over [`num::BigRational`] that fixes the textual form used
//! everywhere in this crate: `"p/q"`, with the denominator dropped when it is 1.
//! Values are always normalized (`gcd(|p|, q) = 1`, `q >= 1`).

use std::cmp::Ordering;
use std::fmt;
use std::iter::Sum;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub, SubAssign};
use std::str::FromStr;

use num::bigint::Sign;
use num::{BigInt, BigRational, One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Rational(BigRational);

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("cannot parse {input:?} as a rational: {reason}")]
pub struct ParseRationalError {
    pub input: String,
    pub reason: &'static str,
}

impl Rational {
    pub fn new(numer: i64, denom: i64) -> Self {
        assert!(denom != 0, "zero denominator");
        Rational(BigRational::new(BigInt::from(numer), BigInt::from(denom)))
    }

    pub fn from_bigints(numer: BigInt, denom: BigInt) -> Self {
        assert!(!denom.is_zero(), "zero denominator");
        Rational(BigRational::new(numer, denom))
    }

    pub fn integer(n: i64) -> Self {
        Rational(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn zero() -> Self {
        Rational(BigRational::zero())
    }

    pub fn one() -> Self {
        Rational(BigRational::one())
    }

    /// `2^-i`.
    pub fn dyadic(i: u32) -> Self {
        Rational(BigRational::new(BigInt::one(), BigInt::one() << i))
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    pub fn is_positive(&self) -> bool {
        self.0.is_positive()
    }

    pub fn abs(&self) -> Self {
        Rational(self.0.abs())
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn recip(&self) -> Self {
        Rational(self.0.recip())
    }

    pub fn floor(&self) -> BigInt {
        self.0.floor().to_integer()
    }

    pub fn ceil(&self) -> BigInt {
        self.0.ceil().to_integer()
    }

    pub fn min(self, other: Self) -> Self {
        if other < self {
            other
        } else {
            self
        }
    }

    pub fn max(self, other: Self) -> Self {
        if other > self {
            other
        } else {
            self
        }
    }

    pub fn midpoint(&self, other: &Self) -> Self {
        (self + other) / Rational::integer(2)
    }

    pub fn pow(&self, e: i32) -> Self {
        Rational(num::pow::Pow::pow(&self.0, e))
    }

    /// Lossy conversion, for labelled approximate output only.
    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::NAN)
    }

    pub fn to_i64(&self) -> Option<i64> {
        if self.0.is_integer() {
            self.0.numer().to_i64()
        } else {
            None
        }
    }

    pub fn as_big(&self) -> &BigRational {
        &self.0
    }

    pub fn from_big(r: BigRational) -> Self {
        Rational(r)
    }
}

impl From<i64> for Rational {
    fn from(n: i64) -> Self {
        Rational::integer(n)
    }
}

impl From<BigInt> for Rational {
    fn from(n: BigInt) -> Self {
        Rational(BigRational::from_integer(n))
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.denom().is_one() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

fn parse_int(s: &str, input: &str) -> Result<BigInt, ParseRationalError> {
    let t = s.trim();
    if t.is_empty() {
        return Err(ParseRationalError {
            input: input.to_string(),
            reason: "empty component",
        });
    }
    BigInt::from_str(t).map_err(|_| ParseRationalError {
        input: input.to_string(),
        reason: "not an integer",
    })
}

impl FromStr for Rational {
    type Err = ParseRationalError;

    /// Accepts `p`, `p/q` and finite decimals such as `-0.125`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim();
        if let Some((p, q)) = t.split_once('/') {
            let p = parse_int(p, s)?;
            let q = parse_int(q, s)?;
            if q.is_zero() {
                return Err(ParseRationalError {
                    input: s.to_string(),
                    reason: "zero denominator",
                });
            }
            return Ok(Rational::from_bigints(p, q));
        }
        if let Some((int, frac)) = t.split_once('.') {
            if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
                return Err(ParseRationalError {
                    input: s.to_string(),
                    reason: "malformed decimal",
                });
            }
            let negative = int.trim_start().starts_with('-');
            let int_part = match int.trim() {
                "" | "-" | "+" => BigInt::zero(),
                other => parse_int(other, s)?,
            };
            let scale = num::pow(BigInt::from(10), frac.len());
            let frac_part = parse_int(frac, s)?;
            let mag = int_part.abs() * &scale + frac_part;
            let numer = if negative { -mag } else { mag };
            return Ok(Rational::from_bigints(numer, scale));
        }
        Ok(Rational::from(parse_int(t, s)?))
    }
}

impl Serialize for Rational {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Rational {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Str(String),
            Int(i64),
        }
        match Raw::deserialize(deserializer)? {
            Raw::Str(s) => s.parse().map_err(serde::de::Error::custom),
            Raw::Int(n) => Ok(Rational::integer(n)),
        }
    }
}

macro_rules! forward_binop {
    ($tr:ident, $method:ident) => {
        impl $tr<&Rational> for &Rational {
            type Output = Rational;
            fn $method(self, rhs: &Rational) -> Rational {
                Rational((&self.0).$method(&rhs.0))
            }
        }
        impl $tr<Rational> for Rational {
            type Output = Rational;
            fn $method(self, rhs: Rational) -> Rational {
                Rational(self.0.$method(rhs.0))
            }
        }
        impl $tr<&Rational> for Rational {
            type Output = Rational;
            fn $method(self, rhs: &Rational) -> Rational {
                Rational(self.0.$method(&rhs.0))
            }
        }
        impl $tr<Rational> for &Rational {
            type Output = Rational;
            fn $method(self, rhs: Rational) -> Rational {
                Rational((&self.0).$method(rhs.0))
            }
        }
    };
}

forward_binop!(Add, add);
forward_binop!(Sub, sub);
forward_binop!(Mul, mul);
forward_binop!(Div, div);

impl AddAssign<&Rational> for Rational {
    fn add_assign(&mut self, rhs: &Rational) {
        self.0 += &rhs.0;
    }
}

impl SubAssign<&Rational> for Rational {
    fn sub_assign(&mut self, rhs: &Rational) {
        self.0 -= &rhs.0;
    }
}

impl Neg for Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-self.0)
    }
}

impl Neg for &Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-&self.0)
    }
}

impl Sum for Rational {
    fn sum<I: Iterator<Item = Rational>>(iter: I) -> Self {
        iter.fold(Rational::zero(), |acc, x| acc + x)
    }
}

impl<'a> Sum<&'a Rational> for Rational {
    fn sum<I: Iterator<Item = &'a Rational>>(iter: I) -> Self {
        iter.fold(Rational::zero(), |acc, x| acc + x)
    }
}

/// Sign of a rational as an [`Ordering`] against zero.
pub fn signum(r: &Rational) -> Ordering {
    match r.0.numer().sign() {
        Sign::Minus => Ordering::Less,
        Sign::NoSign => Ordering::Equal,
        Sign::Plus => Ordering::Greater,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn display_drops_unit_denominator() {
        assert_eq!(Rational::new(6, 3).to_string(), "2");
        assert_eq!(Rational::new(-3, 6).to_string(), "-1/2");
    }

    #[test]
    fn parses_fractions_and_decimals() {
        assert_eq!("3/4".parse::<Rational>().unwrap(), Rational::new(3, 4));
        assert_eq!("0.5".parse::<Rational>().unwrap(), Rational::new(1, 2));
        assert_eq!("-1.25".parse::<Rational>().unwrap(), Rational::new(-5, 4));
        assert_eq!("-0.5".parse::<Rational>().unwrap(), Rational::new(-1, 2));
        assert_eq!(" 7 ".parse::<Rational>().unwrap(), Rational::integer(7));
        assert!("1/0".parse::<Rational>().is_err());
        assert!("x".parse::<Rational>().is_err());
        assert!("1.".parse::<Rational>().is_err());
    }

    #[test]
    fn add_is_exact() {
        assert_eq!(Rational::new(3, 4) + Rational::new(1, 4), Rational::one());
    }

    #[test]
    fn dyadic_powers() {
        assert_eq!(Rational::dyadic(3), Rational::new(1, 8));
        assert_eq!(Rational::dyadic(0), Rational::one());
    }

    #[test]
    fn serde_uses_string_form() {
        let r = Rational::new(5, 2);
        let s = serde_json::to_string(&r).unwrap();
        assert_eq!(s, "\"5/2\"");
        let back: Rational = serde_json::from_str(&s).unwrap();
        assert_eq!(back, r);
        let from_int: Rational = serde_json::from_str("3").unwrap();
        assert_eq!(from_int, Rational::integer(3));
    }
}
