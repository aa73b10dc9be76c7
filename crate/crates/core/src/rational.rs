//! Exact rational numbers.
//!
//! Every temperature, heat contribution and threshold in the crate is a
//! [`Rational`]. Values are always kept in lowest terms with a positive
//! denominator, so structural equality is numeric equality and the textual
//! form is canonical.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseRationalError {
    #[error("empty rational literal")]
    Empty,
    #[error("zero denominator in `{0}`")]
    ZeroDenominator(String),
    #[error("malformed rational literal `{0}`")]
    Malformed(String),
}

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Rational(BigRational);

impl Rational {
    /// Builds `numer / denom`. Returns `None` for a zero denominator.
    pub fn new(numer: impl Into<BigInt>, denom: impl Into<BigInt>) -> Option<Self> {
        let denom = denom.into();
        if denom.is_zero() {
            return None;
        }
        Some(Rational(BigRational::new(numer.into(), denom)))
    }

    /// Panicking variant of [`Rational::new`] for literals in code and tests.
    pub fn frac(numer: i64, denom: i64) -> Self {
        Self::new(numer, denom).expect("zero denominator")
    }

    pub fn integer(value: impl Into<BigInt>) -> Self {
        Rational(BigRational::from_integer(value.into()))
    }

    pub fn zero() -> Self {
        Rational(BigRational::zero())
    }

    pub fn one() -> Self {
        Rational(BigRational::one())
    }

    /// `2^exp` for any signed exponent.
    pub fn pow2(exp: i64) -> Self {
        let mag = BigInt::one() << exp.unsigned_abs();
        if exp >= 0 {
            Rational::integer(mag)
        } else {
            Rational(BigRational::new(BigInt::one(), mag))
        }
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

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::NAN)
    }

    /// Smallest integer not below `self`.
    pub fn ceil(&self) -> BigInt {
        self.0.ceil().to_integer()
    }

    pub fn as_big_rational(&self) -> &BigRational {
        &self.0
    }

    /// Decimal rendering with `digits` significant digits, rounded half away
    /// from zero. Exact zero renders as `0`.
    pub fn to_significant(&self, digits: usize) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let digits = digits.max(1);
        let negative = self.is_negative();
        let abs = self.0.abs();
        // exponent e with 10^e <= abs < 10^(e+1)
        let ten = BigRational::from_integer(BigInt::from(10));
        let mut e: i64 = 0;
        let mut scaled = abs.clone();
        while scaled >= ten {
            scaled /= &ten;
            e += 1;
        }
        while scaled < BigRational::one() {
            scaled *= &ten;
            e -= 1;
        }
        // scaled in [1, 10); keep `digits` digits
        let shift = digits as i64 - 1;
        let factor = BigInt::from(10).pow(shift as u32);
        let mut mantissa = (scaled * BigRational::from_integer(factor.clone())).round().to_integer();
        if mantissa >= factor.clone() * 10 {
            mantissa /= 10;
            e += 1;
        }
        let digits_str = mantissa.to_string();
        // place the decimal point: value = mantissa * 10^(e - shift)
        let point = e - shift;
        let body = if point >= 0 {
            let mut s = digits_str;
            s.extend(std::iter::repeat_n('0', point as usize));
            s
        } else {
            let frac_len = (-point) as usize;
            let s = if digits_str.len() > frac_len {
                let (int, frac) = digits_str.split_at(digits_str.len() - frac_len);
                format!("{int}.{frac}")
            } else {
                let zeros = "0".repeat(frac_len - digits_str.len());
                format!("0.{zeros}{digits_str}")
            };
            s
        };
        if negative {
            format!("-{body}")
        } else {
            body
        }
    }
}

impl Default for Rational {
    fn default() -> Self {
        Rational::zero()
    }
}

impl From<i64> for Rational {
    fn from(value: i64) -> Self {
        Rational::integer(value)
    }
}

impl From<u64> for Rational {
    fn from(value: u64) -> Self {
        Rational::integer(value)
    }
}

impl From<BigRational> for Rational {
    fn from(value: BigRational) -> Self {
        Rational(value)
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
        fmt::Display::fmt(self, f)
    }
}

fn parse_int(s: &str, whole: &str) -> Result<BigInt, ParseRationalError> {
    let digits = s.strip_prefix(['+', '-']).unwrap_or(s);
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return Err(ParseRationalError::Malformed(whole.to_string()));
    }
    s.parse::<BigInt>()
        .map_err(|_| ParseRationalError::Malformed(whole.to_string()))
}

impl FromStr for Rational {
    type Err = ParseRationalError;

    /// Accepts `p/q`, a bare integer, or a finite decimal such as `-1.75`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s.is_empty() {
            return Err(ParseRationalError::Empty);
        }
        if let Some((num, den)) = s.split_once('/') {
            let num = parse_int(num.trim(), s)?;
            let den_str = den.trim();
            if den_str.starts_with(['+', '-']) {
                return Err(ParseRationalError::Malformed(s.to_string()));
            }
            let den = parse_int(den_str, s)?;
            return Rational::new(num, den)
                .ok_or_else(|| ParseRationalError::ZeroDenominator(s.to_string()));
        }
        if let Some((int, frac)) = s.split_once('.') {
            let negative = int.starts_with('-');
            let int_digits = int.strip_prefix(['+', '-']).unwrap_or(int);
            if (int_digits.is_empty() && frac.is_empty())
                || !int_digits.bytes().all(|b| b.is_ascii_digit())
                || !frac.bytes().all(|b| b.is_ascii_digit())
            {
                return Err(ParseRationalError::Malformed(s.to_string()));
            }
            let joined = format!("{int_digits}{frac}");
            let mut numer: BigInt = joined
                .parse()
                .map_err(|_| ParseRationalError::Malformed(s.to_string()))?;
            if negative {
                numer = -numer;
            }
            let denom = BigInt::from(10).pow(frac.len() as u32);
            return Ok(Rational(BigRational::new(numer, denom)));
        }
        Ok(Rational::integer(parse_int(s, s)?))
    }
}

impl Serialize for Rational {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Rational {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident) => {
        impl $trait<&Rational> for &Rational {
            type Output = Rational;
            fn $method(self, rhs: &Rational) -> Rational {
                Rational($trait::$method(&self.0, &rhs.0))
            }
        }
        impl $trait<Rational> for Rational {
            type Output = Rational;
            fn $method(self, rhs: Rational) -> Rational {
                Rational($trait::$method(self.0, rhs.0))
            }
        }
        impl $trait<&Rational> for Rational {
            type Output = Rational;
            fn $method(self, rhs: &Rational) -> Rational {
                Rational($trait::$method(self.0, &rhs.0))
            }
        }
        impl $trait<Rational> for &Rational {
            type Output = Rational;
            fn $method(self, rhs: Rational) -> Rational {
                Rational($trait::$method(&self.0, rhs.0))
            }
        }
    };
}

forward_binop!(Add, add);
forward_binop!(Sub, sub);
forward_binop!(Mul, mul);
forward_binop!(Div, div);

impl Neg for Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-self.0)
    }
}

impl std::iter::Sum for Rational {
    fn sum<I: Iterator<Item = Rational>>(iter: I) -> Rational {
        iter.fold(Rational::zero(), |acc, x| acc + x)
    }
}
