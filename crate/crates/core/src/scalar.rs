//! Numbers that measures are computed in: exact rationals or `f64`.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Num, One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Arithmetic shared by the exact and floating paths.
pub trait Scalar: Num + Clone + PartialOrd + fmt::Debug + Send + Sync {
    fn from_count(c: u128) -> Self;
    fn to_f64(&self) -> f64;
    fn into_value(self) -> Value;

    fn powu(&self, e: usize) -> Self {
        num_traits::pow(self.clone(), e)
    }
}

impl Scalar for f64 {
    fn from_count(c: u128) -> f64 {
        c as f64
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn into_value(self) -> Value {
        Value::Float(self)
    }

    fn powu(&self, e: usize) -> f64 {
        self.powi(e as i32)
    }
}

impl Scalar for BigRational {
    fn from_count(c: u128) -> BigRational {
        BigRational::from_integer(BigInt::from(c))
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }

    fn into_value(self) -> Value {
        Value::Exact(self)
    }
}

pub fn rational(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// The bias `p` of a product measure. A fraction `a/b` selects exact
/// arithmetic; a decimal selects `f64`.
#[derive(Clone, Debug, PartialEq)]
pub enum Bias {
    Exact(BigRational),
    Float(f64),
}

impl Bias {
    pub fn to_f64(&self) -> f64 {
        match self {
            Bias::Exact(q) => Scalar::to_f64(q),
            Bias::Float(x) => *x,
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Bias::Exact(_))
    }

    /// Parse, forcing exact arithmetic (`0.4` becomes `2/5`).
    pub fn parse_exact(s: &str) -> Result<Bias> {
        match s.trim().parse::<Bias>()? {
            Bias::Exact(q) => Ok(Bias::Exact(q)),
            Bias::Float(_) => Ok(Bias::Exact(decimal_to_rational(s.trim())?)),
        }
    }

    /// Require `0 < p < 1`.
    pub fn check_open_unit(&self) -> Result<()> {
        let ok = match self {
            Bias::Exact(q) => q.is_positive() && *q < BigRational::one(),
            Bias::Float(x) => *x > 0.0 && *x < 1.0,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::contract(format!("bias {self} must lie strictly between 0 and 1")))
        }
    }
}

fn decimal_to_rational(s: &str) -> Result<BigRational> {
    let bad = || Error::input(format!("cannot read '{s}' as a decimal"));
    let (mantissa, exp) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i32>().map_err(|_| bad())?),
        None => (s, 0),
    };
    let (neg, body) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int, frac) = match body.find('.') {
        Some(i) => (&body[..i], &body[i + 1..]),
        None => (body, ""),
    };
    if int.is_empty() && frac.is_empty() {
        return Err(bad());
    }
    if !int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let digits = format!("{int}{frac}");
    let mut num: BigInt = digits.parse().map_err(|_| bad())?;
    if neg {
        num = -num;
    }
    let scale = exp - frac.len() as i32;
    if scale.unsigned_abs() > 4096 {
        return Err(bad());
    }
    let ten = BigInt::from(10);
    Ok(if scale >= 0 {
        BigRational::from_integer(num * num_traits::pow(ten, scale as usize))
    } else {
        BigRational::new(num, num_traits::pow(ten, (-scale) as usize))
    })
}

impl FromStr for Bias {
    type Err = Error;

    fn from_str(s: &str) -> Result<Bias> {
        let s = s.trim();
        let bias = if let Some((a, b)) = s.split_once('/') {
            let a: BigInt = a.trim().parse().map_err(|_| Error::input(format!("bad numerator in '{s}'")))?;
            let b: BigInt = b.trim().parse().map_err(|_| Error::input(format!("bad denominator in '{s}'")))?;
            if b.is_zero() {
                return Err(Error::input("zero denominator"));
            }
            Bias::Exact(BigRational::new(a, b))
        } else {
            // Only plain decimal notation; reject "inf", "nan" and friends.
            if s.is_empty() || !s.chars().all(|c| c.is_ascii_digit() || ".eE+-".contains(c)) {
                return Err(Error::input(format!("cannot read bias '{s}'")));
            }
            let x: f64 = s.parse().map_err(|_| Error::input(format!("cannot read bias '{s}'")))?;
            Bias::Float(x)
        };
        let x = bias.to_f64();
        if !(0.0..=1.0).contains(&x) || x.is_nan() {
            return Err(Error::input(format!("bias {s} outside [0, 1]")));
        }
        Ok(bias)
    }
}

impl fmt::Display for Bias {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            // Always `a/b`, so that the text parses back to an exact bias.
            Bias::Exact(q) => write!(f, "{}/{}", q.numer(), q.denom()),
            Bias::Float(x) => write!(f, "{}", fmt_f64(*x)),
        }
    }
}

/// A computed quantity, exact or floating.
#[derive(Clone, Debug, PartialEq)]
pub enum Value {
    Exact(BigRational),
    Float(f64),
}

impl Value {
    pub fn to_f64(&self) -> f64 {
        match self {
            Value::Exact(q) => Scalar::to_f64(q),
            Value::Float(x) => *x,
        }
    }

    pub fn exact(&self) -> Option<&BigRational> {
        match self {
            Value::Exact(q) => Some(q),
            Value::Float(_) => None,
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Exact(q) => write!(f, "{}", fmt_rational(q)),
            Value::Float(x) => write!(f, "{}", fmt_f64(*x)),
        }
    }
}

pub fn fmt_rational(q: &BigRational) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// 17 significant digits, positional for moderate magnitudes.
pub fn fmt_f64(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let e = x.abs().log10().floor() as i32;
    if (-5..17).contains(&e) {
        format!("{:.*}", (16 - e) as usize, x)
    } else {
        format!("{:.16e}", x)
    }
}
