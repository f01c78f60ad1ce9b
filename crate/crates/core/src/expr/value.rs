use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::types::EnumType;

/// A member of an enumeration type, identified by its position in the
/// declared literal list.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EnumValue {
    pub ty: Arc<EnumType>,
    pub ordinal: usize,
}

impl EnumValue {
    pub fn literal(&self) -> &str {
        &self.ty.literals[self.ordinal]
    }
}

/// A concrete runtime value.
///
/// Reals are exact rationals; every real value a requirement file can
/// produce lies on a decimal grid, so they always render back to a finite
/// decimal.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Value {
    Bool(bool),
    Int(i128),
    Real(BigRational),
    Enum(EnumValue),
    Char(char),
    Str(String),
}

impl Value {
    pub fn real(r: BigRational) -> Self {
        Value::Real(r)
    }

    /// Numeric view of `Int` and `Real` values.
    pub fn as_rational(&self) -> Option<BigRational> {
        match self {
            Value::Int(i) => Some(BigRational::from_integer(BigInt::from(*i))),
            Value::Real(r) => Some(r.clone()),
            _ => None,
        }
    }

    pub fn as_bool(&self) -> Option<bool> {
        match self {
            Value::Bool(b) => Some(*b),
            _ => None,
        }
    }

    pub fn is_numeric(&self) -> bool {
        matches!(self, Value::Int(_) | Value::Real(_))
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Bool(b) => write!(f, "{b}"),
            Value::Int(i) => write!(f, "{i}"),
            Value::Real(r) => f.write_str(&format_decimal(r)),
            Value::Enum(e) => f.write_str(e.literal()),
            Value::Char(c) => write!(f, "{c}"),
            Value::Str(s) => f.write_str(s),
        }
    }
}

/// Parses a plain decimal literal (`-12`, `0.25`, `3.`) into an exact rational.
pub fn parse_decimal(text: &str) -> Option<BigRational> {
    let (negative, body) = match text.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, text.strip_prefix('+').unwrap_or(text)),
    };
    let (int_part, frac_part) = match body.split_once('.') {
        Some((i, f)) => (i, f),
        None => (body, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part
        .chars()
        .chain(frac_part.chars())
        .all(|c| c.is_ascii_digit())
    {
        return None;
    }
    let digits = format!("{int_part}{frac_part}");
    let numer: BigInt = if digits.is_empty() {
        BigInt::zero()
    } else {
        digits.parse().ok()?
    };
    let denom = num_traits::pow(BigInt::from(10u32), frac_part.len());
    let r = BigRational::new(numer, denom);
    Some(if negative { -r } else { r })
}

/// Renders a rational as a decimal with at least one fractional digit.
/// Falls back to `p/q` when the expansion does not terminate.
pub fn format_decimal(r: &BigRational) -> String {
    let mut denom = r.denom().clone();
    let two = BigInt::from(2u32);
    let five = BigInt::from(5u32);
    let (mut twos, mut fives) = (0usize, 0usize);
    while denom.is_even() {
        denom /= &two;
        twos += 1;
    }
    while (&denom % &five).is_zero() {
        denom /= &five;
        fives += 1;
    }
    if !denom.is_one() {
        return format!("{}/{}", r.numer(), r.denom());
    }
    let places = twos.max(fives).max(1);
    let scaled = r * BigRational::from_integer(num_traits::pow(BigInt::from(10u32), places));
    let scaled = scaled.to_integer();
    let negative = scaled.is_negative();
    let digits = scaled.abs().to_string();
    let digits = format!("{:0>width$}", digits, width = places + 1);
    let (int_part, frac_part) = digits.split_at(digits.len() - places);
    let frac_part = frac_part.trim_end_matches('0');
    let frac_part = if frac_part.is_empty() { "0" } else { frac_part };
    format!(
        "{}{}.{}",
        if negative { "-" } else { "" },
        int_part,
        frac_part
    )
}

pub(crate) fn rational_to_i128(r: &BigRational) -> Option<i128> {
    if r.is_integer() {
        r.to_integer().to_i128()
    } else {
        None
    }
}

pub(crate) fn int_rational(i: i128) -> BigRational {
    BigRational::from_integer(BigInt::from(i))
}
