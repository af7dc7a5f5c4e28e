//! Numeric abstraction shared by every algorithm in the crate.
//!
//! Two arithmetic modes are supported: exact rationals ([`Rational`]) and
//! `f64`. All algorithms are generic over [`Scalar`]; comparisons go through
//! the `approx_*` methods so that the float mode can apply an absolute
//! tolerance while the rational mode stays exact.

use std::fmt::{Debug, Display};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{FromPrimitive, One, Signed, ToPrimitive, Zero};

/// Exact rational number used by the rational arithmetic mode.
pub type Rational = BigRational;

/// Default absolute tolerance for float-mode comparisons.
pub const DEFAULT_TOLERANCE: f64 = 1e-9;

pub trait Scalar: Clone + Debug + Display + PartialOrd + Signed + Send + Sync + 'static {
    /// `true` when arithmetic is exact and tolerances are ignored.
    const EXACT: bool;

    fn from_rational(r: &Rational) -> Self;

    fn to_rational(&self) -> Rational;

    fn to_f64(&self) -> f64;

    fn from_f64(x: f64) -> Self;

    fn from_usize(n: usize) -> Self {
        Self::from_rational(&Rational::from_integer(BigInt::from(n)))
    }

    /// `self == other`, within `tol` in float mode.
    fn approx_eq(&self, other: &Self, tol: f64) -> bool;

    /// `self < other - tol` in float mode, `self < other` exactly otherwise.
    fn approx_lt(&self, other: &Self, tol: f64) -> bool;

    /// Inclusive comparison `self >= other - tol`.
    fn approx_ge(&self, other: &Self, tol: f64) -> bool {
        !self.approx_lt(other, tol)
    }

    fn approx_le(&self, other: &Self, tol: f64) -> bool {
        !other.approx_lt(self, tol)
    }

    fn approx_zero(&self, tol: f64) -> bool {
        self.approx_eq(&Self::zero(), tol)
    }

    /// Strictly greater than zero; unlike `Signed::is_positive`, false for
    /// `0.0`.
    fn gt_zero(&self) -> bool {
        *self > Self::zero()
    }

    /// Strictly less than zero; false for `-0.0`.
    fn lt_zero(&self) -> bool {
        *self < Self::zero()
    }

    /// Text form used in JSON and CLI output; parses back to the same value.
    fn to_exact_string(&self) -> String;
}

impl Scalar for Rational {
    const EXACT: bool = true;

    fn from_rational(r: &Rational) -> Self {
        r.clone()
    }

    fn to_rational(&self) -> Rational {
        self.clone()
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }

    fn from_f64(x: f64) -> Self {
        Rational::from_float(x).expect("finite float")
    }

    fn approx_eq(&self, other: &Self, _tol: f64) -> bool {
        self == other
    }

    fn approx_lt(&self, other: &Self, _tol: f64) -> bool {
        self < other
    }

    fn to_exact_string(&self) -> String {
        format_rational(self)
    }
}

impl Scalar for f64 {
    const EXACT: bool = false;

    fn from_rational(r: &Rational) -> Self {
        ToPrimitive::to_f64(r).unwrap_or(f64::NAN)
    }

    fn to_rational(&self) -> Rational {
        Rational::from_float(*self).expect("finite float")
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn from_f64(x: f64) -> Self {
        x
    }

    fn from_usize(n: usize) -> Self {
        FromPrimitive::from_usize(n).unwrap_or(f64::NAN)
    }

    fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        (self - other).abs() <= tol
    }

    fn approx_lt(&self, other: &Self, tol: f64) -> bool {
        *self < *other - tol
    }

    fn to_exact_string(&self) -> String {
        format!("{self}")
    }
}

/// Finite decimals print as decimals ("3.75"), everything else as "p/q".
pub fn format_rational(r: &Rational) -> String {
    if r.is_integer() {
        return r.numer().to_string();
    }
    let mut den = r.denom().clone();
    let two = BigInt::from(2);
    let five = BigInt::from(5);
    let (mut twos, mut fives) = (0usize, 0usize);
    while den.is_multiple_of(&two) {
        den /= &two;
        twos += 1;
    }
    while den.is_multiple_of(&five) {
        den /= &five;
        fives += 1;
    }
    if !den.is_one() {
        return format!("{}/{}", r.numer(), r.denom());
    }
    let digits = twos.max(fives);
    let scaled = r * Rational::from_integer(BigInt::from(10).pow(digits as u32));
    let mut int = scaled.to_integer();
    let negative = int.is_negative();
    if negative {
        int = -int;
    }
    let mut text = int.to_string();
    if text.len() <= digits {
        text = format!("{}{}", "0".repeat(digits + 1 - text.len()), text);
    }
    let split = text.len() - digits;
    format!(
        "{}{}.{}",
        if negative { "-" } else { "" },
        &text[..split],
        &text[split..]
    )
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("`{0}` is not a decimal or fraction")]
pub struct ParseNumberError(pub String);

/// Parses a decimal string (`"3"`, `"-0.25"`, `"1.5e2"`) or a fraction
/// (`"15/4"`) into an exact rational.
pub fn parse_rational(text: &str) -> Result<Rational, ParseNumberError> {
    let err = || ParseNumberError(text.to_string());
    let s = text.trim();
    if let Some((num, den)) = s.split_once('/') {
        let num = parse_rational(num).map_err(|_| err())?;
        let den = parse_rational(den).map_err(|_| err())?;
        if den.is_zero() {
            return Err(err());
        }
        return Ok(num / den);
    }
    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(pos) => {
            let exp: i32 = s[pos + 1..].parse().map_err(|_| err())?;
            (&s[..pos], exp)
        }
        None => (s, 0),
    };
    let (negative, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(err());
    }
    if !int_part
        .chars()
        .chain(frac_part.chars())
        .all(|c| c.is_ascii_digit())
    {
        return Err(err());
    }
    let all_digits = format!("{int_part}{frac_part}");
    let numer: BigInt = all_digits.parse().map_err(|_| err())?;
    let scale = exponent - frac_part.len() as i32;
    let ten = BigInt::from(10);
    let mut value = Rational::from_integer(numer);
    if scale >= 0 {
        value *= Rational::from_integer(ten.pow(scale as u32));
    } else {
        value /= Rational::from_integer(ten.pow((-scale) as u32));
    }
    Ok(if negative { -value } else { value })
}

/// Convenience constructor for tests and literals: `ratio(15, 4)`.
pub fn ratio(numer: i64, denom: i64) -> Rational {
    Rational::new(BigInt::from(numer), BigInt::from(denom))
}
