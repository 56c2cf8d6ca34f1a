//! Exact rational values.
//!
//! All satisfaction values, thresholds and discount weights are carried as
//! [`Rational`], an arbitrary-precision fraction kept in lowest terms. Nothing
//! in the checker ever goes through floating point; the decimal rendering
//! below is for display only.

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, Signed, Zero};

pub type Rational = BigRational;

pub fn rat(numer: i64, denom: i64) -> Rational {
    Rational::new(BigInt::from(numer), BigInt::from(denom))
}

pub fn int(value: i64) -> Rational {
    Rational::from_integer(BigInt::from(value))
}

pub fn zero() -> Rational {
    Rational::zero()
}

pub fn one() -> Rational {
    Rational::one()
}

/// True when `value` lies in the closed unit interval.
pub fn in_unit_interval(value: &Rational) -> bool {
    !value.is_negative() && *value <= Rational::one()
}

/// Parses `p/q` or a plain integer. Decimal notation is rejected on purpose:
/// a value such as `0.333` has no exact meaning as a threshold.
pub fn parse_rational(text: &str) -> Result<Rational, String> {
    let text = text.trim();
    if text.contains('.') || text.contains('e') || text.contains('E') {
        return Err(format!("`{text}` is not an exact fraction (use p/q)"));
    }
    let (numer, denom) = match text.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (text, "1"),
    };
    let numer: BigInt = numer
        .parse()
        .map_err(|_| format!("invalid numerator in `{text}`"))?;
    let denom: BigInt = denom
        .parse()
        .map_err(|_| format!("invalid denominator in `{text}`"))?;
    if denom.is_zero() {
        return Err(format!("zero denominator in `{text}`"));
    }
    Ok(Rational::new(numer, denom))
}

/// Exact `p/q` form, or `p` for integers.
pub fn format_exact(value: &Rational) -> String {
    if value.is_integer() {
        value.numer().to_string()
    } else {
        format!("{}/{}", value.numer(), value.denom())
    }
}

/// Decimal rendering rounded half-up to `digits` fractional digits.
pub fn format_decimal(value: &Rational, digits: usize) -> String {
    let negative = value.is_negative();
    let abs = value.abs();
    let scale = num::pow(BigInt::from(10), digits);
    let scaled = abs * Rational::from_integer(scale.clone());
    let rounded = (scaled + rat(1, 2)).floor().to_integer();
    let int_part = &rounded / &scale;
    let frac_part = &rounded % &scale;
    let sign = if negative && !rounded.is_zero() {
        "-"
    } else {
        ""
    };
    if digits == 0 {
        format!("{sign}{int_part}")
    } else {
        format!(
            "{sign}{int_part}.{:0>width$}",
            frac_part.to_string(),
            width = digits
        )
    }
}

/// Exact integer power.
pub fn pow(base: &Rational, exp: u64) -> Rational {
    let mut result = Rational::one();
    let mut square = base.clone();
    let mut e = exp;
    while e > 0 {
        if e & 1 == 1 {
            result *= &square;
        }
        e >>= 1;
        if e > 0 {
            square = &square * &square;
        }
    }
    result
}
