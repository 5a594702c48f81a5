//! Scalar kinds shared by the exact and floating-point code paths.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{FromPrimitive, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};

/// Arithmetic used to represent hyperplanes and linear forms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Arithmetic {
    /// Arbitrary-precision rationals; signs are decided exactly.
    #[default]
    Exact,
    /// IEEE doubles with a scale-aware zero tolerance.
    Float,
}

impl std::str::FromStr for Arithmetic {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" => Ok(Arithmetic::Exact),
            "float" => Ok(Arithmetic::Float),
            other => Err(Error::InvalidArgument(format!("unknown arithmetic `{other}`"))),
        }
    }
}

/// Numeric operations needed by the generic predicates and oracles.
///
/// Implemented for `f64` and `BigRational`.
pub trait Scalar:
    Clone + PartialOrd + fmt::Debug + Send + Sync + Signed + FromPrimitive + ToPrimitive + 'static
{
    /// Whether two atom values should be merged. `scale` is the magnitude of
    /// the quantity being enumerated (e.g. the l1 norm of a linear form).
    fn merges_with(&self, other: &Self, scale: &Self) -> bool;

    fn from_rational(r: &BigRational) -> Self;

    fn is_finite_scalar(&self) -> bool;

    /// Whether arithmetic on this kind is exact.
    fn is_exact() -> bool;

    fn as_f64(&self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    fn half() -> Self {
        Self::one() / (Self::one() + Self::one())
    }
}

/// Relative tolerance for merging floating-point atoms.
pub const FLOAT_MERGE_TOLERANCE: f64 = 1e-12;

impl Scalar for f64 {
    fn merges_with(&self, other: &Self, scale: &Self) -> bool {
        (self - other).abs() <= FLOAT_MERGE_TOLERANCE * scale.abs().max(f64::MIN_POSITIVE)
    }

    fn from_rational(r: &BigRational) -> Self {
        rational_to_f64(r)
    }

    fn is_finite_scalar(&self) -> bool {
        self.is_finite()
    }

    fn is_exact() -> bool {
        false
    }
}

impl Scalar for BigRational {
    fn merges_with(&self, other: &Self, _scale: &Self) -> bool {
        self == other
    }

    fn from_rational(r: &BigRational) -> Self {
        r.clone()
    }

    fn is_finite_scalar(&self) -> bool {
        true
    }

    fn is_exact() -> bool {
        true
    }
}

/// Nearest double to a rational, robust to huge numerators and denominators.
pub fn rational_to_f64(r: &BigRational) -> f64 {
    if let Some(x) = r.to_f64() {
        if x.is_finite() {
            return x;
        }
    }
    // Fall back to shifting both parts down to 64 significant bits.
    let numer = r.numer();
    let denom = r.denom();
    let shift_n = numer.bits().saturating_sub(64);
    let shift_d = denom.bits().saturating_sub(64);
    let n = (numer >> shift_n).to_f64().unwrap_or(0.0);
    let d = (denom >> shift_d).to_f64().unwrap_or(1.0);
    let exp = shift_n as i64 - shift_d as i64;
    n / d * 2f64.powi(exp.clamp(i32::MIN as i64, i32::MAX as i64) as i32)
}

/// Exact rational value of a finite double.
pub fn f64_to_rational(x: f64) -> Result<BigRational> {
    BigRational::from_float(x).ok_or(Error::NonFiniteScalar(x))
}

/// Parses `"p/q"`, integers, and decimal literals (with optional exponent)
/// into an exact rational.
pub fn parse_rational(text: &str) -> Result<BigRational> {
    let bad = || Error::InvalidScalar(text.to_string());
    let s = text.trim();
    if s.is_empty() {
        return Err(bad());
    }
    if let Some((p, q)) = s.split_once('/') {
        let p: BigInt = p.trim().parse().map_err(|_| bad())?;
        let q: BigInt = q.trim().parse().map_err(|_| bad())?;
        if q.is_zero() {
            return Err(bad());
        }
        return Ok(BigRational::new(p, q));
    }
    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(pos) => {
            let e: i64 = s[pos + 1..].parse().map_err(|_| bad())?;
            (&s[..pos], e)
        }
        None => (s, 0),
    };
    let (negative, digits) = match mantissa.as_bytes().first() {
        Some(b'-') => (true, &mantissa[1..]),
        Some(b'+') => (false, &mantissa[1..]),
        _ => (false, mantissa),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(bad());
    }
    if !int_part.bytes().chain(frac_part.bytes()).all(|b| b.is_ascii_digit()) {
        return Err(bad());
    }
    if exponent.abs() > 10_000 {
        return Err(bad());
    }
    let all_digits = format!("{int_part}{frac_part}");
    let mut numer: BigInt =
        if all_digits.is_empty() { BigInt::zero() } else { all_digits.parse().map_err(|_| bad())? };
    if negative {
        numer = -numer;
    }
    let scale = exponent - frac_part.len() as i64;
    let ten = BigInt::from(10u8);
    let value = if scale >= 0 {
        BigRational::from_integer(numer * num_traits::pow(ten, scale as usize))
    } else {
        BigRational::new(numer, num_traits::pow(ten, (-scale) as usize))
    };
    Ok(value)
}

/// Reads a JSON scalar: a number (interpreted through its shortest decimal
/// representation) or a `"p/q"` string.
pub fn rational_from_json(value: &Value) -> Result<BigRational> {
    match value {
        Value::Number(n) => parse_rational(&n.to_string()),
        Value::String(s) => parse_rational(s),
        other => Err(Error::InvalidScalar(other.to_string())),
    }
}

/// Serializes an exact scalar: integers as JSON numbers when they fit,
/// everything else as a `"p/q"` string.
pub fn rational_to_json(r: &BigRational) -> Value {
    if r.is_integer() {
        if let Some(i) = r.numer().to_i64() {
            return Value::from(i);
        }
        return Value::String(r.numer().to_string());
    }
    Value::String(format!("{}/{}", r.numer(), r.denom()))
}

/// JSON value of a double. Non-finite values become `null`.
pub fn f64_to_json(x: f64) -> Value {
    serde_json::Number::from_f64(x).map(Value::Number).unwrap_or(Value::Null)
}

/// `p/q` (or `p` for integers) text form.
pub fn format_rational(r: &BigRational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(p: i64, d: i64) -> BigRational {
        BigRational::new(p.into(), d.into())
    }

    #[test]
    fn parses_literal_forms() {
        assert_eq!(parse_rational("3/4").unwrap(), q(3, 4));
        assert_eq!(parse_rational("-6/8").unwrap(), q(-3, 4));
        assert_eq!(parse_rational("7").unwrap(), q(7, 1));
        assert_eq!(parse_rational("0.1").unwrap(), q(1, 10));
        assert_eq!(parse_rational("-2.5e-1").unwrap(), q(-1, 4));
        assert_eq!(parse_rational("1E3").unwrap(), q(1000, 1));
        assert_eq!(parse_rational(".5").unwrap(), q(1, 2));
    }

    #[test]
    fn rejects_garbage() {
        for s in ["", "1/0", "abc", "1.2.3", "--1", "1e", "."] {
            assert!(parse_rational(s).is_err(), "{s}");
        }
    }

    #[test]
    fn json_scalars_round_trip() {
        for r in [q(1, 3), q(-5, 1), q(0, 1), q(22, 7)] {
            assert_eq!(rational_from_json(&rational_to_json(&r)).unwrap(), r);
        }
        assert_eq!(rational_from_json(&serde_json::json!(0.3)).unwrap(), q(3, 10));
    }

    #[test]
    fn float_merge_is_scale_relative() {
        assert!(1.0f64.merges_with(&(1.0 + 1e-14), &1.0));
        assert!(!1.0f64.merges_with(&(1.0 + 1e-9), &1.0));
        assert!(q(1, 2).merges_with(&q(2, 4), &q(1, 1)));
    }
}
