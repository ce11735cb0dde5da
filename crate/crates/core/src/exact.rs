//! Serialization of exact rationals: a rounded decimal for reading plus the
//! numerator and denominator for anything that needs the exact value.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Serialize, Serializer};

/// Fractional digits kept in the decimal string.
pub const DECIMAL_DIGITS: usize = 24;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExactRational {
    pub decimal: String,
    pub num: String,
    pub den: String,
}

impl From<&BigRational> for ExactRational {
    fn from(q: &BigRational) -> Self {
        ExactRational {
            decimal: to_decimal(q, DECIMAL_DIGITS),
            num: q.numer().to_string(),
            den: q.denom().to_string(),
        }
    }
}

/// Rounds half away from zero to `digits` fractional digits and trims
/// trailing zeros.
pub fn to_decimal(q: &BigRational, digits: usize) -> String {
    let scale = BigInt::from(10u8).pow(digits as u32);
    let scaled = q.abs() * BigRational::from_integer(scale.clone());
    let (whole, rem) = scaled.numer().div_rem(scaled.denom());
    let mut units = whole;
    if rem * 2 >= *scaled.denom() {
        units += 1;
    }
    let (int_part, frac_part) = units.div_rem(&scale);
    let sign = if q.is_negative() && !units_is_zero(&int_part, &frac_part) {
        "-"
    } else {
        ""
    };
    let mut frac = format!("{:0>width$}", frac_part.to_string(), width = digits);
    while frac.ends_with('0') {
        frac.pop();
    }
    if frac.is_empty() {
        format!("{sign}{int_part}")
    } else {
        format!("{sign}{int_part}.{frac}")
    }
}

fn units_is_zero(a: &BigInt, b: &BigInt) -> bool {
    a.is_zero() && b.is_zero()
}

/// `serialize_with` helper for `BigRational` fields.
pub fn ser_rational<S: Serializer>(q: &BigRational, s: S) -> Result<S::Ok, S::Error> {
    ExactRational::from(q).serialize(s)
}

/// `serialize_with` helper for optional `BigRational` fields.
pub fn ser_opt_rational<S: Serializer>(q: &Option<BigRational>, s: S) -> Result<S::Ok, S::Error> {
    q.as_ref().map(ExactRational::from).serialize(s)
}

pub fn to_f64(q: &BigRational) -> f64 {
    q.to_f64().unwrap_or(f64::NAN)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(a: i64, b: i64) -> BigRational {
        BigRational::new(a.into(), b.into())
    }

    #[test]
    fn decimals() {
        assert_eq!(to_decimal(&q(19, 2), 24), "9.5");
        assert_eq!(to_decimal(&q(2, 3), 5), "0.66667");
        assert_eq!(to_decimal(&q(-8, 9), 3), "-0.889");
        assert_eq!(to_decimal(&q(-1, 10_000), 3), "0");
        assert_eq!(to_decimal(&q(7, 1), 3), "7");
    }

    #[test]
    fn json_shape() {
        let v = serde_json::to_value(ExactRational::from(&q(8, 9))).unwrap();
        assert_eq!(v["num"], "8");
        assert_eq!(v["den"], "9");
        assert!(v["decimal"].as_str().unwrap().starts_with("0.888"));
    }
}
