//! String conversions shared by the serializers: decimal strings for big
//! integers, `p/q` strings for rationals, fixed-point decimal rendering.

use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Pow, Signed, Zero};

use crate::error::{Error, Result};

pub(crate) fn int_from_str(s: &str) -> Result<BigInt> {
    BigInt::from_str(s.trim()).map_err(|e| Error::parse(format!("bad integer {s:?}: {e}")))
}

/// Renders a rational as `p/q`, or just `p` when the denominator is one.
pub(crate) fn rat_to_string(r: &BigRational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub(crate) fn rat_from_str(s: &str) -> Result<BigRational> {
    let s = s.trim();
    match s.split_once('/') {
        None => Ok(BigRational::from_integer(int_from_str(s)?)),
        Some((num, den)) => {
            let den = int_from_str(den)?;
            if den.is_zero() {
                return Err(Error::parse(format!("zero denominator in {s:?}")));
            }
            Ok(BigRational::new(int_from_str(num)?, den))
        }
    }
}

/// Fixed-point decimal rendering with `places` fractional digits, rounding
/// half away from zero.
pub(crate) fn rat_to_decimal(r: &BigRational, places: u32) -> String {
    let scale = BigInt::from(10u32).pow(u64::from(places));
    let scaled = r * BigRational::from_integer(scale.clone());
    // round(x) = floor((2|x| + 1) / 2) with the sign reattached
    let two = BigInt::from(2);
    let mag = (scaled.numer().abs() * &two + scaled.denom()) / (scaled.denom() * &two);
    let int_part = &mag / &scale;
    let frac_part = &mag % &scale;
    let sign = if r.is_negative() && !mag.is_zero() {
        "-"
    } else {
        ""
    };
    format!(
        "{sign}{int_part}.{frac:0>width$}",
        frac = frac_part,
        width = places as usize
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn rational_strings_round_trip() {
        for r in [rat(2, 3), rat(-7, 8), rat(5, 1), rat(0, 9)] {
            assert_eq!(rat_from_str(&rat_to_string(&r)).unwrap(), r);
        }
    }

    #[test]
    fn decimal_rendering() {
        assert_eq!(rat_to_decimal(&rat(2, 3), 6), "0.666667");
        assert_eq!(rat_to_decimal(&rat(1, 3), 6), "0.333333");
        assert_eq!(rat_to_decimal(&rat(1, 2), 1), "0.5");
        assert_eq!(rat_to_decimal(&rat(-2, 3), 2), "-0.67");
        assert_eq!(rat_to_decimal(&rat(2870, 3025), 6), "0.948760");
    }

    #[test]
    fn rejects_garbage() {
        assert!(int_from_str("12x").is_err());
        assert!(rat_from_str("1/0").is_err());
    }
}
