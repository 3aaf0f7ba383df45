// SPDX-License-Identifier: Apache-2.0

//! Exact rational helpers shared by the tier-2 modules.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Rational = BigRational;

/// `2^-k`.
pub fn pow2_neg(k: u32) -> Rational {
    Rational::new(BigInt::one(), BigInt::one() << k as usize)
}

pub fn from_int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn ratio(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// Parses `"3"`, `"-7/4"` or `"1.414"` exactly.
pub fn parse_rational(text: &str) -> Result<Rational> {
    let t = text.trim();
    let bad = || Error::Parse(format!("not a rational number: {text:?}"));
    if let Some((n, d)) = t.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| bad())?;
        let d: BigInt = d.trim().parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(bad());
        }
        return Ok(Rational::new(n, d));
    }
    if let Some((int, frac)) = t.split_once('.') {
        let negative = int.starts_with('-');
        let digits = format!("{}{frac}", int.trim_start_matches(['-', '+']));
        if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) || digits.is_empty() {
            return Err(bad());
        }
        let n: BigInt = digits.parse().map_err(|_| bad())?;
        let q = Rational::new(n, num_traits::pow(BigInt::from(10), frac.len()));
        return Ok(if negative { -q } else { q });
    }
    let n: BigInt = t.parse().map_err(|_| bad())?;
    Ok(Rational::from_integer(n))
}

/// `"p"` for integers, `"p/q"` otherwise.
pub fn format_rational(q: &Rational) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

pub fn to_f64(q: &Rational) -> f64 {
    q.to_f64()
        .unwrap_or_else(|| if q.is_negative() { f64::NEG_INFINITY } else { f64::INFINITY })
}

/// Orders by cross-multiplication, which is much cheaper than the
/// library ordering on long decimal expansions.
pub fn cmp(x: &Rational, y: &Rational) -> std::cmp::Ordering {
    (x.numer() * y.denom()).cmp(&(y.numer() * x.denom()))
}

/// Whether `|x - y| < 2^-k`.
pub fn within_level(x: &Rational, y: &Rational, k: u32) -> bool {
    let d = (x - y).abs();
    (d.numer() << k as usize) < *d.denom()
}

/// Smallest `k` with `2^-k ≤ d`, for positive `d`; `None` for zero.
pub fn level_of(d: &Rational) -> Option<u32> {
    if d.is_zero() {
        return None;
    }
    let d = d.abs();
    let mut k = 0u32;
    let mut r = Rational::one();
    if d >= r {
        return Some(0);
    }
    while r > d {
        r /= from_int(2);
        k += 1;
    }
    Some(k)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_forms() {
        assert_eq!(parse_rational("3").unwrap(), from_int(3));
        assert_eq!(parse_rational("-7/4").unwrap(), ratio(-7, 4));
        assert_eq!(parse_rational("1.414").unwrap(), ratio(1414, 1000));
        assert_eq!(parse_rational("-0.5").unwrap(), ratio(-1, 2));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
        assert!(parse_rational("1.").is_err());
    }

    #[test]
    fn formatting_and_levels() {
        assert_eq!(format_rational(&ratio(6, 4)), "3/2");
        assert_eq!(format_rational(&from_int(-2)), "-2");
        assert_eq!(pow2_neg(3), ratio(1, 8));
        assert_eq!(level_of(&ratio(1, 8)), Some(3));
        assert_eq!(level_of(&ratio(1, 7)), Some(3));
        assert_eq!(level_of(&ratio(1, 9)), Some(4));
        assert!(within_level(&ratio(1, 2), &ratio(5, 8), 2));
        assert!(!within_level(&ratio(1, 2), &ratio(3, 4), 2));
    }
}
