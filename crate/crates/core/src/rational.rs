//! Rational helpers: parsing, formatting and dyadic rounding.

use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub type Rational = BigRational;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("cannot parse rational `{0}`")]
pub struct ParseRationalError(pub String);

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn frac(p: i64, q: i64) -> Rational {
    Rational::new(BigInt::from(p), BigInt::from(q))
}

/// Parses `"p"`, `"p/q"` or a finite decimal such as `"-0.125"`.
pub fn parse(s: &str) -> Result<Rational, ParseRationalError> {
    let t = s.trim();
    let err = || ParseRationalError(s.to_string());
    if t.is_empty() {
        return Err(err());
    }
    if let Some((p, q)) = t.split_once('/') {
        let p = BigInt::from_str(p.trim()).map_err(|_| err())?;
        let q = BigInt::from_str(q.trim()).map_err(|_| err())?;
        if q.is_zero() {
            return Err(err());
        }
        return Ok(Rational::new(p, q));
    }
    if let Some((whole, fraction)) = t.split_once('.') {
        let negative = whole.starts_with('-');
        let digits = format!("{}{}", whole.trim_start_matches(['-', '+']), fraction);
        if digits.is_empty() || !digits.chars().all(|c| c.is_ascii_digit()) {
            return Err(err());
        }
        let mut num = BigInt::from_str(&digits).map_err(|_| err())?;
        if negative {
            num = -num;
        }
        let den = num_traits::pow(BigInt::from(10), fraction.len());
        return Ok(Rational::new(num, den));
    }
    BigInt::from_str(t)
        .map(Rational::from_integer)
        .map_err(|_| err())
}

/// Canonical text form: `"p"` for integers, `"p/q"` otherwise.
pub fn format(q: &Rational) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// Exact conversion of a finite `f64`.
pub fn from_f64(x: f64) -> Option<Rational> {
    Rational::from_float(x)
}

pub fn to_f64(q: &Rational) -> f64 {
    q.to_f64().unwrap_or_else(|| {
        // Very large numerator/denominator: shift both down first.
        let nb = q.numer().bits() as i64;
        let db = q.denom().bits() as i64;
        let shift = (nb.max(db) - 1000).max(0) as usize;
        let n = (q.numer() >> shift).to_f64().unwrap_or(f64::NAN);
        let d = (q.denom() >> shift).to_f64().unwrap_or(f64::NAN);
        n / d
    })
}

fn pow2(k: u32) -> BigInt {
    BigInt::one() << k as usize
}

/// Largest multiple of `2^-k` not exceeding `q`.
pub fn round_down(q: &Rational, k: u32) -> Rational {
    let scaled = q * Rational::from_integer(pow2(k));
    Rational::new(scaled.floor().to_integer(), pow2(k))
}

/// Smallest multiple of `2^-k` not below `q`.
pub fn round_up(q: &Rational, k: u32) -> Rational {
    let scaled = q * Rational::from_integer(pow2(k));
    Rational::new(scaled.ceil().to_integer(), pow2(k))
}

pub fn dyadic(m: BigInt, k: u32) -> Rational {
    Rational::new(m, pow2(k))
}

pub fn two_pow(e: i64) -> Rational {
    if e >= 0 {
        Rational::from_integer(pow2(e as u32))
    } else {
        Rational::new(BigInt::one(), pow2((-e) as u32))
    }
}

/// `floor(sqrt(q * 4^k))` for `q >= 0`.
pub fn scaled_isqrt(q: &Rational, k: u32) -> BigUint {
    debug_assert!(!q.is_negative());
    let scaled = (q * Rational::from_integer(pow2(2 * k))).floor().to_integer();
    scaled.to_biguint().unwrap_or_default().sqrt()
}

/// Exact square root of a rational, if it exists.
pub fn exact_sqrt(q: &Rational) -> Option<Rational> {
    if q.is_negative() {
        return None;
    }
    let n = q.numer().to_biguint()?;
    let d = q.denom().to_biguint()?;
    let rn = n.sqrt();
    let rd = d.sqrt();
    if &rn * &rn == n && &rd * &rd == d {
        Some(Rational::new(rn.into(), rd.into()))
    } else {
        None
    }
}

/// Least common multiple of the denominators.
pub fn common_denominator<'a>(qs: impl IntoIterator<Item = &'a Rational>) -> BigInt {
    qs.into_iter()
        .fold(BigInt::one(), |acc, q| acc.lcm(q.denom()))
}

pub fn nearest_integer(q: &Rational) -> BigInt {
    (q + Rational::new(BigInt::one(), BigInt::from(2)))
        .floor()
        .to_integer()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_all_forms() {
        assert_eq!(parse("3").unwrap(), int(3));
        assert_eq!(parse("-6/4").unwrap(), frac(-3, 2));
        assert_eq!(parse("-0.125").unwrap(), frac(-1, 8));
        assert_eq!(parse("2.5").unwrap(), frac(5, 2));
        assert!(parse("1/0").is_err());
        assert!(parse("abc").is_err());
        assert_eq!(format(&frac(10, 4)), "5/2");
        assert_eq!(format(&int(-7)), "-7");
    }

    #[test]
    fn dyadic_rounding_brackets() {
        let q = frac(1, 3);
        let lo = round_down(&q, 10);
        let hi = round_up(&q, 10);
        assert!(lo <= q && q <= hi);
        assert_eq!(&hi - &lo, two_pow(-10));
        assert_eq!(exact_sqrt(&frac(9, 4)), Some(frac(3, 2)));
        assert_eq!(exact_sqrt(&int(5)), None);
    }
}
