//! Closed intervals with exact rational endpoints.
//!
//! Arithmetic is exact on endpoints; only [`Interval::sqrt`] and
//! [`Interval::ln`] introduce outward dyadic rounding.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::rational::{self, Rational};

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Interval {
    lo: Rational,
    hi: Rational,
}

impl Interval {
    pub fn new(lo: Rational, hi: Rational) -> Self {
        assert!(lo <= hi, "empty interval");
        Interval { lo, hi }
    }

    pub fn point(q: Rational) -> Self {
        Interval {
            lo: q.clone(),
            hi: q,
        }
    }

    pub fn zero() -> Self {
        Self::point(Rational::zero())
    }

    pub fn lo(&self) -> &Rational {
        &self.lo
    }

    pub fn hi(&self) -> &Rational {
        &self.hi
    }

    pub fn width(&self) -> Rational {
        &self.hi - &self.lo
    }

    pub fn mid(&self) -> Rational {
        (&self.lo + &self.hi) / Rational::from_integer(BigInt::from(2))
    }

    pub fn is_point(&self) -> bool {
        self.lo == self.hi
    }

    pub fn contains(&self, q: &Rational) -> bool {
        &self.lo <= q && q <= &self.hi
    }

    pub fn contains_zero(&self) -> bool {
        !self.lo.is_positive() && !self.hi.is_negative()
    }

    pub fn is_positive(&self) -> bool {
        self.lo.is_positive()
    }

    pub fn is_negative(&self) -> bool {
        self.hi.is_negative()
    }

    pub fn subset_of(&self, other: &Interval) -> bool {
        other.lo <= self.lo && self.hi <= other.hi
    }

    pub fn overlaps(&self, other: &Interval) -> bool {
        self.lo <= other.hi && other.lo <= self.hi
    }

    pub fn width_at_most(&self, bits: u32) -> bool {
        self.width() <= rational::two_pow(-(bits as i64))
    }

    pub fn add(&self, o: &Interval) -> Interval {
        Interval {
            lo: &self.lo + &o.lo,
            hi: &self.hi + &o.hi,
        }
    }

    pub fn sub(&self, o: &Interval) -> Interval {
        Interval {
            lo: &self.lo - &o.hi,
            hi: &self.hi - &o.lo,
        }
    }

    pub fn neg(&self) -> Interval {
        Interval {
            lo: -&self.hi,
            hi: -&self.lo,
        }
    }

    pub fn mul(&self, o: &Interval) -> Interval {
        if self.is_point() && o.is_point() {
            return Interval::point(&self.lo * &o.lo);
        }
        let c = [
            &self.lo * &o.lo,
            &self.lo * &o.hi,
            &self.hi * &o.lo,
            &self.hi * &o.hi,
        ];
        let lo = c.iter().min().cloned().unwrap();
        let hi = c.iter().max().cloned().unwrap();
        Interval { lo, hi }
    }

    pub fn scale(&self, q: &Rational) -> Interval {
        let a = &self.lo * q;
        let b = &self.hi * q;
        if a <= b {
            Interval { lo: a, hi: b }
        } else {
            Interval { lo: b, hi: a }
        }
    }

    pub fn square(&self) -> Interval {
        let a = &self.lo * &self.lo;
        let b = &self.hi * &self.hi;
        if self.contains_zero() {
            Interval {
                lo: Rational::zero(),
                hi: a.max(b),
            }
        } else if a <= b {
            Interval { lo: a, hi: b }
        } else {
            Interval { lo: b, hi: a }
        }
    }

    /// `None` when the interval meets zero.
    pub fn recip(&self) -> Option<Interval> {
        if self.contains_zero() {
            None
        } else {
            Some(Interval {
                lo: self.hi.recip(),
                hi: self.lo.recip(),
            })
        }
    }

    pub fn div(&self, o: &Interval) -> Option<Interval> {
        o.recip().map(|r| self.mul(&r))
    }

    pub fn abs(&self) -> Interval {
        if self.contains_zero() {
            Interval {
                lo: Rational::zero(),
                hi: self.lo.abs().max(self.hi.abs()),
            }
        } else if self.lo.is_positive() {
            self.clone()
        } else {
            self.neg()
        }
    }

    pub fn hull(&self, o: &Interval) -> Interval {
        Interval {
            lo: self.lo.clone().min(o.lo.clone()),
            hi: self.hi.clone().max(o.hi.clone()),
        }
    }

    /// Outward rounding of both endpoints to the grid `2^-k`.
    pub fn round_out(&self, k: u32) -> Interval {
        Interval {
            lo: rational::round_down(&self.lo, k),
            hi: rational::round_up(&self.hi, k),
        }
    }

    /// Enclosure of the square root; endpoints are rounded outward to
    /// `2^-bits`. Returns `None` if the interval is entirely negative.
    /// A negative lower endpoint is clamped to zero.
    pub fn sqrt(&self, bits: u32) -> Option<Interval> {
        if self.hi.is_negative() {
            return None;
        }
        let lo = if self.lo.is_positive() {
            let m = rational::scaled_isqrt(&self.lo, bits);
            rational::dyadic(m.into(), bits)
        } else {
            Rational::zero()
        };
        let m = rational::scaled_isqrt(&self.hi, bits);
        let mut hi = rational::dyadic(m.into(), bits);
        if &hi * &hi != self.hi {
            hi += rational::two_pow(-(bits as i64));
        }
        Some(Interval { lo, hi })
    }

    /// Enclosure of the natural logarithm with endpoint error below
    /// `2^-bits`. `None` unless the interval is strictly positive.
    pub fn ln(&self, bits: u32) -> Option<Interval> {
        if !self.lo.is_positive() {
            return None;
        }
        if self.is_point() {
            return Some(ln_bounds(&self.lo, bits));
        }
        let lo = ln_bounds(&self.lo, bits).lo;
        let hi = ln_bounds(&self.hi, bits).hi;
        Some(Interval { lo, hi })
    }

    pub fn to_f64_mid(&self) -> f64 {
        rational::to_f64(&self.mid())
    }

    pub fn to_f64_pair(&self) -> (f64, f64) {
        (rational::to_f64(&self.lo), rational::to_f64(&self.hi))
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (a, b) = self.to_f64_pair();
        write!(f, "[{a:.17e}, {b:.17e}]")
    }
}

/// Serialized form used in reports: exact endpoints plus a float preview.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct IntervalRecord {
    pub lo: String,
    pub hi: String,
    pub approx: f64,
}

impl From<&Interval> for IntervalRecord {
    fn from(iv: &Interval) -> Self {
        IntervalRecord {
            lo: rational::format(&iv.lo),
            hi: rational::format(&iv.hi),
            approx: iv.to_f64_mid(),
        }
    }
}

/// `2 * atanh(z) = 2 * sum z^(2j+1)/(2j+1)` for `0 <= zlo <= zhi < 1/3`,
/// enclosed with error below `2^-bits`.
fn two_atanh(zlo: &Rational, zhi: &Rational, bits: u32) -> Interval {
    let k = bits + 16;
    // z < 1/3, so terms shrink by at least 9 and the tail after this many
    // terms is below 2^-(bits+4).
    let terms = (bits / 2 + 4) as usize;
    let lo_fixed = (zlo * Rational::from_integer(BigInt::one() << k as usize))
        .floor()
        .to_integer();
    let hi_fixed = (zhi * Rational::from_integer(BigInt::one() << k as usize))
        .ceil()
        .to_integer();
    let (sum_lo, _) = series(&lo_fixed, terms, k, false);
    let (sum_hi, last_power) = series(&hi_fixed, terms, k, true);
    // Tail: 2 z^(2J+1) / ((2J+1)(1 - z^2)) <= (8/3) z^(2J+1).
    let tail = (last_power * 8u32 + 2u32) / 3u32;
    Interval {
        lo: rational::dyadic(sum_lo, k),
        hi: rational::dyadic(sum_hi + tail, k),
    }
}

/// Fixed-point series on integers scaled by `2^k`, rounding every step
/// down (or up). Returns `2 * sum` and the first omitted power.
fn series(z: &BigInt, terms: usize, k: u32, upward: bool) -> (BigInt, BigInt) {
    let div = |n: BigInt, d: &BigInt| -> BigInt {
        if upward {
            -((-n).div_floor(d))
        } else {
            n.div_floor(d)
        }
    };
    let scale = BigInt::one() << k as usize;
    let z2 = div(z * z, &scale);
    let mut power = z.clone();
    let mut acc = BigInt::zero();
    for j in 0..terms {
        acc += div(power.clone(), &BigInt::from(2 * j as u64 + 1));
        power = div(&power * &z2, &scale);
    }
    (acc * 2u32, power)
}

fn ln2(bits: u32) -> Interval {
    let third = Rational::new(BigInt::one(), BigInt::from(3));
    two_atanh(&third, &third, bits)
}

/// Enclosure of `ln q` for a positive rational.
fn ln_bounds(q: &Rational, bits: u32) -> Interval {
    debug_assert!(q.is_positive());
    if q.is_one() {
        return Interval::zero();
    }
    // q = 2^e * m with m in [1, 2).
    let mut e = q.numer().bits() as i64 - q.denom().bits() as i64;
    let mut m = q * rational::two_pow(-e);
    let one = Rational::one();
    let two = Rational::from_integer(BigInt::from(2));
    while m < one {
        m *= &two;
        e -= 1;
    }
    while m >= two {
        m /= &two;
        e += 1;
    }
    let work = bits + 8 + (64 - (e.unsigned_abs()).leading_zeros());
    // z in [0, 1/3)
    let z = (&m - &one) / (&m + &one);
    let k = work + 8;
    let zlo = rational::round_down(&z, k);
    let zhi = rational::round_up(&z, k);
    let log_m = two_atanh(&zlo, &zhi, work);
    let l2 = ln2(work);
    log_m
        .add(&l2.scale(&Rational::from_integer(BigInt::from(e))))
        .round_out(bits + 4)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{frac, int};

    #[test]
    fn ln_encloses_float_values() {
        for (p, q) in [(3, 1), (1, 2), (10, 7), (1000, 3), (1, 1000), (5, 4)] {
            let x = frac(p, q);
            let iv = Interval::point(x).ln(60).unwrap();
            let truth = (p as f64 / q as f64).ln();
            let (a, b) = iv.to_f64_pair();
            assert!(a <= truth + 1e-15 && truth - 1e-15 <= b, "{p}/{q}: {iv}");
            assert!(iv.width_at_most(55));
        }
    }

    #[test]
    fn ln_of_one_is_exact() {
        assert_eq!(Interval::point(int(1)).ln(40).unwrap(), Interval::zero());
        assert!(Interval::point(int(0)).ln(40).is_none());
    }

    #[test]
    fn sqrt_brackets() {
        let iv = Interval::point(int(2)).sqrt(50).unwrap();
        assert!(iv.lo() * iv.lo() <= int(2) && int(2) <= iv.hi() * iv.hi());
        assert!(iv.width_at_most(49));
        let exact = Interval::point(frac(9, 4)).sqrt(20).unwrap();
        assert!(exact.contains(&frac(3, 2)));
    }

    #[test]
    fn ln_nests_under_refinement() {
        let x = Interval::point(frac(7, 3));
        let coarse = x.ln(20).unwrap();
        let fine = x.ln(80).unwrap();
        assert!(fine.subset_of(&coarse));
    }

    #[test]
    fn multiplication_handles_signs() {
        let a = Interval::new(int(-1), int(2));
        let b = Interval::new(int(-3), int(1));
        let c = a.mul(&b);
        assert_eq!(c, Interval::new(int(-6), int(3)));
        assert!(a.recip().is_none());
    }
}
