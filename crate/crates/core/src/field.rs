//! Abstract field interface shared by the exact linear algebra.
//!
//! Elements do not carry their field; every operation is routed through a
//! context value implementing [`Field`]. This keeps elements plain data
//! (cheap to hash, serialize and compare) while letting matrices,
//! polynomials and root isolation work uniformly over the rationals, a
//! number field, or its quadratic extension.

use std::cmp::Ordering;
use std::fmt::Debug;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::interval::Interval;
use crate::rational::Rational;

pub trait Field: Send + Sync {
    type Elem: Clone + PartialEq + Debug + Send + Sync;

    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn from_rational(&self, q: &Rational) -> Self::Elem;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    /// `None` exactly when `a` is zero.
    fn inv(&self, a: &Self::Elem) -> Option<Self::Elem>;
    fn is_zero(&self, a: &Self::Elem) -> bool;

    fn from_int(&self, n: i64) -> Self::Elem {
        self.from_rational(&Rational::from_integer(BigInt::from(n)))
    }

    fn is_one(&self, a: &Self::Elem) -> bool {
        self.is_zero(&self.sub(a, &self.one()))
    }

    fn div(&self, a: &Self::Elem, b: &Self::Elem) -> Option<Self::Elem> {
        self.inv(b).map(|bi| self.mul(a, &bi))
    }

    fn pow(&self, a: &Self::Elem, e: u64) -> Self::Elem {
        let mut base = a.clone();
        let mut acc = self.one();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            e >>= 1;
            if e > 0 {
                base = self.mul(&base, &base);
            }
        }
        acc
    }

    /// Integer power; negative exponents need an invertible base.
    fn powi(&self, a: &Self::Elem, e: i64) -> Option<Self::Elem> {
        if e >= 0 {
            Some(self.pow(a, e as u64))
        } else {
            self.inv(a).map(|ai| self.pow(&ai, e.unsigned_abs()))
        }
    }
}

/// A field with a distinguished real embedding in which signs are decidable.
pub trait OrderedField: Field {
    /// Sign of the element at the distinguished embedding.
    fn sign(&self, a: &Self::Elem) -> Ordering;

    /// A rational interval of width at most `2^-bits` containing the image
    /// of `a` under the distinguished embedding.
    fn enclose(&self, a: &Self::Elem, bits: u32) -> Interval;

    fn compare(&self, a: &Self::Elem, b: &Self::Elem) -> Ordering {
        self.sign(&self.sub(a, b))
    }
}

/// The rational numbers.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Rationals;

impl Field for Rationals {
    type Elem = Rational;

    fn zero(&self) -> Rational {
        Rational::zero()
    }
    fn one(&self) -> Rational {
        Rational::one()
    }
    fn from_rational(&self, q: &Rational) -> Rational {
        q.clone()
    }
    fn add(&self, a: &Rational, b: &Rational) -> Rational {
        a + b
    }
    fn sub(&self, a: &Rational, b: &Rational) -> Rational {
        a - b
    }
    fn mul(&self, a: &Rational, b: &Rational) -> Rational {
        a * b
    }
    fn neg(&self, a: &Rational) -> Rational {
        -a
    }
    fn inv(&self, a: &Rational) -> Option<Rational> {
        if a.is_zero() {
            None
        } else {
            Some(a.recip())
        }
    }
    fn is_zero(&self, a: &Rational) -> bool {
        a.is_zero()
    }
}

impl OrderedField for Rationals {
    fn sign(&self, a: &Rational) -> Ordering {
        if a.is_zero() {
            Ordering::Equal
        } else if a.is_positive() {
            Ordering::Greater
        } else {
            Ordering::Less
        }
    }

    fn enclose(&self, a: &Rational, _bits: u32) -> Interval {
        Interval::point(a.clone())
    }
}
