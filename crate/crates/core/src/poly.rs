//! Dense univariate polynomials over a [`Field`], coefficients low to high.
//!
//! Real root isolation works over any [`OrderedField`]: Sturm sequences are
//! computed exactly in the coefficient field and evaluated at rational
//! points, so only the final sign decisions consult an embedding.

use std::cmp::Ordering;

use num_traits::{One, Zero};

use crate::field::{Field, OrderedField};
use crate::interval::Interval;
use crate::rational::{self, Rational};

pub type Poly<E> = Vec<E>;

pub fn trim<K: Field>(k: &K, p: &mut Poly<K::Elem>) {
    while p.last().is_some_and(|c| k.is_zero(c)) {
        p.pop();
    }
}

pub fn trimmed<K: Field>(k: &K, mut p: Poly<K::Elem>) -> Poly<K::Elem> {
    trim(k, &mut p);
    p
}

/// Degree, with `None` for the zero polynomial.
pub fn degree<E>(p: &[E]) -> Option<usize> {
    p.len().checked_sub(1)
}

pub fn is_zero<E>(p: &[E]) -> bool {
    p.is_empty()
}

pub fn constant<K: Field>(k: &K, c: K::Elem) -> Poly<K::Elem> {
    trimmed(k, vec![c])
}

/// The monic polynomial `x`.
pub fn x<K: Field>(k: &K) -> Poly<K::Elem> {
    vec![k.zero(), k.one()]
}

pub fn from_rationals<K: Field>(k: &K, qs: &[Rational]) -> Poly<K::Elem> {
    trimmed(k, qs.iter().map(|q| k.from_rational(q)).collect())
}

pub fn add<K: Field>(k: &K, a: &[K::Elem], b: &[K::Elem]) -> Poly<K::Elem> {
    let n = a.len().max(b.len());
    let out = (0..n)
        .map(|i| match (a.get(i), b.get(i)) {
            (Some(x), Some(y)) => k.add(x, y),
            (Some(x), None) => x.clone(),
            (None, Some(y)) => y.clone(),
            (None, None) => unreachable!(),
        })
        .collect();
    trimmed(k, out)
}

pub fn neg<K: Field>(k: &K, a: &[K::Elem]) -> Poly<K::Elem> {
    a.iter().map(|c| k.neg(c)).collect()
}

pub fn sub<K: Field>(k: &K, a: &[K::Elem], b: &[K::Elem]) -> Poly<K::Elem> {
    add(k, a, &neg(k, b))
}

pub fn scale<K: Field>(k: &K, a: &[K::Elem], c: &K::Elem) -> Poly<K::Elem> {
    trimmed(k, a.iter().map(|x| k.mul(x, c)).collect())
}

pub fn mul<K: Field>(k: &K, a: &[K::Elem], b: &[K::Elem]) -> Poly<K::Elem> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![k.zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if k.is_zero(x) {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] = k.add(&out[i + j], &k.mul(x, y));
        }
    }
    trimmed(k, out)
}

/// Euclidean division; panics on a zero divisor.
pub fn divrem<K: Field>(
    k: &K,
    a: &[K::Elem],
    b: &[K::Elem],
) -> (Poly<K::Elem>, Poly<K::Elem>) {
    let db = degree(b).expect("division by the zero polynomial");
    let lead_inv = k.inv(&b[db]).expect("trimmed leading coefficient");
    let mut rem: Poly<K::Elem> = a.to_vec();
    trim(k, &mut rem);
    if rem.len() < b.len() {
        return (Vec::new(), rem);
    }
    let mut quot = vec![k.zero(); rem.len() - db];
    while let Some(dr) = degree(&rem) {
        if dr < db {
            break;
        }
        let c = k.mul(&rem[dr], &lead_inv);
        let shift = dr - db;
        for (i, bc) in b.iter().enumerate() {
            rem[shift + i] = k.sub(&rem[shift + i], &k.mul(&c, bc));
        }
        quot[shift] = c;
        // The leading term cancels exactly.
        rem.pop();
        trim(k, &mut rem);
    }
    (trimmed(k, quot), rem)
}

pub fn rem<K: Field>(k: &K, a: &[K::Elem], b: &[K::Elem]) -> Poly<K::Elem> {
    divrem(k, a, b).1
}

pub fn make_monic<K: Field>(k: &K, a: &[K::Elem]) -> Poly<K::Elem> {
    match a.last() {
        None => Vec::new(),
        Some(lc) => {
            let inv = k.inv(lc).expect("nonzero leading coefficient");
            scale(k, a, &inv)
        }
    }
}

/// Monic greatest common divisor (zero if both inputs are zero).
pub fn gcd<K: Field>(k: &K, a: &[K::Elem], b: &[K::Elem]) -> Poly<K::Elem> {
    let mut x = trimmed(k, a.to_vec());
    let mut y = trimmed(k, b.to_vec());
    while !y.is_empty() {
        let r = rem(k, &x, &y);
        x = y;
        y = r;
    }
    make_monic(k, &x)
}

/// Returns `(g, s, t)` with `s*a + t*b = g = gcd(a, b)` and `g` monic.
pub fn ext_gcd<K: Field>(
    k: &K,
    a: &[K::Elem],
    b: &[K::Elem],
) -> (Poly<K::Elem>, Poly<K::Elem>, Poly<K::Elem>) {
    let (mut r0, mut r1) = (trimmed(k, a.to_vec()), trimmed(k, b.to_vec()));
    let (mut s0, mut s1) = (constant(k, k.one()), Vec::new());
    let (mut t0, mut t1) = (Vec::new(), constant(k, k.one()));
    while !r1.is_empty() {
        let (q, r) = divrem(k, &r0, &r1);
        let s2 = sub(k, &s0, &mul(k, &q, &s1));
        let t2 = sub(k, &t0, &mul(k, &q, &t1));
        r0 = std::mem::replace(&mut r1, r);
        s0 = std::mem::replace(&mut s1, s2);
        t0 = std::mem::replace(&mut t1, t2);
    }
    match r0.last() {
        None => (r0, s0, t0),
        Some(lc) => {
            let inv = k.inv(lc).expect("nonzero");
            (scale(k, &r0, &inv), scale(k, &s0, &inv), scale(k, &t0, &inv))
        }
    }
}

pub fn derivative<K: Field>(k: &K, a: &[K::Elem]) -> Poly<K::Elem> {
    let out = a
        .iter()
        .enumerate()
        .skip(1)
        .map(|(i, c)| k.mul(c, &k.from_int(i as i64)))
        .collect();
    trimmed(k, out)
}

/// `a / gcd(a, a')`, made monic. Characteristic zero only.
pub fn squarefree_part<K: Field>(k: &K, a: &[K::Elem]) -> Poly<K::Elem> {
    let g = gcd(k, a, &derivative(k, a));
    make_monic(k, &divrem(k, a, &g).0)
}

pub fn eval<K: Field>(k: &K, a: &[K::Elem], x: &K::Elem) -> K::Elem {
    a.iter()
        .rev()
        .fold(k.zero(), |acc, c| k.add(&k.mul(&acc, x), c))
}

pub fn eval_rational<K: Field>(k: &K, a: &[K::Elem], x: &Rational) -> K::Elem {
    eval(k, a, &k.from_rational(x))
}

/// `a(x^2)`.
pub fn compose_square<K: Field>(k: &K, a: &[K::Elem]) -> Poly<K::Elem> {
    let mut out = vec![k.zero(); a.len().saturating_mul(2).saturating_sub(1)];
    for (i, c) in a.iter().enumerate() {
        out[2 * i] = c.clone();
    }
    trimmed(k, out)
}

/// `a(-x)`.
pub fn reflect<K: Field>(k: &K, a: &[K::Elem]) -> Poly<K::Elem> {
    a.iter()
        .enumerate()
        .map(|(i, c)| if i % 2 == 1 { k.neg(c) } else { c.clone() })
        .collect()
}

/// Power sums `p_1..p_m` of the roots of a monic polynomial of degree `m`
/// (Newton's identities).
pub fn power_sums<K: Field>(k: &K, monic: &[K::Elem], count: usize) -> Vec<K::Elem> {
    let m = degree(monic).unwrap_or(0);
    // e_j with the sign convention x^m + c_{m-1} x^{m-1} + ... : c_{m-j} = (-1)^j e_j
    let coeff = |j: usize| -> K::Elem {
        if j > m {
            k.zero()
        } else {
            monic[m - j].clone()
        }
    };
    let mut p: Vec<K::Elem> = Vec::with_capacity(count);
    for i in 1..=count {
        // p_i = -(i c_{m-i}) - sum_{j=1}^{i-1} c_{m-j} p_{i-j}
        let mut acc = k.neg(&k.mul(&k.from_int(i as i64), &coeff(i)));
        for j in 1..i {
            acc = k.sub(&acc, &k.mul(&coeff(j), &p[i - j - 1]));
        }
        p.push(acc);
    }
    p
}

/// Monic polynomial of degree `m` with prescribed power sums `p_1..p_m`.
pub fn from_power_sums<K: Field>(k: &K, p: &[K::Elem]) -> Poly<K::Elem> {
    let m = p.len();
    // c[j] = coefficient of x^{m-j}; c[0] = 1
    let mut c: Vec<K::Elem> = vec![k.one()];
    for i in 1..=m {
        let mut acc = p[i - 1].clone();
        for j in 1..i {
            acc = k.add(&acc, &k.mul(&c[j], &p[i - j - 1]));
        }
        let inv_i = k.inv(&k.from_int(i as i64)).expect("char 0");
        c.push(k.neg(&k.mul(&acc, &inv_i)));
    }
    c.reverse();
    c
}

/// Sign of `p(x)` at a rational point, decided in the ordered field.
pub fn sign_at<K: OrderedField>(k: &K, p: &[K::Elem], x: &Rational) -> Ordering {
    k.sign(&eval_rational(k, p, x))
}

fn sign_at_infinity<K: OrderedField>(k: &K, p: &[K::Elem], positive: bool) -> Ordering {
    match p.last() {
        None => Ordering::Equal,
        Some(lc) => {
            let s = k.sign(lc);
            if positive || (p.len() - 1) % 2 == 0 {
                s
            } else {
                s.reverse()
            }
        }
    }
}

/// Sturm sequence of a squarefree polynomial.
pub struct Sturm<'k, K: OrderedField> {
    field: &'k K,
    chain: Vec<Poly<K::Elem>>,
}

impl<'k, K: OrderedField> Sturm<'k, K> {
    pub fn new(field: &'k K, p: &[K::Elem]) -> Self {
        let k = field;
        let p0 = trimmed(k, p.to_vec());
        let p1 = derivative(k, &p0);
        let mut chain = vec![p0];
        if !p1.is_empty() {
            chain.push(p1);
        }
        while chain.len() >= 2 {
            let n = chain.len();
            let r = rem(k, &chain[n - 2], &chain[n - 1]);
            if r.is_empty() {
                break;
            }
            chain.push(neg(k, &r));
        }
        Sturm { field, chain }
    }

    pub fn poly(&self) -> &[K::Elem] {
        &self.chain[0]
    }

    fn variations(signs: impl Iterator<Item = Ordering>) -> usize {
        let mut last = Ordering::Equal;
        let mut count = 0;
        for s in signs {
            if s == Ordering::Equal {
                continue;
            }
            if last != Ordering::Equal && s != last {
                count += 1;
            }
            last = s;
        }
        count
    }

    pub fn variations_at(&self, x: &Rational) -> usize {
        Self::variations(self.chain.iter().map(|p| sign_at(self.field, p, x)))
    }

    pub fn variations_at_infinity(&self, positive: bool) -> usize {
        Self::variations(
            self.chain
                .iter()
                .map(|p| sign_at_infinity(self.field, p, positive)),
        )
    }

    /// Number of distinct real roots in the half-open interval `(a, b]`.
    pub fn count(&self, a: &Rational, b: &Rational) -> usize {
        self.variations_at(a).saturating_sub(self.variations_at(b))
    }

    /// Number of distinct real roots greater than `a`.
    pub fn count_above(&self, a: &Rational) -> usize {
        self.variations_at(a)
            .saturating_sub(self.variations_at_infinity(true))
    }

    pub fn count_all(&self) -> usize {
        self.variations_at_infinity(false)
            .saturating_sub(self.variations_at_infinity(true))
    }
}

/// A real root of a squarefree polynomial, isolated in a rational interval.
///
/// Either `lo == hi` (the root is that rational), or the root lies strictly
/// inside `(lo, hi)` and the polynomial has opposite nonzero signs at the
/// endpoints.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RootCell {
    pub lo: Rational,
    pub hi: Rational,
}

impl RootCell {
    pub fn is_exact(&self) -> bool {
        self.lo == self.hi
    }

    pub fn interval(&self) -> Interval {
        Interval::new(self.lo.clone(), self.hi.clone())
    }

    pub fn width(&self) -> Rational {
        &self.hi - &self.lo
    }

    /// One bisection step; `p` must be the polynomial that was isolated.
    pub fn bisect<K: OrderedField>(&mut self, k: &K, p: &[K::Elem]) {
        if self.is_exact() {
            return;
        }
        let mid = (&self.lo + &self.hi) / rational::int(2);
        let s_mid = sign_at(k, p, &mid);
        if s_mid == Ordering::Equal {
            self.lo = mid.clone();
            self.hi = mid;
            return;
        }
        let s_lo = sign_at(k, p, &self.lo);
        if s_mid == s_lo {
            self.lo = mid;
        } else {
            self.hi = mid;
        }
    }

    /// Bisects until the width is at most `2^-bits`.
    pub fn refine<K: OrderedField>(&mut self, k: &K, p: &[K::Elem], bits: u32) {
        let target = rational::two_pow(-(bits as i64));
        if self.is_exact() || self.width() <= target {
            return;
        }
        let s_lo = sign_at(k, p, &self.lo);
        while self.width() > target {
            let mid = (&self.lo + &self.hi) / rational::int(2);
            match sign_at(k, p, &mid) {
                Ordering::Equal => {
                    self.lo = mid.clone();
                    self.hi = mid;
                    return;
                }
                s if s == s_lo => self.lo = mid,
                _ => self.hi = mid,
            }
        }
    }
}

/// Upper bound on the absolute value of every real root (Cauchy bound).
pub fn root_bound<K: OrderedField>(k: &K, p: &[K::Elem]) -> Rational {
    let n = degree(p).unwrap_or(0);
    if n == 0 {
        return Rational::one();
    }
    let lc = &p[n];
    let mut m = Rational::zero();
    for c in &p[..n] {
        if k.is_zero(c) {
            continue;
        }
        let ratio = k.div(c, lc).expect("lc nonzero");
        let bound = k.enclose(&ratio, 4).abs();
        if bound.hi() > &m {
            m = bound.hi().clone();
        }
    }
    // Round up to an integer to keep the bisection grid dyadic.
    Rational::from_integer((m + Rational::one()).ceil().to_integer() + 1)
}

/// Isolates all real roots of a squarefree polynomial, ascending.
pub fn isolate_real_roots<K: OrderedField>(k: &K, p: &[K::Elem]) -> Vec<RootCell> {
    let p = trimmed(k, p.to_vec());
    if degree(&p).unwrap_or(0) == 0 {
        return Vec::new();
    }
    let sturm = Sturm::new(k, &p);
    let bound = root_bound(k, &p);
    let mut out = Vec::new();
    let mut stack = vec![(-bound.clone(), bound)];
    while let Some((a, b)) = stack.pop() {
        let c = sturm.count(&a, &b);
        if c == 0 {
            continue;
        }
        if c == 1 {
            out.push(finalize_cell(k, &sturm, a, b));
            continue;
        }
        let mid = (&a + &b) / rational::int(2);
        stack.push((mid.clone(), b));
        stack.push((a, mid));
    }
    out.sort_by(|x, y| x.lo.cmp(&y.lo));
    out
}

/// Turns a half-open interval `(a, b]` holding exactly one root into a
/// [`RootCell`] with a strict sign change (or an exact root).
fn finalize_cell<K: OrderedField>(k: &K, sturm: &Sturm<'_, K>, a: Rational, b: Rational) -> RootCell {
    let p = sturm.poly();
    let mut a = a;
    let mut b = b;
    loop {
        if sign_at(k, p, &b) == Ordering::Equal {
            return RootCell { lo: b.clone(), hi: b };
        }
        if sign_at(k, p, &a) != Ordering::Equal {
            return RootCell { lo: a, hi: b };
        }
        // `a` is a neighbouring root; move it inward.
        let mid = (&a + &b) / rational::int(2);
        if sturm.count(&a, &mid) == 1 {
            b = mid;
        } else {
            a = mid;
        }
    }
}

/// Number of real roots counted with multiplicity.
pub fn real_root_count_with_multiplicity<K: OrderedField>(k: &K, p: &[K::Elem]) -> usize {
    let mut cur = trimmed(k, p.to_vec());
    let mut total = 0;
    while degree(&cur).unwrap_or(0) > 0 {
        let g = gcd(k, &cur, &derivative(k, &cur));
        let distinct = divrem(k, &cur, &g).0;
        total += Sturm::new(k, &distinct).count_all();
        cur = g;
    }
    total
}

/// Midpoints of root cells as `f64`s, for display only.
pub fn approx_roots(cells: &[RootCell]) -> Vec<f64> {
    cells
        .iter()
        .map(|c| rational::to_f64(&((&c.lo + &c.hi) / rational::int(2))))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Rationals;
    use crate::rational::{frac, int};

    fn qp(cs: &[i64]) -> Poly<Rational> {
        trimmed(&Rationals, cs.iter().map(|&c| int(c)).collect())
    }

    #[test]
    fn division_and_gcd() {
        let k = Rationals;
        let a = qp(&[-1, 0, 1]); // x^2 - 1
        let b = qp(&[1, 1]); // x + 1
        let (q, r) = divrem(&k, &a, &b);
        assert_eq!(q, qp(&[-1, 1]));
        assert!(r.is_empty());
        assert_eq!(gcd(&k, &a, &qp(&[-1, 1])), qp(&[-1, 1]));
        let (g, s, t) = ext_gcd(&k, &qp(&[-2, 0, 1]), &qp(&[1, 1]));
        assert_eq!(g, qp(&[1]));
        let lhs = add(&k, &mul(&k, &s, &qp(&[-2, 0, 1])), &mul(&k, &t, &qp(&[1, 1])));
        assert_eq!(lhs, qp(&[1]));
    }

    #[test]
    fn isolates_roots_of_x3_minus_x() {
        let k = Rationals;
        let p = qp(&[0, -1, 0, 1]);
        let roots = isolate_real_roots(&k, &p);
        assert_eq!(roots.len(), 3);
        assert!(roots.iter().any(|c| c.is_exact() && c.lo == int(0)));
    }

    #[test]
    fn refines_sqrt2() {
        let k = Rationals;
        let p = qp(&[-2, 0, 1]);
        let mut roots = isolate_real_roots(&k, &p);
        assert_eq!(roots.len(), 2);
        roots[1].refine(&k, &p, 40);
        let v = rational::to_f64(&roots[1].lo);
        assert!((v - 2f64.sqrt()).abs() < 1e-11);
    }

    #[test]
    fn newton_identities_round_trip() {
        let k = Rationals;
        // (x-1)(x-2)(x+3) = x^3 - 7x + 6
        let p = qp(&[6, -7, 0, 1]);
        let ps = power_sums(&k, &p, 3);
        assert_eq!(ps, vec![int(0), int(14), int(-18)]);
        assert_eq!(from_power_sums(&k, &ps), p);
        let half = vec![frac(1, 2), int(1)];
        assert_eq!(squarefree_part(&k, &mul(&k, &half, &half)), half);
    }

    #[test]
    fn sturm_counts() {
        let k = Rationals;
        let p = qp(&[-2, 0, 1]);
        let s = Sturm::new(&k, &p);
        assert_eq!(s.count_all(), 2);
        assert_eq!(s.count_above(&int(0)), 1);
        assert_eq!(s.count(&int(-2), &int(0)), 1);
    }
}
