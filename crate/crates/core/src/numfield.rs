//! Totally real number fields `F = Q[x]/(f)` in the power basis, and the
//! relative quadratic extension `L = F(s)` with `s^2 = u s - 1`.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::field::{Field, OrderedField, Rationals};
use crate::interval::Interval;
use crate::matrix::{Matrix, MatrixOps};
use crate::poly::{self, Poly, RootCell};
use crate::rational::{self, Rational};

/// Element of a number field: `coeffs[i]` multiplies `theta^i`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct AlgebraicNumber {
    coeffs: Vec<Rational>,
}

impl AlgebraicNumber {
    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    /// The rational value if the element lies in `Q`.
    pub fn as_rational(&self) -> Option<&Rational> {
        if self.coeffs[1..].iter().all(Zero::is_zero) {
            Some(&self.coeffs[0])
        } else {
            None
        }
    }
}

/// Encloses `value(root)` with width at most `2^-bits`, refining the
/// working precision until it is met. Successive calls with larger `bits`
/// return nested intervals.
fn adaptive(bits: u32, mut eval: impl FnMut(u32) -> Interval) -> Interval {
    let mut work = bits + 8;
    loop {
        let v = eval(work);
        if v.width_at_most(bits + 2) {
            return v.round_out(bits + 4);
        }
        work += (work / 2).max(16);
    }
}

fn horner(coeffs: &[Rational], x: &Interval) -> Interval {
    coeffs
        .iter()
        .rev()
        .fold(Interval::zero(), |acc, c| acc.mul(x).add(&Interval::point(c.clone())))
}

fn sign_of_interval(iv: &Interval) -> Option<Ordering> {
    if iv.is_positive() {
        Some(Ordering::Greater)
    } else if iv.is_negative() {
        Some(Ordering::Less)
    } else if iv.is_point() {
        Some(Ordering::Equal)
    } else {
        None
    }
}

/// Decides the sign of a nonzero quantity by refining its enclosure.
fn sign_by_refinement(mut enclose: impl FnMut(u32) -> Interval) -> Ordering {
    let mut bits = 16;
    loop {
        if let Some(s) = sign_of_interval(&enclose(bits)) {
            return s;
        }
        bits *= 2;
    }
}

#[derive(Clone, Debug)]
pub struct NumberField {
    min_poly: Vec<BigInt>,
    poly: Poly<Rational>,
    degree: usize,
    /// `x^(d+k) mod f` for `k = 0..d-1`.
    reduction: Vec<Vec<Rational>>,
    /// Root cells in place order: identity first, then the rest ascending.
    cells: Vec<RootCell>,
    identity: usize,
    discriminant: BigInt,
}

impl NumberField {
    /// Builds `Q[x]/(f)` from the integer coefficients of `f` (low to high).
    /// `identity` indexes the real roots in ascending order.
    pub fn new(min_poly: Vec<BigInt>, identity: usize) -> Result<Self> {
        let mut min_poly = min_poly;
        while min_poly.last().is_some_and(Zero::is_zero) {
            min_poly.pop();
        }
        if min_poly.len() < 2 || !min_poly.last().unwrap().is_one() {
            return Err(Error::NotMonic(format!("{min_poly:?}")));
        }
        let degree = min_poly.len() - 1;
        let poly: Poly<Rational> = min_poly.iter().cloned().map(Rational::from_integer).collect();
        let k = Rationals;
        let g = poly::gcd(&k, &poly, &poly::derivative(&k, &poly));
        if poly::degree(&g) != Some(0) {
            return Err(Error::Reducible("repeated factor".into()));
        }
        let sorted = poly::isolate_real_roots(&k, &poly);
        if sorted.len() != degree {
            return Err(Error::NotTotallyReal {
                real: sorted.len(),
                degree,
            });
        }
        if identity >= degree {
            return Err(Error::PlaceOutOfRange {
                index: identity,
                count: degree,
            });
        }
        let mut cells = vec![sorted[identity].clone()];
        cells.extend(
            sorted
                .iter()
                .enumerate()
                .filter(|(i, _)| *i != identity)
                .map(|(_, c)| c.clone()),
        );
        for c in &mut cells {
            c.refine(&k, &poly, 64);
        }
        let mut reduction = Vec::with_capacity(degree);
        let mut power: Vec<Rational> = poly[..degree].iter().map(|c| -c).collect();
        for _ in 0..degree {
            reduction.push(power.clone());
            power = shift_reduce(&power, &reduction[0]);
        }
        let mut field = NumberField {
            min_poly,
            poly,
            degree,
            reduction,
            cells,
            identity,
            discriminant: BigInt::one(),
        };
        field.discriminant = field.compute_discriminant();
        field.check_irreducible()?;
        Ok(field)
    }

    pub fn rationals() -> Self {
        NumberField::new(vec![BigInt::zero(), BigInt::one()], 0).expect("x is irreducible")
    }

    pub fn from_i64(coeffs: &[i64], identity: usize) -> Result<Self> {
        NumberField::new(coeffs.iter().map(|&c| BigInt::from(c)).collect(), identity)
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn min_poly(&self) -> &[BigInt] {
        &self.min_poly
    }

    pub fn poly(&self) -> &Poly<Rational> {
        &self.poly
    }

    /// Index of the identity root among the real roots sorted ascending.
    pub fn identity_index(&self) -> usize {
        self.identity
    }

    pub fn place_count(&self) -> usize {
        self.degree
    }

    /// Discriminant of the minimal polynomial.
    pub fn discriminant(&self) -> &BigInt {
        &self.discriminant
    }

    /// Isolating cell of `theta` at a place (width at most `2^-64`).
    pub fn root_cell(&self, place: usize) -> &RootCell {
        &self.cells[place]
    }

    /// Reduces an arbitrary coefficient vector modulo `f`.
    pub fn element(&self, coeffs: Vec<Rational>) -> AlgebraicNumber {
        let mut c = coeffs;
        if c.len() > self.degree {
            c = poly::rem(&Rationals, &c, &self.poly);
        }
        c.resize(self.degree, Rational::zero());
        AlgebraicNumber { coeffs: c }
    }

    pub fn from_ints(&self, coeffs: &[i64]) -> AlgebraicNumber {
        self.element(coeffs.iter().map(|&c| rational::int(c)).collect())
    }

    pub fn theta(&self) -> AlgebraicNumber {
        self.element(vec![Rational::zero(), Rational::one()])
    }

    fn check_place(&self, place: usize) -> Result<()> {
        if place < self.degree {
            Ok(())
        } else {
            Err(Error::PlaceOutOfRange {
                index: place,
                count: self.degree,
            })
        }
    }

    /// Enclosure of `theta` at a place with width at most `2^-bits`.
    pub fn root_interval(&self, place: usize, bits: u32) -> Interval {
        let mut cell = self.cells[place].clone();
        cell.refine(&Rationals, &self.poly, bits);
        cell.interval()
    }

    /// Certified enclosure of `sigma_place(x)` of width at most `2^-bits`.
    pub fn embed(&self, x: &AlgebraicNumber, place: usize, bits: u32) -> Result<Interval> {
        self.check_place(place)?;
        Ok(self.embed_unchecked(x, place, bits))
    }

    fn embed_unchecked(&self, x: &AlgebraicNumber, place: usize, bits: u32) -> Interval {
        if let Some(q) = x.as_rational() {
            return Interval::point(q.clone());
        }
        adaptive(bits, |work| horner(&x.coeffs, &self.root_interval(place, work)))
    }

    /// Enclosure at working precision, without the final width guarantee.
    fn embed_raw(&self, x: &AlgebraicNumber, place: usize, work: u32) -> Interval {
        match x.as_rational() {
            Some(q) => Interval::point(q.clone()),
            None => horner(&x.coeffs, &self.root_interval(place, work)),
        }
    }

    pub fn sign_at(&self, x: &AlgebraicNumber, place: usize) -> Ordering {
        if self.is_zero(x) {
            return Ordering::Equal;
        }
        sign_by_refinement(|bits| self.embed_unchecked(x, place, bits))
    }

    /// Matrix of multiplication by `x` on the power basis (columns are
    /// images of basis vectors).
    pub fn mult_matrix(&self, x: &AlgebraicNumber) -> Matrix<Rational> {
        let d = self.degree;
        let mut cols = Vec::with_capacity(d);
        let mut b = self.one();
        let theta = self.theta();
        for _ in 0..d {
            cols.push(self.mul(x, &b).coeffs);
            b = self.mul(&b, &theta);
        }
        Matrix::from_fn(d, d, |i, j| cols[j][i].clone())
    }

    pub fn norm(&self, x: &AlgebraicNumber) -> Rational {
        Rationals.det(&self.mult_matrix(x))
    }

    pub fn trace(&self, x: &AlgebraicNumber) -> Rational {
        let m = self.mult_matrix(x);
        (0..self.degree).map(|i| m.get(i, i).clone()).sum()
    }

    /// Characteristic polynomial of `x` over `Q`.
    pub fn charpoly(&self, x: &AlgebraicNumber) -> Poly<Rational> {
        Rationals.charpoly(&self.mult_matrix(x))
    }

    /// True iff `x` is an algebraic integer.
    pub fn is_integral(&self, x: &AlgebraicNumber) -> bool {
        self.charpoly(x).iter().all(|c| c.is_integer())
    }

    /// True iff `x` is a unit of the ring of integers.
    pub fn is_unit(&self, x: &AlgebraicNumber) -> bool {
        self.is_integral(x) && self.norm(x).abs().is_one()
    }

    fn compute_discriminant(&self) -> BigInt {
        let d = self.degree;
        let fprime = poly::derivative(&Rationals, &self.poly);
        let n = self.norm(&self.element(fprime));
        let sign = if (d * (d - 1) / 2).is_multiple_of(2) { 1 } else { -1 };
        (n * rational::int(sign)).to_integer()
    }

    /// All real roots, so every factor over `Q` is a product of linear
    /// factors over a subset of them; by Gauss' lemma it has integer
    /// coefficients, which interval products can rule out.
    fn check_irreducible(&self) -> Result<()> {
        let d = self.degree;
        for size in 1..=d / 2 {
            for subset in subsets(d, size) {
                if let Some(factor) = self.integer_factor_for(&subset) {
                    return Err(Error::Reducible(format!(
                        "factor {}",
                        factor.iter().map(rational::format).collect::<Vec<_>>().join(", ")
                    )));
                }
            }
        }
        Ok(())
    }

    fn integer_factor_for(&self, subset: &[usize]) -> Option<Poly<Rational>> {
        let mut work = 16;
        loop {
            let mut prod = vec![Interval::point(Rational::one())];
            for &i in subset {
                let r = self.root_interval(i, work);
                let mut next = vec![Interval::zero(); prod.len() + 1];
                for (j, c) in prod.iter().enumerate() {
                    next[j + 1] = next[j + 1].add(c);
                    next[j] = next[j].sub(&c.mul(&r));
                }
                prod = next;
            }
            let half = rational::frac(1, 2);
            let mut candidate = Vec::with_capacity(prod.len());
            let mut settled = true;
            for c in &prod {
                let lo = c.lo().ceil();
                if lo > *c.hi() {
                    return None;
                }
                if c.width() >= half {
                    settled = false;
                }
                candidate.push(lo);
            }
            if settled {
                let r = poly::rem(&Rationals, &self.poly, &candidate);
                return r.is_empty().then_some(candidate);
            }
            work += 16;
        }
    }

    /// Square root in `F`, if one exists.
    ///
    /// Any root `w` of an integral `x` is integral, and `disc(f) * w` has
    /// integer power-basis coordinates. Those coordinates are recovered from
    /// certified embeddings through the trace form for each sign pattern
    /// and confirmed by squaring exactly.
    pub fn sqrt(&self, x: &AlgebraicNumber) -> Option<AlgebraicNumber> {
        if self.is_zero(x) {
            return Some(x.clone());
        }
        if (0..self.degree).any(|p| self.sign_at(x, p) == Ordering::Less) {
            return None;
        }
        let k = Rational::from_integer(rational::common_denominator(&x.coeffs));
        let scaled = self.mul(x, &self.from_rational(&(&k * &k)));
        let delta = Rational::from_integer(self.discriminant.abs());
        let d = self.degree;
        let theta = self.theta();
        let powers: Vec<AlgebraicNumber> = (0..2 * d - 1).map(|e| self.pow(&theta, e as u64)).collect();
        let trace_form = Matrix::from_fn(d, d, |i, j| self.trace(&powers[i + j]));
        let t_inv = Rationals.inverse(&trace_form).expect("separable polynomial");
        let half = rational::frac(1, 2);
        for pattern in 0..(1u64 << (d - 1)) {
            let mut work = 32;
            'refine: loop {
                let roots: Vec<Interval> = (0..d).map(|p| self.root_interval(p, work)).collect();
                let values: Vec<Interval> = (0..d)
                    .map(|p| {
                        let r = self
                            .embed_raw(&scaled, p, work)
                            .sqrt(work)
                            .expect("nonnegative");
                        if p > 0 && (pattern >> (p - 1)) & 1 == 1 {
                            r.neg()
                        } else {
                            r
                        }
                    })
                    .collect();
                // t_j = Tr(w theta^j) = sum_p sigma_p(w) r_p^j
                let traces: Vec<Interval> = (0..d)
                    .map(|j| {
                        (0..d).fold(Interval::zero(), |acc, p| {
                            let mut rp = Interval::point(Rational::one());
                            for _ in 0..j {
                                rp = rp.mul(&roots[p]);
                            }
                            acc.add(&values[p].mul(&rp))
                        })
                    })
                    .collect();
                let mut candidate = Vec::with_capacity(d);
                let mut settled = true;
                for i in 0..d {
                    let c = (0..d).fold(Interval::zero(), |acc, j| {
                        acc.add(&traces[j].scale(t_inv.get(i, j)))
                    });
                    let c = c.scale(&delta);
                    let lo = c.lo().ceil();
                    if lo > *c.hi() {
                        break 'refine;
                    }
                    if c.width() >= half {
                        settled = false;
                    }
                    candidate.push(lo / &delta);
                }
                if settled {
                    let w = self.element(candidate);
                    if self.mul(&w, &w) == scaled {
                        let kinv = self.from_rational(&k.recip());
                        return Some(self.mul(&w, &kinv));
                    }
                    break;
                }
                work += 32;
            }
        }
        None
    }

    pub fn is_square(&self, x: &AlgebraicNumber) -> bool {
        self.sqrt(x).is_some()
    }
}

fn shift_reduce(v: &[Rational], x_d: &[Rational]) -> Vec<Rational> {
    // v * x, with x^d replaced by x_d
    let d = v.len();
    let mut out = vec![Rational::zero(); d];
    for i in 0..d - 1 {
        out[i + 1] = v[i].clone();
    }
    let top = &v[d - 1];
    if !top.is_zero() {
        for i in 0..d {
            out[i] += top * &x_d[i];
        }
    }
    out
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            go(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, k, &mut Vec::new(), &mut out);
    out
}

impl Field for NumberField {
    type Elem = AlgebraicNumber;

    fn zero(&self) -> AlgebraicNumber {
        AlgebraicNumber {
            coeffs: vec![Rational::zero(); self.degree],
        }
    }

    fn one(&self) -> AlgebraicNumber {
        self.from_rational(&Rational::one())
    }

    fn from_rational(&self, q: &Rational) -> AlgebraicNumber {
        let mut c = vec![Rational::zero(); self.degree];
        c[0] = q.clone();
        AlgebraicNumber { coeffs: c }
    }

    fn add(&self, a: &AlgebraicNumber, b: &AlgebraicNumber) -> AlgebraicNumber {
        AlgebraicNumber {
            coeffs: a.coeffs.iter().zip(&b.coeffs).map(|(x, y)| x + y).collect(),
        }
    }

    fn sub(&self, a: &AlgebraicNumber, b: &AlgebraicNumber) -> AlgebraicNumber {
        AlgebraicNumber {
            coeffs: a.coeffs.iter().zip(&b.coeffs).map(|(x, y)| x - y).collect(),
        }
    }

    fn mul(&self, a: &AlgebraicNumber, b: &AlgebraicNumber) -> AlgebraicNumber {
        let d = self.degree;
        if d == 1 {
            return AlgebraicNumber {
                coeffs: vec![&a.coeffs[0] * &b.coeffs[0]],
            };
        }
        let mut full = vec![Rational::zero(); 2 * d - 1];
        for (i, x) in a.coeffs.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.coeffs.iter().enumerate() {
                if !y.is_zero() {
                    full[i + j] += x * y;
                }
            }
        }
        let mut out: Vec<Rational> = full[..d].to_vec();
        for (k, c) in full[d..].iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            for (o, r) in out.iter_mut().zip(&self.reduction[k]) {
                *o += c * r;
            }
        }
        AlgebraicNumber { coeffs: out }
    }

    fn neg(&self, a: &AlgebraicNumber) -> AlgebraicNumber {
        AlgebraicNumber {
            coeffs: a.coeffs.iter().map(|x| -x).collect(),
        }
    }

    fn inv(&self, a: &AlgebraicNumber) -> Option<AlgebraicNumber> {
        if self.is_zero(a) {
            return None;
        }
        if let Some(q) = a.as_rational() {
            return Some(self.from_rational(&q.recip()));
        }
        let k = Rationals;
        let ap = poly::trimmed(&k, a.coeffs.clone());
        let (g, s, _) = poly::ext_gcd(&k, &ap, &self.poly);
        debug_assert_eq!(g, vec![Rational::one()]);
        Some(self.element(s))
    }

    fn is_zero(&self, a: &AlgebraicNumber) -> bool {
        a.coeffs.iter().all(Zero::is_zero)
    }
}

impl OrderedField for NumberField {
    fn sign(&self, a: &AlgebraicNumber) -> Ordering {
        self.sign_at(a, 0)
    }

    fn enclose(&self, a: &AlgebraicNumber, bits: u32) -> Interval {
        self.embed_unchecked(a, 0, bits)
    }
}

/// Element `a + b s` of `L = F(s)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ExtElement {
    pub a: AlgebraicNumber,
    pub b: AlgebraicNumber,
}

/// A place of `L`, described by the place of `F` below it.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LPlace {
    /// Real place sending `s` to `(u + sign * sqrt(u^2 - 4)) / 2`.
    Real { base: usize, sign: i8 },
    /// One of a complex-conjugate pair; `s` goes to the root with positive
    /// imaginary part.
    Complex { base: usize },
}

#[derive(Clone, Debug)]
pub struct QuadExtension {
    base: NumberField,
    u: AlgebraicNumber,
    disc: AlgebraicNumber,
    /// Which root of `x^2 - u x + 1` is `s` at the identity place.
    s_sign: i8,
    places: Vec<LPlace>,
}

impl QuadExtension {
    /// `L = F(s)` with `s^2 = u s - 1`. Requires `u^2 - 4` positive at the
    /// identity place and not a square in `F`.
    pub fn new(base: NumberField, u: AlgebraicNumber) -> Result<Self> {
        let four = base.from_int(4);
        let disc = base.sub(&base.mul(&u, &u), &four);
        if base.is_zero(&disc) {
            return Err(Error::SquareDiscriminant);
        }
        if base.sign_at(&disc, 0) != Ordering::Greater {
            return Err(Error::NegativeDiscriminant);
        }
        if base.is_square(&disc) {
            return Err(Error::SquareDiscriminant);
        }
        // s is the root of larger absolute value at the identity place
        let s_sign = if base.sign_at(&u, 0) == Ordering::Greater { 1 } else { -1 };
        let mut places = vec![
            LPlace::Real { base: 0, sign: s_sign },
            LPlace::Real { base: 0, sign: -s_sign },
        ];
        for p in 1..base.degree() {
            if base.sign_at(&disc, p) == Ordering::Greater {
                places.push(LPlace::Real { base: p, sign: 1 });
                places.push(LPlace::Real { base: p, sign: -1 });
            } else {
                places.push(LPlace::Complex { base: p });
            }
        }
        Ok(QuadExtension {
            base,
            u,
            disc,
            s_sign,
            places,
        })
    }

    pub fn base(&self) -> &NumberField {
        &self.base
    }

    pub fn u(&self) -> &AlgebraicNumber {
        &self.u
    }

    pub fn disc(&self) -> &AlgebraicNumber {
        &self.disc
    }

    pub fn places(&self) -> &[LPlace] {
        &self.places
    }

    pub fn real_place_count(&self) -> usize {
        self.places
            .iter()
            .filter(|p| matches!(p, LPlace::Real { .. }))
            .count()
    }

    pub fn complex_place_count(&self) -> usize {
        self.places.len() - self.real_place_count()
    }

    pub fn s(&self) -> ExtElement {
        ExtElement {
            a: self.base.zero(),
            b: self.base.one(),
        }
    }

    pub fn from_base(&self, a: &AlgebraicNumber) -> ExtElement {
        ExtElement {
            a: a.clone(),
            b: self.base.zero(),
        }
    }

    pub fn make(&self, a: AlgebraicNumber, b: AlgebraicNumber) -> ExtElement {
        ExtElement { a, b }
    }

    /// True iff the element lies in `F` (zero `s`-component).
    pub fn in_base(&self, x: &ExtElement) -> bool {
        self.base.is_zero(&x.b)
    }

    /// The Galois involution: `tau(a + b s) = (a + b u) - b s`.
    pub fn tau(&self, x: &ExtElement) -> ExtElement {
        let k = &self.base;
        ExtElement {
            a: k.add(&x.a, &k.mul(&x.b, &self.u)),
            b: k.neg(&x.b),
        }
    }

    /// `x tau(x) = a^2 + a b u + b^2`.
    pub fn norm(&self, x: &ExtElement) -> AlgebraicNumber {
        let k = &self.base;
        let ab = k.mul(&x.a, &x.b);
        k.add(
            &k.add(&k.mul(&x.a, &x.a), &k.mul(&ab, &self.u)),
            &k.mul(&x.b, &x.b),
        )
    }

    pub fn is_unitary(&self, x: &ExtElement) -> Result<bool> {
        if self.is_zero(x) {
            return Err(Error::ZeroElement);
        }
        Ok(self.base.is_one(&self.norm(x)))
    }

    fn s_enclosure(&self, base_place: usize, sign: i8, work: u32) -> Interval {
        let u = self.base.embed_raw(&self.u, base_place, work);
        let root = self
            .base
            .embed_raw(&self.disc, base_place, work)
            .sqrt(work)
            .expect("positive discriminant at real place");
        let r = if sign > 0 { u.add(&root) } else { u.sub(&root) };
        r.scale(&rational::frac(1, 2))
    }

    fn check_place(&self, place: usize) -> Result<LPlace> {
        self.places
            .get(place)
            .copied()
            .ok_or(Error::PlaceOutOfRange {
                index: place,
                count: self.places.len(),
            })
    }

    /// Certified enclosure of `x` at a real place of `L`.
    pub fn embed(&self, x: &ExtElement, place: usize, bits: u32) -> Result<Interval> {
        match self.check_place(place)? {
            LPlace::Real { base, sign } => Ok(self.embed_real(x, base, sign, bits)),
            LPlace::Complex { .. } => Err(Error::NonRealPlace(place)),
        }
    }

    fn embed_real(&self, x: &ExtElement, base: usize, sign: i8, bits: u32) -> Interval {
        if self.base.is_zero(&x.b) {
            return self.base.embed_unchecked(&x.a, base, bits);
        }
        adaptive(bits, |work| {
            let a = self.base.embed_raw(&x.a, base, work);
            let b = self.base.embed_raw(&x.b, base, work);
            a.add(&b.mul(&self.s_enclosure(base, sign, work)))
        })
    }

    fn complex_parts_raw(&self, x: &ExtElement, base: usize, work: u32) -> (Interval, Interval) {
        let k = &self.base;
        let half = rational::frac(1, 2);
        let a = k.embed_raw(&x.a, base, work);
        let b = k.embed_raw(&x.b, base, work);
        let u = k.embed_raw(&self.u, base, work);
        let im_s = k
            .embed_raw(&self.disc, base, work)
            .neg()
            .sqrt(work)
            .expect("negative discriminant at complex place")
            .scale(&half);
        let re = a.add(&b.mul(&u).scale(&half));
        let im = b.mul(&im_s);
        (re, im)
    }

    /// Real and imaginary parts of `x` at a complex place, each enclosed to
    /// width at most `2^-bits`.
    pub fn complex_embed(&self, x: &ExtElement, place: usize, bits: u32) -> Result<(Interval, Interval)> {
        match self.check_place(place)? {
            LPlace::Complex { base } => Ok((
                adaptive(bits, |w| self.complex_parts_raw(x, base, w).0),
                adaptive(bits, |w| self.complex_parts_raw(x, base, w).1),
            )),
            LPlace::Real { .. } => Err(Error::PlaceOutOfRange {
                index: place,
                count: self.places.len(),
            }),
        }
    }

    /// `|x|` at any place, from the embedded coordinates.
    pub fn modulus(&self, x: &ExtElement, place: usize, bits: u32) -> Result<Interval> {
        match self.check_place(place)? {
            LPlace::Real { base, sign } => Ok(self.embed_real(x, base, sign, bits).abs()),
            LPlace::Complex { base } => Ok(adaptive(bits, |w| {
                let (re, im) = self.complex_parts_raw(x, base, w);
                re.square().add(&im.square()).sqrt(w).expect("nonnegative")
            })),
        }
    }

    /// Matrix of multiplication by `x` on `L` as a `2d`-dimensional
    /// `Q`-space with basis `theta^i, theta^i s`.
    pub fn absolute_mult_matrix(&self, x: &ExtElement) -> Matrix<Rational> {
        let d = self.base.degree();
        let mut cols = Vec::with_capacity(2 * d);
        let theta = self.base.theta();
        let mut t = self.base.one();
        let mut basis = Vec::with_capacity(2 * d);
        for _ in 0..d {
            basis.push(self.from_base(&t));
            t = self.base.mul(&t, &theta);
        }
        let extra: Vec<ExtElement> = basis.iter().map(|e| self.mul(e, &self.s())).collect();
        basis.extend(extra);
        for e in &basis {
            let y = self.mul(x, e);
            let mut col = y.a.coeffs.clone();
            col.extend(y.b.coeffs.iter().cloned());
            cols.push(col);
        }
        Matrix::from_fn(2 * d, 2 * d, |i, j| cols[j][i].clone())
    }

    /// Characteristic polynomial of `x` over `Q` (degree `2d`).
    pub fn absolute_charpoly(&self, x: &ExtElement) -> Poly<Rational> {
        Rationals.charpoly(&self.absolute_mult_matrix(x))
    }

    pub fn s_sign(&self) -> i8 {
        self.s_sign
    }
}

impl Field for QuadExtension {
    type Elem = ExtElement;

    fn zero(&self) -> ExtElement {
        self.from_base(&self.base.zero())
    }

    fn one(&self) -> ExtElement {
        self.from_base(&self.base.one())
    }

    fn from_rational(&self, q: &Rational) -> ExtElement {
        self.from_base(&self.base.from_rational(q))
    }

    fn add(&self, x: &ExtElement, y: &ExtElement) -> ExtElement {
        ExtElement {
            a: self.base.add(&x.a, &y.a),
            b: self.base.add(&x.b, &y.b),
        }
    }

    fn sub(&self, x: &ExtElement, y: &ExtElement) -> ExtElement {
        ExtElement {
            a: self.base.sub(&x.a, &y.a),
            b: self.base.sub(&x.b, &y.b),
        }
    }

    fn mul(&self, x: &ExtElement, y: &ExtElement) -> ExtElement {
        // (a + b s)(c + d s) = (ac - bd) + (ad + bc + bd u) s
        let k = &self.base;
        if k.is_zero(&x.b) && k.is_zero(&y.b) {
            return self.from_base(&k.mul(&x.a, &y.a));
        }
        let bd = k.mul(&x.b, &y.b);
        ExtElement {
            a: k.sub(&k.mul(&x.a, &y.a), &bd),
            b: k.add(
                &k.add(&k.mul(&x.a, &y.b), &k.mul(&x.b, &y.a)),
                &k.mul(&bd, &self.u),
            ),
        }
    }

    fn neg(&self, x: &ExtElement) -> ExtElement {
        ExtElement {
            a: self.base.neg(&x.a),
            b: self.base.neg(&x.b),
        }
    }

    fn inv(&self, x: &ExtElement) -> Option<ExtElement> {
        if self.is_zero(x) {
            return None;
        }
        let n_inv = self.base.inv(&self.norm(x))?;
        let t = self.tau(x);
        Some(ExtElement {
            a: self.base.mul(&t.a, &n_inv),
            b: self.base.mul(&t.b, &n_inv),
        })
    }

    fn is_zero(&self, x: &ExtElement) -> bool {
        self.base.is_zero(&x.a) && self.base.is_zero(&x.b)
    }
}

impl OrderedField for QuadExtension {
    fn sign(&self, x: &ExtElement) -> Ordering {
        if self.is_zero(x) {
            return Ordering::Equal;
        }
        sign_by_refinement(|bits| self.embed_real(x, 0, self.s_sign, bits))
    }

    fn enclose(&self, x: &ExtElement, bits: u32) -> Interval {
        self.embed_real(x, 0, self.s_sign, bits)
    }
}

/// Binary operation selector for [`field_arith`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Div,
}

pub fn field_arith<K: Field>(k: &K, x: &K::Elem, y: &K::Elem, op: ArithOp) -> Result<K::Elem> {
    match op {
        ArithOp::Add => Ok(k.add(x, y)),
        ArithOp::Sub => Ok(k.sub(x, y)),
        ArithOp::Mul => Ok(k.mul(x, y)),
        ArithOp::Div => k.div(x, y).ok_or(Error::DivisionByZero),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{frac, int};

    fn q_sqrt2() -> NumberField {
        NumberField::from_i64(&[-2, 0, 1], 1).unwrap()
    }

    fn golden_ext() -> QuadExtension {
        let q = NumberField::rationals();
        let u = q.from_int(3);
        QuadExtension::new(q, u).unwrap()
    }

    #[test]
    fn sqrt2_arithmetic() {
        let f = q_sqrt2();
        let x = f.from_ints(&[1, 1]);
        assert_eq!(f.mul(&x, &x), f.from_ints(&[3, 2]));
        assert_eq!(f.norm(&x), int(-1));
        assert!(f.is_unit(&x));
        let xi = f.inv(&x).unwrap();
        assert_eq!(xi, f.from_ints(&[-1, 1]));
        assert_eq!(f.discriminant(), &BigInt::from(8));
    }

    #[test]
    fn conjugate_embedding() {
        let f = q_sqrt2();
        let x = f.from_ints(&[1, 1]);
        let iv = f.embed(&x, 1, 30).unwrap();
        assert!(iv.width_at_most(30));
        let (a, b) = iv.to_f64_pair();
        let truth = 1.0 - 2f64.sqrt();
        assert!(a <= truth + 1e-15 && truth - 1e-15 <= b);
        assert_eq!(f.embed(&f.zero(), 1, 30).unwrap(), Interval::zero());
    }

    #[test]
    fn rejects_reducible_and_complex() {
        assert!(matches!(
            NumberField::from_i64(&[-1, 0, 1], 0),
            Err(Error::Reducible(_))
        ));
        assert!(matches!(
            NumberField::from_i64(&[2, 0, -3, 0, 1], 0),
            Err(Error::Reducible(_))
        ));
        assert!(matches!(
            NumberField::from_i64(&[1, 0, 1], 0),
            Err(Error::NotTotallyReal { .. })
        ));
        // x^3 - 3x + 1 is irreducible and totally real
        assert!(NumberField::from_i64(&[1, -3, 0, 1], 2).is_ok());
    }

    #[test]
    fn square_roots() {
        let f = q_sqrt2();
        let w = f.from_ints(&[3, 2]);
        let w2 = f.mul(&w, &w);
        let r = f.sqrt(&w2).unwrap();
        assert_eq!(f.mul(&r, &r), w2);
        assert!(f.sqrt(&f.from_ints(&[0, 1])).is_none());
        assert!(f.sqrt(&f.from_int(2)).is_some());
        assert!(f.sqrt(&f.from_int(3)).is_none());
        let half = f.element(vec![frac(9, 4)]);
        assert_eq!(f.sqrt(&half).map(|r| f.mul(&r, &r)), Some(half));
    }

    #[test]
    fn golden_extension() {
        let l = golden_ext();
        let s = l.s();
        assert_eq!(l.mul(&s, &l.sub(&l.from_int(3), &s)), l.one());
        assert_eq!(l.tau(&s), l.sub(&l.from_int(3), &s));
        assert!(l.is_unitary(&s).unwrap());
        let ms3 = l.neg(&l.pow(&s, 3));
        assert!(l.is_unitary(&ms3).unwrap());
        assert!(!l.is_unitary(&l.add(&l.one(), &s)).unwrap());
        assert_eq!(l.is_unitary(&l.zero()), Err(Error::ZeroElement));
        let iv = l.embed(&s, 0, 30).unwrap();
        let phi2 = (3.0 + 5f64.sqrt()) / 2.0;
        let (a, b) = iv.to_f64_pair();
        assert!(a <= phi2 && phi2 <= b);
        assert_eq!(l.sign(&l.sub(&s, &l.from_int(3))), Ordering::Less);
    }

    #[test]
    fn u_two_is_square() {
        let q = NumberField::rationals();
        let u = q.from_int(2);
        assert_eq!(QuadExtension::new(q, u).unwrap_err(), Error::SquareDiscriminant);
        let q = NumberField::rationals();
        let u = q.from_int(1);
        assert_eq!(QuadExtension::new(q, u).unwrap_err(), Error::NegativeDiscriminant);
    }

    #[test]
    fn tower_over_sqrt2() {
        let f = q_sqrt2();
        let u = f.from_ints(&[17, 12]);
        let l = QuadExtension::new(f, u).unwrap();
        assert_eq!(l.real_place_count(), 2);
        assert_eq!(l.complex_place_count(), 1);
        let m = l.modulus(&l.s(), 2, 40).unwrap();
        assert!(m.contains(&int(1)));
        assert!(m.width_at_most(40));
    }
}
