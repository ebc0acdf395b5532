//! Computable thinness evidence: proximality, Burnside irreducibility,
//! invariant bilinear forms, and congruence images over small prime fields.

use std::collections::HashSet;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;
use serde_json::{json, Value};

use crate::bending::{self, BendingInstance, Rep, Word};
use crate::certificate::{Certificate, Verdict};
use crate::error::{Error, Result};
use crate::field::{Field, OrderedField, Rationals};
use crate::forms::FieldMatrix;
use crate::io;
use crate::matrix::{Matrix, MatrixOps};
use crate::numfield::{ExtElement, QuadExtension};
use crate::par::Exec;
use crate::poly::{self, Poly, RootCell, Sturm};
use crate::rational::{self, Rational};

pub const DEFAULT_BFS_BUDGET: usize = 10_000_000;
/// Largest residue field the congruence enumeration accepts.
pub const MAX_RESIDUE_FIELD: u64 = 9;
pub const MAX_CONGRUENCE_SIZE: usize = 4;

fn poly_json(p: &[Rational]) -> Value {
    Value::Array(p.iter().map(|c| Value::String(rational::format(c))).collect())
}

fn cell_json(c: &RootCell) -> Value {
    json!([rational::format(&c.lo), rational::format(&c.hi)])
}

/// Rational polynomial of `a` when every coefficient is rational.
fn rational_poly(ext: &QuadExtension, p: &[ExtElement]) -> Option<Poly<Rational>> {
    p.iter()
        .map(|c| {
            if ext.in_base(c) {
                c.a.as_rational().cloned()
            } else {
                None
            }
        })
        .collect()
}

fn has_root_in<K: OrderedField>(k: &K, p: &[K::Elem], g_s: &[K::Elem], cell: &RootCell) -> bool {
    // `cell` isolates a root of the squarefree g_s; the root is shared with
    // p iff gcd(g_s, p) vanishes inside the cell.
    if cell.is_exact() {
        return k.is_zero(&poly::eval_rational(k, p, &cell.lo));
    }
    let q = poly::gcd(k, g_s, p);
    if poly::degree(&q).unwrap_or(0) == 0 {
        return false;
    }
    Sturm::new(k, &q).count(&cell.lo, &cell.hi) > 0
}

fn abs_bounds(c: &RootCell) -> (Rational, Rational) {
    if c.lo.is_negative() && c.hi.is_positive() {
        (Rational::zero(), c.lo.abs().max(c.hi.abs()))
    } else {
        let (a, b) = (c.lo.abs(), c.hi.abs());
        if a <= b {
            (a, b)
        } else {
            (b, a)
        }
    }
}

/// Outcome of the separation analysis on a rational polynomial.
#[derive(Clone, Debug)]
enum Separation {
    Proximal { cell: RootCell, second_bound: Rational },
    Tie(&'static str),
    Undecided(u32),
}

/// Decides whether `g` has a simple real root strictly dominating every
/// other root in modulus. Ties are proved exactly; separation is refined
/// up to `budget` bits.
fn dominant_root<K: OrderedField>(k: &K, g: &[K::Elem], budget: u32) -> Separation {
    let g_s = poly::make_monic(k, &poly::squarefree_part(k, g));
    let mut cells = poly::isolate_real_roots(k, &g_s);
    if cells.is_empty() {
        return Separation::Tie("no_real_eigenvalue");
    }
    // The top real root is the most negative or the most positive one.
    let last = cells.len() - 1;
    let (mut neg, mut pos) = (cells[0].clone(), cells.swap_remove(last));
    let two_sided = last > 0;
    if two_sided {
        let h = poly::gcd(k, &g_s, &poly::reflect(k, &g_s));
        if has_root_in(k, &h, &g_s, &pos) && has_root_in(k, &h, &g_s, &neg) {
            return Separation::Tie("opposite_real_eigenvalue");
        }
    }
    let mut bits = 8;
    let (mut top, other_abs_hi) = loop {
        if !two_sided {
            break (pos.clone(), Rational::zero());
        }
        pos.refine(k, &g_s, bits);
        neg.refine(k, &g_s, bits);
        let (nlo, nhi) = abs_bounds(&neg);
        let (plo, phi) = abs_bounds(&pos);
        if plo > nhi {
            break (pos.clone(), nhi);
        }
        if nlo > phi {
            break (neg.clone(), phi);
        }
        bits *= 2;
    };
    // Remaining real roots are bounded by the two extreme ones; record the
    // largest modulus among them for the evidence.
    let mut second = other_abs_hi;
    for c in &cells[1.min(cells.len())..] {
        second = second.max(abs_bounds(c).1);
    }
    let d = poly::squarefree_part(k, &poly::gcd(k, g, &poly::derivative(k, g)));
    if poly::degree(&d).unwrap_or(0) > 0 && has_root_in(k, &d, &g_s, &top) {
        return Separation::Tie("repeated_top_eigenvalue");
    }
    // E(y) = prod_{i<j} (y - l_i l_j): its real roots at or above r^2 are
    // exactly the moduli ties or excesses from complex roots.
    let m = poly::degree(&g_s).unwrap_or(0);
    let pairs = m * (m.saturating_sub(1)) / 2;
    if pairs == 0 {
        return Separation::Proximal {
            cell: top,
            second_bound: second,
        };
    }
    let p = poly::power_sums(k, &g_s, 2 * pairs);
    let half = k.from_rational(&rational::frac(1, 2));
    let q: Vec<K::Elem> = (1..=pairs)
        .map(|j| k.mul(&k.sub(&k.mul(&p[j - 1], &p[j - 1]), &p[2 * j - 1]), &half))
        .collect();
    let e = poly::from_power_sums(k, &q);
    if has_root_in(k, &poly::compose_square(k, &e), &g_s, &top) {
        return Separation::Tie("complex_modulus_tie");
    }
    let e_s = poly::squarefree_part(k, &e);
    let sturm = Sturm::new(k, &e_s);
    loop {
        let (lo, hi) = abs_bounds(&top);
        let (lo2, hi2) = (&lo * &lo, &hi * &hi);
        if sturm.count_above(&hi2) > 0 {
            return Separation::Tie("larger_complex_modulus");
        }
        if top.is_exact() || sturm.count(&lo2, &hi2) == 0 {
            // every other squared modulus is at most lo^2 < r^2
            let bound = second.clone().max(largest_root_bound(k, &e_s, &lo2));
            return Separation::Proximal {
                cell: top,
                second_bound: bound,
            };
        }
        if bits > budget {
            return Separation::Undecided(budget);
        }
        bits *= 2;
        top.refine(k, &g_s, bits.min(budget + 1));
    }
}

/// A rational upper bound on `sqrt` of the largest real root of `e_s`
/// below `cap` (0 when there is none), for the evidence block.
fn largest_root_bound<K: OrderedField>(k: &K, e_s: &[K::Elem], cap: &Rational) -> Rational {
    let mut cells = poly::isolate_real_roots(k, e_s);
    for c in cells.iter_mut() {
        c.refine(k, e_s, 24);
    }
    let top = cells
        .iter()
        .map(|c| c.hi.clone().min(cap.clone()))
        .filter(|h| h.is_positive())
        .max();
    match top {
        None => Rational::zero(),
        Some(h) => {
            let r = rational::scaled_isqrt(&h, 32) + num_bigint::BigUint::one();
            Rational::new(BigInt::from(r), BigInt::one() << 32)
        }
    }
}

/// Proximality of `A` at the identity embedding of `L`.
pub fn proximality(ext: &QuadExtension, a: &FieldMatrix, budget: u32) -> Result<Certificate> {
    if !a.is_square() {
        return Err(Error::SizeMismatch("proximality needs a square matrix".into()));
    }
    if ext.is_zero(&ext.det(a)) {
        return Err(Error::Singular);
    }
    let p = ext.charpoly(a);
    let base = Certificate::new("proximality", Verdict::Inconclusive).with_parameter("precision_budget", budget);
    // Over L the identity embedding orders the field, so root isolation
    // and tie tests run exactly on the characteristic polynomial itself.
    let cert = match rational_poly(ext, &p) {
        Some(g) => {
            let sep = dominant_root(&Rationals, &g, budget);
            return Ok(separation_certificate(base.with_evidence("charpoly", poly_json(&g)), sep));
        }
        None => base.with_evidence("charpoly", Value::Array(p.iter().map(io::ext_to_json).collect())),
    };
    Ok(separation_certificate(cert, dominant_root(ext, &p, budget)))
}

fn separation_certificate(cert: Certificate, sep: Separation) -> Certificate {
    match sep {
        Separation::Proximal { cell, second_bound } => {
            let mut c = cert
                .with_evidence("top_eigenvalue", cell_json(&cell))
                .with_evidence("other_moduli_below", rational::format(&second_bound));
            c.verdict = Verdict::Pass;
            c
        }
        Separation::Tie(reason) => {
            let mut c = cert.with_evidence("reason", reason);
            c.verdict = Verdict::Fail;
            c
        }
        Separation::Undecided(b) => cert
            .with_evidence("reason", "separation_not_reached")
            .with_evidence("exhausted_bits", b),
    }
}

/// Row-reduced basis for incremental span computations.
struct SpanBasis<'k, K: Field> {
    k: &'k K,
    rows: Vec<(usize, Vec<K::Elem>)>,
}

impl<'k, K: Field> SpanBasis<'k, K> {
    fn new(k: &'k K) -> Self {
        SpanBasis { k, rows: Vec::new() }
    }

    fn dim(&self) -> usize {
        self.rows.len()
    }

    /// Adds `v`; returns true if it enlarged the span.
    fn insert(&mut self, mut v: Vec<K::Elem>) -> bool {
        let k = self.k;
        for (p, row) in &self.rows {
            if !k.is_zero(&v[*p]) {
                let c = v[*p].clone();
                for (x, r) in v.iter_mut().zip(row) {
                    *x = k.sub(x, &k.mul(&c, r));
                }
            }
        }
        let Some(p) = v.iter().position(|x| !k.is_zero(x)) else {
            return false;
        };
        let inv = k.inv(&v[p]).expect("nonzero pivot");
        for x in v.iter_mut() {
            *x = k.mul(x, &inv);
        }
        for (_, row) in self.rows.iter_mut() {
            if !k.is_zero(&row[p]) {
                let c = row[p].clone();
                for (x, r) in row.iter_mut().zip(&v) {
                    *x = k.sub(x, &k.mul(&c, r));
                }
            }
        }
        self.rows.push((p, v));
        true
    }
}

/// Dimension of the span of all words of length at most `cap` in `gens`
/// and their inverses, with the matrices that realised each new dimension.
pub struct SpanResult<E> {
    pub dimension: usize,
    pub stabilized: bool,
    pub reached_at: usize,
    pub basis: Vec<Matrix<E>>,
}

pub fn word_span<K: MatrixOps>(k: &K, gens: &[Matrix<K::Elem>], cap: usize) -> Result<SpanResult<K::Elem>> {
    let size = gens[0].rows();
    let mut letters = gens.to_vec();
    for g in gens {
        letters.push(k.inverse(g).ok_or(Error::Singular)?);
    }
    let full = size * size;
    let mut span = SpanBasis::new(k);
    let id = Matrix::identity(k, size);
    span.insert(id.entries().to_vec());
    let mut basis = vec![id];
    let mut frontier = basis.clone();
    let mut reached_at = 0;
    let mut len = 0;
    while len < cap && !frontier.is_empty() && span.dim() < full {
        len += 1;
        let mut next = Vec::new();
        for m in &frontier {
            for l in &letters {
                let w = k.mat_mul(m, l);
                if span.insert(w.entries().to_vec()) {
                    reached_at = len;
                    next.push(w);
                }
            }
        }
        basis.extend(next.iter().cloned());
        frontier = next;
    }
    Ok(SpanResult {
        dimension: span.dim(),
        stabilized: frontier.is_empty() || span.dim() == full,
        reached_at,
        basis,
    })
}

/// Proper invariant subspace `A e_i` from the spanned algebra, if any.
fn invariant_subspace<K: MatrixOps>(k: &K, algebra: &[Matrix<K::Elem>]) -> Option<(usize, Vec<Vec<K::Elem>>)> {
    let size = algebra[0].rows();
    for i in 0..size {
        let mut e = vec![k.zero(); size];
        e[i] = k.one();
        let mut span = SpanBasis::new(k);
        for a in algebra {
            span.insert(k.mat_vec(a, &e));
        }
        if span.dim() < size {
            let vecs = span.rows.into_iter().map(|(_, v)| v).collect();
            return Some((i, vecs));
        }
    }
    None
}

/// `{g^2} ∪ {g h g^-1}`: generators of a family meeting every index-2
/// subgroup, used as strong-irreducibility evidence.
fn index_two_family<K: MatrixOps>(k: &K, gens: &[Matrix<K::Elem>]) -> Result<Vec<Matrix<K::Elem>>> {
    let mut out = Vec::new();
    for g in gens {
        out.push(k.mat_mul(g, g));
    }
    for g in gens {
        let gi = k.inverse(g).ok_or(Error::Singular)?;
        for h in gens {
            if !k.mat_eq(g, h) {
                out.push(k.mat_mul(&k.mat_mul(g, h), &gi));
            }
        }
    }
    Ok(out)
}

fn vectors_json(vs: &[Vec<ExtElement>]) -> Value {
    Value::Array(
        vs.iter()
            .map(|v| Value::Array(v.iter().map(io::ext_to_json).collect()))
            .collect(),
    )
}

pub fn burnside_irreducibility(ext: &QuadExtension, gens: &[FieldMatrix], word_cap: usize) -> Result<Certificate> {
    if gens.is_empty() {
        return Err(Error::EmptyGenerators);
    }
    check_same_square(gens)?;
    let size = gens[0].rows();
    let full = size * size;
    let res = word_span(ext, gens, word_cap)?;
    let verdict = if res.dimension == full {
        Verdict::Pass
    } else {
        Verdict::Inconclusive
    };
    let mut cert = Certificate::new("burnside", verdict)
        .with_parameter("word_cap", word_cap)
        .with_evidence("span_dimension", res.dimension)
        .with_evidence("full_dimension", full)
        .with_evidence("reached_at_length", res.reached_at)
        .with_evidence("stabilized", res.stabilized);
    if res.dimension < full {
        if let Some((i, vs)) = invariant_subspace(ext, &res.basis) {
            cert = cert.with_evidence(
                "invariant_subspace",
                json!({ "seed_index": i, "basis": vectors_json(&vs) }),
            );
        }
    } else {
        let fam = index_two_family(ext, gens)?;
        let strong = word_span(ext, &fam, word_cap)?;
        cert = cert.with_evidence(
            "strong_irreducibility_evidence",
            json!({
                "family": "squares and conjugates",
                "span_dimension": strong.dimension,
                "irreducible": strong.dimension == full,
            }),
        );
        let claim = if strong.dimension == full {
            "irreducible; strong-irreducibility evidence at index <= 2"
        } else {
            "irreducible"
        };
        cert = cert.with_evidence("claim", claim);
    }
    Ok(cert)
}

fn check_same_square<E: Clone>(gens: &[Matrix<E>]) -> Result<()> {
    let n = gens[0].rows();
    if gens.iter().any(|g| !g.is_square() || g.rows() != n) {
        return Err(Error::SizeMismatch("generators must be square of one size".into()));
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Symmetry {
    Symmetric,
    Antisymmetric,
}

impl Symmetry {
    pub fn as_str(self) -> &'static str {
        match self {
            Symmetry::Symmetric => "symmetric",
            Symmetry::Antisymmetric => "antisymmetric",
        }
    }
}

/// Basis of `{X = ±X^t : A^t X A = X for every generator}`.
pub fn invariant_forms<K: MatrixOps>(k: &K, gens: &[Matrix<K::Elem>], sym: Symmetry) -> Result<Vec<Matrix<K::Elem>>> {
    if gens.is_empty() {
        return Err(Error::EmptyGenerators);
    }
    check_same_square(gens)?;
    let size = gens[0].rows();
    let mut unknowns = Vec::new();
    for i in 0..size {
        let start = if sym == Symmetry::Symmetric { i } else { i + 1 };
        for j in start..size {
            let mut e = Matrix::zeros(k, size, size);
            e.set(i, j, k.one());
            if i != j {
                let other = if sym == Symmetry::Symmetric { k.one() } else { k.neg(&k.one()) };
                e.set(j, i, other);
            }
            unknowns.push(e);
        }
    }
    if unknowns.is_empty() {
        return Ok(Vec::new());
    }
    // columns: images of each basis form under X -> A^t X A - X
    let mut columns: Vec<Vec<K::Elem>> = vec![Vec::new(); unknowns.len()];
    for a in gens {
        let at = a.transpose();
        for (c, e) in unknowns.iter().enumerate() {
            let img = k.mat_sub(&k.mat_mul(&k.mat_mul(&at, e), a), e);
            columns[c].extend(img.entries().iter().cloned());
        }
    }
    let rows = columns[0].len();
    let system = Matrix::from_fn(rows, unknowns.len(), |i, j| columns[j][i].clone());
    Ok(k.nullspace(&system)
        .into_iter()
        .map(|coef| {
            unknowns.iter().zip(&coef).fold(Matrix::zeros(k, size, size), |acc, (e, c)| {
                k.mat_add(&acc, &k.mat_scale(e, c))
            })
        })
        .collect())
}

/// Whether `x` lies in the span of `basis`.
pub fn in_span<K: MatrixOps>(k: &K, basis: &[Matrix<K::Elem>], x: &Matrix<K::Elem>) -> bool {
    let mut span = SpanBasis::new(k);
    for b in basis {
        span.insert(b.entries().to_vec());
    }
    !span.insert(x.entries().to_vec())
}

/// Passes when no nonzero invariant form of the given symmetry exists.
pub fn invariant_form_space(ext: &QuadExtension, gens: &[FieldMatrix], sym: Symmetry) -> Result<Certificate> {
    let basis = invariant_forms(ext, gens, sym)?;
    Ok(Certificate::new(&format!("invariant_form_{}", sym.as_str()), Verdict::from_bool(basis.is_empty()))
        .with_parameter("symmetry", sym.as_str())
        .with_evidence("dimension", basis.len())
        .with_evidence("basis", basis.iter().map(io::ext_matrix_to_json).collect::<Vec<_>>()))
}

/// Reduction data: a prime and images of `theta` and `s` modulo it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Reduction {
    pub prime: u64,
    pub theta_root: Option<u64>,
    pub s_root: Option<u64>,
}

fn mod_p(q: &Rational, p: u64) -> Result<u64> {
    let pb = BigInt::from(p);
    let den = q.denom().mod_floor(&pb);
    if den.is_zero() {
        return Err(Error::BadReduction(format!("denominator of {} divisible by {p}", rational::format(q))));
    }
    let num = q.numer().mod_floor(&pb).to_u64().unwrap();
    let inv = den.modpow(&BigInt::from(p - 2), &pb).to_u64().unwrap();
    Ok(num * inv % p)
}

fn eval_mod(coeffs: &[Rational], x: u64, p: u64) -> Result<u64> {
    let mut acc = 0u64;
    for c in coeffs.iter().rev() {
        acc = (acc * x + mod_p(c, p)?) % p;
    }
    Ok(acc)
}

fn roots_mod(coeffs: &[Rational], p: u64) -> Result<Vec<u64>> {
    let mut out = Vec::new();
    for r in 0..p {
        if eval_mod(coeffs, r, p)? == 0 {
            out.push(r);
        }
    }
    Ok(out)
}

fn is_prime(p: u64) -> bool {
    p >= 2 && (2..p).take_while(|d| d * d <= p).all(|d| !p.is_multiple_of(d))
}

impl Reduction {
    /// Fills in missing roots by exhaustive search; `s` must have two
    /// distinct roots (the extension splits) when `require_split` is set.
    pub fn resolve(ext: &QuadExtension, prime: u64, require_split: bool) -> Result<Reduction> {
        if !is_prime(prime) {
            return Err(Error::BadReduction(format!("{prime} is not prime")));
        }
        let f: Vec<Rational> = ext.base().min_poly().iter().map(|c| Rational::from_integer(c.clone())).collect();
        let theta_root = if ext.base().degree() == 1 {
            None
        } else {
            let roots = roots_mod(&f, prime)?;
            Some(
                *roots
                    .first()
                    .ok_or_else(|| Error::BadReduction(format!("defining polynomial has no root mod {prime}")))?,
            )
        };
        let red = Reduction {
            prime,
            theta_root,
            s_root: None,
        };
        let u = red.reduce_base(ext.u().coeffs())?;
        let s_roots: Vec<u64> = (0..prime).filter(|&r| (r * r + 1 + prime * prime - u * r).is_multiple_of(prime)).collect();
        if s_roots.is_empty() || (require_split && s_roots.len() < 2) {
            return Err(Error::BadReduction(format!("x^2 - u x + 1 does not split mod {prime}")));
        }
        Ok(Reduction {
            s_root: Some(s_roots[0]),
            ..red
        })
    }

    fn reduce_base(&self, coeffs: &[Rational]) -> Result<u64> {
        match self.theta_root {
            None => {
                if coeffs.iter().skip(1).any(|c| !c.is_zero()) {
                    return Err(Error::BadReduction("no image for theta".into()));
                }
                mod_p(&coeffs[0], self.prime)
            }
            Some(t) => eval_mod(coeffs, t, self.prime),
        }
    }

    pub fn reduce(&self, x: &ExtElement) -> Result<u64> {
        let a = self.reduce_base(x.a.coeffs())?;
        if x.b.coeffs().iter().all(Zero::is_zero) {
            return Ok(a);
        }
        let s = self.s_root.ok_or_else(|| Error::BadReduction("no image for s".into()))?;
        let b = self.reduce_base(x.b.coeffs())?;
        Ok((a + b * s) % self.prime)
    }
}

/// Primes `p <= MAX_RESIDUE_FIELD` at which `L` splits and reduction works.
pub fn splitting_primes(ext: &QuadExtension) -> Vec<u64> {
    (2..=MAX_RESIDUE_FIELD)
        .filter(|&p| is_prime(p) && Reduction::resolve(ext, p, true).is_ok())
        .collect()
}

/// Matrices over `F_p`, `p < 16`, packed four bits per entry.
#[derive(Clone, Copy)]
struct Packed {
    k: usize,
    p: u64,
}

impl Packed {
    fn encode(&self, m: &[u64]) -> u64 {
        m.iter().enumerate().fold(0, |acc, (i, &x)| acc | (x << (4 * i)))
    }

    fn entry(&self, code: u64, i: usize, j: usize) -> u64 {
        (code >> (4 * (i * self.k + j))) & 0xf
    }

    fn mul(&self, a: u64, b: u64) -> u64 {
        let k = self.k;
        let mut out = 0;
        for i in 0..k {
            for j in 0..k {
                let s: u64 = (0..k).map(|t| self.entry(a, i, t) * self.entry(b, t, j)).sum();
                out |= (s % self.p) << (4 * (i * k + j));
            }
        }
        out
    }

    fn det(&self, code: u64) -> u64 {
        let k = self.k;
        let p = self.p as i64;
        let mut m: Vec<Vec<i64>> = (0..k).map(|i| (0..k).map(|j| self.entry(code, i, j) as i64).collect()).collect();
        let mut det = 1i64;
        for c in 0..k {
            let Some(r) = (c..k).find(|&r| m[r][c] != 0) else {
                return 0;
            };
            if r != c {
                m.swap(r, c);
                det = (p - det) % p;
            }
            det = det * m[c][c] % p;
            let inv = modpow(m[c][c], p - 2, p);
            for r in c + 1..k {
                let f = m[r][c] * inv % p;
                for j in c..k {
                    m[r][j] = ((m[r][j] - f * m[c][j]) % p + p) % p;
                }
            }
        }
        det as u64
    }
}

fn modpow(mut b: i64, mut e: i64, p: i64) -> i64 {
    let mut r = 1;
    b %= p;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % p;
        }
        b = b * b % p;
        e >>= 1;
    }
    r
}

/// `|SL(k, q)| = q^{k(k-1)/2} prod_{i=2}^{k} (q^i - 1)`.
pub fn sl_order(k: usize, q: u64) -> BigInt {
    let qb = BigInt::from(q);
    let mut order = num_traits::pow(qb.clone(), k * (k - 1) / 2);
    for i in 2..=k {
        order *= num_traits::pow(qb.clone(), i) - 1;
    }
    order
}

/// Order of the finite group generated by `gens` (closed under products).
pub fn group_order(gens: &[Vec<u64>], k: usize, p: u64, budget: usize, exec: Exec) -> Result<usize> {
    let packed = Packed { k, p };
    let codes: Vec<u64> = gens.iter().map(|g| packed.encode(g)).collect();
    let id: Vec<u64> = (0..k * k).map(|i| u64::from(i % (k + 1) == 0)).collect();
    let id = packed.encode(&id);
    let mut seen: HashSet<u64> = HashSet::new();
    seen.insert(id);
    let mut frontier = vec![id];
    while !frontier.is_empty() {
        let products = exec.map(&frontier, |&m| codes.iter().map(|&g| packed.mul(m, g)).collect::<Vec<_>>());
        let mut next = Vec::new();
        for c in products.into_iter().flatten() {
            if seen.insert(c) {
                if seen.len() > budget {
                    return Err(Error::BudgetExceeded(budget));
                }
                next.push(c);
            }
        }
        frontier = next;
    }
    Ok(seen.len())
}

pub fn congruence_image_order(
    gens: &[FieldMatrix],
    red: &Reduction,
    budget: usize,
    exec: Exec,
) -> Result<Certificate> {
    if gens.is_empty() {
        return Err(Error::EmptyGenerators);
    }
    check_same_square(gens)?;
    let k = gens[0].rows();
    let p = red.prime;
    if p > MAX_RESIDUE_FIELD || k > MAX_CONGRUENCE_SIZE {
        return Err(Error::BadReduction(format!(
            "enumeration limited to q <= {MAX_RESIDUE_FIELD} and size <= {MAX_CONGRUENCE_SIZE}"
        )));
    }
    let reduced = gens
        .iter()
        .map(|g| g.entries().iter().map(|x| red.reduce(x)).collect::<Result<Vec<u64>>>())
        .collect::<Result<Vec<_>>>()?;
    let packed = Packed { k, p };
    let dets: Vec<u64> = reduced.iter().map(|g| packed.det(packed.encode(g))).collect();
    if dets.contains(&0) {
        return Err(Error::BadReduction(format!("a generator is singular mod {p}")));
    }
    let in_sl = dets.iter().all(|&d| d == 1);
    let order = group_order(&reduced, k, p, budget, exec)?;
    let sl = sl_order(k, p);
    let ambient = if in_sl { sl.clone() } else { &sl * BigInt::from(p - 1) };
    let lagrange = (&ambient % BigInt::from(order)).is_zero();
    Ok(Certificate::new("congruence", Verdict::from_bool(in_sl && BigInt::from(order) == sl))
        .with_parameter("prime", p)
        .with_parameter("theta_root", red.theta_root)
        .with_parameter("s_root", red.s_root)
        .with_parameter("bfs_budget", budget)
        .with_evidence("order", order)
        .with_evidence("sl_order", sl.to_string())
        .with_evidence("determinants_one", in_sl)
        .with_evidence("divides_ambient_order", lagrange))
}

#[derive(Clone, Debug, PartialEq)]
pub struct CertifyOptions {
    pub word_cap: usize,
    pub proximal_word_length: usize,
    pub precision_budget: u32,
    pub prime: Option<u64>,
    pub bfs_budget: usize,
    pub exec: Exec,
}

impl Default for CertifyOptions {
    fn default() -> Self {
        CertifyOptions {
            word_cap: 6,
            proximal_word_length: 4,
            precision_budget: 256,
            prime: None,
            bfs_budget: DEFAULT_BFS_BUDGET,
            exec: Exec::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ThinnessReport {
    pub summary: String,
    pub infinite_index: String,
    pub certificates: Vec<Certificate>,
}

impl ThinnessReport {
    pub fn get(&self, check: &str) -> Option<&Certificate> {
        self.certificates.iter().find(|c| c.check == check)
    }
}

pub const INFINITE_INDEX_NOTE: &str =
    "not machine-checked: infinite index rests on the property (T) argument, not on these computations";

/// Words of length 1..=max in the generators and their inverses, shortlex.
fn words_up_to(gens: &[String], max: usize) -> Vec<Word> {
    let mut letters = Vec::new();
    for g in gens {
        letters.push((g.clone(), 1));
        letters.push((g.clone(), -1));
    }
    let mut out = Vec::new();
    let mut level: Vec<Vec<(String, i64)>> = vec![Vec::new()];
    for _ in 0..max {
        let mut next = Vec::new();
        for w in &level {
            for l in &letters {
                if w.last().is_some_and(|(g, e)| g == &l.0 && *e == -l.1) {
                    continue;
                }
                let mut v = w.clone();
                v.push(l.clone());
                next.push(v);
            }
        }
        out.extend(next.iter().cloned().map(Word));
        level = next;
    }
    out
}

/// First word whose image is proximal, else the last non-passing outcome.
pub fn proximal_word_search(ext: &QuadExtension, rep: &Rep, max_len: usize, budget: u32) -> Result<Certificate> {
    let gens: Vec<String> = rep.images.iter().map(|(g, _)| g.clone()).collect();
    let mut fallback: Option<Certificate> = None;
    let mut tried = 0usize;
    for w in words_up_to(&gens, max_len) {
        tried += 1;
        let m = rep.eval(ext, &w)?;
        let cert = proximality(ext, &m, budget)?;
        if cert.passed() {
            return Ok(cert.with_parameter("word", w.to_string()).with_evidence("words_tried", tried));
        }
        if fallback.as_ref().is_none_or(|f| f.verdict == Verdict::Fail) {
            fallback = Some(cert.with_parameter("word", w.to_string()));
        }
    }
    let cert = fallback.ok_or(Error::EmptyGenerators)?;
    Ok(cert
        .with_parameter("max_word_length", max_len)
        .with_evidence("words_tried", tried))
}

pub fn thinness_report(ext: &QuadExtension, inst: &BendingInstance, opts: &CertifyOptions) -> Result<ThinnessReport> {
    for (_, m) in &inst.base_rep.images {
        if ext.is_zero(&ext.det(m)) {
            return Err(Error::Singular);
        }
    }
    let rep = bending::bend(ext, inst)?;
    let gens = rep.matrices();
    let mut certs = vec![bending::verify_su_containment(ext, &rep, &inst.form)?];
    certs.push(proximal_word_search(
        ext,
        &rep,
        opts.proximal_word_length,
        opts.precision_budget,
    )?);
    certs.push(burnside_irreducibility(ext, &gens, opts.word_cap)?);
    let sym = invariant_forms(ext, &gens, Symmetry::Symmetric)?;
    certs.push(invariant_form_space(ext, &gens, Symmetry::Symmetric)?);
    certs.push(invariant_form_space(ext, &gens, Symmetry::Antisymmetric)?);
    let j = inst.form.matrix(ext);
    let j_present = in_span(ext, &sym, &j);
    certs.push(match opts.prime {
        Some(p) => congruence_image_order(&gens, &Reduction::resolve(ext, p, true)?, opts.bfs_budget, opts.exec)?,
        None => match splitting_primes(ext).first() {
            Some(&p) => congruence_image_order(
                &gens,
                &Reduction::resolve(ext, p, true)?,
                opts.bfs_budget,
                opts.exec,
            )?,
            None => Certificate::new("congruence", Verdict::Inconclusive)
                .with_parameter("max_residue_field", MAX_RESIDUE_FIELD)
                .with_parameter("bfs_budget", opts.bfs_budget)
                .with_evidence("reason", "no splitting prime within the enumeration limit"),
        },
    });
    let hard_pass = |name: &str| certs.iter().find(|c| c.check == name).is_some_and(Certificate::passed);
    let summary = if j_present {
        "not bent: invariant symmetric form J present".to_string()
    } else if !sym.is_empty() {
        "an invariant symmetric form is present".to_string()
    } else if ["su_containment", "proximality", "burnside", "invariant_form_symmetric", "invariant_form_antisymmetric"]
        .iter()
        .all(|c| hard_pass(c))
    {
        "Zariski-density evidence: proximal, irreducible, no invariant bilinear form".to_string()
    } else {
        "Zariski-density evidence incomplete".to_string()
    };
    Ok(ThinnessReport {
        summary,
        infinite_index: INFINITE_INDEX_NOTE.to_string(),
        certificates: certs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numfield::NumberField;

    fn qext() -> QuadExtension {
        let f = NumberField::rationals();
        let u = f.from_ints(&[3]);
        QuadExtension::new(f, u).unwrap()
    }

    fn im(ext: &QuadExtension, rows: &[&[i64]]) -> FieldMatrix {
        Matrix::from_rows(rows.iter().map(|r| r.iter().map(|&x| ext.from_int(x)).collect()).collect()).unwrap()
    }

    fn qm(ext: &QuadExtension, rows: &[&[(i64, i64)]]) -> FieldMatrix {
        Matrix::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&(p, q)| ext.from_rational(&rational::frac(p, q))).collect())
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn proximality_examples() {
        let ext = qext();
        let a = im(&ext, &[&[1, 0, 0], &[0, 2, 1], &[0, 3, 2]]);
        let c = proximality(&ext, &a, 128).unwrap();
        assert_eq!(c.verdict, Verdict::Pass, "{c:?}");
        let id = im(&ext, &[&[1, 0, 0], &[0, 1, 0], &[0, 0, 1]]);
        assert_eq!(proximality(&ext, &id, 128).unwrap().verdict, Verdict::Fail);
        let rot = qm(&ext, &[&[(3, 5), (-4, 5), (0, 1)], &[(4, 5), (3, 5), (0, 1)], &[(0, 1), (0, 1), (1, 1)]]);
        let c = proximality(&ext, &rot, 128).unwrap();
        assert_eq!(c.verdict, Verdict::Fail);
        assert_eq!(c.evidence["reason"], "complex_modulus_tie");
        let flip = im(&ext, &[&[2, 0], &[0, -2]]);
        assert_eq!(proximality(&ext, &flip, 64).unwrap().evidence["reason"], "opposite_real_eigenvalue");
        let sing = im(&ext, &[&[1, 1], &[1, 1]]);
        assert_eq!(proximality(&ext, &sing, 64), Err(Error::Singular));
    }

    #[test]
    fn proximality_over_extension() {
        let ext = qext();
        // diag(s, 1, 1/s) has dominant eigenvalue s at the identity place
        let s = ext.s();
        let si = ext.inv(&s).unwrap();
        let d = Matrix::diagonal(&ext, &[s, ext.one(), si]);
        let c = proximality(&ext, &d, 128).unwrap();
        assert_eq!(c.verdict, Verdict::Pass, "{c:?}");
        let flat = Matrix::diagonal(&ext, &[ext.s(), ext.tau(&ext.s()), ext.one()]);
        // s and 1/s at the identity place: 2.618.., 0.381.., 1
        assert!(proximality(&ext, &flat, 128).unwrap().passed());
    }

    #[test]
    fn burnside_examples() {
        let ext = qext();
        let a = im(&ext, &[&[1, 0, 0], &[0, 2, 1], &[0, 3, 2]]);
        let c = burnside_irreducibility(&ext, &[a], 6).unwrap();
        assert_eq!(c.verdict, Verdict::Inconclusive);
        assert_eq!(c.evidence["span_dimension"], 3);
        assert!(c.evidence.contains_key("invariant_subspace"));
        let e12 = im(&ext, &[&[1, 1], &[0, 1]]);
        let e21 = im(&ext, &[&[1, 0], &[1, 1]]);
        let c = burnside_irreducibility(&ext, &[e12, e21], 4).unwrap();
        assert_eq!(c.verdict, Verdict::Pass);
        assert_eq!(c.evidence["span_dimension"], 4);
        assert_eq!(burnside_irreducibility(&ext, &[], 4), Err(Error::EmptyGenerators));
    }

    #[test]
    fn invariant_form_examples() {
        let ext = qext();
        let minus = im(&ext, &[&[-1, 0], &[0, -1]]);
        assert_eq!(invariant_forms(&ext, &[minus], Symmetry::Antisymmetric).unwrap().len(), 1);
        let refl = im(&ext, &[&[1, 0], &[0, -1]]);
        assert_eq!(invariant_forms(&ext, &[refl], Symmetry::Antisymmetric).unwrap().len(), 0);
    }

    #[test]
    fn congruence_sl32() {
        let ext = qext();
        let gens = vec![
            im(&ext, &[&[1, 1, 0], &[0, 1, 0], &[0, 0, 1]]),
            im(&ext, &[&[1, 0, 0], &[0, 1, 1], &[0, 0, 1]]),
            im(&ext, &[&[1, 0, 0], &[1, 1, 0], &[0, 0, 1]]),
            im(&ext, &[&[1, 0, 0], &[0, 1, 0], &[0, 1, 1]]),
        ];
        let red = Reduction {
            prime: 2,
            theta_root: None,
            s_root: None,
        };
        let c = congruence_image_order(&gens, &red, DEFAULT_BFS_BUDGET, Exec::Sequential).unwrap();
        assert_eq!(c.evidence["order"], 168);
        assert!(c.passed());
        let d = im(&ext, &[&[2, 0, 0], &[0, 4, 0], &[0, 0, 1]]);
        let red7 = Reduction { prime: 7, ..red };
        let c = congruence_image_order(&[d], &red7, DEFAULT_BFS_BUDGET, Exec::Parallel).unwrap();
        assert_eq!(c.evidence["order"], 3);
        assert_eq!(c.verdict, Verdict::Fail);
        assert_eq!(sl_order(3, 2), BigInt::from(168));
    }

    #[test]
    fn golden_extension_has_no_small_splitting_prime() {
        assert!(splitting_primes(&qext()).is_empty());
    }

    #[test]
    fn desk_thinness() {
        let file = crate::config::InstanceFile::parse(include_str!("../data/desk/instance.toml")).unwrap();
        let (ext, inst) = file.instance().unwrap();
        let report = thinness_report(&ext, &inst, &CertifyOptions::default()).unwrap();
        for c in &report.certificates {
            eprintln!("{} {:?} {}", c.check, c.verdict, serde_json::to_string(&c.evidence).unwrap());
        }
        assert_eq!(report.get("burnside").unwrap().evidence["span_dimension"], 9);
        assert_eq!(report.get("invariant_form_symmetric").unwrap().evidence["dimension"], 0);
        assert_eq!(report.get("invariant_form_antisymmetric").unwrap().evidence["dimension"], 0);
        assert!(report.get("proximality").unwrap().passed());
        assert_eq!(report.get("congruence").unwrap().verdict, Verdict::Inconclusive);

        let flat = inst.with_unit(ext.one());
        let report = thinness_report(&ext, &flat, &CertifyOptions::default()).unwrap();
        assert_eq!(report.summary, "not bent: invariant symmetric form J present");
        assert_eq!(report.get("burnside").unwrap().evidence["span_dimension"], 9);
        assert_eq!(report.get("invariant_form_symmetric").unwrap().evidence["dimension"], 1);
    }
}
