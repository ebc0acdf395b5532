//! Special units (large at the identity place, in `(0, 1)` elsewhere) and
//! the quadratic extension they generate.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::{Field, Rationals};
use crate::interval::{Interval, IntervalRecord};
use crate::numfield::{AlgebraicNumber, NumberField, QuadExtension};
use crate::poly;
use crate::rational::{self, Rational};

#[derive(Clone, Debug)]
pub struct UnitSearchProblem {
    pub field: NumberField,
    pub fundamental_units: Vec<AlgebraicNumber>,
    pub threshold: Rational,
    /// Width `2^-bits` of the reported embedding intervals.
    pub evidence_bits: u32,
}

impl UnitSearchProblem {
    pub fn new(
        field: NumberField,
        fundamental_units: Vec<AlgebraicNumber>,
        threshold: Rational,
    ) -> Result<Self> {
        let expected = field.degree() - 1;
        if fundamental_units.len() != expected {
            return Err(Error::UnitCountMismatch {
                expected,
                got: fundamental_units.len(),
            });
        }
        for v in &fundamental_units {
            if !field.is_unit(v) {
                return Err(Error::NotAUnit(format_element(v)));
            }
        }
        if !threshold.is_positive() {
            return Err(Error::Config("threshold must be positive".into()));
        }
        Ok(UnitSearchProblem {
            field,
            fundamental_units,
            threshold,
            evidence_bits: 64,
        })
    }

    /// For real quadratic fields the fundamental unit is computed here.
    pub fn quadratic(field: NumberField, threshold: Rational) -> Result<Self> {
        let eps = quadratic_fundamental_unit(&field)?;
        UnitSearchProblem::new(field, vec![eps], threshold)
    }
}

#[derive(Clone, Debug)]
pub struct SpecialUnit {
    pub u: AlgebraicNumber,
    /// Exponents of `u` over the supplied fundamental units.
    pub power_witness: Vec<BigInt>,
    /// Certified enclosures of `u` at every place, identity first.
    pub embedding_evidence: Vec<Interval>,
}

#[derive(Clone, Debug, Serialize)]
pub struct SpecialUnitReport {
    pub u: Vec<String>,
    pub power_witness: Vec<String>,
    pub threshold: String,
    pub evidence_bits: u32,
    pub embeddings: Vec<IntervalRecord>,
}

impl SpecialUnit {
    pub fn report(&self, threshold: &Rational, evidence_bits: u32) -> SpecialUnitReport {
        SpecialUnitReport {
            u: self.u.coeffs().iter().map(rational::format).collect(),
            power_witness: self.power_witness.iter().map(|e| e.to_string()).collect(),
            threshold: rational::format(threshold),
            evidence_bits,
            embeddings: self.embedding_evidence.iter().map(IntervalRecord::from).collect(),
        }
    }
}

fn format_element(x: &AlgebraicNumber) -> String {
    x.coeffs().iter().map(rational::format).collect::<Vec<_>>().join(", ")
}

/// Target direction `(1, -1/k, ..., -1/k)` in log space, `k = degree - 1`.
pub fn target_vector(degree: usize) -> Vec<Rational> {
    let k = degree as i64 - 1;
    let mut v = vec![Rational::one()];
    v.extend((0..k).map(|_| rational::frac(-1, k)));
    v
}

/// True iff `x > 1` at the identity place and `0 < x < 1` at all others.
fn has_special_shape(field: &NumberField, x: &AlgebraicNumber) -> bool {
    let x_minus_one = field.sub(x, &field.one());
    field.sign_at(&x_minus_one, 0) == Ordering::Greater
        && (1..field.degree()).all(|p| {
            field.sign_at(x, p) == Ordering::Greater
                && field.sign_at(&x_minus_one, p) == Ordering::Less
        })
}

/// Solves `x M = t` for a square interval matrix by Gaussian elimination
/// with pivots bounded away from zero. `None` if a pivot column cannot be
/// separated from zero.
fn interval_solve(m: &[Vec<Interval>], t: &[Interval]) -> Option<Vec<Interval>> {
    // Work on the transpose: M^T x^T = t^T.
    let k = t.len();
    let mut a: Vec<Vec<Interval>> = (0..k)
        .map(|i| {
            let mut row: Vec<Interval> = (0..k).map(|j| m[j][i].clone()).collect();
            row.push(t[i].clone());
            row
        })
        .collect();
    for c in 0..k {
        let pivot = (c..k)
            .filter(|&r| !a[r][c].contains_zero())
            .max_by(|&x, &y| a[x][c].abs().lo().cmp(a[y][c].abs().lo()))?;
        a.swap(c, pivot);
        let inv = a[c][c].recip()?;
        for r in 0..k {
            if r == c {
                continue;
            }
            let f = a[r][c].mul(&inv);
            for j in c..=k {
                let v = a[r][j].sub(&f.mul(&a[c][j]));
                a[r][j] = v;
            }
        }
    }
    (0..k).map(|i| a[i][k].div(&a[i][i])).collect()
}

/// Constructive search for a special unit above the threshold.
pub fn find_special_unit(prob: &UnitSearchProblem) -> Result<SpecialUnit> {
    let f = &prob.field;
    let d = f.degree();
    if d < 2 {
        return Err(Error::RankZeroField);
    }
    // Squares are totally positive.
    let squares: Vec<AlgebraicNumber> = prob
        .fundamental_units
        .iter()
        .map(|v| f.mul(v, v))
        .collect();
    let target = target_vector(d);
    let mut bits = 32;
    let coords = loop {
        let logs: Vec<Vec<Interval>> = squares
            .iter()
            .map(|v| {
                (1..d)
                    .map(|p| {
                        let e = f.embed(v, p, bits).expect("valid place");
                        e.ln(bits).expect("totally positive")
                    })
                    .collect()
            })
            .collect();
        let t: Vec<Interval> = target[1..].iter().map(|q| Interval::point(q.clone())).collect();
        if let Some(x) = interval_solve(&logs, &t) {
            break x;
        }
        if bits >= 512 {
            return Err(Error::DegenerateBasis);
        }
        bits *= 2;
    };
    let mids: Vec<Rational> = coords.iter().map(Interval::mid).collect();
    let mut base = None;
    for m in 1..=10_000i64 {
        let exps: Vec<BigInt> = mids
            .iter()
            .map(|c| rational::nearest_integer(&(c * rational::int(m))))
            .collect();
        if exps.iter().all(Zero::is_zero) {
            continue;
        }
        let w = product_of_powers(f, &squares, &exps);
        if has_special_shape(f, &w) {
            base = Some((w, exps));
            break;
        }
    }
    let (w, exps) = base.ok_or(Error::DegenerateBasis)?;
    let threshold = f.from_rational(&prob.threshold);
    let mut power: u64 = 1;
    let mut u = w.clone();
    while f.sign_at(&f.sub(&u, &threshold), 0) != Ordering::Greater {
        u = f.mul(&u, &w);
        power += 1;
    }
    let power_witness = exps
        .iter()
        .map(|e| e * BigInt::from(2) * BigInt::from(power))
        .collect();
    let embedding_evidence = (0..d)
        .map(|p| f.embed(&u, p, prob.evidence_bits))
        .collect::<Result<Vec<_>>>()?;
    Ok(SpecialUnit {
        u,
        power_witness,
        embedding_evidence,
    })
}

fn product_of_powers(f: &NumberField, base: &[AlgebraicNumber], exps: &[BigInt]) -> AlgebraicNumber {
    base.iter().zip(exps).fold(f.one(), |acc, (b, e)| {
        let e = e.to_i64().expect("exponent fits in i64");
        f.mul(&acc, &f.powi(b, e).expect("units are invertible"))
    })
}

/// `L = F(s)` with `s^2 - u s + 1 = 0`.
pub fn build_extension(field: NumberField, u: AlgebraicNumber) -> Result<QuadExtension> {
    QuadExtension::new(field, u)
}

/// The rational integer used for `u` when `F = Q`: the smallest `u > 2`
/// with `u^2 - 4` not a square.
pub fn rational_trace() -> i64 {
    3
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct UnitRankReport {
    pub degree_f: usize,
    pub rank_f: usize,
    pub rank_l: usize,
    pub real_places_l: usize,
    pub complex_places_l: usize,
    /// Real roots of the absolute characteristic polynomial of `s`,
    /// counted with multiplicity.
    pub real_roots_of_s: usize,
}

/// Dirichlet ranks of `O_F` and `O_L` from the places of `L`, with the
/// place count confirmed by root isolation of the absolute polynomial of
/// `s`.
pub fn unit_rank_report(ext: &QuadExtension) -> Result<UnitRankReport> {
    let d = ext.base().degree();
    let r1 = ext.real_place_count();
    let r2 = ext.complex_place_count();
    let charpoly = ext.absolute_charpoly(&ext.s());
    let real_roots = poly::real_root_count_with_multiplicity(&Rationals, &charpoly);
    if real_roots != r1 {
        return Err(Error::PlaceCountMismatch(format!(
            "{real_roots} real conjugates of s but {r1} real places from signs"
        )));
    }
    if r1 != 2 || r2 != d - 1 {
        return Err(Error::PlaceCountMismatch(format!(
            "expected 2 real places and {} complex pairs, found {r1} and {r2}",
            d - 1
        )));
    }
    let rank_l = r1 + r2 - 1;
    let rank_f = d - 1;
    debug_assert_eq!(rank_l, rank_f + 1);
    Ok(UnitRankReport {
        degree_f: d,
        rank_f,
        rank_l,
        real_places_l: r1,
        complex_places_l: r2,
        real_roots_of_s: real_roots,
    })
}

/// Squarefree part and square cofactor: `n = m^2 * D`.
fn split_square(n: &BigInt) -> (BigInt, BigInt) {
    let mut d = n.clone();
    let mut m = BigInt::one();
    let mut p = BigInt::from(2);
    while &p * &p <= d {
        let p2 = &p * &p;
        while (&d % &p2).is_zero() {
            d /= &p2;
            m *= &p;
        }
        p += 1;
    }
    (m, d)
}

/// Fundamental unit of a real quadratic field, from the continued fraction
/// of the generator of the maximal order.
pub fn quadratic_fundamental_unit(field: &NumberField) -> Result<AlgebraicNumber> {
    if field.degree() != 2 {
        return Err(Error::Config(
            "fundamental units are computed only for quadratic fields".into(),
        ));
    }
    let f = field.min_poly();
    let (c, b) = (&f[0], &f[1]);
    let disc = b * b - BigInt::from(4) * c;
    let (m, big_d) = split_square(&disc);
    let (p, q, half) = quadratic_unit_pq(&big_d);
    // sqrt(D) = (2 theta + b) / m in F
    let root_d = field.element(vec![
        Rational::new(b.clone(), m.clone()),
        Rational::new(BigInt::from(2), m),
    ]);
    let (a0, a1) = if half {
        (
            Rational::new(BigInt::from(2) * &p - &q, BigInt::from(2)),
            Rational::new(q, BigInt::from(2)),
        )
    } else {
        (Rational::from_integer(p), Rational::from_integer(q))
    };
    let unit = field.add(
        &field.from_rational(&a0),
        &field.mul(&field.from_rational(&a1), &root_d),
    );
    debug_assert!(field.is_unit(&unit));
    Ok(unit)
}

/// Returns `(p, q, half)`: the fundamental unit of `Q(sqrt D)` is
/// `p + q sqrt D`, or `(2p - q + q sqrt D) / 2` when `half`.
pub fn quadratic_unit_pq(d: &BigInt) -> (BigInt, BigInt, bool) {
    let half = d.mod_floor(&BigInt::from(4)) == BigInt::one();
    // xi = (p0 + sqrt D) / q0 with q0 | D - p0^2
    let (mut pk, mut qk) = if half {
        (BigInt::one(), BigInt::from(2))
    } else {
        (BigInt::zero(), BigInt::one())
    };
    // xi^2 - t xi + nm = 0
    let (t, nm) = if half {
        (BigInt::one(), (BigInt::one() - d) / 4)
    } else {
        (BigInt::zero(), -d.clone())
    };
    let s = d.sqrt();
    let (mut h_prev, mut h) = (BigInt::zero(), BigInt::one());
    let (mut k_prev, mut k) = (BigInt::one(), BigInt::zero());
    loop {
        debug_assert!(qk.is_positive());
        let a = (&pk + &s).div_floor(&qk);
        let h_next = &a * &h + &h_prev;
        let k_next = &a * &k + &k_prev;
        h_prev = std::mem::replace(&mut h, h_next);
        k_prev = std::mem::replace(&mut k, k_next);
        let norm = &h * &h - &h * &k * &t + &k * &k * &nm;
        if norm.abs().is_one() {
            return (h, k, half);
        }
        let p_next = &a * &qk - &pk;
        qk = (d - &p_next * &p_next) / &qk;
        pk = p_next;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::int;

    fn q_sqrt2() -> NumberField {
        NumberField::from_i64(&[-2, 0, 1], 1).unwrap()
    }

    #[test]
    fn sqrt2_special_unit() {
        let f = q_sqrt2();
        let prob = UnitSearchProblem::quadratic(f.clone(), int(10)).unwrap();
        let su = find_special_unit(&prob).unwrap();
        assert_eq!(su.u, f.from_ints(&[17, 12]));
        assert_eq!(su.power_witness, vec![BigInt::from(4)]);
        assert!(su.embedding_evidence[0].lo() > &int(10));
        assert!(su.embedding_evidence[1].is_positive());
        assert!(su.embedding_evidence[1].hi() < &int(1));
    }

    #[test]
    fn rationals_have_rank_zero() {
        let q = NumberField::rationals();
        let prob = UnitSearchProblem::new(q, vec![], int(10)).unwrap();
        assert_eq!(find_special_unit(&prob).unwrap_err(), Error::RankZeroField);
    }

    #[test]
    fn cubic_special_unit() {
        // x^3 - 3x + 1 with units theta and theta - 1
        let f = NumberField::from_i64(&[1, -3, 0, 1], 2).unwrap();
        let units = vec![f.from_ints(&[0, 1]), f.from_ints(&[-1, 1])];
        let prob = UnitSearchProblem::new(f.clone(), units, int(100)).unwrap();
        let su = find_special_unit(&prob).unwrap();
        assert!(f.is_unit(&su.u));
        assert!(su.embedding_evidence[0].lo() > &int(100));
        for iv in &su.embedding_evidence[1..] {
            assert!(iv.is_positive() && iv.hi() < &int(1));
        }
        let dependent = vec![f.from_ints(&[0, 1]), f.from_ints(&[0, -1])];
        let prob = UnitSearchProblem::new(f, dependent, int(100)).unwrap();
        assert_eq!(find_special_unit(&prob).unwrap_err(), Error::DegenerateBasis);
    }

    #[test]
    fn cubic_target() {
        assert_eq!(
            target_vector(3),
            vec![int(1), rational::frac(-1, 2), rational::frac(-1, 2)]
        );
    }

    #[test]
    fn small_fundamental_units() {
        let cases: &[(i64, (i64, i64, bool))] = &[
            (2, (1, 1, false)),
            (3, (2, 1, false)),
            (5, (1, 1, true)),
            (13, (2, 1, true)),
            (7, (8, 3, false)),
        ];
        for &(d, (p, q, half)) in cases {
            assert_eq!(
                quadratic_unit_pq(&BigInt::from(d)),
                (BigInt::from(p), BigInt::from(q), half),
                "D = {d}"
            );
        }
    }

    #[test]
    fn rank_identity() {
        let q = NumberField::rationals();
        let u = q.from_int(rational_trace());
        let ext = build_extension(q, u).unwrap();
        let r = unit_rank_report(&ext).unwrap();
        assert_eq!((r.rank_l, r.rank_f), (1, 0));

        let f = q_sqrt2();
        let ext = build_extension(f.clone(), f.from_ints(&[17, 12])).unwrap();
        let r = unit_rank_report(&ext).unwrap();
        assert_eq!((r.rank_l, r.rank_f), (2, 1));
        assert_eq!(r.real_roots_of_s, 2);

        let ext = build_extension(f.clone(), f.from_ints(&[5, 1])).unwrap();
        assert!(matches!(
            unit_rank_report(&ext),
            Err(Error::PlaceCountMismatch(_))
        ));
    }
}
