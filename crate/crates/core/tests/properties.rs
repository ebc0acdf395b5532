//! Invariants checked on random inputs, each against an oracle that does
//! not share code with the routine under test.

use num_traits::{One, Signed, Zero};
use proptest::prelude::*;

use bendlab::acceptance;
use bendlab::bending::{self, Word};
use bendlab::certify::{self, Reduction};
use bendlab::field::{Field, Rationals};
use bendlab::forms::{self, FieldMatrix, Form};
use bendlab::matrix::{Matrix, MatrixOps};
use bendlab::numfield::{AlgebraicNumber, ExtElement, NumberField, QuadExtension};
use bendlab::par::Exec;
use bendlab::poly;
use bendlab::projgeom::{self, Domain, ProjPoint, QMatrix};
use bendlab::rational::{self, frac, int, Rational};
use bendlab::units;

fn cfg(cases: u32) -> ProptestConfig {
    ProptestConfig {
        cases,
        ..ProptestConfig::default()
    }
}

fn small_rational() -> impl Strategy<Value = Rational> {
    (-12i64..=12, 1i64..=6).prop_map(|(p, q)| frac(p, q))
}

fn sqrt2() -> NumberField {
    acceptance::sqrt2_field()
}

fn sqrt2_element() -> impl Strategy<Value = (Rational, Rational)> {
    (small_rational(), small_rational())
}

fn ext_element(ext: &QuadExtension, c: &[(Rational, Rational); 2]) -> ExtElement {
    let f = ext.base();
    ext.make(
        f.element(vec![c[0].0.clone(), c[0].1.clone()]),
        f.element(vec![c[1].0.clone(), c[1].1.clone()]),
    )
}

fn qmatrix(rows: &[Vec<Rational>]) -> QMatrix {
    Matrix::from_rows(rows.to_vec()).unwrap()
}

fn invertible_q(k: usize) -> impl Strategy<Value = QMatrix> {
    prop::collection::vec(-4i64..=4, k * k)
        .prop_map(move |v| Matrix::from_fn(k, k, |i, j| int(v[i * k + j])))
        .prop_filter("invertible", |m| !Rationals.det(m).is_zero())
}

proptest! {
    #![proptest_config(cfg(48))]

    #[test]
    fn sqrt2_arithmetic_matches_floats(a in sqrt2_element(), b in sqrt2_element()) {
        let f = sqrt2();
        let x = f.element(vec![a.0.clone(), a.1.clone()]);
        let y = f.element(vec![b.0.clone(), b.1.clone()]);
        let xy = f.mul(&x, &y);
        // (a0 + a1 r)(b0 + b1 r) = a0 b0 + 2 a1 b1 + (a0 b1 + a1 b0) r
        let want = f.element(vec![&a.0 * &b.0 + int(2) * &a.1 * &b.1, &a.0 * &b.1 + &a.1 * &b.0]);
        prop_assert_eq!(&xy, &want);
        let r = std::f64::consts::SQRT_2;
        // places are listed identity first
        for (place, root) in [(0usize, r), (1, -r)] {
            let v = rational::to_f64(&a.0) + rational::to_f64(&a.1) * root;
            let e = f.embed(&x, place, 40).unwrap();
            prop_assert!((e.to_f64_mid() - v).abs() < 1e-9);
        }
        if !f.is_zero(&x) {
            prop_assert!(f.is_one(&f.mul(&x, &f.inv(&x).unwrap())));
            // norm a0^2 - 2 a1^2
            prop_assert_eq!(f.norm(&x), &a.0 * &a.0 - int(2) * &a.1 * &a.1);
        }
    }

    #[test]
    fn tau_is_a_field_automorphism(c1 in [sqrt2_element(), sqrt2_element()], c2 in [sqrt2_element(), sqrt2_element()]) {
        let ext = QuadExtension::new(sqrt2(), sqrt2().from_ints(&[3, 1])).unwrap();
        let x = ext_element(&ext, &c1);
        let y = ext_element(&ext, &c2);
        prop_assert_eq!(ext.tau(&ext.tau(&x)), x.clone());
        prop_assert_eq!(ext.tau(&ext.mul(&x, &y)), ext.mul(&ext.tau(&x), &ext.tau(&y)));
        prop_assert_eq!(ext.tau(&ext.add(&x, &y)), ext.add(&ext.tau(&x), &ext.tau(&y)));
        prop_assert_eq!(ext.from_base(&ext.norm(&x)), ext.mul(&x, &ext.tau(&x)));
        let s = ext.s();
        prop_assert!(ext.is_one(&ext.mul(&s, &ext.tau(&s))));
        // associativity and distributivity in L
        let z = ext.add(&x, &s);
        prop_assert_eq!(ext.mul(&ext.mul(&x, &y), &z), ext.mul(&x, &ext.mul(&y, &z)));
        prop_assert_eq!(ext.mul(&x, &ext.add(&y, &z)), ext.add(&ext.mul(&x, &y), &ext.mul(&x, &z)));
    }

    #[test]
    fn sturm_counts_distinct_integer_roots(roots in prop::collection::vec(-20i64..=20, 1..7)) {
        let k = Rationals;
        let mut p = vec![Rational::one()];
        for r in &roots {
            p = poly::mul(&k, &p, &[int(-*r), Rational::one()]);
        }
        let mut distinct = roots.clone();
        distinct.sort_unstable();
        distinct.dedup();
        let cells = poly::isolate_real_roots(&k, &p);
        prop_assert_eq!(cells.len(), distinct.len());
        for (cell, r) in cells.iter().zip(&distinct) {
            prop_assert!(cell.interval().contains(&int(*r)));
        }
        prop_assert_eq!(poly::real_root_count_with_multiplicity(&k, &p), roots.len());
    }

    #[test]
    fn interval_sqrt_and_ln_enclose(p in 1i64..10_000, q in 1i64..500) {
        let x = bendlab::interval::Interval::point(frac(p, q));
        let v = p as f64 / q as f64;
        let s = x.sqrt(50).unwrap();
        prop_assert!(rational::to_f64(s.lo()) <= v.sqrt() + 1e-12 && v.sqrt() - 1e-12 <= rational::to_f64(s.hi()));
        prop_assert!(s.width_at_most(50));
        let l = x.ln(50).unwrap();
        prop_assert!((l.to_f64_mid() - v.ln()).abs() < 1e-12);
        prop_assert!(l.width_at_most(50));
    }

    #[test]
    fn bending_matrices_compose(i in -3i64..=3, j in -3i64..=3, n in 2usize..=4, neg in any::<bool>()) {
        let ext = acceptance::rational_extension();
        let s = ext.s();
        let mut u = ext.powi(&s, i).unwrap();
        if neg {
            u = ext.neg(&u);
        }
        let v = ext.powi(&s, j).unwrap();
        let bu = forms::bending_matrix(&ext, &u, n).unwrap();
        let bv = forms::bending_matrix(&ext, &v, n).unwrap();
        let buv = forms::bending_matrix(&ext, &ext.mul(&u, &v), n).unwrap();
        prop_assert!(ext.mat_eq(&ext.mat_mul(&bu, &bv), &buv));
        prop_assert!(ext.is_one(&ext.det(&bu)));
    }

    #[test]
    fn bent_words_stay_in_su(word in prop::collection::vec((0usize..2, prop_oneof![Just(-1i64), Just(1)]), 1..8)) {
        let (ext, inst) = acceptance::desk();
        let rep = bending::bend(&ext, &inst).unwrap();
        let names = ["a", "b"];
        let w = Word(word.iter().map(|(g, e)| (names[*g].to_string(), *e)).collect());
        let m = rep.eval(&ext, &w).unwrap();
        prop_assert!(forms::su_membership(&ext, &m, &inst.form).unwrap());
        // w w^-1 evaluates to the identity
        let id = rep.eval(&ext, &w.concat(&w.inverse())).unwrap();
        prop_assert!(ext.is_identity(&id));
    }

    #[test]
    fn cross_ratio_matches_affine_parameters(
        p in prop::collection::vec(-5i64..=5, 3),
        q in prop::collection::vec(-5i64..=5, 3),
        ts in prop::collection::btree_set(-20i64..=20, 4),
        scales in prop::collection::vec(prop_oneof![-3i64..=-1, 1i64..=3], 4),
        g in invertible_q(3),
    ) {
        let p: Vec<Rational> = p.into_iter().map(int).collect();
        let q: Vec<Rational> = q.into_iter().map(int).collect();
        let basis = qmatrix(&[p.clone(), q.clone()]);
        prop_assume!(Rationals.rank(&basis) == 2);
        let ts: Vec<i64> = ts.into_iter().collect();
        let point = |t: i64, c: i64| -> Option<ProjPoint> {
            let v: Vec<Rational> = p.iter().zip(&q).map(|(a, b)| (a + int(t) * b) * int(c)).collect();
            ProjPoint::new(v).ok()
        };
        let pts: Option<Vec<ProjPoint>> = ts.iter().zip(&scales).map(|(t, c)| point(*t, *c)).collect();
        let pts = pts.unwrap();
        let cr = projgeom::cross_ratio(&pts[0], &pts[1], &pts[2], &pts[3]).unwrap();
        let t: Vec<Rational> = ts.iter().map(|x| int(*x)).collect();
        let want = ((&t[3] - &t[1]).abs() * (&t[2] - &t[0]).abs()) / ((&t[1] - &t[0]).abs() * (&t[3] - &t[2]).abs());
        prop_assert_eq!(&cr, &want);
        let moved: Vec<ProjPoint> = pts.iter().map(|x| x.apply(&g).unwrap()).collect();
        prop_assert_eq!(projgeom::cross_ratio(&moved[0], &moved[1], &moved[2], &moved[3]).unwrap(), want);
    }

    #[test]
    fn dual_is_conjugation_by_the_form(word in prop::collection::vec(0usize..3, 1..5)) {
        let j = Matrix::diagonal(&Rationals, &[int(1), int(1), int(-1)]);
        let a = qmatrix(&[
            vec![int(2), int(1), int(2)],
            vec![int(1), int(2), int(2)],
            vec![int(2), int(2), int(3)],
        ]);
        let r = qmatrix(&[
            vec![frac(3, 5), frac(-4, 5), int(0)],
            vec![frac(4, 5), frac(3, 5), int(0)],
            vec![int(0), int(0), int(1)],
        ]);
        let letters = [a.clone(), r, Rationals.inverse(&a).unwrap()];
        let mut g = Matrix::identity(&Rationals, 3);
        for i in word {
            g = Rationals.mat_mul(&g, &letters[i]);
        }
        let dual = projgeom::dual_element(&Rationals, &g).unwrap();
        let conj = Rationals.mat_mul(&Rationals.mat_mul(&j, &g), &j);
        prop_assert!(Rationals.mat_eq(&dual, &conj));
    }
}

fn disk_point() -> impl Strategy<Value = ProjPoint> {
    (-40i64..=40, -40i64..=40)
        .prop_filter("inside", |(x, y)| x * x + y * y < 64 * 64 * 3 / 4)
        .prop_map(|(x, y)| ProjPoint::affine(&[frac(x, 64), frac(y, 64)]))
}

proptest! {
    #![proptest_config(cfg(24))]

    #[test]
    fn hilbert_distance_is_projectively_invariant(x in disk_point(), y in disk_point(), c in 2i64..9) {
        let disk = Domain::Klein { alphas: vec![int(1), int(1)] };
        let d = projgeom::hilbert_distance(&disk, &x, &y, 40).unwrap();
        // rescaled homogeneous coordinates name the same points
        let scale = |p: &ProjPoint| ProjPoint::new(p.coords().iter().map(|t| t * int(-c)).collect()).unwrap();
        let d2 = projgeom::hilbert_distance(&disk, &scale(&x), &scale(&y), 40).unwrap();
        prop_assert_eq!(&d, &d2);
        // a rotation preserves the disk
        let r = qmatrix(&[
            vec![frac(3, 5), frac(-4, 5), int(0)],
            vec![frac(4, 5), frac(3, 5), int(0)],
            vec![int(0), int(0), int(1)],
        ]);
        let d3 = projgeom::hilbert_distance(&disk, &x.apply(&r).unwrap(), &y.apply(&r).unwrap(), 40).unwrap();
        prop_assert!(d.overlaps(&d3));
        let zero = projgeom::hilbert_distance(&disk, &x, &x, 40).unwrap();
        prop_assert!(zero.is_point() && zero.lo().is_zero());
    }

    #[test]
    fn hilbert_batch_matches_sequential(pts in prop::collection::vec((disk_point(), disk_point()), 1..8)) {
        let disk = Domain::Klein { alphas: vec![int(1), int(2)] };
        let par = projgeom::hilbert_batch(&disk, &pts, 32, Exec::Parallel);
        let seq = projgeom::hilbert_batch(&disk, &pts, 32, Exec::Sequential);
        prop_assert_eq!(par, seq);
    }

    #[test]
    fn orbit_rank_ignores_scaling(p in prop::collection::vec(-3i64..=3, 5), c in 1i64..5) {
        prop_assume!(p.iter().any(|x| *x != 0));
        let x = ProjPoint::from_ints(&p).unwrap();
        let y = ProjPoint::from_ints(&p.iter().map(|t| t * -c).collect::<Vec<_>>()).unwrap();
        let rx = projgeom::orbit_openness(&x, 4).unwrap();
        let ry = projgeom::orbit_openness(&y, 4).unwrap();
        prop_assert_eq!(rx.rank, ry.rank);
        prop_assert_eq!(rx.open, p[1] != 0 && p[4] != 0);
        let sampled = acceptance::sampled_orbit_rank(&p.iter().map(|&t| t as f64).collect::<Vec<_>>());
        prop_assert_eq!(rx.rank, sampled);
    }

    #[test]
    fn burnside_span_is_monotone_and_conjugation_invariant(
        g in invertible_q(3),
        h in invertible_q(3),
        p in invertible_q(3),
    ) {
        let k = Rationals;
        let one = certify::word_span(&k, std::slice::from_ref(&g), 6).unwrap().dimension;
        let two = certify::word_span(&k, &[g.clone(), h.clone()], 6).unwrap().dimension;
        prop_assert!(one <= two);
        let pi = k.inverse(&p).unwrap();
        let conj = |m: &QMatrix| k.mat_mul(&k.mat_mul(&p, m), &pi);
        let two_c = certify::word_span(&k, &[conj(&g), conj(&h)], 6).unwrap().dimension;
        prop_assert_eq!(two, two_c);
        // a single matrix spans the algebra Q[g], whose dimension is the
        // degree of its minimal polynomial: count independent powers directly
        let mut powers: Vec<Vec<Rational>> = Vec::new();
        let mut cur = Matrix::identity(&k, 3);
        for _ in 0..4 {
            powers.push(cur.entries().to_vec());
            cur = k.mat_mul(&cur, &g);
        }
        let rank = k.rank(&Matrix::from_rows(powers).unwrap());
        prop_assert_eq!(one, rank);
    }

    #[test]
    fn proximality_is_conjugation_invariant(p in invertible_q(3)) {
        let q = acceptance::rational_extension();
        let lift = |m: &QMatrix| m.map(|x| q.from_rational(x));
        let a = qmatrix(&[
            vec![int(1), int(0), int(0)],
            vec![int(0), int(2), int(1)],
            vec![int(0), int(3), int(2)],
        ]);
        let pi = Rationals.inverse(&p).unwrap();
        let c = Rationals.mat_mul(&Rationals.mat_mul(&p, &a), &pi);
        let v1 = certify::proximality(&q, &lift(&a), 256).unwrap().verdict;
        let v2 = certify::proximality(&q, &lift(&c), 256).unwrap().verdict;
        prop_assert_eq!(v1, v2);
    }

    #[test]
    fn congruence_order_matches_cyclic_order(entries in prop::collection::vec(0i64..7, 4)) {
        let q = acceptance::rational_extension();
        let m: FieldMatrix = Matrix::from_fn(2, 2, |i, j| q.from_int(entries[i * 2 + j]));
        let det = (entries[0] * entries[3] - entries[1] * entries[2]).rem_euclid(7);
        prop_assume!(det != 0);
        let red = Reduction { prime: 7, theta_root: None, s_root: None };
        let cert = certify::congruence_image_order(&[m], &red, 100_000, Exec::Parallel).unwrap();
        // order of the matrix mod 7 by repeated multiplication
        let mul = |a: [i64; 4], b: [i64; 4]| {
            [
                (a[0] * b[0] + a[1] * b[2]) % 7,
                (a[0] * b[1] + a[1] * b[3]) % 7,
                (a[2] * b[0] + a[3] * b[2]) % 7,
                (a[2] * b[1] + a[3] * b[3]) % 7,
            ]
        };
        let g = [entries[0], entries[1], entries[2], entries[3]];
        let mut x = g;
        let mut order = 1;
        while x != [1, 0, 0, 1] {
            x = mul(x, g);
            order += 1;
        }
        prop_assert_eq!(cert.evidence["order"].as_u64().unwrap(), order);
        prop_assert_eq!(&cert.evidence["divides_ambient_order"], &serde_json::json!(true));
    }

    #[test]
    fn random_forms_admit_unitary_bending(alphas in prop::collection::vec((1i64..9, 1i64..5), 2..5)) {
        let ext = acceptance::rational_extension();
        let f = ext.base().clone();
        let alphas: Vec<AlgebraicNumber> = alphas.iter().map(|(p, q)| f.from_rational(&frac(*p, *q))).collect();
        let n = alphas.len();
        let form = Form::new(&f, alphas).unwrap();
        let b = forms::bending_matrix(&ext, &ext.s(), n).unwrap();
        prop_assert!(forms::su_membership(&ext, &b, &form).unwrap());
        // B* J B computed entrywise: diagonal, with tau(b_ii) b_ii = 1
        let j = form.matrix(&ext);
        let prod = ext.mat_mul(&ext.mat_mul(&forms::conj_transpose(&ext, &b), &j), &b);
        prop_assert!(ext.mat_eq(&prod, &j));
    }
}

proptest! {
    #![proptest_config(cfg(16))]

    #[test]
    fn quadratic_fundamental_units_have_norm_one(d in 2i64..60) {
        let isqrt = (d as f64).sqrt() as i64;
        prop_assume!(isqrt * isqrt != d);
        prop_assume!((2..=isqrt).all(|p| d % (p * p) != 0));
        let f = NumberField::from_i64(&[-d, 0, 1], 1).unwrap();
        let u = units::quadratic_fundamental_unit(&f).unwrap();
        // u = a + b sqrt(d): |a^2 - d b^2| = 1 in integers, and u > 1
        let c = u.coeffs();
        prop_assert!(c.iter().all(|x| x.is_integer() || (x * int(2)).is_integer()));
        let a = &c[0];
        let b = c.get(1).cloned().unwrap_or_else(Rational::zero);
        let norm = a * a - int(d) * &b * &b;
        prop_assert!(norm == Rational::one() || norm == -Rational::one());
        let approx = rational::to_f64(a) + rational::to_f64(&b) * (d as f64).sqrt();
        prop_assert!(approx > 1.0);
    }
}

#[test]
fn unbending_is_the_identity() {
    let (ext, inst) = acceptance::desk();
    let rep = bending::bend(&ext, &inst.with_unit(ext.one())).unwrap();
    assert_eq!(rep, inst.base_rep);
}
