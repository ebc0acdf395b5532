//! Convex projective geometry: cross ratios, Hilbert distances, the cusp
//! domains `Omega_0` and `Omega_1` with their translation groups, orbit
//! openness for the Zariski closure of `P_1`, and the duality map.

use std::cmp::Ordering;
use std::fmt::Write as _;

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::field::{Field, Rationals};
use crate::interval::Interval;
use crate::matrix::{Matrix, MatrixOps};
use crate::par::Exec;
use crate::rational::{self, Rational};

pub type QMatrix = Matrix<Rational>;

/// A point of projective space in homogeneous rational coordinates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProjPoint {
    coords: Vec<Rational>,
}

impl ProjPoint {
    pub fn new(coords: Vec<Rational>) -> Result<Self> {
        if coords.iter().all(Zero::is_zero) {
            return Err(Error::ZeroVector);
        }
        Ok(ProjPoint { coords })
    }

    pub fn from_ints(coords: &[i64]) -> Result<Self> {
        ProjPoint::new(coords.iter().map(|&c| rational::int(c)).collect())
    }

    /// Affine point `(x_1, ..., x_n, 1)`.
    pub fn affine(xs: &[Rational]) -> Self {
        let mut coords = xs.to_vec();
        coords.push(Rational::one());
        ProjPoint { coords }
    }

    pub fn coords(&self) -> &[Rational] {
        &self.coords
    }

    pub fn dim(&self) -> usize {
        self.coords.len() - 1
    }

    pub fn in_affine_patch(&self) -> bool {
        !self.coords.last().unwrap().is_zero()
    }

    /// Scales so that the last coordinate is 1, when possible. Idempotent.
    pub fn normalized(&self) -> Self {
        match self.coords.last() {
            Some(l) if !l.is_zero() && !l.is_one() => ProjPoint {
                coords: self.coords.iter().map(|c| c / l).collect(),
            },
            _ => self.clone(),
        }
    }

    pub fn same_point(&self, other: &ProjPoint) -> bool {
        self.coords.len() == other.coords.len() && Rationals.rank(&two_rows(self, other)) == 1
    }

    pub fn apply(&self, g: &QMatrix) -> Result<ProjPoint> {
        if g.cols() != self.coords.len() {
            return Err(Error::SizeMismatch("matrix and point".into()));
        }
        ProjPoint::new(Rationals.mat_vec(g, &self.coords)).map_err(|_| Error::Singular)
    }
}

fn two_rows(a: &ProjPoint, b: &ProjPoint) -> QMatrix {
    Matrix::from_rows(vec![a.coords.clone(), b.coords.clone()]).unwrap()
}

/// Cross ratio `[a:x:y:b] = |b-x||y-a| / (|x-a||b-y|)` of four collinear
/// points, computed from 2x2 minors in a coordinate pair where the line is
/// nondegenerate.
pub fn cross_ratio(a: &ProjPoint, x: &ProjPoint, y: &ProjPoint, b: &ProjPoint) -> Result<Rational> {
    let n = a.coords.len();
    if [x, y, b].iter().any(|p| p.coords.len() != n) {
        return Err(Error::SizeMismatch("points of different dimension".into()));
    }
    let all = Matrix::from_rows(vec![
        a.coords.clone(),
        x.coords.clone(),
        y.coords.clone(),
        b.coords.clone(),
    ])
    .unwrap();
    if Rationals.rank(&all) > 2 {
        return Err(Error::NotCollinear);
    }
    if a.same_point(x) || b.same_point(y) || a.same_point(b) {
        return Err(Error::CoincidentPoints);
    }
    let (i, j) = (0..n)
        .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
        .find(|&(i, j)| !minor(a, b, i, j).is_zero())
        .expect("a and b are distinct");
    let num = minor(b, x, i, j).abs() * minor(y, a, i, j).abs();
    let den = minor(x, a, i, j).abs() * minor(b, y, i, j).abs();
    Ok(num / den)
}

fn minor(p: &ProjPoint, q: &ProjPoint, i: usize, j: usize) -> Rational {
    &p.coords[i] * &q.coords[j] - &p.coords[j] * &q.coords[i]
}

/// Convex domains with a Hilbert metric.
#[derive(Clone, Debug, PartialEq)]
pub enum Domain {
    /// The open interval `(lo, hi)`; points are `[t : 1]`.
    Segment { lo: Rational, hi: Rational },
    /// `{ sum alpha_i x_i^2 < x_{n+1}^2 }` for positive rational alphas.
    Klein { alphas: Vec<Rational> },
    /// `x_1 x_{n+1} > (x_2^2 + ... + x_n^2) / 2`.
    Omega0 { n: usize },
    /// `x_1 x_{n+1} > -log|x_2| + (x_3^2 + ... + x_n^2) / 2`, `x_2 x_{n+1} > 0`.
    Omega1 { n: usize },
}

impl Domain {
    pub fn dim(&self) -> usize {
        match self {
            Domain::Segment { .. } => 1,
            Domain::Klein { alphas } => alphas.len(),
            Domain::Omega0 { n } | Domain::Omega1 { n } => *n,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Domain::Segment { .. } => "segment",
            Domain::Klein { .. } => "klein",
            Domain::Omega0 { .. } => "omega0",
            Domain::Omega1 { .. } => "omega1",
        }
    }

    /// Sign of the defining function at an affine point (chart
    /// `x_{n+1} = 1`): positive inside, zero on the boundary.
    fn classify(&self, x: &[Rational]) -> Ordering {
        match self {
            Domain::Segment { lo, hi } => {
                let t = &x[0];
                (t - lo).signum().cmp(&Rational::zero()).min((hi - t).signum().cmp(&Rational::zero()))
            }
            Domain::Klein { alphas } => {
                let q: Rational = alphas.iter().zip(x).map(|(a, xi)| a * xi * xi).sum();
                Rational::one().cmp(&q)
            }
            Domain::Omega0 { .. } => omega0_value(x).cmp(&Rational::zero()),
            Domain::Omega1 { .. } => {
                if !x[1].is_positive() {
                    return if x[1].is_zero() { Ordering::Equal } else { Ordering::Less };
                }
                let poly = omega1_poly(x);
                if x[1].is_one() {
                    return poly.cmp(&Rational::zero());
                }
                let mut bits = 32;
                loop {
                    let g = Interval::point(x[1].clone())
                        .ln(bits)
                        .unwrap()
                        .add(&Interval::point(poly.clone()));
                    if g.is_positive() {
                        return Ordering::Greater;
                    }
                    if g.is_negative() {
                        return Ordering::Less;
                    }
                    bits *= 2;
                }
            }
        }
    }

    /// Affine coordinates of an interior point, or the reason it is not one.
    pub fn interior_chart(&self, p: &ProjPoint) -> Result<Vec<Rational>> {
        if p.dim() != self.dim() {
            return Err(Error::SizeMismatch(format!(
                "point of dimension {} in a domain of dimension {}",
                p.dim(),
                self.dim()
            )));
        }
        if !p.in_affine_patch() {
            return Err(Error::PointOutside);
        }
        let q = p.normalized();
        let x = q.coords[..q.dim()].to_vec();
        match self.classify(&x) {
            Ordering::Greater => Ok(x),
            Ordering::Equal => Err(Error::PointOnBoundary),
            Ordering::Less => Err(Error::PointOutside),
        }
    }
}

/// `x_1 - (x_2^2 + ... + x_n^2) / 2` in the chart.
fn omega0_value(x: &[Rational]) -> Rational {
    let half = rational::frac(1, 2);
    &x[0] - half * x[1..].iter().map(|c| c * c).sum::<Rational>()
}

/// `x_1 - (x_3^2 + ... + x_n^2) / 2` in the chart (the non-log part).
fn omega1_poly(x: &[Rational]) -> Rational {
    let half = rational::frac(1, 2);
    &x[0] - half * x[2..].iter().map(|c| c * c).sum::<Rational>()
}

/// A chord endpoint parameter `t` on `x + t (y - x)`, possibly at infinity.
#[derive(Clone, Debug)]
enum Endpoint {
    Finite(Interval),
    Infinite,
}

/// Hilbert distance `d(x, y) = (1/2) log [a:x:y:b]`, certified to width
/// `2^-bits`.
pub fn hilbert_distance(domain: &Domain, x: &ProjPoint, y: &ProjPoint, bits: u32) -> Result<Interval> {
    let mut xa = domain.interior_chart(x)?;
    let mut ya = domain.interior_chart(y)?;
    if xa == ya {
        return Ok(Interval::zero());
    }
    // A canonical order makes the result exactly symmetric.
    if ya < xa {
        std::mem::swap(&mut xa, &mut ya);
    }
    if let Domain::Segment { lo, hi } = domain {
        let (s, t) = (&xa[0], &ya[0]);
        let (s, t) = if s < t { (s, t) } else { (t, s) };
        let cr = (hi - s) * (t - lo) / ((s - lo) * (hi - t));
        return Ok(half_log(&Interval::point(cr), bits));
    }
    let d: Vec<Rational> = ya.iter().zip(&xa).map(|(b, a)| b - a).collect();
    let mut work = bits + 16;
    loop {
        let (ta, tb) = chord_endpoints(domain, &xa, &d, work);
        let cr = cross_ratio_from_params(&ta, &tb);
        let dist = half_log(&cr, work);
        if dist.width_at_most(bits + 1) {
            return Ok(dist.round_out(bits + 2));
        }
        work += work / 2;
    }
}

fn half_log(cr: &Interval, bits: u32) -> Interval {
    let l = cr.ln(bits + 2).expect("cross ratio is positive");
    let h = l.scale(&rational::frac(1, 2));
    if h.lo().is_negative() {
        Interval::new(Rational::zero(), h.hi().clone().max(Rational::zero()))
    } else {
        h
    }
}

/// `[a:x:y:b]` with `x = 0`, `y = 1`, `a = ta < 0`, `b = tb > 1` on the
/// parameter line.
fn cross_ratio_from_params(ta: &Endpoint, tb: &Endpoint) -> Interval {
    let one = Interval::point(Rational::one());
    match (ta, tb) {
        (Endpoint::Finite(a), Endpoint::Finite(b)) => {
            let num = b.mul(&one.sub(a));
            let den = a.neg().mul(&b.sub(&one));
            num.div(&den).expect("endpoints separated from x and y")
        }
        (Endpoint::Infinite, Endpoint::Finite(b)) => b.div(&b.sub(&one)).expect("b > 1"),
        (Endpoint::Finite(a), Endpoint::Infinite) => one.sub(a).div(&a.neg()).expect("a < 0"),
        (Endpoint::Infinite, Endpoint::Infinite) => one,
    }
}

fn chord_endpoints(domain: &Domain, x: &[Rational], d: &[Rational], work: u32) -> (Endpoint, Endpoint) {
    match domain {
        Domain::Segment { .. } => unreachable!("handled exactly"),
        Domain::Klein { alphas } => {
            // Q(t) = sum alpha_i (x_i + t d_i)^2 - 1 < 0 inside
            let a: Rational = alphas.iter().zip(d).map(|(al, di)| al * di * di).sum();
            let b: Rational = alphas
                .iter()
                .zip(x.iter().zip(d))
                .map(|(al, (xi, di))| rational::int(2) * al * xi * di)
                .sum();
            let c: Rational = alphas.iter().zip(x).map(|(al, xi)| al * xi * xi).sum::<Rational>() - Rational::one();
            quadratic_chord(&a, &b, &c, work)
        }
        Domain::Omega0 { .. } => {
            // Q(t) = (1/2) sum_{i>=2} (x_i + t d_i)^2 - (x_1 + t d_1) < 0 inside
            let half = rational::frac(1, 2);
            let a: Rational = &half * d[1..].iter().map(|c| c * c).sum::<Rational>();
            let b: Rational = x[1..].iter().zip(&d[1..]).map(|(p, q)| p * q).sum::<Rational>() - &d[0];
            let c = -omega0_value(x);
            quadratic_chord(&a, &b, &c, work)
        }
        Domain::Omega1 { .. } => (
            omega1_endpoint(x, &d.iter().map(|c| -c).collect::<Vec<_>>(), work, true),
            omega1_endpoint(x, d, work, false),
        ),
    }
}

/// Roots of `a t^2 + b t + c` with `c < 0` and `a >= 0`: one negative
/// root and one positive root (or infinity when `a = 0`).
fn quadratic_chord(a: &Rational, b: &Rational, c: &Rational, work: u32) -> (Endpoint, Endpoint) {
    debug_assert!(c.is_negative());
    if a.is_zero() {
        debug_assert!(!b.is_zero());
        let r = Interval::point(-c / b);
        return if b.is_positive() {
            (Endpoint::Infinite, Endpoint::Finite(r))
        } else {
            (Endpoint::Finite(r), Endpoint::Infinite)
        };
    }
    let disc = b * b - rational::int(4) * a * c;
    let root = Interval::point(disc).sqrt(work).expect("positive discriminant");
    let two_a = rational::int(2) * a;
    let inv = Rational::one() / two_a;
    let mb = Interval::point(-b.clone());
    let lo = mb.sub(&root).scale(&inv);
    let hi = mb.add(&root).scale(&inv);
    (Endpoint::Finite(lo), Endpoint::Finite(hi))
}

/// Value of `g(t) = x_1(t) + log x_2(t) - |x'(t)|^2 / 2` on the chord,
/// enclosed; `None` when `x_2(t) <= 0` (outside).
fn omega1_g(x: &[Rational], d: &[Rational], t: &Rational, work: u32) -> Option<Interval> {
    let p: Vec<Rational> = x.iter().zip(d).map(|(a, b)| a + t * b).collect();
    if !p[1].is_positive() {
        return None;
    }
    let l = Interval::point(p[1].clone()).ln(work)?;
    Some(l.add(&Interval::point(omega1_poly(&p))))
}

/// The boundary crossing of the ray `x + t d`, `t > 0`, returned as a
/// parameter of the chord `x + t (y - x)`. With `negate` the ray is
/// `x - t d'` and the parameter is reported as `-t`.
fn omega1_endpoint(x: &[Rational], d: &[Rational], work: u32, negate: bool) -> Endpoint {
    let quad_zero = d[2..].iter().all(Zero::is_zero);
    if quad_zero && !d[0].is_negative() && !d[1].is_negative() {
        return Endpoint::Infinite;
    }
    // g is concave on x_2(t) > 0 with g(0) > 0; find an outside point.
    let limit = if d[1].is_negative() {
        Some(-&x[1] / &d[1])
    } else {
        None
    };
    // Sign of g at t, raising precision until decided; `None` on the
    // boundary. For x_2(t) != 1 the value is never exactly zero.
    let sign = |t: &Rational| -> Option<Ordering> {
        let mut bits = work;
        loop {
            match omega1_g(x, d, t, bits) {
                None => return Some(Ordering::Less),
                Some(g) if g.is_positive() => return Some(Ordering::Greater),
                Some(g) if g.is_negative() => return Some(Ordering::Less),
                Some(g) if g.is_point() => return None,
                Some(_) => bits *= 2,
            }
        }
    };
    let mut lo = Rational::zero();
    let mut hi = match &limit {
        Some(l) => l.clone(),
        None => {
            let mut t = Rational::one();
            loop {
                match sign(&t) {
                    Some(Ordering::Greater) => lo = t.clone(),
                    Some(_) => break t,
                    None => return finish(Interval::point(t), negate),
                }
                t *= rational::int(2);
            }
        }
    };
    let target = rational::two_pow(-(work as i64));
    let half = rational::frac(1, 2);
    while &hi - &lo > target {
        let mid = (&lo + &hi) * &half;
        match sign(&mid) {
            Some(Ordering::Greater) => lo = mid,
            Some(_) => hi = mid,
            None => return finish(Interval::point(mid), negate),
        }
    }
    finish(Interval::new(lo, hi), negate)
}

fn finish(iv: Interval, negate: bool) -> Endpoint {
    Endpoint::Finite(if negate { iv.neg() } else { iv })
}

/// Distances for many pairs, evaluated under the given executor.
pub fn hilbert_batch(
    domain: &Domain,
    pairs: &[(ProjPoint, ProjPoint)],
    bits: u32,
    exec: Exec,
) -> Vec<Result<Interval>> {
    exec.map(pairs, |(x, y)| hilbert_distance(domain, x, y, bits))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CuspType {
    Zero,
    One,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CuspModel {
    pub kind: CuspType,
    pub n: usize,
}

impl CuspModel {
    pub fn new(kind: CuspType, n: usize) -> Result<Self> {
        let min = match kind {
            CuspType::Zero => 1,
            CuspType::One => 2,
        };
        if n < min {
            return Err(Error::DimensionTooSmall(format!("n = {n}")));
        }
        Ok(CuspModel { kind, n })
    }

    pub fn domain(&self) -> Domain {
        match self.kind {
            CuspType::Zero => Domain::Omega0 { n: self.n },
            CuspType::One => Domain::Omega1 { n: self.n },
        }
    }
}

/// Matrix of the cusp group element with parameters `(u, v)`.
///
/// Type 0 uses `v` in `Q^{n-1}` (and ignores `u`). Type 1 uses `v` in
/// `Q^{n-2}`: with `u = 0` it is the parabolic element (diagonal entry 1,
/// corner `|v|^2 / 2`); otherwise `u` itself is placed on the diagonal as
/// in the Zariski closure, with corner `-u + |v|^2 / 2`.
pub fn cusp_translation(model: &CuspModel, u: &Rational, v: &[Rational]) -> Result<QMatrix> {
    let n = model.n;
    let size = n + 1;
    let half = rational::frac(1, 2);
    let norm2: Rational = v.iter().map(|c| c * c).sum();
    let mut m = Matrix::identity(&Rationals, size);
    match model.kind {
        CuspType::Zero => {
            if v.len() != n - 1 {
                return Err(Error::SizeMismatch(format!("type 0 needs {} translation entries", n - 1)));
            }
            for (k, vk) in v.iter().enumerate() {
                m.set(0, k + 1, vk.clone());
                m.set(k + 1, n, vk.clone());
            }
            m.set(0, n, half * norm2);
        }
        CuspType::One => {
            if v.len() != n - 2 {
                return Err(Error::SizeMismatch(format!("type 1 needs {} translation entries", n - 2)));
            }
            for (k, vk) in v.iter().enumerate() {
                m.set(0, k + 2, vk.clone());
                m.set(k + 2, n, vk.clone());
            }
            if u.is_zero() {
                m.set(0, n, half * norm2);
            } else {
                m.set(1, 1, u.clone());
                m.set(0, n, -u + half * norm2);
            }
        }
    }
    Ok(m)
}

/// True iff a type-1 translation with these parameters is parabolic.
pub fn is_parabolic(u: &Rational) -> bool {
    u.is_zero()
}

/// Horosphere function: `x_1 - |x'|^2/2` (type 0) or
/// `x_1 + log x_2 - |x''|^2/2` (type 1), in the chart `x_{n+1} = 1`.
/// Returns the exact value when it is rational.
fn leaf_value(model: &CuspModel, x: &[Rational]) -> Option<Rational> {
    match model.kind {
        CuspType::Zero => Some(omega0_value(x)),
        CuspType::One => (x[1].is_one()).then(|| omega1_poly(x)),
    }
}

/// Does `g` map the point `p` of the leaf `H_c` back into `H_c`?
pub fn horosphere_check(model: &CuspModel, c: &Rational, p: &ProjPoint, g: &QMatrix) -> Result<bool> {
    if p.dim() != model.n || g.rows() != model.n + 1 || !g.is_square() {
        return Err(Error::SizeMismatch("point, matrix and model disagree".into()));
    }
    if !c.is_positive() || !p.in_affine_patch() {
        return Err(Error::NotOnLeaf);
    }
    let q = p.normalized();
    let x = &q.coords[..model.n];
    if leaf_value(model, x).as_ref() != Some(c) {
        return Err(Error::NotOnLeaf);
    }
    let gp = p.apply(g)?;
    if !gp.in_affine_patch() {
        return Ok(false);
    }
    let gq = gp.normalized();
    let y = &gq.coords[..model.n];
    if model.kind == CuspType::One && !y[1].is_positive() {
        return Ok(false);
    }
    if let Some(v) = leaf_value(model, y) {
        return Ok(&v == c);
    }
    // x_2 != 1: log x_2 is irrational for rational x_2 != 1, so the value
    // differs from c; certify the separation.
    let poly = omega1_poly(y) - c;
    let mut bits = 32;
    loop {
        let val = Interval::point(y[1].clone()).ln(bits).unwrap().add(&Interval::point(poly.clone()));
        if !val.contains_zero() {
            return Ok(false);
        }
        bits *= 2;
    }
}

#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize)]
pub struct OrbitRank {
    pub rank: usize,
    pub open: bool,
}

/// Tangent directions at the identity of the closure of `P_1`: the `n-2`
/// translations `v`, the corner `w`, and the diagonal `u`.
pub fn p1_closure_tangent_basis(n: usize) -> Vec<QMatrix> {
    let size = n + 1;
    let unit = |i: usize, j: usize| {
        let mut m = Matrix::zeros(&Rationals, size, size);
        m.set(i, j, Rational::one());
        m
    };
    let mut basis = Vec::with_capacity(n);
    for k in 0..n.saturating_sub(2) {
        basis.push(Rationals.mat_add(&unit(0, k + 2), &unit(k + 2, n)));
    }
    basis.push(unit(0, n));
    basis.push(unit(1, 1));
    basis
}

/// Rank of the orbit map of the closure of `P_1` at `[x]`, as a map into
/// the tangent space `V / <x>` of projective space.
pub fn orbit_openness(x: &ProjPoint, n: usize) -> Result<OrbitRank> {
    if x.dim() != n {
        return Err(Error::SizeMismatch(format!("point must have {} coordinates", n + 1)));
    }
    if n < 2 {
        return Err(Error::DimensionTooSmall(format!("n = {n}")));
    }
    let mut rows: Vec<Vec<Rational>> = p1_closure_tangent_basis(n)
        .iter()
        .map(|xm| Rationals.mat_vec(xm, x.coords()))
        .collect();
    rows.push(x.coords().to_vec());
    let rank = Rationals.rank(&Matrix::from_rows(rows).unwrap()) - 1;
    Ok(OrbitRank { rank, open: rank == n })
}

/// `(g^-1)^t`.
pub fn dual_element<K: Field>(k: &K, g: &Matrix<K::Elem>) -> Result<Matrix<K::Elem>> {
    if !g.is_square() {
        return Err(Error::SizeMismatch("dual of a non-square matrix".into()));
    }
    k.inverse(g).map(|gi| gi.transpose()).ok_or(Error::Singular)
}

/// SVG of a 2-dimensional section (`n = 2`, chart `x_3 = 1`) of a cusp
/// domain with a few horosphere leaves.
pub fn cusp_svg(model: &CuspModel, leaves: &[f64]) -> String {
    let (w, h) = (480.0, 360.0);
    let (xmin, xmax, ymin, ymax) = match model.kind {
        CuspType::Zero => (-3.0, 3.0, -0.5, 5.0),
        CuspType::One => (0.02, 4.0, -2.0, 5.0),
    };
    let sx = |x: f64| (x - xmin) / (xmax - xmin) * w;
    let sy = |y: f64| h - (y - ymin) / (ymax - ymin) * h;
    // Horizontal axis: x_2; vertical axis: x_1.
    let curve = |c: f64| -> String {
        let mut s = String::new();
        let steps = 200;
        for i in 0..=steps {
            let t = xmin + (xmax - xmin) * i as f64 / steps as f64;
            let x1 = match model.kind {
                CuspType::Zero => c + 0.5 * t * t,
                CuspType::One => c - t.ln(),
            };
            let cmd = if i == 0 { 'M' } else { 'L' };
            let _ = write!(s, "{cmd}{:.2},{:.2} ", sx(t), sy(x1));
        }
        s
    };
    let mut svg = String::new();
    let _ = writeln!(
        svg,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\" viewBox=\"0 0 {w} {h}\">"
    );
    let _ = writeln!(svg, "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>");
    let _ = writeln!(
        svg,
        "<path d=\"{}\" fill=\"none\" stroke=\"black\" stroke-width=\"2\"/>",
        curve(0.0)
    );
    for &c in leaves {
        let _ = writeln!(
            svg,
            "<path d=\"{}\" fill=\"none\" stroke=\"steelblue\" stroke-width=\"1\"/>",
            curve(c)
        );
    }
    let label = match model.kind {
        CuspType::Zero => "type 0",
        CuspType::One => "type 1",
    };
    let _ = writeln!(svg, "<text x=\"8\" y=\"18\" font-size=\"14\">{label}</text>");
    svg.push_str("</svg>\n");
    svg
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{frac, int};

    fn line_point(t: Rational) -> ProjPoint {
        ProjPoint::new(vec![t, Rational::one()]).unwrap()
    }

    #[test]
    fn cross_ratio_examples() {
        let p = |t| line_point(t);
        let cr = cross_ratio(&p(int(-1)), &p(int(0)), &p(frac(1, 2)), &p(int(1))).unwrap();
        assert_eq!(cr, int(3));
        let cr = cross_ratio(&p(int(-1)), &p(int(0)), &p(int(0)), &p(int(1))).unwrap();
        assert_eq!(cr, int(1));
        assert_eq!(
            cross_ratio(&p(int(0)), &p(int(0)), &p(int(1)), &p(int(2))),
            Err(Error::CoincidentPoints)
        );
        let q = |a: i64, b: i64, c: i64| ProjPoint::from_ints(&[a, b, c]).unwrap();
        assert_eq!(
            cross_ratio(&q(1, 0, 1), &q(0, 1, 1), &q(1, 1, 1), &q(2, 0, 1)),
            Err(Error::NotCollinear)
        );
    }

    #[test]
    fn segment_distance() {
        let dom = Domain::Segment { lo: int(-1), hi: int(1) };
        let d = hilbert_distance(&dom, &line_point(int(0)), &line_point(frac(1, 2)), 50).unwrap();
        let truth = 0.5 * 3f64.ln();
        assert!((d.to_f64_mid() - truth).abs() < 1e-13);
        assert!(d.width_at_most(50));
        assert_eq!(
            hilbert_distance(&dom, &line_point(int(1)), &line_point(int(0)), 20),
            Err(Error::PointOnBoundary)
        );
    }

    #[test]
    fn klein_matches_hyperbolic_formula() {
        // Klein disk: d(0, r) = atanh(r)
        let dom = Domain::Klein { alphas: vec![int(1), int(1)] };
        let o = ProjPoint::from_ints(&[0, 0, 1]).unwrap();
        let p = ProjPoint::affine(&[frac(1, 2), int(0)]);
        let d = hilbert_distance(&dom, &o, &p, 40).unwrap();
        assert!((d.to_f64_mid() - 0.5f64.atanh()).abs() < 1e-11);
    }

    #[test]
    fn omega1_distance_is_finite_and_symmetric() {
        let dom = Domain::Omega1 { n: 2 };
        let x = ProjPoint::affine(&[int(1), int(1)]);
        let y = ProjPoint::affine(&[int(2), frac(1, 2)]);
        let d1 = hilbert_distance(&dom, &x, &y, 30).unwrap();
        let d2 = hilbert_distance(&dom, &y, &x, 30).unwrap();
        assert_eq!(d1, d2);
        assert!(d1.is_positive());
        assert!(d1.width_at_most(30));
    }

    #[test]
    fn type0_translation_matrix() {
        let model = CuspModel::new(CuspType::Zero, 3).unwrap();
        let g = cusp_translation(&model, &int(0), &[int(1), int(2)]).unwrap();
        let expected: Vec<Vec<Rational>> = vec![
            vec![int(1), int(1), int(2), frac(5, 2)],
            vec![int(0), int(1), int(0), int(1)],
            vec![int(0), int(0), int(1), int(2)],
            vec![int(0), int(0), int(0), int(1)],
        ];
        assert_eq!(g.to_rows(), expected);
        let id = cusp_translation(&model, &int(0), &[int(0), int(0)]).unwrap();
        assert!(Rationals.is_identity(&id));
    }

    #[test]
    fn orbit_examples() {
        let x = ProjPoint::from_ints(&[1, 1, 0, 1]).unwrap();
        assert_eq!(orbit_openness(&x, 3).unwrap(), OrbitRank { rank: 3, open: true });
        let e1 = ProjPoint::from_ints(&[1, 0, 0, 0]).unwrap();
        assert_eq!(orbit_openness(&e1, 3).unwrap().rank, 0);
        let p = ProjPoint::from_ints(&[1, 0, 1, 0]).unwrap();
        assert!(!orbit_openness(&p, 3).unwrap().open);
        assert_eq!(ProjPoint::from_ints(&[0, 0, 0]), Err(Error::ZeroVector));
    }

    #[test]
    fn horospheres() {
        let m0 = CuspModel::new(CuspType::Zero, 3).unwrap();
        let g = cusp_translation(&m0, &int(0), &[int(1), frac(-2, 3)]).unwrap();
        // x_1 = c + (x_2^2 + x_3^2)/2 with c = 2
        let p = ProjPoint::affine(&[int(2) + frac(1, 2) * (int(1) + frac(1, 4)), int(1), frac(1, 2)]);
        assert!(horosphere_check(&m0, &int(2), &p, &g).unwrap());
        let inflate = Rationals.mat_scale(&Matrix::identity(&Rationals, 4), &int(2));
        let mut bump = inflate.clone();
        bump.set(3, 3, int(1));
        assert!(!horosphere_check(&m0, &int(2), &p, &bump).unwrap());

        let m1 = CuspModel::new(CuspType::One, 3).unwrap();
        let q = ProjPoint::affine(&[int(3) + frac(1, 2) * frac(1, 9), int(1), frac(1, 3)]);
        let par = cusp_translation(&m1, &int(0), &[int(5)]).unwrap();
        assert!(horosphere_check(&m1, &int(3), &q, &par).unwrap());
        let non = cusp_translation(&m1, &int(2), &[int(5)]).unwrap();
        assert!(!horosphere_check(&m1, &int(3), &q, &non).unwrap());
    }

    #[test]
    fn duality() {
        let g = Matrix::from_rows(vec![vec![int(2), int(1)], vec![int(1), int(1)]]).unwrap();
        let dd = dual_element(&Rationals, &dual_element(&Rationals, &g).unwrap()).unwrap();
        assert_eq!(dd, g);
        let s = Matrix::from_rows(vec![vec![int(1), int(1)], vec![int(1), int(1)]]).unwrap();
        assert_eq!(dual_element(&Rationals, &s), Err(Error::Singular));
    }
}
