//! The acceptance suite: nine criteria, each with an exact check, an
//! independent cross-check where one exists, and a runtime limit. Shared by
//! the `acceptance` integration test and `bendlab selftest`.

use std::time::{Duration, Instant};

use nalgebra::DMatrix;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bending;
use crate::certificate::Verdict;
use crate::certify::{self, Reduction, Symmetry};
use crate::config::InstanceFile;
use crate::error::Error;
use crate::field::{Field, Rationals};
use crate::forms::{self, FieldMatrix, Form};
use crate::matrix::{Matrix, MatrixOps};
use crate::numfield::{AlgebraicNumber, LPlace, NumberField, QuadExtension};
use crate::par::Exec;
use crate::pipeline;
use crate::projgeom::{self, CuspModel, CuspType, Domain, ProjPoint, QMatrix};
use crate::rational::{self, frac, int, Rational};
use crate::units::{self, UnitSearchProblem};

pub const DESK_INSTANCE: &str = include_str!("../data/desk/instance.toml");

pub struct Criterion {
    pub id: u8,
    pub name: &'static str,
    /// Words matched by `--filter`.
    pub tags: &'static [&'static str],
    pub limit: Duration,
    pub run: fn() -> Result<String, String>,
}

#[derive(Clone, Debug)]
pub struct CriterionResult {
    pub id: u8,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub elapsed: Duration,
    pub limit: Duration,
}

impl CriterionResult {
    pub fn line(&self) -> String {
        format!(
            "[{}] criterion {} {:<28} {:>8.3}s (limit {}s)  {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.name,
            self.elapsed.as_secs_f64(),
            self.limit.as_secs(),
            self.detail
        )
    }
}

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

pub fn criteria() -> Vec<Criterion> {
    vec![
        Criterion {
            id: 1,
            name: "bending matrices unitary",
            tags: &["bending", "forms", "unitary"],
            limit: Duration::from_secs(1),
            run: bending_unitary,
        },
        Criterion {
            id: 2,
            name: "special unit",
            tags: &["units", "unit"],
            limit: Duration::from_secs(1),
            run: special_unit,
        },
        Criterion {
            id: 3,
            name: "desk instance bent",
            tags: &["desk", "bend", "bending"],
            limit: Duration::from_secs(1),
            run: desk_bent,
        },
        Criterion {
            id: 4,
            name: "hilbert metric",
            tags: &["hilbert", "metric", "projgeom"],
            limit: Duration::from_secs(5),
            run: hilbert_metric,
        },
        Criterion {
            id: 5,
            name: "cusp horospheres",
            tags: &["cusp", "horosphere", "projgeom"],
            limit: Duration::from_secs(2),
            run: cusp_models,
        },
        Criterion {
            id: 6,
            name: "orbit openness",
            tags: &["orbit", "projgeom"],
            limit: Duration::from_secs(2),
            run: orbit_openness,
        },
        Criterion {
            id: 7,
            name: "certification suite",
            tags: &["certify", "proximality", "burnside", "forms"],
            limit: Duration::from_secs(10),
            run: certification_suite,
        },
        Criterion {
            id: 8,
            name: "congruence image",
            tags: &["congruence", "certify", "bfs"],
            limit: Duration::from_secs(5),
            run: congruence,
        },
        Criterion {
            id: 9,
            name: "unit rank identity",
            tags: &["units", "rank", "salem"],
            limit: Duration::from_secs(1),
            run: unit_rank,
        },
    ]
}

pub fn matches_filter(c: &Criterion, filter: &str) -> bool {
    let f = filter.to_lowercase();
    c.name.contains(&f) || c.tags.iter().any(|t| t.contains(&f)) || c.id.to_string() == f
}

pub fn run_criterion(c: &Criterion) -> CriterionResult {
    let start = Instant::now();
    let outcome = (c.run)();
    let elapsed = start.elapsed();
    let (mut passed, mut detail) = match outcome {
        Ok(d) => (true, d),
        Err(d) => (false, d),
    };
    if passed && elapsed > c.limit {
        passed = false;
        detail = format!("over the runtime limit; {detail}");
    }
    CriterionResult {
        id: c.id,
        name: c.name,
        passed,
        detail,
        elapsed,
        limit: c.limit,
    }
}

pub fn run(filter: Option<&str>) -> Vec<CriterionResult> {
    criteria()
        .iter()
        .filter(|c| filter.is_none_or(|f| matches_filter(c, f)))
        .map(run_criterion)
        .collect()
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn rand_rational(r: &mut ChaCha8Rng, num: i64, den: i64) -> Rational {
    frac(r.gen_range(-num..=num), r.gen_range(1..=den))
}

pub fn rational_extension() -> QuadExtension {
    let f = NumberField::rationals();
    let u = f.from_int(units::rational_trace());
    QuadExtension::new(f, u).expect("u = 3 gives a real quadratic extension")
}

pub fn sqrt2_field() -> NumberField {
    // roots ascending: -sqrt2, sqrt2; the identity is sqrt2
    NumberField::from_i64(&[-2, 0, 1], 1).expect("x^2 - 2 is irreducible")
}

/// `L = Q(sqrt2)(s)` with `u` the special unit for threshold 10.
pub fn sqrt2_extension() -> Result<QuadExtension, String> {
    let f = sqrt2_field();
    let prob = UnitSearchProblem::quadratic(f.clone(), int(10)).map_err(|e| e.to_string())?;
    let su = units::find_special_unit(&prob).map_err(|e| e.to_string())?;
    QuadExtension::new(f, su.u).map_err(|e| e.to_string())
}

fn random_alpha(f: &NumberField, r: &mut ChaCha8Rng) -> AlgebraicNumber {
    if f.degree() == 1 {
        return f.from_rational(&frac(r.gen_range(1..=9), r.gen_range(1..=4)));
    }
    // a + b sqrt2 with b > 0 and |a| < b sqrt2: positive at sqrt2, negative at -sqrt2
    let b: i64 = r.gen_range(1..=4);
    let bound = (b as f64 * std::f64::consts::SQRT_2).floor() as i64;
    let a = r.gen_range(-bound..=bound);
    f.element(vec![int(a), int(b)])
}

fn bending_unitary() -> Result<String, String> {
    let mut r = rng(1);
    let mut checked = 0;
    for ext in [rational_extension(), sqrt2_extension()?] {
        let f = ext.base().clone();
        let s = ext.s();
        let units = [s.clone(), ext.mul(&s, &s), ext.neg(&s)];
        for n in 2..=4 {
            for _ in 0..5 {
                let alphas: Vec<_> = (0..n).map(|_| random_alpha(&f, &mut r)).collect();
                let form = Form::new(&f, alphas).map_err(|e| e.to_string())?;
                for u in &units {
                    let b = forms::bending_matrix(&ext, u, n).map_err(|e| e.to_string())?;
                    let ok = forms::su_membership(&ext, &b, &form).map_err(|e| e.to_string())?;
                    ensure!(ok, "B_u not in SU(J) for n = {n} over degree {}", f.degree());
                    // independent: B is diagonal, so B* J B = J reduces to tau(b_ii) b_ii = 1
                    for i in 0..=n {
                        let d = b.get(i, i);
                        ensure!(ext.is_one(&ext.mul(&ext.tau(d), d)), "diagonal entry {i} not unitary");
                    }
                    checked += 1;
                }
            }
        }
        let two = ext.from_int(2);
        ensure!(
            forms::bending_matrix(&ext, &two, 2) == Err(Error::NotUnitary),
            "u = 2 accepted as unitary"
        );
    }
    Ok(format!("{checked} bending matrices in SU(J) exactly"))
}

fn special_unit() -> Result<String, String> {
    let f = sqrt2_field();
    let prob = UnitSearchProblem::quadratic(f.clone(), int(10)).map_err(|e| e.to_string())?;
    let su = units::find_special_unit(&prob).map_err(|e| e.to_string())?;
    let ev = &su.embedding_evidence;
    ensure!(ev.len() == 2, "expected two embeddings");
    ensure!(ev[0].lo() > &int(10), "identity embedding not above 10: {:?}", ev[0]);
    ensure!(
        ev[1].lo().is_positive() && ev[1].hi() < &Rational::one(),
        "other embedding not in (0, 1)"
    );
    ensure!(ev.iter().all(|iv| iv.width_at_most(40)), "evidence wider than 2^-40");
    // independent: u = p + q sqrt2 with p^2 - 2 q^2 = 1 and p + q sqrt2 > 10
    let c = su.u.coeffs();
    let (p, q) = (&c[0], &c[1]);
    ensure!(p * p - int(2) * q * q == Rational::one(), "norm of u is not 1");
    let approx = rational::to_f64(p) + rational::to_f64(q) * std::f64::consts::SQRT_2;
    ensure!(approx > 10.0 && approx.recip() < 1.0, "float check failed");
    let q_field = NumberField::rationals();
    let rank0 = UnitSearchProblem::new(q_field, vec![], int(10)).and_then(|p| units::find_special_unit(&p).map(|_| ()));
    ensure!(rank0 == Err(Error::RankZeroField), "Q did not report RankZeroField: {rank0:?}");
    Ok(format!(
        "u = {} + {} sqrt2, sigma_0 ~ {:.6}, sigma_1 ~ {:.3e}",
        rational::format(p),
        rational::format(q),
        ev[0].to_f64_mid(),
        ev[1].to_f64_mid()
    ))
}

pub fn desk() -> (QuadExtension, bending::BendingInstance) {
    InstanceFile::parse(DESK_INSTANCE)
        .and_then(|f| f.instance())
        .expect("bundled desk instance is valid")
}

fn desk_bent() -> Result<String, String> {
    let (ext, inst) = desk();
    let rep = bending::bend(&ext, &inst).map_err(|e| e.to_string())?;
    for (g, m) in &rep.images {
        let ok = forms::su_membership(&ext, m, &inst.form).map_err(|e| e.to_string())?;
        ensure!(ok, "image of {g} not in SU(J)");
    }
    let b = forms::bending_matrix(&ext, &inst.unit, inst.form.n()).map_err(|e| e.to_string())?;
    let a = inst.base_rep.get("a").ok_or("desk instance lacks `a`")?;
    ensure!(
        forms::centralizes_block(&ext, &b, a).map_err(|e| e.to_string())?,
        "B_s does not commute with a"
    );
    // the stable letter really moved
    ensure!(rep.get("b") != inst.base_rep.get("b"), "bending left b unchanged");
    Ok(format!("{} images in SU(J), B_s centralizes a", rep.images.len()))
}

fn qpoint(xs: &[Rational]) -> ProjPoint {
    ProjPoint::affine(xs)
}

fn random_disk_point(r: &mut ChaCha8Rng) -> ProjPoint {
    loop {
        let x = frac(r.gen_range(-60..=60), 64);
        let y = frac(r.gen_range(-60..=60), 64);
        if &x * &x + &y * &y < frac(3, 4) {
            return qpoint(&[x, y]);
        }
    }
}

fn hilbert_metric() -> Result<String, String> {
    let seg = Domain::Segment { lo: int(-1), hi: int(1) };
    let line = |t: Rational| ProjPoint::new(vec![t, Rational::one()]).unwrap();
    let d = projgeom::hilbert_distance(&seg, &line(int(0)), &line(frac(1, 2)), 48).map_err(|e| e.to_string())?;
    let truth = 0.5 * 3f64.ln();
    ensure!((d.to_f64_mid() - truth).abs() < 1e-12, "segment distance {}", d.to_f64_mid());

    let disk = Domain::Klein { alphas: vec![int(1), int(1)] };
    let a: QMatrix = Matrix::from_rows(vec![
        vec![int(2), int(1), int(2)],
        vec![int(1), int(2), int(2)],
        vec![int(2), int(2), int(3)],
    ])
    .unwrap();
    let j = Matrix::diagonal(&Rationals, &[int(1), int(1), int(-1)]);
    ensure!(
        Rationals.mat_eq(&Rationals.mat_mul(&Rationals.mat_mul(&a.transpose(), &j), &a), &j),
        "A is not in O(J)"
    );
    let mut r = rng(4);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let (x, y) = (random_disk_point(&mut r), random_disk_point(&mut r));
        let d1 = projgeom::hilbert_distance(&disk, &x, &y, 40).map_err(|e| e.to_string())?;
        let (ax, ay) = (x.apply(&a).unwrap(), y.apply(&a).unwrap());
        let d2 = projgeom::hilbert_distance(&disk, &ax, &ay, 40).map_err(|e| e.to_string())?;
        let diff = (d1.to_f64_mid() - d2.to_f64_mid()).abs();
        worst = worst.max(diff);
        ensure!(diff < 1e-10 && d1.overlaps(&d2), "isometry defect {diff}");
        // independent: hyperbolic distance in the Klein model is Hilbert distance
        let f = |p: &ProjPoint| -> [f64; 3] {
            let c = p.normalized();
            let v: Vec<f64> = c.coords().iter().map(rational::to_f64).collect();
            [v[0], v[1], 1.0]
        };
        let (u, v) = (f(&x), f(&y));
        let b = |p: [f64; 3], q: [f64; 3]| p[0] * q[0] + p[1] * q[1] - p[2] * q[2];
        let cosh = b(u, v).abs() / (b(u, u).abs() * b(v, v).abs()).sqrt();
        ensure!((cosh.acosh() - d1.to_f64_mid()).abs() < 1e-9, "Klein formula mismatch");
    }
    let mut triples = 0;
    for dom in [&disk, &seg] {
        for _ in 0..200 {
            let pts: Vec<ProjPoint> = (0..3)
                .map(|_| match dom {
                    Domain::Segment { .. } => line(frac(r.gen_range(-63..=63), 64)),
                    _ => random_disk_point(&mut r),
                })
                .collect();
            let dist = |i: usize, k: usize| projgeom::hilbert_distance(dom, &pts[i], &pts[k], 40).unwrap();
            ensure!(dist(0, 1) == dist(1, 0), "asymmetric distance");
            ensure!(!dist(0, 1).lo().is_negative(), "negative distance");
            if pts[0] != pts[1] {
                ensure!(dist(0, 1).hi().is_positive(), "zero distance for distinct points");
            }
            ensure!(
                dist(0, 2).lo() <= &(dist(0, 1).hi() + dist(1, 2).hi()),
                "triangle inequality violated"
            );
            triples += 1;
        }
    }
    Ok(format!(
        "segment 1/2 log 3 ok; isometry defect <= {worst:.1e}; {triples} triples"
    ))
}

fn half() -> Rational {
    frac(1, 2)
}

fn cusp_models() -> Result<String, String> {
    let mut r = rng(5);
    let mut checked = 0;
    for n in [3usize, 4] {
        let m0 = CuspModel::new(CuspType::Zero, n).unwrap();
        for _ in 0..100 {
            let v: Vec<Rational> = (0..n - 1).map(|_| rand_rational(&mut r, 9, 5)).collect();
            let g = projgeom::cusp_translation(&m0, &Rational::zero(), &v).map_err(|e| e.to_string())?;
            let c = frac(r.gen_range(1..=20), r.gen_range(1..=6));
            let xs: Vec<Rational> = (0..n - 1).map(|_| rand_rational(&mut r, 9, 7)).collect();
            let x1 = &c + half() * xs.iter().map(|t| t * t).sum::<Rational>();
            let mut coords = vec![x1];
            coords.extend(xs);
            let p = qpoint(&coords);
            ensure!(
                projgeom::horosphere_check(&m0, &c, &p, &g).map_err(|e| e.to_string())?,
                "P_0 moved a point off H_c"
            );
            // independent: apply g and evaluate x_1 - |x'|^2 / 2 directly
            let gp = Rationals.mat_vec(&g, p.coords());
            let last = gp[n].clone();
            let y: Vec<Rational> = gp.iter().map(|t| t / &last).collect();
            let val = &y[0] - half() * y[1..n].iter().map(|t| t * t).sum::<Rational>();
            ensure!(val == c, "direct leaf value differs");
            checked += 1;
        }
        let m1 = CuspModel::new(CuspType::One, n).unwrap();
        for _ in 0..50 {
            let v: Vec<Rational> = (0..n - 2).map(|_| rand_rational(&mut r, 9, 5)).collect();
            let c = frac(r.gen_range(1..=20), r.gen_range(1..=6));
            let xs: Vec<Rational> = (0..n - 2).map(|_| rand_rational(&mut r, 9, 7)).collect();
            let x1 = &c + half() * xs.iter().map(|t| t * t).sum::<Rational>();
            let mut coords = vec![x1, Rational::one()];
            coords.extend(xs);
            let p = qpoint(&coords);
            let par = projgeom::cusp_translation(&m1, &Rational::zero(), &v).map_err(|e| e.to_string())?;
            ensure!(
                projgeom::horosphere_check(&m1, &c, &p, &par).map_err(|e| e.to_string())?,
                "parabolic P_1 element moved a point off H_c"
            );
            let mut up = rand_rational(&mut r, 9, 4);
            if up.is_zero() {
                up = int(2);
            }
            let non = projgeom::cusp_translation(&m1, &up, &v).map_err(|e| e.to_string())?;
            ensure!(
                !projgeom::horosphere_check(&m1, &c, &p, &non).map_err(|e| e.to_string())?,
                "non-parabolic element with u = {} kept the leaf",
                rational::format(&up)
            );
            checked += 2;
        }
    }
    Ok(format!("{checked} leaf checks"))
}

/// Numerical rank of the orbit map of the closure of `P_1` at `x`, from
/// finite differences of the group parametrisation `(u, v, w)`.
pub fn sampled_orbit_rank(x: &[f64]) -> usize {
    let n = x.len() - 1;
    let element = |u: f64, v: &[f64], w: f64| -> DMatrix<f64> {
        let mut g = DMatrix::<f64>::identity(n + 1, n + 1);
        g[(1, 1)] = u;
        for (k, vk) in v.iter().enumerate() {
            g[(0, k + 2)] = *vk;
            g[(k + 2, n)] = *vk;
        }
        g[(0, n)] = w;
        g
    };
    let xv = nalgebra::DVector::from_column_slice(x);
    let h = 1e-6;
    let params = n; // u, w, and n - 2 translations
    let mut cols: Vec<nalgebra::DVector<f64>> = Vec::with_capacity(params + 1);
    for i in 0..params {
        let mut plus = vec![0.0; params];
        let mut minus = vec![0.0; params];
        plus[i] = h;
        minus[i] = -h;
        let eval = |d: &[f64]| element(1.0 + d[0], &d[2..], d[1]) * &xv;
        cols.push((eval(&plus) - eval(&minus)) / (2.0 * h));
    }
    cols.push(xv.clone());
    let m = DMatrix::from_columns(&cols);
    let scale = m.iter().fold(0.0f64, |a, b| a.max(b.abs())).max(1.0);
    m.svd(false, false).rank(1e-8 * scale) - 1
}

fn orbit_openness() -> Result<String, String> {
    let n = 3;
    let vals = [-1i64, 0, 1, 2];
    let mut grid = Vec::new();
    'outer: for a in vals {
        for b in vals {
            for c in vals {
                for d in vals {
                    if [a, b, c, d] != [0, 0, 0, 0] {
                        grid.push([a, b, c, d]);
                    }
                    if grid.len() == 200 {
                        break 'outer;
                    }
                }
            }
        }
    }
    let mut open = 0;
    for p in &grid {
        let x = ProjPoint::from_ints(p).unwrap();
        let res = projgeom::orbit_openness(&x, n).map_err(|e| e.to_string())?;
        let expected = p[1] != 0 && p[3] != 0;
        ensure!(res.open == expected, "openness wrong at {p:?}: {res:?}");
        open += usize::from(res.open);
    }
    let spots: [[i64; 4]; 10] = [
        [1, 1, 0, 1],
        [1, 0, 0, 0],
        [1, 0, 1, 0],
        [0, 1, 0, 0],
        [0, 0, 0, 1],
        [2, -1, 1, 1],
        [1, 1, 1, 0],
        [0, 1, 1, 1],
        [0, 0, 1, 1],
        [1, 2, 0, 0],
    ];
    for p in spots {
        let exact = projgeom::orbit_openness(&ProjPoint::from_ints(&p).unwrap(), n).unwrap().rank;
        let x: Vec<f64> = p.iter().map(|&t| t as f64).collect();
        let sampled = sampled_orbit_rank(&x);
        ensure!(exact == sampled, "rank at {p:?}: exact {exact}, sampled {sampled}");
    }
    Ok(format!("{open}/200 grid points open, 10 spot ranks agree"))
}

fn int_matrix(ext: &QuadExtension, rows: &[&[i64]]) -> FieldMatrix {
    Matrix::from_rows(
        rows.iter()
            .map(|r| r.iter().map(|&x| ext.from_int(x)).collect())
            .collect(),
    )
    .unwrap()
}

/// `f64` image at the identity place.
fn to_f64_matrix(ext: &QuadExtension, m: &FieldMatrix) -> DMatrix<f64> {
    DMatrix::from_fn(m.rows(), m.cols(), |i, j| ext.embed(m.get(i, j), 0, 60).unwrap().to_f64_mid())
}

/// Independent span count: words as `f64` matrices, rank by SVD.
fn numeric_span(ext: &QuadExtension, gens: &[FieldMatrix], cap: usize) -> usize {
    let mut letters: Vec<DMatrix<f64>> = gens.iter().map(|g| to_f64_matrix(ext, g)).collect();
    let inv: Vec<_> = letters.iter().map(|m| m.clone().try_inverse().unwrap()).collect();
    letters.extend(inv);
    let k = letters[0].nrows();
    let mut level = vec![DMatrix::<f64>::identity(k, k)];
    let mut all = level.clone();
    for _ in 0..cap.min(4) {
        level = level.iter().flat_map(|w| letters.iter().map(move |l| w * l)).collect();
        all.extend(level.iter().cloned());
    }
    let cols: Vec<nalgebra::DVector<f64>> = all
        .iter()
        .map(|m| {
            let n = m.norm();
            nalgebra::DVector::from_iterator(k * k, m.iter().map(|x| x / n))
        })
        .collect();
    DMatrix::from_columns(&cols).svd(false, false).rank(1e-9)
}

fn certification_suite() -> Result<String, String> {
    let q = rational_extension();
    let a = int_matrix(&q, &[&[1, 0, 0], &[0, 2, 1], &[0, 3, 2]]);
    let c = certify::proximality(&q, &a, 256).map_err(|e| e.to_string())?;
    ensure!(c.verdict == Verdict::Pass, "block element not proximal: {:?}", c.evidence);
    let cell = &c.evidence["top_eigenvalue"];
    let lo = rational::parse(cell[0].as_str().unwrap()).unwrap();
    let hi = rational::parse(cell[1].as_str().unwrap()).unwrap();
    let top = 2.0 + 3f64.sqrt();
    ensure!(
        rational::to_f64(&lo) <= top && top <= rational::to_f64(&hi),
        "top eigenvalue cell misses 2 + sqrt3"
    );
    let id = int_matrix(&q, &[&[1, 0, 0], &[0, 1, 0], &[0, 0, 1]]);
    ensure!(
        certify::proximality(&q, &id, 256).map_err(|e| e.to_string())?.verdict == Verdict::Fail,
        "identity not rejected"
    );
    let rot: FieldMatrix = Matrix::from_rows(vec![
        vec![q.from_rational(&frac(3, 5)), q.from_rational(&frac(-4, 5)), q.zero()],
        vec![q.from_rational(&frac(4, 5)), q.from_rational(&frac(3, 5)), q.zero()],
        vec![q.zero(), q.zero(), q.one()],
    ])
    .unwrap();
    ensure!(
        certify::proximality(&q, &rot, 256).map_err(|e| e.to_string())?.verdict == Verdict::Fail,
        "rotation not rejected"
    );

    let (ext, inst) = desk();
    let bent = bending::bend(&ext, &inst).map_err(|e| e.to_string())?.matrices();
    let unbent = inst.base_rep.matrices();
    let span = certify::word_span(&ext, &bent, 6).map_err(|e| e.to_string())?;
    ensure!(span.dimension == 9, "bent span {}", span.dimension);
    ensure!(numeric_span(&ext, &bent, 6) == 9, "numeric span of bent pair differs");
    let single = certify::burnside_irreducibility(&ext, std::slice::from_ref(&a), 6).map_err(|e| e.to_string())?;
    ensure!(single.evidence["span_dimension"] == 3, "single generator span");
    ensure!(numeric_span(&q, &[a], 6) == 3, "numeric span of a differs");

    let sym = certify::invariant_forms(&ext, &unbent, Symmetry::Symmetric).map_err(|e| e.to_string())?;
    ensure!(!sym.is_empty(), "no symmetric form for unbent generators");
    ensure!(certify::in_span(&ext, &sym, &inst.form.matrix(&ext)), "J not among the invariant forms");
    let bent_sym = certify::invariant_forms(&ext, &bent, Symmetry::Symmetric).map_err(|e| e.to_string())?;
    ensure!(bent_sym.is_empty(), "finding: bent pair preserves a symmetric form of dimension {}", bent_sym.len());
    let bent_alt = certify::invariant_forms(&ext, &bent, Symmetry::Antisymmetric).map_err(|e| e.to_string())?;
    ensure!(bent_alt.is_empty(), "finding: bent pair preserves an antisymmetric form");
    Ok(format!(
        "proximal top in [{}, {}]; spans 9 and 3; symmetric forms {} unbent, 0 bent",
        rational::format(&lo),
        rational::format(&hi),
        sym.len()
    ))
}

fn congruence() -> Result<String, String> {
    let q = rational_extension();
    let e = |i: usize, j: usize| {
        let mut m = Matrix::identity(&q, 3);
        m.set(i, j, q.one());
        m
    };
    let sl32 = vec![e(0, 1), e(1, 0), e(1, 2), e(2, 1)];
    let p2 = Reduction {
        prime: 2,
        theta_root: None,
        s_root: None,
    };
    let run = |gens: &[FieldMatrix], red: &Reduction, exec: Exec| {
        certify::congruence_image_order(gens, red, certify::DEFAULT_BFS_BUDGET, exec).map_err(|e| e.to_string())
    };
    let first = run(&sl32, &p2, Exec::Parallel)?;
    ensure!(first.evidence["order"] == 168, "SL(3,2) order {}", first.evidence["order"]);
    ensure!(first.passed(), "SL(3,2) not certified full");
    let second = run(&sl32, &p2, Exec::Parallel)?;
    let seq = run(&sl32, &p2, Exec::Sequential)?;
    let bytes = |c: &crate::certificate::Certificate| serde_json::to_vec(c).unwrap();
    ensure!(bytes(&first) == bytes(&second), "two runs differ");
    ensure!(bytes(&first) == bytes(&seq), "sequential and parallel runs differ");
    // independent: |SL(3,2)| from the order formula and a direct count
    let direct = (0u32..512)
        .filter(|bits| {
            let m: Vec<i64> = (0..9).map(|i| i64::from((bits >> i) & 1)).collect();
            let det = m[0] * (m[4] * m[8] - m[5] * m[7]) - m[1] * (m[3] * m[8] - m[5] * m[6]) + m[2] * (m[3] * m[7] - m[4] * m[6]);
            det.rem_euclid(2) == 1
        })
        .count();
    ensure!(direct == 168 && certify::sl_order(3, 2) == 168.into(), "order formula disagrees");

    let (ext, inst) = desk();
    let mut runs = vec![first];
    let diag = int_matrix(&q, &[&[2, 0, 0], &[0, 4, 0], &[0, 0, 1]]);
    let p7 = Reduction { prime: 7, ..p2.clone() };
    runs.push(run(&[diag], &p7, Exec::Parallel)?);
    for p in [3u64, 5, 7] {
        let red = Reduction {
            prime: p,
            theta_root: None,
            s_root: None,
        };
        runs.push(run(&inst.base_rep.matrices(), &red, Exec::Parallel)?);
    }
    let _ = ext;
    for c in &runs {
        ensure!(c.evidence["divides_ambient_order"] == true, "Lagrange check failed: {:?}", c.evidence);
    }
    let orders: Vec<String> = runs.iter().map(|c| c.evidence["order"].to_string()).collect();
    Ok(format!("SL(3,2) = 168 deterministic; orders {}", orders.join(", ")))
}

fn unit_rank() -> Result<String, String> {
    let mut parts = Vec::new();
    for ext in [rational_extension(), sqrt2_extension()?] {
        let rep = units::unit_rank_report(&ext).map_err(|e| e.to_string())?;
        let d = rep.degree_f;
        // 2 + (2d - 2)/2 - 1 = d
        ensure!(rep.real_places_l == 2, "real places {}", rep.real_places_l);
        ensure!(rep.complex_places_l == (2 * d - 2) / 2, "complex places {}", rep.complex_places_l);
        ensure!(rep.rank_l == rep.real_places_l + rep.complex_places_l - 1 && rep.rank_l == d, "rank of L");
        ensure!(rep.real_roots_of_s == 2, "real conjugates of s");
        let s = ext.s();
        for (i, p) in ext.places().iter().enumerate() {
            if let LPlace::Complex { .. } = p {
                let m = ext.modulus(&s, i, 40).map_err(|e| e.to_string())?;
                ensure!(m.contains(&Rational::one()) && m.width_at_most(40), "|s| != 1 at place {i}");
            }
        }
        parts.push(format!("[F:Q] = {d}: rank O_L = {}", rep.rank_l));
    }
    Ok(parts.join("; "))
}

/// Reproduces an artifact that has a checked-in golden copy.
pub fn golden_artifacts() -> Vec<(&'static str, fn() -> Result<Vec<u8>, String>)> {
    vec![
        ("desk_report.json", || {
            pipeline::desk_run()
                .map(|r| pipeline::to_bytes(&r.report))
                .map_err(|e| e.error.to_string())
        }),
        ("desk_rep.json", || {
            pipeline::desk_run()
                .map(|r| pipeline::to_bytes(&r.rep))
                .map_err(|e| e.error.to_string())
        }),
        ("sl32_congruence.json", || {
            let q = rational_extension();
            let e = |i: usize, j: usize| {
                let mut m = Matrix::identity(&q, 3);
                m.set(i, j, q.one());
                m
            };
            let red = Reduction {
                prime: 2,
                theta_root: None,
                s_root: None,
            };
            let c = certify::congruence_image_order(&[e(0, 1), e(1, 0), e(1, 2), e(2, 1)], &red, certify::DEFAULT_BFS_BUDGET, Exec::Parallel)
                .map_err(|e| e.to_string())?;
            Ok(pipeline::to_bytes(&serde_json::to_value(c).unwrap()))
        }),
    ]
}

pub fn golden_dir() -> std::path::PathBuf {
    std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("data").join("golden")
}

/// Compares each golden file in `dir` with a fresh computation.
pub fn check_goldens(dir: &std::path::Path) -> Vec<(String, Result<(), String>)> {
    golden_artifacts()
        .into_iter()
        .map(|(name, make)| {
            let path = dir.join(name);
            let outcome = match (std::fs::read(&path), make()) {
                (Err(e), _) => Err(format!("cannot read {}: {e}", path.display())),
                (_, Err(e)) => Err(format!("cannot regenerate: {e}")),
                (Ok(want), Ok(got)) if want == got => Ok(()),
                (Ok(_), Ok(_)) => Err(format!("{} differs from a fresh computation", path.display())),
            };
            (name.to_string(), outcome)
        })
        .collect()
}
