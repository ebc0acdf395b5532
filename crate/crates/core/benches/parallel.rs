//! Sequential against rayon-parallel execution for the two data-parallel
//! kernels: the congruence-image BFS and batched Hilbert distances.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use bendlab::acceptance;
use bendlab::certify::{self, Reduction};
use bendlab::field::Field;
use bendlab::matrix::Matrix;
use bendlab::par::Exec;
use bendlab::projgeom::{self, Domain, ProjPoint};
use bendlab::rational::frac;

const MODES: [(&str, Exec); 2] = [("sequential", Exec::Sequential), ("parallel", Exec::Parallel)];

fn bfs(c: &mut Criterion) {
    let q = acceptance::rational_extension();
    let e = |i: usize, j: usize| {
        let mut m = Matrix::identity(&q, 3);
        m.set(i, j, q.one());
        m
    };
    let gens = vec![e(0, 1), e(1, 0), e(1, 2), e(2, 1)];
    let mut group = c.benchmark_group("congruence_bfs_sl3");
    group.sample_size(10);
    for p in [3u64, 5] {
        let red = Reduction {
            prime: p,
            theta_root: None,
            s_root: None,
        };
        for (name, exec) in MODES {
            group.bench_with_input(BenchmarkId::new(name, p), &red, |b, red| {
                b.iter(|| certify::congruence_image_order(&gens, red, certify::DEFAULT_BFS_BUDGET, exec).unwrap())
            });
        }
    }
    group.finish();
}

fn hilbert(c: &mut Criterion) {
    let disk = Domain::Klein {
        alphas: vec![frac(1, 1), frac(2, 1)],
    };
    let pairs: Vec<(ProjPoint, ProjPoint)> = (0..64)
        .map(|i| {
            let x = ProjPoint::affine(&[frac(i % 7 - 3, 8), frac(i % 5 - 2, 8)]);
            let y = ProjPoint::affine(&[frac(2 - i % 3, 7), frac(i % 4 - 1, 9)]);
            (x, y)
        })
        .filter(|(x, y)| x != y)
        .collect();
    let mut group = c.benchmark_group("hilbert_batch_64");
    group.sample_size(10);
    for (name, exec) in MODES {
        group.bench_function(name, |b| b.iter(|| projgeom::hilbert_batch(&disk, &pairs, 53, exec)));
    }
    group.finish();
}

criterion_group!(benches, bfs, hilbert);
criterion_main!(benches);
