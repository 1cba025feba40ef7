//! Benchmarks for the hot kernels: the semi-discrete solve, the exact
//! transportation LP, the line-ensemble estimator, and envelope
//! evaluation.

use brenier::convexfun::{moreau_yosida, SampledFunction1D};
use brenier::crofton::{crofton_boundary, sample_lines};
use brenier::geometry::ConvexDomain;
use brenier::measures::{w1_discrete, DiscreteMeasure, GridDensity};
use brenier::otsolve::{brenier_1d, solve_semidiscrete, SolveOptions};
use criterion::{criterion_group, criterion_main, Criterion};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::hint::black_box;

fn random_atoms(rng: &mut ChaCha8Rng, k: usize, dim: usize) -> DiscreteMeasure {
    let pts = (0..k)
        .map(|_| {
            [
                rng.gen_range(0.05..0.95),
                if dim == 2 { rng.gen_range(0.05..0.95) } else { 0.0 },
            ]
        })
        .collect();
    DiscreteMeasure::uniform_on(pts, dim).unwrap()
}

fn bench_semidiscrete(c: &mut Criterion) {
    let rho = GridDensity::uniform(ConvexDomain::box2([0.0, 0.0], [1.0, 1.0]).unwrap(), 128)
        .unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mu = random_atoms(&mut rng, 6, 2);
    c.bench_function("solve_semidiscrete_128x128_6atoms", |b| {
        b.iter(|| solve_semidiscrete(black_box(&rho), black_box(&mu), &SolveOptions::default()))
    });
}

fn bench_oracle_1d(c: &mut Criterion) {
    let rho = GridDensity::uniform(ConvexDomain::interval(0.0, 1.0).unwrap(), 1024).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mu = random_atoms(&mut rng, 200, 1);
    c.bench_function("brenier_1d_1024_200atoms", |b| {
        b.iter(|| brenier_1d(black_box(&rho), black_box(&mu)))
    });
}

fn bench_transport_lp(c: &mut Criterion) {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let a = random_atoms(&mut rng, 100, 2);
    let bm = random_atoms(&mut rng, 100, 2);
    c.bench_function("transport_lp_100x100", |b| {
        b.iter(|| w1_discrete(black_box(&a), black_box(&bm)))
    });
}

fn bench_crofton(c: &mut Criterion) {
    let square = ConvexDomain::box2([0.0, 0.0], [1.0, 1.0]).unwrap();
    let ens = sample_lines(100_000, 2.0, 4);
    c.bench_function("crofton_square_100k_lines", |b| {
        b.iter(|| crofton_boundary(black_box(&square), black_box(&ens)))
    });
}

fn bench_envelope(c: &mut Criterion) {
    let f = SampledFunction1D::from_fn(-2.0, 2.0, 64, |x| x.abs().powf(1.5));
    let env = moreau_yosida(&f, 0.1).unwrap();
    c.bench_function("moreau_envelope_eval_64breaks", |b| {
        b.iter(|| {
            let mut acc = 0.0;
            for i in 0..256 {
                acc += env.eval(-1.9 + 3.8 * i as f64 / 255.0);
            }
            black_box(acc)
        })
    });
}

criterion_group!(
    benches,
    bench_semidiscrete,
    bench_oracle_1d,
    bench_transport_lp,
    bench_crofton,
    bench_envelope
);
criterion_main!(benches);
