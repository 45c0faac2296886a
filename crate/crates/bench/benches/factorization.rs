use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use nswiener_core::factorization::{spectral_factor, triangular_inverse};
use nswiener_core::random::factor_sample;
use nswiener_core::{IndexWindow, NSOperator};

fn stationary(c: &mut Criterion) {
    let mut group = c.benchmark_group("factor stationary");
    for len in [41usize, 201] {
        let half = (len / 2) as i64;
        let w = NSOperator::scalar(
            IndexWindow::new(-half, half).unwrap(),
            &[
                (-1, vec![0.5; len]),
                (0, vec![1.25; len]),
                (1, vec![0.5; len]),
            ],
        )
        .unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(len), &w, |b, w| {
            b.iter(|| spectral_factor(black_box(w), 10, 1e-6).unwrap())
        });
    }
    group.finish();
}

fn random_family(c: &mut Criterion) {
    let mut group = c.benchmark_group("factor random");
    group.sample_size(20);
    for (m, b) in [(1, 1), (2, 2)] {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let sample = factor_sample(&mut rng, m, b, IndexWindow::new(0, 39).unwrap(), 0.4);
        group.bench_with_input(
            BenchmarkId::new(format!("m{m}"), format!("b{b}")),
            &sample.gram,
            |bch, w| bch.iter(|| spectral_factor(black_box(w), 40, 1e-6).unwrap()),
        );
    }
    group.finish();
}

fn inverse(c: &mut Criterion) {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let sample = factor_sample(&mut rng, 2, 2, IndexWindow::new(0, 199).unwrap(), 0.4);
    c.bench_function("triangular inverse m2 b2 len200", |b| {
        b.iter(|| triangular_inverse(black_box(&sample.factor), 1e-10, 48).unwrap())
    });
}

criterion_group!(benches, stationary, random_family, inverse);
criterion_main!(benches);
