use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use mesowig::ensemble::{sample_matrix, EnsembleSpec};
use mesowig::spectral;
use num_complex::Complex64;

fn bench_sample_matrix(c: &mut Criterion) {
    let mut group = c.benchmark_group("sample_matrix");
    group.sample_size(20);
    for n in [256usize, 512] {
        let goe = EnsembleSpec::goe(n, 7);
        group.bench_with_input(BenchmarkId::new("goe", n), &goe, |b, spec| {
            let mut idx = 0u64;
            b.iter(|| {
                idx += 1;
                black_box(sample_matrix(spec, idx).unwrap())
            })
        });
        let gue = EnsembleSpec::gue(n, 7);
        group.bench_with_input(BenchmarkId::new("gue", n), &gue, |b, spec| {
            let mut idx = 0u64;
            b.iter(|| {
                idx += 1;
                black_box(sample_matrix(spec, idx).unwrap())
            })
        });
    }
    group.finish();
}

fn bench_eigenvalues(c: &mut Criterion) {
    let mut group = c.benchmark_group("eigenvalues");
    group.sample_size(10);
    for n in [256usize, 512] {
        let goe = sample_matrix(&EnsembleSpec::goe(n, 7), 0).unwrap();
        group.bench_with_input(BenchmarkId::new("goe", n), &goe, |b, m| {
            b.iter(|| black_box(spectral::eigenvalues(m, 1e-10).unwrap()))
        });
        let gue = sample_matrix(&EnsembleSpec::gue(n, 7), 0).unwrap();
        group.bench_with_input(BenchmarkId::new("gue", n), &gue, |b, m| {
            b.iter(|| black_box(spectral::eigenvalues(m, 1e-10).unwrap()))
        });
    }
    group.finish();
}

fn bench_resolvent_matrix(c: &mut Criterion) {
    let mut group = c.benchmark_group("resolvent_matrix");
    group.sample_size(10);
    let n = 256usize;
    let m = sample_matrix(&EnsembleSpec::goe(n, 7), 0).unwrap();
    let z = Complex64::new(0.1, (n as f64).powf(-0.5));
    group.bench_function(BenchmarkId::new("goe", n), |b| {
        b.iter(|| black_box(spectral::resolvent_matrix(&m, z).unwrap()))
    });
    group.finish();
}

criterion_group!(
    benches,
    bench_sample_matrix,
    bench_eigenvalues,
    bench_resolvent_matrix
);
criterion_main!(benches);
