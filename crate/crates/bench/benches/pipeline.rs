use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use subrank_core::{
    build_pattern, find_certificate, generic_subrank, instantiate, rank_mod_p, validate,
    PrimeField, RandomAssignment, TensorShape, MERSENNE_61,
};

const SIZES: [usize; 4] = [10, 20, 40, 64];

fn cubic(n: usize) -> (usize, TensorShape) {
    let shape = TensorShape::new(vec![n; 3]).unwrap();
    (generic_subrank(&shape).q, shape)
}

fn pattern(c: &mut Criterion) {
    let mut group = c.benchmark_group("build_pattern");
    for n in SIZES {
        let (r, shape) = cubic(n);
        group.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, _| {
            b.iter(|| build_pattern(black_box(r), &shape).unwrap())
        });
    }
    group.finish();
}

fn certificate(c: &mut Criterion) {
    let mut group = c.benchmark_group("certificate");
    for n in SIZES {
        let (r, shape) = cubic(n);
        let pm = build_pattern(r, &shape).unwrap();
        group.bench_with_input(BenchmarkId::new("find", n), &pm, |b, pm| {
            b.iter(|| find_certificate(pm).unwrap())
        });
        let cert = find_certificate(&pm).unwrap();
        group.bench_with_input(BenchmarkId::new("validate", n), &pm, |b, pm| {
            b.iter(|| validate(pm, &cert))
        });
    }
    group.finish();
}

fn rank(c: &mut Criterion) {
    let field = PrimeField::new(MERSENNE_61).unwrap();
    let mut group = c.benchmark_group("rank_mod_p");
    group.sample_size(10);
    for n in SIZES {
        let (r, shape) = cubic(n);
        let pm = build_pattern(r, &shape).unwrap();
        let m = instantiate(&pm, &RandomAssignment::generate(&pm, 0, field)).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(n), &m, |b, m| {
            b.iter(|| rank_mod_p(m))
        });
    }
    group.finish();
}

criterion_group!(benches, pattern, certificate, rank);
criterion_main!(benches);
