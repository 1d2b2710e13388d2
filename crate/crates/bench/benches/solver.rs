use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use enfix_core::comparison::{numeric_k, ComparisonFunction, Family, Variant};
use enfix_core::contraction::verify;
use enfix_core::diagnostics::{
    check_wellposedness, SequenceKind, SequenceRecipe, DEFAULT_LENGTH, DEFAULT_TOL,
};
use enfix_core::registry;
use enfix_core::solver::{solve, StopRule};

fn bench_solve(c: &mut Criterion) {
    let mut g = c.benchmark_group("solve");
    for grid in [11, 101, 1001] {
        let spec = registry::ex3_8(grid).unwrap();
        let u0 = spec.space().constant(1.0);
        g.bench_with_input(BenchmarkId::new("multiply", grid), &grid, |b, _| {
            b.iter(|| solve(&spec, black_box(&u0), &StopRule::default()).unwrap())
        });
    }
    let t2 = registry::ex2_3_t2().unwrap();
    let u0 = enfix_core::Vector::scalar(100.0);
    g.bench_function("piecewise", |b| {
        b.iter(|| solve(&t2, black_box(&u0), &StopRule::default()).unwrap())
    });
    g.finish();
}

fn bench_verify(c: &mut Criterion) {
    let spec = registry::ex3_6(101).unwrap();
    c.bench_function("verify/grid-101/1000-pairs", |b| {
        b.iter(|| verify(&spec, black_box(42), 1000).unwrap())
    });
}

fn bench_numeric_k(c: &mut Criterion) {
    let f = ComparisonFunction::weighted_sum(1.0 / 3.0, 0.25, 0.25, Variant::APrime).unwrap();
    c.bench_function("numeric_k/weighted-sum/500", |b| {
        b.iter(|| numeric_k(&f, Variant::APrime, black_box(7), 500).unwrap())
    });
    let f = ComparisonFunction::scaled(Family::GeometricMean, 0.9, Variant::A).unwrap();
    c.bench_function("numeric_k/geometric-mean/500", |b| {
        b.iter(|| numeric_k(&f, Variant::A, black_box(7), 500).unwrap())
    });
}

fn bench_diagnostics(c: &mut Criterion) {
    let spec = registry::ex3_9().unwrap();
    let p = enfix_core::Vector::scalar(1.0);
    let recipe = SequenceRecipe::new(
        SequenceKind::PowerDecay { exponent: 2.0 },
        p.clone(),
        DEFAULT_LENGTH,
    )
    .unwrap();
    c.bench_function("wellposedness/scalar/10k", |b| {
        b.iter(|| check_wellposedness(&spec, black_box(&p), &recipe, DEFAULT_TOL).unwrap())
    });
}

criterion_group!(
    benches,
    bench_solve,
    bench_verify,
    bench_numeric_k,
    bench_diagnostics
);
criterion_main!(benches);
