use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use psdeq_bench::fixture;
use psdeq_core::tolerance::DEFAULT_TOL_SCALE;
use psdeq_core::{
    build_rhs, matrix_power, solve_kronecker, solve_spectral, spectral_decompose, ConstructionParams, EquationInstance,
};

fn bench_spectral(c: &mut Criterion) {
    let mut group = c.benchmark_group("spectral");
    for dim in [4usize, 16, 64] {
        let (a, _) = fixture(dim, 1);
        group.bench_with_input(BenchmarkId::new("decompose", dim), &a, |bch, a| {
            bch.iter(|| spectral_decompose(black_box(a)).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("power_0.37", dim), &a, |bch, a| {
            bch.iter(|| matrix_power(black_box(a), 0.37).unwrap())
        });
    }
    group.finish();
}

fn bench_solvers(c: &mut Criterion) {
    let mut group = c.benchmark_group("solve");
    for dim in [4usize, 8, 16] {
        let (a, b) = fixture(dim, 2);
        let inst = EquationInstance::new(a, 4, b, DEFAULT_TOL_SCALE).unwrap();
        group.bench_with_input(BenchmarkId::new("spectral", dim), &inst, |bch, inst| {
            bch.iter(|| solve_spectral(black_box(inst)).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("kronecker", dim), &inst, |bch, inst| {
            bch.iter(|| solve_kronecker(black_box(inst)).unwrap())
        });
    }
    group.finish();
}

fn bench_construction(c: &mut Criterion) {
    let p = ConstructionParams::new(3, 4, 3, 0.5, 2.0).unwrap();
    let mut group = c.benchmark_group("build_rhs");
    for dim in [4usize, 16, 64] {
        let (a, b) = fixture(dim, 3);
        group.bench_with_input(BenchmarkId::from_parameter(dim), &(a, b), |bch, (a, b)| {
            bch.iter(|| build_rhs(black_box(a), black_box(b), &p, DEFAULT_TOL_SCALE).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, bench_spectral, bench_solvers, bench_construction);
criterion_main!(benches);
