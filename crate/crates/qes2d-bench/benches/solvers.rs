//! Benchmarks for the hot paths: recurrence spectra, zero-system solves,
//! normalized multiplets with their Gram matrices, and the 1D
//! finite-difference oracle.

use criterion::{criterion_group, criterion_main, Criterion};
use std::hint::black_box;

use qes2d::interbasis::gram_parabolic_factorized;
use qes2d::niven::solve_niven;
use qes2d::oracle::{parabolic_separation_oracle, ParabolicAxis};
use qes2d::recurrence::{
    build_elliptic_recurrence, build_parabolic_recurrence, separation_eigenvalues,
};
use qes2d::wavefn::parabolic_multiplet;
use qes2d::{ModelV1, ModelV2, Sign};

fn bench_solvers(c: &mut Criterion) {
    let m1 = ModelV1::new(1.0, 1.0, 1.5, Sign::Plus).unwrap();
    let m2 = ModelV2::new(1.0, 0.5, 1.5, Sign::Plus, Sign::Plus).unwrap();

    c.bench_function("parabolic_spectrum_n16", |b| {
        b.iter(|| {
            let rec = build_parabolic_recurrence(black_box(&m1), black_box(16));
            separation_eigenvalues(&rec).unwrap()
        })
    });

    c.bench_function("elliptic_spectrum_n16", |b| {
        b.iter(|| {
            let rec =
                build_elliptic_recurrence(black_box(&m2), black_box(16), black_box(2.0)).unwrap();
            separation_eigenvalues(&rec).unwrap()
        })
    });

    c.bench_function("niven_n5_q2", |b| {
        b.iter(|| solve_niven(black_box(&m1), black_box(5), black_box(2)).unwrap())
    });

    c.bench_function("parabolic_gram_factorized_n3", |b| {
        b.iter(|| {
            let states = parabolic_multiplet(black_box(&m1), black_box(3)).unwrap();
            gram_parabolic_factorized(&states).unwrap()
        })
    });

    c.bench_function("axis_oracle_grid400", |b| {
        b.iter(|| {
            parabolic_separation_oracle(black_box(&m1), black_box(3), black_box(400), ParabolicAxis::Xi)
                .unwrap()
        })
    });
}

criterion_group!(benches, bench_solvers);
criterion_main!(benches);
