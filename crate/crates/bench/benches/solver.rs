use std::hint::black_box;

use cefai_core::{random_preference, rat, solve, spe_outcomes, IncomeVector, PreferenceOrder};
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

fn profile(m: usize, n: usize) -> Vec<PreferenceOrder> {
    (0..n)
        .map(|i| random_preference(m, 100 + i as u64).unwrap())
        .collect()
}

fn cases() -> Vec<(&'static str, Vec<PreferenceOrder>, IncomeVector)> {
    let t =
        |v: &[(i64, i64)]| IncomeVector::new(v.iter().map(|&(p, q)| rat(p, q)).collect()).unwrap();
    vec![
        ("m3n3", profile(3, 3), t(&[(10, 1), (6, 1), (3, 1)])),
        ("m3n4", profile(3, 4), t(&[(7, 1), (5, 1), (4, 1), (1, 1)])),
        ("m4n2", profile(4, 2), t(&[(9, 1), (5, 1)])),
        ("m4n3", profile(4, 3), t(&[(20, 1), (7, 1), (3, 1)])),
    ]
}

fn bench_solve(c: &mut Criterion) {
    let mut group = c.benchmark_group("solve");
    for (label, prof, incomes) in cases() {
        group.bench_with_input(
            BenchmarkId::from_parameter(label),
            &(prof, incomes),
            |b, (p, t)| b.iter(|| solve(black_box(p), black_box(t)).unwrap()),
        );
    }
    group.finish();
}

fn bench_spe(c: &mut Criterion) {
    let mut group = c.benchmark_group("spe_outcomes");
    for (label, prof, incomes) in cases() {
        let (_, transcript) = solve(&prof, &incomes).unwrap();
        group.bench_with_input(
            BenchmarkId::from_parameter(label),
            &(prof, transcript.game),
            |b, (p, g)| b.iter(|| spe_outcomes(black_box(g), black_box(p))),
        );
    }
    group.finish();
}

criterion_group!(benches, bench_solve, bench_spe);
criterion_main!(benches);
