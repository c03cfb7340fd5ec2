use std::hint::black_box;

use cefai_core::{
    ce_exists, counterexample_4x4, counterexample_5x2, random_preference, rat, IncomeVector,
};
use criterion::{criterion_group, criterion_main, Criterion};

fn bench_counterexamples(c: &mut Criterion) {
    let mut group = c.benchmark_group("ce_exists");
    group.sample_size(20);
    for inst in [counterexample_4x4(), counterexample_5x2()] {
        let prof = inst.profile().unwrap();
        group.bench_function(inst.label.as_str(), |b| {
            b.iter(|| ce_exists(black_box(&prof), black_box(&inst.reference)).unwrap())
        });
    }
    let prof: Vec<_> = (0..3)
        .map(|i| random_preference(4, 7 + i).unwrap())
        .collect();
    let t = IncomeVector::new(vec![rat(20, 1), rat(6, 1), rat(3, 1)]).unwrap();
    group.bench_function("random-four-items-three-agents", |b| {
        b.iter(|| ce_exists(black_box(&prof), black_box(&t)).unwrap())
    });
    group.finish();
}

criterion_group!(benches, bench_counterexamples);
criterion_main!(benches);
