use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use tmconv_core::{predict_regions, thresholds, BirthDeathChain, OneBitEnv};

fn stationary(c: &mut Criterion) {
    let mut group = c.benchmark_group("stationary");
    for depth in [10u32, 100, 1000] {
        let chain = BirthDeathChain::new(0.2, 0.4, 0.35, depth).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(depth), &chain, |b, chain| {
            b.iter(|| black_box(chain).stationary().unwrap())
        });
    }
    group.finish();
}

fn regions(c: &mut Criterion) {
    let env = OneBitEnv::new(0.9, 0.6, 0.5).unwrap();
    c.bench_function("thresholds", |b| b.iter(|| thresholds(black_box(&env)).unwrap()));
    c.bench_function("predict_regions", |b| b.iter(|| predict_regions(black_box(&env), black_box(3.0)).unwrap()));
}

criterion_group!(benches, stationary, regions);
criterion_main!(benches);
