use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};

use iqae_core::{
    ci_from_counts, derive_stream, find_next_k, run_iqae, Amplitude, BernoulliOracle, IqaeConfig,
    RoundParams,
};

fn estimation(c: &mut Criterion) {
    let params = RoundParams::new(200, 0.017, 133).unwrap();
    c.bench_function("ci_from_counts k=200 n=100", |b| {
        b.iter(|| ci_from_counts(black_box(37), black_box(100), &params).unwrap())
    });
    c.bench_function("find_next_k k=40", |b| {
        b.iter(|| {
            find_next_k(
                black_box(40),
                black_box(0.5232),
                black_box(0.5241),
                2.0,
                1571,
            )
        })
    });
}

fn engine(c: &mut Criterion) {
    let config = IqaeConfig::default();
    let mut group = c.benchmark_group("run_iqae");
    for a in [0.1, 0.2505, 0.7] {
        let oracle = BernoulliOracle::new(Amplitude::new(a).unwrap());
        let mut task = 0u64;
        group.bench_function(format!("a={a}"), |b| {
            b.iter(|| {
                task += 1;
                run_iqae(&config, &oracle, &mut derive_stream(1, task)).unwrap()
            })
        });
    }
    group.finish();
}

criterion_group!(benches, estimation, engine);
criterion_main!(benches);
