use std::hint::black_box;

use apuf_bench::{striped, two_anchor_setup};
use apuf_core::{
    bin_size_1, challenge_to_phi, expected_report_1, expected_report_2, feasible_region, mc_response_similarity,
    predict_2, profile_for_rho, response_similarity, Challenge, McConfig, Response, SimilarityFactor,
};
use criterion::{criterion_group, criterion_main, Criterion};

fn correlation(c: &mut Criterion) {
    let a = striped(128, 3);
    let b = striped(128, 5);
    c.bench_function("response_similarity n=128", |bench| {
        bench.iter(|| response_similarity(black_box(&a), black_box(&b)).unwrap())
    });
    let challenge: Challenge = "01".repeat(64).parse().unwrap();
    c.bench_function("challenge_to_phi n=128", |bench| bench.iter(|| challenge_to_phi(black_box(&challenge))));
}

fn prediction(c: &mut Criterion) {
    let (k1, k2, target) = two_anchor_setup(64);
    c.bench_function("predict_2 n=64", |bench| {
        bench.iter(|| predict_2(black_box(&k1), black_box(&k2), black_box(&target)).unwrap())
    });
}

fn counting(c: &mut Criterion) {
    c.bench_function("bin_size_1 n=128 s=64", |bench| {
        bench.iter(|| bin_size_1(black_box(SimilarityFactor::from_twice(128)), 128).unwrap())
    });
    let p12 = profile_for_rho(64, 0.0).unwrap();
    c.bench_function("feasible_region n=64", |bench| bench.iter(|| feasible_region(black_box(64), p12).unwrap()));
}

fn expectations(c: &mut Criterion) {
    c.bench_function("expected_report_1 n=128", |bench| bench.iter(|| expected_report_1(black_box(128)).unwrap()));
    let mut group = c.benchmark_group("expected_report_2");
    group.sample_size(10);
    for n in [32usize, 128] {
        group.bench_function(format!("n={n}"), |bench| {
            bench.iter(|| expected_report_2(black_box(n), 0.5, Response::Plus, Response::Plus).unwrap())
        });
    }
    group.finish();
}

fn monte_carlo(c: &mut Criterion) {
    let a = striped(32, 2);
    let b = striped(32, 7);
    let cfg = McConfig::new(32, 1.0, 1 << 16, 11);
    let mut group = c.benchmark_group("mc");
    group.sample_size(10);
    group.bench_function("response_similarity n=32 N=65536", |bench| {
        bench.iter(|| mc_response_similarity(black_box(&cfg), &a, &b).unwrap())
    });
    group.finish();
}

criterion_group!(benches, correlation, prediction, counting, expectations, monte_carlo);
criterion_main!(benches);
