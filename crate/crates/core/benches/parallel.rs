use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use dilation_core::bohr::{bohr_lift, sample_modulus_with};
use dilation_core::criteria::{orthogonality_test_with, CriteriaOptions};
use dilation_core::exec::Exec;
use dilation_core::io::{random, RandomSpec};
use dilation_core::scalar::Exact;
use dilation_core::series::{gram_with, TruncatedSeries};

const POLICIES: [(&str, Exec); 2] = [("sequential", Exec::Sequential), ("parallel", Exec::Parallel)];

fn fixture<R: dilation_core::scalar::Real>(degree_cap: usize) -> TruncatedSeries<R> {
    random(&RandomSpec {
        degree_cap,
        support: degree_cap / 2,
        seed: 3,
        leading: true,
        range: 5,
    })
    .unwrap()
}

fn gram(c: &mut Criterion) {
    let mut group = c.benchmark_group("gram");
    let exact: TruncatedSeries<Exact> = fixture(64);
    let float: TruncatedSeries<f64> = fixture(256);
    for (name, exec) in POLICIES {
        group.bench_with_input(BenchmarkId::new("exact_N64_K32", name), &exec, |b, &exec| {
            b.iter(|| gram_with(black_box(&exact), -1.0, 32, exec).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("float_N256_K64", name), &exec, |b, &exec| {
            b.iter(|| gram_with(black_box(&float), 0.5, 64, exec).unwrap())
        });
    }
    group.finish();
}

fn residuals(c: &mut Criterion) {
    let mut group = c.benchmark_group("orthogonality");
    let exact: TruncatedSeries<Exact> = fixture(128);
    for (name, exec) in POLICIES {
        let opts = CriteriaOptions { exec, ..Default::default() };
        group.bench_with_input(BenchmarkId::new("exact_N128_K24", name), &opts, |b, opts| {
            b.iter(|| orthogonality_test_with(black_box(&exact), 0.0, 24, opts).unwrap())
        });
    }
    group.finish();
}

fn sampling(c: &mut Criterion) {
    let mut group = c.benchmark_group("torus_sampling");
    group.sample_size(20);
    let lift = bohr_lift(&fixture::<f64>(512)).unwrap();
    for (name, exec) in POLICIES {
        group.bench_with_input(BenchmarkId::new("N512_20k", name), &exec, |b, &exec| {
            b.iter(|| sample_modulus_with(black_box(&lift), 20_000, 11, exec).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, gram, residuals, sampling);
criterion_main!(benches);
