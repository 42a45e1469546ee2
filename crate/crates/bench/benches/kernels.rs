use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use gadic_bases::gadic;
use gadic_bases::partition::thm2_partition;
use gadic_bases::sumset;
use gadic_bases::{Thm1Decomposer, Thm2Decomposer};
use gadic_bases_bench::{dense, thm1_inputs, thm1_params, thm2_params};
use std::hint::black_box;

fn expand(c: &mut Criterion) {
    let mut group = c.benchmark_group("expand");
    for bits in [64u32, 1024, 16384] {
        let n = dense(bits);
        for g in [2u32, 3, 10] {
            group.bench_with_input(BenchmarkId::new(format!("g{g}"), bits), &n, |b, n| {
                b.iter(|| gadic::expand(black_box(n), g).unwrap())
            });
        }
    }
    group.finish();
}

fn hfold(c: &mut Criterion) {
    let spec = thm2_partition(&thm2_params()).unwrap();
    let mut group = c.benchmark_group("hfold");
    group.sample_size(10);
    for log in [12u32, 16, 18] {
        let bound = 1u64 << log;
        let a = sumset::restrict_union(&spec, 2, bound);
        group.bench_with_input(BenchmarkId::from_parameter(bound), &a, |b, a| {
            b.iter(|| sumset::hfold(black_box(a), 5, bound).unwrap())
        });
    }
    group.finish();
}

fn decompose_thm2(c: &mut Criterion) {
    let dec = Thm2Decomposer::new(&thm2_params()).unwrap();
    let mut group = c.benchmark_group("decompose_thm2");
    for bits in [16u32, 256, 2048] {
        let n = dense(bits);
        group.bench_with_input(BenchmarkId::from_parameter(bits), &n, |b, n| {
            b.iter(|| dec.decompose(black_box(n)).unwrap())
        });
    }
    group.finish();
}

fn decompose_thm1(c: &mut Criterion) {
    let dec = Thm1Decomposer::new(&thm1_params()).unwrap();
    let mut group = c.benchmark_group("decompose_thm1");
    for (label, n) in thm1_inputs(400) {
        group.bench_with_input(BenchmarkId::from_parameter(label), &n, |b, n| {
            b.iter(|| dec.decompose(black_box(n)).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, expand, hfold, decompose_thm2, decompose_thm1);
criterion_main!(benches);
