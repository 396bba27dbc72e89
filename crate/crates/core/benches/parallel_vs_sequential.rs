use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use mes_core::lincomb::q;
use mes_core::parallel;
use mes_core::products::harmonic;
use mes_core::relspaces::checks::{run_check, CheckId};
use mes_core::relspaces::{generators, Family};
use mes_core::word::enumerate_basis;
use mes_core::{LinComb, Space, ZWord};

fn modes() -> [(&'static str, bool); 2] {
    [("parallel", false), ("sequential", true)]
}

fn sum_of_basis(k: u32) -> LinComb<ZWord> {
    LinComb::from_terms(enumerate_basis(k, Space::Ge2).into_iter().map(|w| (w, q(1))))
}

fn bench_generators(c: &mut Criterion) {
    let mut group = c.benchmark_group("r_generators");
    group.sample_size(10);
    for k in [11u32, 12] {
        for (name, seq) in modes() {
            parallel::set_sequential(seq);
            group.bench_with_input(BenchmarkId::new(name, k), &k, |b, &k| {
                b.iter(|| generators(black_box(k), Family::R).unwrap())
            });
        }
    }
    parallel::set_sequential(false);
    group.finish();
}

fn bench_harmonic(c: &mut Criterion) {
    let mut group = c.benchmark_group("harmonic_product");
    group.sample_size(10);
    let (u, v) = (sum_of_basis(7), sum_of_basis(6));
    for (name, seq) in modes() {
        parallel::set_sequential(seq);
        group.bench_function(name, |b| b.iter(|| harmonic(black_box(&u), black_box(&v))));
    }
    parallel::set_sequential(false);
    group.finish();
}

fn bench_checks(c: &mut Criterion) {
    let mut group = c.benchmark_group("delta_leibniz_check");
    group.sample_size(10);
    for (name, seq) in modes() {
        parallel::set_sequential(seq);
        group.bench_function(name, |b| b.iter(|| run_check(CheckId::DeltaLeibnizR, black_box(9)).unwrap()));
    }
    parallel::set_sequential(false);
    group.finish();
}

criterion_group!(benches, bench_generators, bench_harmonic, bench_checks);
criterion_main!(benches);
