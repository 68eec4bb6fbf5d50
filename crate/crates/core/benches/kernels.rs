//! Parallel core against a single-thread pool on the heavy kernels.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use lefalg::config::Preset;
use lefalg::exactfield::FieldSpec;
use lefalg::isotypic::{decompose, DecomposeOptions};
use lefalg::lefschetz::{Budget, PolarizedData};
use lefalg::motivicalg::{algebra_closure, bn_generators};
use lefalg::weyldiagrams::diagram_span;

fn data(p: Preset) -> PolarizedData {
    p.data(&FieldSpec::rationals()).unwrap()
}

#[cfg(feature = "parallel")]
fn modes() -> Vec<(&'static str, rayon::ThreadPool)> {
    let build = |n| rayon::ThreadPoolBuilder::new().num_threads(n).build().unwrap();
    vec![("sequential", build(1)), ("parallel", build(0))]
}

#[cfg(feature = "parallel")]
fn run<R>(pool: &rayon::ThreadPool, f: impl FnOnce() -> R + Send) -> R
where
    R: Send,
{
    pool.install(f)
}

#[cfg(not(feature = "parallel"))]
fn modes() -> Vec<(&'static str, ())> {
    vec![("sequential", ())]
}

#[cfg(not(feature = "parallel"))]
fn run<R>(_: &(), f: impl FnOnce() -> R) -> R {
    f()
}

fn kernels(c: &mut Criterion) {
    let budget = Budget::default();
    let siegel2 = data(Preset::Siegel { g: 2 });
    let cm = data(Preset::Cm { d: 1 });
    let siegel1 = data(Preset::Siegel { g: 1 });

    let mut group = c.benchmark_group("closure siegel g=2 n=3");
    group.sample_size(10);
    for (name, pool) in modes() {
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| {
                run(&pool, || {
                    algebra_closure(&bn_generators(&siegel2, 3).unwrap(), &budget).unwrap()
                })
            })
        });
    }
    group.finish();

    let mut group = c.benchmark_group("diagram span cm n=4");
    group.sample_size(10);
    let large = budget.allow_large();
    for (name, pool) in modes() {
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| run(&pool, || diagram_span(&cm, 4, &large).unwrap()))
        });
    }
    group.finish();

    let mut group = c.benchmark_group("decompose siegel g=1 i=2 r=3");
    group.sample_size(10);
    for (name, pool) in modes() {
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| {
                run(&pool, || {
                    decompose(&siegel1, 2, 3, &large, DecomposeOptions::default()).unwrap()
                })
            })
        });
    }
    group.finish();
}

criterion_group!(benches, kernels);
criterion_main!(benches);
