use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use emubench_bench::{fixture, small_dataset_spec};
use emubench_core::scenarios::{generate_dataset, Split};
use emubench_core::{forward_transform, inverse_transform};
use std::hint::black_box;

fn fft(c: &mut Criterion) {
    let mut group = c.benchmark_group("fft_roundtrip");
    for (dims, n) in [(1, 160), (2, 160), (3, 32)] {
        let (_, u) = fixture("diff_diff", dims, n);
        group.bench_with_input(BenchmarkId::new(format!("{dims}d"), n), &u, |b, u| {
            b.iter(|| inverse_transform(&forward_transform(black_box(u)).unwrap()).unwrap())
        });
    }
    group.finish();
}

fn step(c: &mut Criterion) {
    let mut group = c.benchmark_group("step");
    for (id, dims, n) in [("diff_burgers", 1, 160), ("diff_ks", 1, 160), ("diff_burgers", 2, 160), ("phy_gs_type", 2, 64), ("diff_burgers", 3, 32)] {
        let (spec, u) = fixture(id, dims, n);
        let stepper = spec.build_stepper().unwrap();
        group.bench_function(format!("{}_{n}", spec.canonical_name()), |b| b.iter(|| stepper.step(black_box(&u)).unwrap()));
    }
    group.finish();
}

fn dataset(c: &mut Criterion) {
    let mut group = c.benchmark_group("generate_train");
    group.sample_size(10);
    for (id, dims, n) in [("diff_burgers", 1, 160), ("diff_ks", 1, 160), ("diff_burgers", 2, 64)] {
        let spec = small_dataset_spec(id, dims, n);
        group.bench_function(spec.canonical_name(), |b| b.iter(|| generate_dataset(black_box(&spec), Split::Train, 0).unwrap()));
    }
    group.finish();
}

criterion_group!(benches, fft, step, dataset);
criterion_main!(benches);
