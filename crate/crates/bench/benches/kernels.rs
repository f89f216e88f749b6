use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use qcompose::compose::StopTime;
use qcompose::{run_composed_dj_h, run_dj, ComposedInstance, PurifierLine};
use qcompose_bench::{balanced_input, graph};

fn deutsch_jozsa(c: &mut Criterion) {
    let mut group = c.benchmark_group("run_dj");
    for m in [1 << 6, 1 << 10, 1 << 14] {
        let x = balanced_input(m, 7);
        group.bench_with_input(BenchmarkId::from_parameter(m), &x, |b, x| {
            b.iter(|| run_dj(black_box(x)).unwrap())
        });
    }
    group.finish();

    let inst = ComposedInstance::structured_counterexample(8).unwrap();
    c.bench_function("composed_stop_1", |b| {
        b.iter(|| run_composed_dj_h(black_box(&inst), StopTime::Steps(1)).unwrap())
    });
}

fn laplacian(c: &mut Criterion) {
    let mut group = c.benchmark_group("laplacian");
    for n in [8, 32, 128] {
        let g = graph(n, 3);
        group.bench_with_input(BenchmarkId::new("resistance", n), &g, |b, g| {
            b.iter(|| g.effective_resistance(0, n - 1).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("hitting_times", n), &g, |b, g| {
            b.iter(|| g.hitting_times(n - 1).unwrap())
        });
    }
    group.finish();
}

fn walk(c: &mut Criterion) {
    let mut group = c.benchmark_group("entrance_overlap");
    group.sample_size(20);
    for d in [4, 16, 32] {
        let line = PurifierLine::new(0.1, 1.0 / 3.0, d).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(d), &line, |b, line| {
            b.iter(|| line.entrance_overlap().unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, deutsch_jozsa, laplacian, walk);
criterion_main!(benches);
