use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;
use stirap_bench::{endpoint_options, reference, GAMMAS};
use stirap_core::experiments::linear_grid;
use stirap_core::{
    build_generator, frame_at, propagate, propagate_master, sweep_gamma, BasisKind, ModelKind,
    ReservoirSpec, Sequence, SweepSpec,
};

fn generators(c: &mut Criterion) {
    let cfg = reference(Sequence::Counterintuitive);
    c.bench_function("frame_and_bare_generator", |b| {
        b.iter(|| {
            let f = frame_at(&cfg, black_box(0.37));
            build_generator(&f, 1.0, ModelKind::Effective, BasisKind::Bare)
        })
    });
}

fn amplitudes(c: &mut Criterion) {
    let cfg = reference(Sequence::Counterintuitive);
    let opts = endpoint_options();
    let mut group = c.benchmark_group("propagate_effective");
    for gamma in GAMMAS {
        group.bench_with_input(BenchmarkId::from_parameter(gamma), &gamma, |b, &g| {
            b.iter(|| propagate(&cfg, g, ModelKind::Effective, BasisKind::Bare, &opts).unwrap())
        });
    }
    group.finish();
}

fn master(c: &mut Criterion) {
    let cfg = reference(Sequence::Intuitive);
    let opts = endpoint_options();
    let mut group = c.benchmark_group("propagate_master");
    group.sample_size(10);
    for gamma in [1.0, 500.0] {
        group.bench_with_input(BenchmarkId::from_parameter(gamma), &gamma, |b, &g| {
            b.iter(|| propagate_master(&cfg, &ReservoirSpec::zero_temperature(g), &opts).unwrap())
        });
    }
    group.finish();
}

fn sweep(c: &mut Criterion) {
    let mut spec = SweepSpec::new(reference(Sequence::Counterintuitive), linear_grid(0.0, 3.0, 61));
    spec.opts = endpoint_options();
    let mut group = c.benchmark_group("sweep_61_points");
    group.sample_size(10);
    group.bench_function("both_models", |b| b.iter(|| sweep_gamma(&spec).unwrap()));
    group.finish();
}

criterion_group!(benches, generators, amplitudes, master, sweep);
criterion_main!(benches);
