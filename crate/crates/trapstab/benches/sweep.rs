//! Compares the data-parallel sweep engine against the sequential fallback.
//!
//! Run with `cargo bench -p trapstab`; add `--no-default-features` to see
//! the sequential engine behind the default entry point as well.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;
use trapstab::{sweep_grid, sweep_grid_serial, GridSpec, IntegratorConfig};

fn sweep_benchmarks(c: &mut Criterion) {
    let cfg = IntegratorConfig::with_steps(256).unwrap();
    let mut group = c.benchmark_group("sweep_grid");
    group.sample_size(10);
    for n in [8usize, 16, 32] {
        let spec = GridSpec {
            q_min: 0.0,
            q_max: 1.5,
            a_min: -0.5,
            a_max: 1.0,
            nq: n,
            na: n,
        };
        group.bench_with_input(BenchmarkId::new("parallel", n), &spec, |b, s| {
            b.iter(|| sweep_grid(0.5, 6.4, black_box(*s), cfg).unwrap());
        });
        group.bench_with_input(BenchmarkId::new("serial", n), &spec, |b, s| {
            b.iter(|| sweep_grid_serial(0.5, 6.4, black_box(*s), cfg).unwrap());
        });
    }
    group.finish();
}

criterion_group!(benches, sweep_benchmarks);
criterion_main!(benches);
