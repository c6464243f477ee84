use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use oscquant::dynamics::{integrate_many, lee_system, TrajectoryState};
use oscquant::model::{classify_grid, Axis};
use oscquant::quantize::DecoupledMode;
use oscquant::spectral::truncated_batch;
use oscquant::{Execution, ModelParams};

const STRATEGIES: [(&str, Execution); 2] = [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)];

fn region_grid(c: &mut Criterion) {
    let mut group = c.benchmark_group("region_grid");
    for steps in [41usize, 101] {
        let axis = Axis::new(-2.0, 2.0, steps).unwrap();
        for (name, exec) in STRATEGIES {
            group.bench_with_input(BenchmarkId::new(name, steps), &axis, |b, axis| {
                b.iter(|| classify_grid(black_box(axis), black_box(axis), exec))
            });
        }
    }
    group.finish();
}

fn oracle_batch(c: &mut Criterion) {
    let mut group = c.benchmark_group("truncated_oracle");
    group.sample_size(10);
    let jobs: Vec<(DecoupledMode, usize)> = (1..=8)
        .map(|k| (DecoupledMode::new(1.0, k as f64 / 3.0).unwrap(), 100))
        .collect();
    for (name, exec) in STRATEGIES {
        group.bench_function(name, |b| b.iter(|| truncated_batch(black_box(&jobs), 3, exec)));
    }
    group.finish();
}

fn trajectories(c: &mut Criterion) {
    let mut group = c.benchmark_group("trajectory_ensemble");
    group.sample_size(10);
    let sys = lee_system(&ModelParams::new(1.0, 1.0).unwrap());
    let starts: Vec<TrajectoryState> = (0..32)
        .map(|k| {
            let a = k as f64 * 0.2;
            TrajectoryState::new(0.0, [a.cos(), a.sin()], [0.0, 1.0])
        })
        .collect();
    for (name, exec) in STRATEGIES {
        group.bench_function(name, |b| {
            b.iter(|| integrate_many(&sys, black_box(&starts), 1e-3, 10.0, exec))
        });
    }
    group.finish();
}

criterion_group!(benches, region_grid, oracle_batch, trajectories);
criterion_main!(benches);
