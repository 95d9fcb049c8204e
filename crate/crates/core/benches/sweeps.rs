//! Sequential vs parallel dispatch on the three grid workloads. Without the
//! `parallel` feature both variants run sequentially.

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use vqutrit::boundstate::spectrum_scan;
use vqutrit::cli::config::{Experiment, RunConfig};
use vqutrit::cli::experiments::negativity_map;
use vqutrit::cli::validate::single_excitation;
use vqutrit::oracle::{build_bath, simulate, Integration};
use vqutrit::sweep::{self, linspace, Execution};
use vqutrit::SystemParams;

const STRATEGIES: [(&str, Execution); 2] = [
    ("sequential", Execution::Sequential),
    ("parallel", Execution::Parallel),
];

fn bench_negativity_map(c: &mut Criterion) {
    let cfg = RunConfig::defaults(Experiment::NegativityMap);
    let mut group = c.benchmark_group("negativity_map_21x21x4");
    for (name, exec) in STRATEGIES {
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| negativity_map(black_box(&cfg), exec).unwrap())
        });
    }
    group.finish();
}

fn bench_spectrum_scan(c: &mut Criterion) {
    let base = SystemParams::new(1.0, 0.8, 1.0, 1).unwrap();
    let gammas = linspace(0.01, 1.0, 100);
    let ns: Vec<u32> = (1..=10).collect();
    let mut group = c.benchmark_group("spectrum_scan_100x10");
    for (name, exec) in STRATEGIES {
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| spectrum_scan(black_box(&base), &gammas, &ns, exec).unwrap())
        });
    }
    group.finish();
}

fn bench_oracle_grid(c: &mut Criterion) {
    // reduced bath and horizon so one sample stays well under a second
    let grid: Vec<SystemParams> = [0.0, 0.5, 1.0]
        .into_iter()
        .flat_map(|theta| [1u32, 2, 4].map(|n| SystemParams::new(1.0, 0.8, theta, n).unwrap()))
        .collect();
    let mut group = c.benchmark_group("oracle_grid_9_runs");
    group.sample_size(10);
    for (name, exec) in STRATEGIES {
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| {
                sweep::map(exec, &grid, |p| {
                    let w = 40.0 * p.lambda;
                    let bath = build_bath(p, 500, w, false).unwrap();
                    let init = single_excitation(p.n_atoms);
                    simulate(
                        p,
                        &bath,
                        &init,
                        Integration::new(2.0, 0.1 / w).with_stride(64),
                    )
                    .unwrap()
                    .norm_drift
                })
            })
        });
    }
    group.finish();
}

criterion_group!(
    benches,
    bench_negativity_map,
    bench_spectrum_scan,
    bench_oracle_grid
);
criterion_main!(benches);
