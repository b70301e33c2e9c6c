use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use ramp_storage::backtest::monte_carlo_value_with;
use ramp_storage::elasticity::{average_response_with, ResponseOptions};
use ramp_storage::exec::Execution;
use ramp_storage::finite::ProblemConfig;
use ramp_storage::price::pmf_lognormal;
use ramp_storage::sweep::{value_sweep_with, SweepBase};

const MODES: [(&str, Execution); 2] = [("parallel", Execution::Parallel), ("sequential", Execution::Sequential)];

fn monte_carlo(c: &mut Criterion) {
    let pmf = pmf_lognormal(50.0, 20.0, 100, (0.0, 200.0)).unwrap();
    let cfg = ProblemConfig::iid(pmf, 96, 1.0, 6);
    let mut group = c.benchmark_group("monte_carlo_value");
    for (name, exec) in MODES {
        group.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &exec| {
            b.iter(|| monte_carlo_value_with(black_box(&cfg), 4000, 7, exec).unwrap())
        });
    }
    group.finish();
}

fn sweep(c: &mut Criterion) {
    let ns = [1, 2, 5, 10, 20, 40];
    let sigmas = [5.0, 10.0, 20.0, 30.0, 40.0];
    let base = SweepBase::default();
    let mut group = c.benchmark_group("value_sweep");
    for (name, exec) in MODES {
        group.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &exec| {
            b.iter(|| value_sweep_with(black_box(&ns), &sigmas, &base, exec))
        });
    }
    group.finish();
}

fn response(c: &mut Criterion) {
    let pmf = pmf_lognormal(52.0, 22.0, 140, (0.0, 160.0)).unwrap();
    let cfg = ProblemConfig::iid(pmf, 288, 10.0, 5).with_salvage(52.0);
    let mut group = c.benchmark_group("average_response");
    group.sample_size(10);
    for (name, exec) in MODES {
        group.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &exec| {
            b.iter(|| average_response_with(black_box(&cfg), ResponseOptions { exec, ..ResponseOptions::new(2000, 40, 3) }).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, monte_carlo, sweep, response);
criterion_main!(benches);
