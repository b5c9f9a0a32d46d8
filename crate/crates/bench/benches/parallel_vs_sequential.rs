use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use nagfree_bench::experiment::{run_experiment_with, ExperimentConfig};
use nagfree_bench::problem::ProblemConfig;
use nagfree_core::exec::Execution;
use nagfree_core::solvers::{SolverKind, SolverSpec};

fn config() -> ExperimentConfig {
    let problem = ProblemConfig::LogSumExp {
        n: 60,
        d: 60,
        theta: 0.1,
        eta: 0.1,
        seed: 0,
    };
    let solvers = [
        SolverKind::NagFree,
        SolverKind::NagFreeBacktrack,
        SolverKind::Adgd,
        SolverKind::AdgdAccel,
    ]
    .into_iter()
    .map(|k| SolverSpec::new(k, 300))
    .collect();
    ExperimentConfig::new(problem, solvers, 300).seeds((1..=8).collect())
}

fn experiment(c: &mut Criterion) {
    let cfg = config();
    let mut group = c.benchmark_group("experiment");
    group.sample_size(10);
    for (name, exec) in [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)] {
        group.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &exec| {
            b.iter(|| run_experiment_with(&cfg, exec).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, experiment);
criterion_main!(benches);
