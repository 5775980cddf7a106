use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use estcomm::diag::brute_force_discrepancy_with;
use estcomm::harness::{run_experiment, ExperimentSpec, ProtocolId};
use estcomm::par::Execution;
use estcomm::{build_family, FamilySpec, ProbVec};

fn modes() -> [(&'static str, Execution); 2] {
    [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)]
}

fn trial_batch(c: &mut Criterion) {
    let mut group = c.benchmark_group("debias_trials");
    group.sample_size(10);
    for (name, exec) in modes() {
        let mut spec = ExperimentSpec::new(
            ProtocolId::Debias,
            FamilySpec::RandomBoolean { n: 8, seed: 1 },
            vec![0.1, 0.05],
            64,
            0,
        );
        spec.execution = exec;
        group.bench_function(BenchmarkId::from_parameter(name), |b| b.iter(|| run_experiment(&spec).unwrap()));
    }
    group.finish();
}

fn discrepancy(c: &mut Criterion) {
    let mut group = c.benchmark_group("discrepancy_enumeration");
    group.sample_size(10);
    let f = build_family(FamilySpec::RandomBoolean { n: 4, seed: 2 }).unwrap();
    let u = ProbVec::uniform(16).unwrap();
    for (name, exec) in modes() {
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| brute_force_discrepancy_with(&f, &u, &u, exec).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, trial_batch, discrepancy);
criterion_main!(benches);
