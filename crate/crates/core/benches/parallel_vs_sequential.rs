use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use xeq_core::discriminant::{run_discriminant_trials_with, TrialConfig};
use xeq_core::scale::ScaleDefinition;
use xeq_core::simulation::{generate_factor_data_with, generate_two_group, GeneratorSpec};
use xeq_core::Execution;

const MODES: [(&str, Execution); 2] = [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)];

fn discriminant(c: &mut Criterion) {
    let scale = ScaleDefinition::xeq();
    let spec = GeneratorSpec::for_scale(&scale, 0.7, 0.3, 1, 1);
    let data = generate_two_group(&spec, &scale, 1.0, 200).unwrap();
    let features = data.features();
    let labels = data.group_labels().unwrap();
    let cfg = TrialConfig {
        n_trials: 100,
        seed: 5,
        ..TrialConfig::default()
    };
    let mut group = c.benchmark_group("discriminant_trials");
    for (name, exec) in MODES {
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| run_discriminant_trials_with(black_box(&features), &labels, &cfg, exec).unwrap())
        });
    }
    group.finish();
}

fn generation(c: &mut Criterion) {
    let scale = ScaleDefinition::xeq();
    let spec = GeneratorSpec::for_scale(&scale, 0.7, 0.3, 20_000, 2);
    let mut group = c.benchmark_group("generate_factor_data");
    group.sample_size(20);
    for (name, exec) in MODES {
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| generate_factor_data_with(black_box(&spec), &scale, exec).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, discriminant, generation);
criterion_main!(benches);
