use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use lenscount_core::constructions::random_config;
use lenscount_core::lens::{LensField, Mass, MassConfig};
use lenscount_core::scanner::{scan_with, ScanSpec};
use lenscount_core::solver::{brute_force_solve, Window};
use lenscount_core::Execution;
use num_complex::Complex64;

const STRATEGIES: [(&str, Execution); 2] = [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)];

fn scan(c: &mut Criterion) {
    let fixed = MassConfig::new(vec![
        Mass::new(Complex64::new(-1.0, 0.0), 1.0),
        Mass::new(Complex64::new(1.0, 0.0), 1.0),
    ])
    .unwrap();
    let spec = ScanSpec::new(
        fixed,
        1.0,
        Window::square(Complex64::new(0.0, 0.0), 3.0),
        (48, 48),
        None,
    )
    .unwrap();
    let mut group = c.benchmark_group("scan_48x48");
    group.sample_size(10);
    for (name, exec) in STRATEGIES {
        group.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &exec| {
            b.iter(|| scan_with(&spec, exec).unwrap());
        });
    }
    group.finish();
}

fn brute_force(c: &mut Criterion) {
    let f = LensField::from_masses(&random_config(4, 7, 1.0).unwrap()).unwrap();
    let window = Window::square(Complex64::new(0.0, 0.0), 4.0);
    let mut group = c.benchmark_group("brute_force_100");
    group.sample_size(10);
    for (name, exec) in STRATEGIES {
        group.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &exec| {
            b.iter(|| brute_force_solve(&f, window, 100, 1e-12, 1e-6, exec));
        });
    }
    group.finish();
}

criterion_group!(benches, scan, brute_force);
criterion_main!(benches);
