// Sequential vs rayon execution of the two heaviest kernels. With one core
// the two should be close; the gap shows the dispatch overhead.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use fraclap::rbf::RbfSetup;
use fraclap::wos::{WalkConfig, WosSolver};
use fraclap::{Domain, Execution, FracOrder, ScalarField};

const MODES: [(&str, Execution); 2] = [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)];

fn rbf_assembly(c: &mut Criterion) {
    let alpha = FracOrder::new(1.5).unwrap();
    let setup = RbfSetup::disk(9, alpha, 0.01, 1).unwrap();
    let f = ScalarField::interior(|_| 1.0);
    let g = ScalarField::zero();
    let mut group = c.benchmark_group("rbf_assembly");
    group.sample_size(10);
    for (name, exec) in MODES {
        group.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &exec| {
            b.iter(|| setup.assemble(&f, &g, exec).unwrap())
        });
    }
    group.finish();
}

fn wos_paths(c: &mut Criterion) {
    let alpha = FracOrder::new(1.5).unwrap();
    let f = ScalarField::interior(|_| 1.0);
    let g = ScalarField::zero();
    let mut group = c.benchmark_group("wos_paths");
    group.sample_size(10);
    for (name, exec) in MODES {
        let mut cfg = WalkConfig::new(alpha, 20_000, 7);
        cfg.exec = exec;
        let mut solver = WosSolver::new(Domain::disk(1.0).unwrap(), cfg).unwrap();
        group.bench_function(BenchmarkId::from_parameter(name), |b| b.iter(|| solver.solve([0.2, 0.1], &f, &g).unwrap()));
    }
    group.finish();
}

criterion_group!(benches, rbf_assembly, wos_paths);
criterion_main!(benches);
