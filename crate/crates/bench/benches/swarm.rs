use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use ctswarm_bench::pruned_store;
use ctswarm_core::{generate, SwarmConfig, SwarmRunner};

fn first_round(c: &mut Criterion) {
    let mut group = c.benchmark_group("swarm_round");
    group.sample_size(10);
    for name in ["spin-s", "bugzilla"] {
        let (model, store) = pruned_store(name);
        for workers in [1, 8] {
            let runner = SwarmRunner::new(SwarmConfig::default().with_workers(workers)).unwrap();
            group.bench_function(BenchmarkId::new(name, format!("j{workers}")), |b| {
                b.iter(|| {
                    runner
                        .run_round(&store, model.constraints(), 1)
                        .unwrap()
                        .fitness
                })
            });
        }
    }
    group.finish();
}

fn whole_suite(c: &mut Criterion) {
    let mut group = c.benchmark_group("generate");
    group.sample_size(10);
    for name in ["gpl-constrained", "spin-s"] {
        let (model, _) = pruned_store(name);
        group.bench_function(name, |b| {
            b.iter(|| {
                generate(&model, &SwarmConfig::default().with_seed(5))
                    .unwrap()
                    .rows
            })
        });
    }
    group.finish();
}

criterion_group!(benches, first_round, whole_suite);
criterion_main!(benches);
