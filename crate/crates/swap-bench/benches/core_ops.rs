use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use swap_bench::{diversity_class, instance, linear_class};
use swap_core::bandit::{confidence_radius, run_clucb, run_swap, PullPolicy, StoppingRule};
use swap_core::env::GaussianEnvironment;
use swap_core::oracle::{maximize, OracleKind};

fn bench_oracles(c: &mut Criterion) {
    let mut group = c.benchmark_group("oracle_maximize");
    for n in [16usize, 64, 256] {
        let inst = instance(n, 0.0, Some(3));
        let weights = inst.true_utilities().to_vec();
        let k = n / 4;
        let linear = linear_class(n, k);
        group.bench_with_input(BenchmarkId::new("sort_top_k", n), &n, |b, _| {
            b.iter(|| maximize(OracleKind::SortTopK, black_box(&weights), &linear).unwrap())
        });
        let diverse = diversity_class(&inst, k);
        group.bench_with_input(BenchmarkId::new("greedy_diversity", n), &n, |b, _| {
            b.iter(|| {
                maximize(OracleKind::GreedyCardinality, black_box(&weights), &diverse).unwrap()
            })
        });
    }
    let inst = instance(16, 0.0, None);
    let weights = inst.true_utilities().to_vec();
    let class = linear_class(16, 4);
    group.bench_function("brute_force_n16_k4", |b| {
        b.iter(|| maximize(OracleKind::BruteForce, black_box(&weights), &class).unwrap())
    });
    group.finish();
}

fn bench_radius(c: &mut Criterion) {
    c.bench_function("confidence_radius", |b| {
        b.iter(|| {
            confidence_radius(
                black_box(0.5),
                black_box(8),
                black_box(1234.0),
                black_box(0.1),
                black_box(17.0),
            )
        })
    });
}

fn bench_runs(c: &mut Criterion) {
    let mut group = c.benchmark_group("full_run");
    group.sample_size(20);
    let inst = instance(8, 0.05, None);
    let class = linear_class(8, 3);
    group.bench_function("swap_n8_k3", |b| {
        let mut seed = 0u64;
        b.iter(|| {
            seed += 1;
            let mut env = GaussianEnvironment::for_instance(&inst, 5.0, 2.0, seed).unwrap();
            run_swap(
                &mut env,
                &class,
                OracleKind::SortTopK,
                PullPolicy::formula(5.0, 2.0).unwrap(),
                StoppingRule::exact(),
                0.1,
                0.5,
                seed,
            )
            .unwrap()
        })
    });
    group.bench_function("clucb_n8_k3", |b| {
        let mut seed = 0u64;
        b.iter(|| {
            seed += 1;
            let mut env = GaussianEnvironment::for_instance(&inst, 1.0, 1.0, seed).unwrap();
            run_clucb(
                &mut env,
                &class,
                OracleKind::SortTopK,
                StoppingRule::exact(),
                0.1,
                0.5,
                seed,
            )
            .unwrap()
        })
    });
    group.finish();
}

criterion_group!(benches, bench_oracles, bench_radius, bench_runs);
criterion_main!(benches);
