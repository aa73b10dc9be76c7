use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use thermsched::{enumerate_optimal_bruteforce, solve_optimal, SolveOptions};
use thermsched_bench::{n3dm_pair, random_batch, three_partition_pair};

fn solver_vs_oracle(c: &mut Criterion) {
    let mut group = c.benchmark_group("opt_random");
    for jobs in [4usize, 6, 8] {
        let batch = random_batch(jobs, 6, 5, 16);
        group.bench_with_input(BenchmarkId::new("branch_and_bound", jobs), &batch, |b, batch| {
            b.iter(|| {
                for inst in batch {
                    black_box(solve_optimal(inst, SolveOptions::default()).unwrap());
                }
            })
        });
        if jobs <= 6 {
            group.bench_with_input(BenchmarkId::new("brute_force", jobs), &batch, |b, batch| {
                b.iter(|| {
                    for inst in batch {
                        black_box(enumerate_optimal_bruteforce(inst).unwrap());
                    }
                })
            });
        }
    }
    group.finish();
}

fn reductions(c: &mut Criterion) {
    let mut group = c.benchmark_group("opt_reduction");
    let (yes, no) = three_partition_pair();
    group.bench_function("3partition_yes", |b| b.iter(|| solve_optimal(black_box(&yes), SolveOptions::default())));
    group.bench_function("3partition_no", |b| b.iter(|| solve_optimal(black_box(&no), SolveOptions::default())));
    let (yes, no) = n3dm_pair();
    group.bench_function("n3dm_yes", |b| b.iter(|| solve_optimal(black_box(&yes), SolveOptions::default())));
    group.bench_function("n3dm_no", |b| b.iter(|| solve_optimal(black_box(&no), SolveOptions::default())));
    group.finish();
}

criterion_group!(benches, solver_vs_oracle, reductions);
criterion_main!(benches);
