use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use thermsched::io::{parse_instance, serialize_instance};
use thermsched::{run_online, simulate, CoolestFirst, EarliestDeadlineFirst, Rational};
use thermsched_bench::random_batch;

fn online(c: &mut Criterion) {
    let batch = random_batch(40, 30, 10, 8);
    c.bench_function("coolest_first_40_jobs", |b| {
        b.iter(|| {
            for inst in &batch {
                black_box(run_online(inst, &CoolestFirst).unwrap());
            }
        })
    });
    c.bench_function("edf_40_jobs", |b| {
        b.iter(|| {
            for inst in &batch {
                black_box(run_online(inst, &EarliestDeadlineFirst).unwrap());
            }
        })
    });
    let runs: Vec<_> = batch.iter().map(|i| run_online(i, &CoolestFirst).unwrap().schedule).collect();
    c.bench_function("simulate_40_jobs", |b| {
        b.iter(|| {
            for (inst, sched) in batch.iter().zip(&runs) {
                black_box(simulate(inst, sched));
            }
        })
    });
}

fn formats(c: &mut Criterion) {
    let inst = &random_batch(40, 30, 10, 1)[0];
    let text = serialize_instance(inst);
    c.bench_function("instance_round_trip", |b| {
        b.iter(|| parse_instance(black_box(&text)).unwrap())
    });
    c.bench_function("rational_parse", |b| {
        b.iter(|| black_box("364/375").parse::<Rational>().unwrap())
    });
}

criterion_group!(benches, online, formats);
criterion_main!(benches);
