//! Sequential versus parallel execution of the data-parallel loops.

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use juna::analysis::mitm::mitm_ssp_with;
use juna::analysis::uniqueness_census;
use juna::keygen::public_items;
use juna::{keygen, Execution, SchemeProfile};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

const MODES: [(&str, Execution); 2] = [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)];

fn bench_census(c: &mut Criterion) {
    let kp = keygen(&SchemeProfile::toy(), &mut ChaCha20Rng::seed_from_u64(1)).unwrap();
    let mut group = c.benchmark_group("census_toy");
    group.sample_size(10);
    for (name, exec) in MODES {
        group.bench_function(name, |b| {
            b.iter(|| uniqueness_census(black_box(&kp.public), &kp.private, exec).unwrap())
        });
    }
    group.finish();
}

fn bench_mitm(c: &mut Criterion) {
    let mut rng = ChaCha20Rng::seed_from_u64(2);
    let mut group = c.benchmark_group("mitm_ssp");
    group.sample_size(10);
    for n in [20usize, 28] {
        let weights: Vec<u64> = (0..n).map(|_| rng.gen_range(1..1u64 << 40)).collect();
        let target: u64 = weights.iter().step_by(3).sum();
        for (name, exec) in MODES {
            group.bench_with_input(BenchmarkId::new(name, n), &weights, |b, w| {
                b.iter(|| mitm_ssp_with(black_box(w), target, exec))
            });
        }
    }
    group.finish();
}

fn bench_public_items(c: &mut Criterion) {
    let kp = keygen(&SchemeProfile::n80(), &mut ChaCha20Rng::seed_from_u64(3)).unwrap();
    let mut group = c.benchmark_group("public_items_n80");
    group.sample_size(10);
    for (name, exec) in MODES {
        group.bench_function(name, |b| {
            b.iter(|| public_items(black_box(&kp.private), &kp.debug.levers, exec).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, bench_census, bench_mitm, bench_public_items);
criterion_main!(benches);
