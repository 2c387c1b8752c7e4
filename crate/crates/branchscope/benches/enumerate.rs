use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use branchscope::enumeration::{bfs_enumerate_with, id_enumerate_with, EnumerationConfig};
use branchscope::envs::uniform_tree::UniformTree;
use branchscope::testing::TableEnv;

/// A ring of `n` states where each action jumps by a fixed stride. Heavy on
/// revisits, so it exercises the seen-set path rather than pure expansion.
fn strided_ring(n: u32, strides: &[u32]) -> TableEnv {
    let table: Vec<Vec<u32>> = (0..n)
        .map(|pos| strides.iter().map(|s| (pos + s) % n).collect())
        .collect();
    TableEnv::new("strided_ring", table, 0).unwrap()
}

fn bench_engines(c: &mut Criterion) {
    let mut group = c.benchmark_group("engines");
    let config = EnumerationConfig::new(10_000);

    group.bench_function("bfs/uniform_tree_b3", |b| {
        b.iter(|| {
            let mut env = UniformTree::new(3).unwrap();
            black_box(bfs_enumerate_with(&mut env, &config).unwrap())
        })
    });
    group.bench_function("id/uniform_tree_b3", |b| {
        b.iter(|| {
            let mut env = UniformTree::new(3).unwrap();
            black_box(id_enumerate_with(&mut env, &config).unwrap())
        })
    });

    let ring = strided_ring(4096, &[1, 17, 4095]);
    group.bench_function("bfs/strided_ring", |b| {
        b.iter(|| {
            let mut env = ring.clone();
            black_box(bfs_enumerate_with(&mut env, &config).unwrap())
        })
    });
    group.bench_function("id/strided_ring", |b| {
        b.iter(|| {
            let mut env = ring.clone();
            black_box(id_enumerate_with(&mut env, &config).unwrap())
        })
    });
    group.finish();
}

#[cfg(feature = "parallel")]
fn bench_workers(c: &mut Criterion) {
    let mut group = c.benchmark_group("workers");
    group.sample_size(20);
    for workers in [1usize, 2, 4, 8] {
        let mut config = EnumerationConfig::new(200_000);
        config.workers = workers;
        group.bench_with_input(
            BenchmarkId::new("bfs/uniform_tree_b3", workers),
            &config,
            |b, config| {
                b.iter(|| {
                    let mut env = UniformTree::new(3).unwrap();
                    black_box(bfs_enumerate_with(&mut env, config).unwrap())
                })
            },
        );
    }
    group.finish();
}

#[cfg(not(feature = "parallel"))]
fn bench_workers(_c: &mut Criterion) {}

criterion_group!(benches, bench_engines, bench_workers);
criterion_main!(benches);
