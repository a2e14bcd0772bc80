//! Brute-force search benchmarks: the sequential walk against the
//! work-split parallel walk over the same task list.
//!
//! With `--no-default-features` the parallel series degrades to the
//! sequential fallback, so the two coincide; with the default `parallel`
//! feature the comparison shows what the first-diamond work split buys.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use diamonds::enumerate::{count_avoiders, Budget};
use diamonds::patterns::PatternSet;
use diamonds::poset::SystemShape;

fn bench_counting(c: &mut Criterion) {
    let budget = Budget {
        max_unpruned_vertices: 20,
        max_results: 200_000_000,
    };
    let cases: &[(u32, u32, &str)] = &[
        (4, 3, "321"),
        (4, 4, "321"),
        (5, 3, "231"),
        (5, 3, "231:321"),
        (4, 3, ""),
    ];
    let mut group = c.benchmark_group("count_avoiders");
    group.sample_size(10);
    for &(v, d, avoid) in cases {
        let shape = SystemShape::full(v, d).unwrap();
        let set: PatternSet = avoid.parse().unwrap();
        let label = format!("v{v}d{d}-{}", if avoid.is_empty() { "all" } else { avoid });
        group.bench_function(BenchmarkId::new("sequential", &label), |b| {
            b.iter(|| count_avoiders(&shape, &set, &budget, 1).unwrap())
        });
        group.bench_function(BenchmarkId::new("parallel", &label), |b| {
            b.iter(|| count_avoiders(&shape, &set, &budget, 0).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, bench_counting);
criterion_main!(benches);
