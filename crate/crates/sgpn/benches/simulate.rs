//! Monte Carlo throughput: rayon's data-parallel path against the
//! sequential fallback, plus the analytic pipeline for scale.
//!
//! Run with `cargo bench -p sgpn`. Building with
//! `--no-default-features` drops rayon entirely; `simulate` then measures
//! the sequential path twice.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};
use std::hint::black_box;

use sgpn::analysis::{analyze, AnalysisInput, AnalysisOptions};
use sgpn::catalog::{load, CatalogKey};
use sgpn::game::solve_ne;
use sgpn::reachability::reduce_to_attack_defend;
use sgpn::sim::{simulate, simulate_sequential, SimConfig};

fn bench_simulate(c: &mut Criterion) {
    let entry = load(CatalogKey::ReplayDefense);
    let ne = solve_ne(&entry.rewards.unwrap()).unwrap();
    let net = reduce_to_attack_defend(&entry.net).unwrap();

    let mut group = c.benchmark_group("simulate");
    for runs in [10_000u64, 100_000] {
        let cfg = SimConfig::new(runs, 42, ne);
        group.throughput(Throughput::Elements(runs));
        group.bench_with_input(BenchmarkId::new("parallel", runs), &cfg, |b, cfg| {
            b.iter(|| simulate(black_box(&net), black_box(cfg)).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("sequential", runs), &cfg, |b, cfg| {
            b.iter(|| simulate_sequential(black_box(&net), black_box(cfg)).unwrap())
        });
    }
    group.finish();
}

fn bench_analyze(c: &mut Criterion) {
    let input: AnalysisInput = load(CatalogKey::ReplayDefense).into();
    let options = AnalysisOptions::default();
    c.bench_function("analyze/replay-defense", |b| {
        b.iter(|| analyze(black_box(&input), black_box(&options)).unwrap())
    });
}

criterion_group!(benches, bench_simulate, bench_analyze);
criterion_main!(benches);
