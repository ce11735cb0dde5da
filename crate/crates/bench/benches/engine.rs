use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use dstar_core::asymptotics::find_x0;
use dstar_core::pattern_gf::{solve_bivariate, solve_jet, SolveOptions};
use dstar_core::pseries::{free_series, rooted_series};
use dstar_core::randic_app::conjecture_scan;
use dstar_core::treelab::gen_free_trees;
use dstar_core::PatternSpec;

fn no_verify() -> SolveOptions {
    SolveOptions {
        verify_fixed_point: false,
        ..Default::default()
    }
}

fn series(c: &mut Criterion) {
    let mut g = c.benchmark_group("series");
    for order in [100, 400] {
        g.bench_with_input(BenchmarkId::new("rooted", order), &order, |b, &n| {
            b.iter(|| rooted_series(black_box(n)))
        });
    }
    g.bench_function("free/400", |b| b.iter(|| free_series(black_box(400))));
    g.finish();
}

fn systems(c: &mut Criterion) {
    let mut g = c.benchmark_group("systems");
    g.sample_size(10);
    for (i, j) in [(1, 2), (2, 2), (2, 3)] {
        let p = PatternSpec::new(i, j).unwrap();
        g.bench_with_input(BenchmarkId::new("jet3/200", p), &p, |b, &p| {
            b.iter(|| solve_jet(p, 200, 3, no_verify()).unwrap())
        });
        g.bench_with_input(BenchmarkId::new("bivariate/60", p), &p, |b, &p| {
            b.iter(|| solve_bivariate(p, 60, no_verify()).unwrap())
        });
    }
    g.finish();
}

fn enumeration(c: &mut Criterion) {
    let mut g = c.benchmark_group("enumeration");
    g.sample_size(10);
    g.bench_function("free_trees/14", |b| b.iter(|| gen_free_trees(black_box(14))));
    g.bench_function("conjecture_scan/12", |b| b.iter(|| conjecture_scan(black_box(12)).unwrap()));
    g.finish();
}

fn singularity(c: &mut Criterion) {
    let mut g = c.benchmark_group("singularity");
    g.sample_size(10);
    g.bench_function("x0/400", |b| b.iter(|| find_x0(black_box(400)).unwrap()));
    g.finish();
}

criterion_group!(benches, series, systems, enumeration, singularity);
criterion_main!(benches);
