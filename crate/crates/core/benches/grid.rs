//! Parallel versus sequential grid scans.

use std::hint::black_box;

use banach_core::constants::{cnj_constant, convexity_modulus, t2_constant};
use banach_core::search::SearchConfig;
use banach_core::spaces::{NormedSpace, ParamPair};
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

fn backends(c: &mut Criterion) {
    let pp = ParamPair::new(2.0, 3.0).unwrap();
    let spaces = [NormedSpace::euclidean(2).unwrap(), NormedSpace::lp(4.0, 2).unwrap(), NormedSpace::day_james()];
    let mut group = c.benchmark_group("t2");
    group.sample_size(10);
    for grid in [512usize, 2048] {
        for s in &spaces {
            for parallel in [false, true] {
                let mut cfg = SearchConfig::default().with_grid(grid);
                cfg.parallel = parallel;
                let name = if parallel { "rayon" } else { "sequential" };
                group.bench_with_input(BenchmarkId::new(format!("{name}/{}", s.id()), grid), &cfg, |b, cfg| {
                    b.iter(|| t2_constant(black_box(s), pp, cfg).unwrap())
                });
            }
        }
    }
    group.finish();

    let mut group = c.benchmark_group("three_axis_and_constrained");
    group.sample_size(10);
    let s = NormedSpace::lp(4.0, 2).unwrap();
    for parallel in [false, true] {
        let mut cfg = SearchConfig::default();
        cfg.parallel = parallel;
        let name = if parallel { "rayon" } else { "sequential" };
        group.bench_function(format!("cnj/{name}"), |b| b.iter(|| cnj_constant(black_box(&s), &cfg).unwrap()));
        group.bench_function(format!("delta/{name}"), |b| {
            b.iter(|| convexity_modulus(black_box(&s), 1.0, &cfg).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, backends);
criterion_main!(benches);
