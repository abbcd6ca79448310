use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use matchstick::generator::{enumerate, SearchConfig, Survivor};

fn unfiltered(c: &mut Criterion) {
    let mut group = c.benchmark_group("enumerate_unfiltered");
    group.sample_size(10);
    for max_n in [9usize, 10] {
        for jobs in [1usize, 0] {
            let label = if jobs == 1 { "sequential" } else { "parallel" };
            group.bench_with_input(BenchmarkId::new(label, max_n), &max_n, |b, &max_n| {
                let mut cfg = SearchConfig::unfiltered(max_n);
                cfg.parallel_width = jobs;
                b.iter(|| {
                    let mut out: Vec<Survivor> = Vec::new();
                    enumerate(&cfg, &mut out).unwrap().survivors
                })
            });
        }
    }
    group.finish();
}

fn classify(c: &mut Criterion) {
    let mut group = c.benchmark_group("classify_k5");
    group.sample_size(10);
    for jobs in [1usize, 0] {
        let label = if jobs == 1 { "sequential" } else { "parallel" };
        group.bench_function(label, |b| {
            let mut cfg = SearchConfig::classify(5, 8, true);
            cfg.parallel_width = jobs;
            b.iter(|| {
                let mut out: Vec<Survivor> = Vec::new();
                enumerate(&cfg, &mut out).unwrap().survivors
            })
        });
    }
    group.finish();
}

criterion_group!(benches, unfiltered, classify);
criterion_main!(benches);
