use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use ptmswarm::swarm::{run_simulation, SimConfig};
use ptmswarm::tsplib::{City, Problem};
use ptmswarm::{correlation_quad_trace, problem_complexity, GeneratorKind};

fn instance(n: usize) -> Problem {
    // deterministic scatter on a 1000x1000 square
    let cities = (0..n)
        .map(|i| {
            let h = ptmswarm::generators::mix64(i as u64);
            City::new(i + 1, (h % 1000) as f64, ((h >> 20) % 1000) as f64)
        })
        .collect();
    Problem::from_cities(format!("bench{n}"), cities)
}

fn bench_simulation(c: &mut Criterion) {
    let mut group = c.benchmark_group("run_simulation");
    group.sample_size(10);
    for n in [76, 150] {
        let p = instance(n);
        for (label, v) in [("v0.5", 0.5), ("v1.1", 1.1)] {
            let cfg = SimConfig {
                n_agents: 200,
                v,
                generator: GeneratorKind::Ptm,
                seed: 1,
                ..SimConfig::default()
            };
            group.bench_with_input(BenchmarkId::new(label, n), &cfg, |b, cfg| {
                b.iter(|| run_simulation(black_box(&p), cfg).unwrap())
            });
        }
    }
    group.finish();
}

fn bench_trace(c: &mut Criterion) {
    let p = instance(100);
    let mut group = c.benchmark_group("correlation_quad_trace");
    group.sample_size(10);
    for n_agents in [200, 1000] {
        let cfg = SimConfig {
            n_agents,
            v: 0.6,
            seed: 3,
            ..SimConfig::default()
        };
        let m = run_simulation(&p, &cfg).unwrap().strategy_matrix;
        group.bench_with_input(BenchmarkId::from_parameter(n_agents), &m, |b, m| {
            b.iter(|| correlation_quad_trace(black_box(m)).unwrap())
        });
    }
    group.finish();
}

fn bench_problem_complexity(c: &mut Criterion) {
    let p = instance(226);
    c.bench_function("problem_complexity/226", |b| {
        b.iter(|| problem_complexity(black_box(&p)).unwrap())
    });
}

criterion_group!(benches, bench_simulation, bench_trace, bench_problem_complexity);
criterion_main!(benches);
