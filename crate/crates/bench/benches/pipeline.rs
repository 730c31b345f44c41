use std::hint::black_box;

use anypro_bench::{random, testbed, MAX};
use anypro_core::bgp_sim::{propagate, PrependConfig};
use anypro_core::pipeline::{run_pipeline, PipelineConfig};
use anypro_core::polling::max_min_poll;
use anypro_core::solver;
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn simulator(c: &mut Criterion) {
    let case = testbed();
    let n = case.topology.n_ingresses();
    let cfg = PrependConfig::all_max(n, MAX).with(0, 0);
    c.bench_function("propagate/testbed", |b| b.iter(|| propagate(black_box(&case.topology), &cfg)));
    let o = case.oracle();
    c.bench_function("max_min_poll/testbed", |b| b.iter(|| max_min_poll(&o, MAX, &case.enabled)));
}

fn solver_benches(c: &mut Criterion) {
    let mut g = c.benchmark_group("solve");
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for n in [4, 6, 8] {
        let inst = solver::random_instance(n, 3, 3 * n, &mut rng);
        g.bench_with_input(BenchmarkId::new("random", n), &inst, |b, inst| b.iter(|| solver::solve(inst, None)));
    }
    let inst = testbed().preliminary_instance();
    g.bench_function("testbed-preliminary", |b| b.iter(|| solver::solve(&inst, None)));
    g.finish();
}

fn end_to_end(c: &mut Criterion) {
    let mut g = c.benchmark_group("pipeline");
    g.sample_size(10);
    for n in [4, 8] {
        let case = random(n, 40, 7);
        g.bench_with_input(BenchmarkId::new("random", n), &case, |b, case| {
            b.iter(|| {
                let o = case.oracle();
                run_pipeline(&o, &case.desired, &PipelineConfig::new(n, MAX)).expect("run")
            })
        });
    }
    g.finish();
}

criterion_group!(benches, simulator, solver_benches, end_to_end);
criterion_main!(benches);
