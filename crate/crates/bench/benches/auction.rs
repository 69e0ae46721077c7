use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use era_bench::bench_config;
use era_core::auction::{patch_verify, verify_auction, AttestedLookup, World};
use era_core::harness::{latency_sample, LatencyClock};

fn phases(c: &mut Criterion) {
    let mut g = c.benchmark_group("auction");
    g.sample_size(10);
    for l in [10usize, 50] {
        let world = World::init(&bench_config(l, 4, 512)).unwrap();
        let run = world.run().unwrap();
        g.bench_with_input(BenchmarkId::new("execute", l), &l, |b, _| {
            b.iter(|| world.run().unwrap())
        });
        g.bench_with_input(BenchmarkId::new("verify", l), &l, |b, _| {
            b.iter(|| {
                verify_auction(&run.board, &run.transcript, &AttestedLookup(&run.board)).unwrap()
            })
        });
        g.bench_with_input(BenchmarkId::new("patch", l), &l, |b, _| {
            b.iter(|| patch_verify(&world.auctioneer.keys, &run.board, &run.results))
        });
    }
    g.finish();
}

fn latency_model(c: &mut Criterion) {
    let mut g = c.benchmark_group("latency_model");
    g.sample_size(10);
    for l in [20_000usize, 100_000] {
        g.bench_with_input(BenchmarkId::from_parameter(l), &l, |b, &l| {
            b.iter(|| latency_sample(l, 100, 0, 1, LatencyClock::Counted))
        });
    }
    g.finish();
}

criterion_group!(benches, phases, latency_model);
criterion_main!(benches);
