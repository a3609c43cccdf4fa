use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use slitcommit::exec;
use slitcommit::nogo::{evaluate, random_concealing_pair, PairKind};
use slitcommit::protocol::{
    attack_sweep_seq, CommitBit, CommitConfig, Protocol, StrategyKind, Thresholds,
};
use slitcommit::rng;

fn attack_sweeps(c: &mut Criterion) {
    let mut group = c.benchmark_group("attack_sweep");
    group.sample_size(10);
    for n in [200usize, 800] {
        let p = Protocol::new(CommitConfig {
            n_detections: n,
            ..CommitConfig::default()
        })
        .unwrap();
        let strategy = StrategyKind::HelstromRouter(CommitBit::Zero);
        group.bench_with_input(BenchmarkId::new("sequential", n), &p, |b, p| {
            b.iter(|| attack_sweep_seq(p, Thresholds::default(), strategy, 200).unwrap())
        });
        #[cfg(feature = "parallel")]
        group.bench_with_input(BenchmarkId::new("parallel", n), &p, |b, p| {
            b.iter(|| {
                slitcommit::protocol::attack_sweep_par(p, Thresholds::default(), strategy, 200)
                    .unwrap()
            })
        });
    }
    group.finish();
}

fn nogo_pairs(c: &mut Criterion) {
    let mut group = c.benchmark_group("nogo_pairs");
    let job = |i: u64| {
        let mut r = rng::stream(1, &[i]);
        evaluate(
            i,
            PairKind::Concealing,
            &random_concealing_pair(&mut r).unwrap(),
        )
        .unwrap()
    };
    group.bench_function("sequential", |b| b.iter(|| exec::map_indexed_seq(500, job)));
    #[cfg(feature = "parallel")]
    group.bench_function("parallel", |b| b.iter(|| exec::map_indexed_par(500, job)));
    group.finish();
}

criterion_group!(benches, attack_sweeps, nogo_pairs);
criterion_main!(benches);
