use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use pdra_core::analytic::{success_probability, success_probability_random_activity};
use pdra_core::pool::CorrelationTable;
use pdra_core::zc::generate_root_sequence;
use pdra_core::sim::rng::substream;
use pdra_core::sim::{PoolSpec, Scenario};
use pdra_core::{
    Activity, AnalyticParams, CellLayout, ChannelModelSpec, PilotPool, ReceiverPath,
    ScenarioConfig, Scheme, ZcConfig,
};

fn zc(c: &mut Criterion) {
    c.bench_function("zc_root_839", |b| b.iter(|| generate_root_sequence(ZcConfig::new(black_box(839), 1).unwrap())));
}

fn pool(c: &mut Criterion) {
    let pool = PilotPool::with_default_roots(839, 4, 64, 2).unwrap();
    let table = CorrelationTable::new(&pool);
    let mut rng = substream(3, 0, 0);
    let ids: Vec<_> = (0..256)
        .map(|_| pool.pattern_id(pool.sample_pattern(&mut rng)).unwrap())
        .collect();
    c.bench_function("pattern_inner_table", |b| {
        b.iter(|| {
            ids.windows(2)
                .map(|w| table.pattern_inner(&w[0], &w[1]))
                .sum::<pdra_core::Complex64>()
        })
    });
    c.bench_function("pattern_materialize", |b| b.iter(|| pool.materialize(black_box(&ids[0])).unwrap()));
}

fn analytic(c: &mut Criterion) {
    let mut g = c.benchmark_group("success_probability");
    for n in [10usize, 100, 1000] {
        let p = AnalyticParams::with_threshold_db(n, 4, 32, 839, 5.0);
        g.bench_with_input(BenchmarkId::new("pdra", n), &p, |b, p| {
            b.iter(|| success_probability(p, Scheme::Pdra).unwrap())
        });
    }
    let base = AnalyticParams::with_threshold_db(1, 4, 32, 839, 5.0);
    g.bench_function("random_activity", |b| {
        b.iter(|| success_probability_random_activity(0.001, 10_000, &base, Scheme::Pdra).unwrap())
    });
    g.finish();
}

fn trial(c: &mut Criterion) {
    let mut g = c.benchmark_group("run_trial");
    for receiver in [ReceiverPath::Projected, ReceiverPath::Full] {
        let config = ScenarioConfig {
            pool: PoolSpec { n_zc: 839, r_roots: 4, n_ss: 32, l: 2 },
            activity: Activity::Fixed { n_active: 10 },
            channel: ChannelModelSpec::iid(128),
            layout: CellLayout::default(),
            snr_db: 0.0,
            alpha_th_db: 5.0,
            trials: 1,
            master_seed: 1,
            receiver,
        };
        let scenario = Scenario::prepare(config, 0).unwrap();
        let mut t = 0;
        g.bench_function(format!("{receiver:?}").to_lowercase(), |b| {
            b.iter(|| {
                t += 1;
                scenario.run_trial(t)
            })
        });
    }
    g.finish();
}

criterion_group!(benches, zc, pool, analytic, trial);
criterion_main!(benches);
