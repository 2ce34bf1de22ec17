use nalgebra::DVector;
use pdra_core::analytic::{collision_event_probs, p_no_pattern_collision};
use pdra_core::geometry::complex_normal;
use pdra_core::sim::rng::substream;
use pdra_core::sim::{
    build_received_pilot, event_rate, run_campaign, run_outcomes, run_point, PoolSpec, Scenario,
};
use pdra_core::{
    Activity, CellLayout, ChannelModelSpec, Complex64, PilotPool, ReceiverPath, ScenarioConfig,
    TaggedEvent,
};
use statrs::function::erf::erfc;

fn config(r: usize, n_ss: usize, l: usize, m: usize, n_active: usize) -> ScenarioConfig {
    ScenarioConfig {
        pool: PoolSpec { n_zc: 839, r_roots: r, n_ss, l },
        activity: Activity::Fixed { n_active },
        channel: ChannelModelSpec::iid(m),
        layout: CellLayout::default(),
        snr_db: 0.0,
        alpha_th_db: 5.0,
        trials: 2_000,
        master_seed: 2024,
        receiver: ReceiverPath::Projected,
    }
}

#[test]
fn noise_only_pilot_has_unit_variance() {
    let mut rng = substream(1, 0, 0);
    let y = build_received_pilot(&[], &[], 1.0, 120, 839, &mut rng).unwrap();
    let n = y.len() as f64;
    let mean = y.iter().sum::<Complex64>() / n;
    let var = y.iter().map(|x| (x - mean).norm_sqr()).sum::<f64>() / (n - 1.0);
    assert!(n >= 1e5);
    assert!((var - 1.0).abs() < 0.02, "{var}");
}

#[test]
fn single_user_pilot_power() {
    let pool = PilotPool::with_default_roots(839, 1, 32, 2).unwrap();
    let pat = pool.pattern(17).unwrap();
    let snr = 3.0;
    let mut total = 0.0;
    let mut count = 0.0;
    for t in 0..4 {
        let mut rng = substream(2, 0, t);
        let h = DVector::from_fn(32, |_, _| complex_normal(&mut rng));
        let y = build_received_pilot(&[h], &[&pat.waveform], snr, 32, 839, &mut rng).unwrap();
        total += y.iter().map(|x| x.norm_sqr()).sum::<f64>();
        count += y.len() as f64;
    }
    // E|h s|^2 = 1 per entry on average, since |s|^2 averages to 1
    let per_entry = total / count;
    assert!((per_entry - (snr + 1.0)).abs() / (snr + 1.0) < 0.05, "{per_entry}");
}

#[test]
fn projected_and_full_paths_agree() {
    let mut base = config(3, 32, 2, 64, 8);
    base.snr_db = -15.0;
    base.trials = 3_000;
    let projected = Scenario::prepare(base, 0).unwrap();
    let full = Scenario::prepare(ScenarioConfig { receiver: ReceiverPath::Full, ..base }, 0).unwrap();
    let a = run_outcomes(&projected);
    let b = run_outcomes(&full);
    // patterns are drawn before any channel or noise, so events coincide
    for (x, y) in a.iter().zip(&b) {
        assert_eq!(x.tagged_event, y.tagged_event);
        assert_eq!(x.k_different_root, y.k_different_root);
    }
    let stats = |o: &[pdra_core::TrialOutcome]| {
        let v: Vec<f64> = o.iter().filter_map(|t| t.sinr_linear).map(f64::ln).collect();
        let mean = v.iter().sum::<f64>() / v.len() as f64;
        let var = v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (v.len() - 1) as f64;
        (mean, var / v.len() as f64)
    };
    let (ma, va) = stats(&a);
    let (mb, vb) = stats(&b);
    assert!((ma - mb).abs() < 4.0 * (va + vb).sqrt(), "{ma} vs {mb}");
}

#[test]
fn event_frequencies_match_the_model() {
    // one root: every other UE is same-root
    let mut cfg = config(1, 6, 2, 4, 6);
    cfg.trials = 40_000;
    cfg.alpha_th_db = -60.0;
    let res = run_point(cfg, 0);
    let n = res.trials_used as f64;
    let identical = event_rate(&res, TaggedEvent::IdenticalCollision);
    let p_ident = 1.0 - p_no_pattern_collision(6, 15.0);
    let tol = |p: f64, n: f64| 3.0 * 2.0 * 1.96 * (p * (1.0 - p) / n).sqrt();
    assert!((identical - p_ident).abs() < tol(p_ident, n), "{identical} vs {p_ident}");

    let rest = n * (1.0 - identical);
    let ev = collision_event_probs(5, 6).unwrap();
    let e0 = res.event_counts[TaggedEvent::E0.index()] as f64 / rest;
    let e1 = res.event_counts[TaggedEvent::E1.index()] as f64 / rest;
    assert!((e0 - ev.p_e0).abs() < tol(ev.p_e0, rest), "{e0} vs {}", ev.p_e0);
    assert!((e1 - ev.p_e1).abs() < tol(ev.p_e1, rest), "{e1} vs {}", ev.p_e1);

    // two roots: condition on the number of different-root UEs
    let mut cfg = config(2, 6, 2, 4, 5);
    cfg.trials = 40_000;
    let scenario = Scenario::prepare(cfg, 1).unwrap();
    let outcomes = run_outcomes(&scenario);
    for k in 0..4 {
        let given: Vec<_> = outcomes
            .iter()
            .filter(|o| o.k_different_root == k && o.tagged_event != TaggedEvent::IdenticalCollision)
            .collect();
        let m = given.len() as f64;
        if m < 2_000.0 {
            continue;
        }
        let ev = collision_event_probs(4 - k, 6).unwrap();
        let e0 = given.iter().filter(|o| o.tagged_event == TaggedEvent::E0).count() as f64 / m;
        assert!((e0 - ev.p_e0).abs() < tol(ev.p_e0, m), "K={k}: {e0} vs {}", ev.p_e0);
    }
}

fn qpsk_ser(sinr: f64) -> f64 {
    let q = 0.5 * erfc((sinr / 2.0).sqrt());
    1.0 - (1.0 - q) * (1.0 - q)
}

#[test]
fn symbol_errors_follow_the_sinr() {
    // low-SINR regime where errors are frequent enough to count
    let mut cfg = config(8, 32, 2, 8, 5);
    cfg.snr_db = -22.0;
    cfg.trials = 40_000;
    let scenario = Scenario::prepare(cfg, 0).unwrap();
    let outcomes: Vec<_> = (0..cfg.trials)
        .map(|t| scenario.run_interference_trial(4, t).unwrap())
        .collect();
    let n = outcomes.len() as f64;
    let errors = outcomes.iter().filter(|o| o.symbol_error == Some(true)).count() as f64;
    let predicted = outcomes.iter().map(|o| qpsk_ser(o.sinr_linear.unwrap())).sum::<f64>() / n;
    let ser = errors / n;
    let ci = 1.96 * (ser * (1.0 - ser) / n).sqrt();
    assert!(ser > 0.01, "{ser}");
    // the Gaussian approximation ignores the residual phase of g^H h, so allow
    // a relative margin on top of the sampling interval
    assert!((ser - predicted).abs() < ci + 0.15 * predicted, "SER {ser} vs predicted {predicted}");

    // nominal operating point: almost error-free, as the SINR predicts
    let mut cfg = config(8, 32, 2, 128, 5);
    cfg.snr_db = 5.0;
    cfg.trials = 10_000;
    let scenario = Scenario::prepare(cfg, 0).unwrap();
    let outcomes: Vec<_> = (0..cfg.trials)
        .map(|t| scenario.run_interference_trial(4, t).unwrap())
        .collect();
    let n = outcomes.len() as f64;
    let ser = outcomes.iter().filter(|o| o.symbol_error == Some(true)).count() as f64 / n;
    let predicted = outcomes.iter().map(|o| qpsk_ser(o.sinr_linear.unwrap())).sum::<f64>() / n;
    let upper = pdra_core::sim::wilson_interval((ser * n) as u64, n as u64).1;
    assert!(predicted <= upper + 1e-3, "SER {ser} vs predicted {predicted}");
}

#[test]
fn determinism_across_thread_counts() {
    let mut points = vec![config(2, 32, 2, 32, 10), config(3, 32, 1, 32, 10)];
    points.push(ScenarioConfig {
        activity: Activity::Binomial { population: 10_000, p_a: 0.001 },
        channel: ChannelModelSpec::correlated(32, 0.7),
        ..config(2, 32, 2, 32, 1)
    });
    let run = |threads: usize| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| run_campaign(&points))
    };
    let one = run(1);
    let eight = run(8);
    assert_eq!(format!("{one:?}"), format!("{eight:?}"));
    assert_eq!(one, run(3));
}

#[test]
fn single_pattern_pool_always_collides() {
    let cfg = config(1, 2, 2, 16, 2);
    let res = run_point(cfg, 0);
    assert_eq!(res.successes, 0);
    assert_eq!(res.event_counts[TaggedEvent::IdenticalCollision.index()], res.trials_used);
}

#[test]
fn lone_user_succeeds() {
    let mut cfg = config(4, 32, 2, 512, 1);
    cfg.snr_db = 5.0;
    cfg.trials = 500;
    let res = run_point(cfg, 0);
    assert_eq!(res.successes, res.trials_used);
}

#[test]
fn success_requires_estimation_and_threshold() {
    let mut cfg = config(2, 8, 2, 16, 12);
    cfg.snr_db = -15.0;
    let scenario = Scenario::prepare(cfg, 0).unwrap();
    let alpha = cfg.alpha_th_linear();
    for o in run_outcomes(&scenario) {
        if o.success {
            assert!(o.tagged_event.allows_estimation());
            assert!(o.sinr_linear.unwrap() >= alpha);
        }
        assert_eq!(o.sinr_linear.is_some(), o.tagged_event.allows_estimation());
    }
}

#[test]
fn success_is_antitone_in_threshold_and_load() {
    let mut cfg = config(2, 32, 2, 64, 10);
    cfg.snr_db = -3.0;
    let lo = run_point(cfg, 0);
    let hi = run_point(ScenarioConfig { alpha_th_db: 10.0, ..cfg }, 0);
    // same substreams: a higher threshold can only turn successes into failures
    assert!(hi.successes <= lo.successes);
    assert!(lo.successes > 0);

    let light = run_point(ScenarioConfig { activity: Activity::Fixed { n_active: 4 }, ..cfg }, 1);
    let heavy = run_point(ScenarioConfig { activity: Activity::Fixed { n_active: 40 }, ..cfg }, 2);
    assert!(heavy.wilson_ci_95.1 < light.wilson_ci_95.0, "{:?} {:?}", light.wilson_ci_95, heavy.wilson_ci_95);
}
