use std::f64::consts::PI;

use pdra_core::geometry::{
    correlation_matrix, drop_ue, pathloss_db, sample_channel, shadow_fading_db, uniform_in_hexagon,
    LinkScenario,
};
use pdra_core::pool::PilotPool;
use pdra_core::sim::rng::substream;
use pdra_core::{CellLayout, ChannelModelSpec, Complex64, UePlacement};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use statrs::distribution::{ChiSquared, ContinuousCDF};

fn chi_square(counts: &[u64], expected: f64) -> f64 {
    counts.iter().map(|&c| (c as f64 - expected).powi(2) / expected).sum()
}

fn chi_square_critical(dof: usize, alpha: f64) -> f64 {
    ChiSquared::new(dof as f64).unwrap().inverse_cdf(1.0 - alpha)
}

/// Two-sample Kolmogorov-Smirnov statistic.
fn ks_statistic(mut a: Vec<f64>, mut b: Vec<f64>) -> f64 {
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j, mut d) = (0, 0, 0.0f64);
    while i < a.len() && j < b.len() {
        if a[i] <= b[j] {
            i += 1;
        } else {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    d
}

#[test]
fn pattern_sampling_is_uniform() {
    let pool = PilotPool::with_default_roots(839, 2, 32, 2).unwrap();
    assert_eq!(pool.n_p(), 992);
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut counts = vec![0u64; 992];
    let draws = 1_000_000;
    for _ in 0..draws {
        counts[pool.sample_pattern(&mut rng) as usize] += 1;
    }
    let stat = chi_square(&counts, draws as f64 / 992.0);
    assert!(stat < chi_square_critical(991, 0.01), "chi-square {stat}");

    let single = PilotPool::with_default_roots(839, 1, 2, 2).unwrap();
    assert_eq!(single.n_p(), 1);
    assert!((0..100).all(|_| single.sample_pattern(&mut rng) == 0));
}

#[test]
fn drops_respect_the_cell_and_exclusion_disk() {
    let layout = CellLayout::default();
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
    for _ in 0..100_000 {
        let ue = drop_ue(&layout, &mut rng);
        lo = lo.min(ue.distance_m);
        hi = hi.max(ue.distance_m);
    }
    assert!(lo >= 30.0 && hi <= 500.0, "{lo} {hi}");

    // fraction of uniform hexagon points the exclusion disk rejects
    let n = 400_000;
    let inside = (0..n)
        .filter(|_| {
            let (x, y) = uniform_in_hexagon(500.0, &mut rng);
            x.hypot(y) < 30.0
        })
        .count();
    let frac = inside as f64 / n as f64;
    let expected = PI * 900.0 / (1.5 * 3f64.sqrt() * 250_000.0);
    let se = (expected * (1.0 - expected) / n as f64).sqrt();
    assert!((frac - expected).abs() < 4.0 * se, "{frac} vs {expected}");
}

#[test]
fn drop_angles_are_uniform() {
    // 30-degree bins aligned with the hexagon's vertices and edge midpoints
    // carry equal mass by symmetry
    let layout = CellLayout::default();
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let n = 120_000;
    let mut counts = vec![0u64; 12];
    for _ in 0..n {
        let a = drop_ue(&layout, &mut rng).angle_rad;
        assert!(a > -PI && a <= PI);
        let bin = (((a + PI) / (2.0 * PI)) * 12.0).floor() as usize;
        counts[bin.min(11)] += 1;
    }
    let stat = chi_square(&counts, n as f64 / 12.0);
    assert!(stat < chi_square_critical(11, 0.01), "chi-square {stat}");
}

#[test]
fn iid_channel_power() {
    let spec = ChannelModelSpec::iid(128);
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    let n = 10_000;
    let mean: f64 = (0..n)
        .map(|_| sample_channel(&spec, &UePlacement::broadside(), &mut rng).norm_squared() / 128.0)
        .sum::<f64>()
        / n as f64;
    assert!((mean - 1.0).abs() < 0.02, "{mean}");
}

#[test]
fn correlated_channel_covariance() {
    let m = 4;
    let rho = 0.7;
    let placement = UePlacement::from_xy(120.0, 210.0);
    let delta = placement.angle_rad;
    let spec = ChannelModelSpec::correlated(m, rho);
    let target = correlation_matrix(m, rho, delta).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(15);
    let n = 100_000;
    let mut acc = vec![Complex64::new(0.0, 0.0); m * m];
    for _ in 0..n {
        let h = sample_channel(&spec, &placement, &mut rng);
        for i in 0..m {
            for j in 0..m {
                acc[i * m + j] += h[i] * h[j].conj();
            }
        }
    }
    for i in 0..m {
        for j in 0..m {
            let est = acc[i * m + j] / n as f64;
            let t = target[(i, j)];
            // E|h_i h_j^*|^2 = 1 + |R_ij|^2 <= 2
            let se = (2.0 / n as f64).sqrt();
            assert!((est - t).norm() < 3.0 * se, "({i},{j}) {est} vs {t}");
        }
    }
    let adjacent = acc[1] / n as f64;
    assert!((adjacent - Complex64::from_polar(0.7, delta)).norm() < 0.02);
}

#[test]
fn zero_correlation_matches_iid() {
    let placement = UePlacement::from_xy(-80.0, 300.0);
    let mut rng = ChaCha8Rng::seed_from_u64(16);
    let collect = |spec: ChannelModelSpec, rng: &mut ChaCha8Rng| -> Vec<f64> {
        (0..2_000)
            .flat_map(|_| sample_channel(&spec, &placement, rng).iter().map(|x| x.re).collect::<Vec<_>>())
            .collect()
    };
    let a = collect(ChannelModelSpec::iid(16), &mut rng);
    let b = collect(ChannelModelSpec::correlated(16, 0.0), &mut rng);
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let d = ks_statistic(a, b);
    let critical = 1.628 * ((na + nb) / (na * nb)).sqrt();
    assert!(d < critical, "KS {d} vs {critical}");
}

#[test]
fn channel_sampling_is_deterministic() {
    let spec = ChannelModelSpec::correlated(64, 0.7);
    let p = UePlacement::from_xy(10.0, 40.0);
    let a = sample_channel(&spec, &p, &mut substream(1, 2, 3));
    let b = sample_channel(&spec, &p, &mut substream(1, 2, 3));
    let c = sample_channel(&spec, &p, &mut substream(1, 2, 4));
    assert_eq!(a, b);
    assert_ne!(a, c);
}

#[test]
fn link_budget() {
    let step = pathloss_db(200.0, LinkScenario::Nlos) - pathloss_db(100.0, LinkScenario::Nlos);
    assert!((step - 38.0 * 2f64.log10()).abs() < 1e-12);
    assert!((step - 11.44).abs() < 0.01);
    for d in [1.5, 30.0, 500.0] {
        assert!(pathloss_db(d, LinkScenario::Los) <= pathloss_db(d, LinkScenario::Nlos));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let n = 100_000;
    let xs: Vec<f64> = (0..n).map(|_| shadow_fading_db(LinkScenario::Nlos, &mut rng)).collect();
    let mean = xs.iter().sum::<f64>() / n as f64;
    let sd = (xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64).sqrt();
    assert!((sd - 10.0).abs() < 0.1, "{sd}");
    assert!(mean.abs() < 0.1);
}
