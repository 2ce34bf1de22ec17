use std::collections::BTreeMap;

use pdra_core::analytic::{
    p_no_pattern_collision, p_no_pattern_collision_random_activity, success_probability,
    success_probability_random_activity,
};
use pdra_core::sim::{run_point, wilson_interval, PointStatus};
use pdra_core::{Activity, AnalyticParams, PilotPool, PoolDescriptor, ScenarioConfig, Scheme, TaggedEvent};

use crate::spec::{ExperimentSpec, Metric, Point};

/// One output row.
#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub point: usize,
    pub config: ScenarioConfig,
    pub metric: Metric,
    pub sim: Option<Estimate>,
    pub analytic: Option<(f64, &'static str)>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub p: f64,
    pub ci: (f64, f64),
    pub trials: u64,
}

/// Pools already built, keyed by (n_zc, R, N_SS, L).
#[derive(Default)]
pub struct PoolCache {
    pools: BTreeMap<(usize, usize, usize, usize), Result<PoolDescriptor, String>>,
}

impl PoolCache {
    fn get(&mut self, c: &ScenarioConfig) -> Result<PoolDescriptor, String> {
        let p = c.pool;
        self.pools
            .entry((p.n_zc, p.r_roots, p.n_ss, p.l))
            .or_insert_with(|| {
                PilotPool::with_default_roots(p.n_zc, p.r_roots, p.n_ss, p.l)
                    .map(|pool| pool.descriptor())
                    .map_err(|e| e.to_string())
            })
            .clone()
    }

    pub fn descriptors(&self) -> Vec<PoolDescriptor> {
        self.pools.values().filter_map(|p| p.as_ref().ok().cloned()).collect()
    }
}

fn analytic(c: &ScenarioConfig, metric: Metric, n_p: f64) -> Result<(f64, &'static str), String> {
    let p = c.pool;
    match metric {
        Metric::NoCollision => match c.activity {
            Activity::Fixed { n_active } => Ok(p_no_pattern_collision(n_active, n_p)),
            Activity::Binomial { population, p_a } => {
                p_no_pattern_collision_random_activity(p_a, population, n_p).map_err(|e| e.to_string())
            }
        }
        .map(|v| (v, "closed-form")),
        Metric::Success => {
            let scheme = Scheme::from_l(p.l).map_err(|e| e.to_string())?;
            let base = AnalyticParams::new(1, p.r_roots, p.n_ss, p.n_zc, c.alpha_th_linear());
            let v = match c.activity {
                Activity::Fixed { n_active } => {
                    success_probability(&AnalyticParams { n_active, ..base }, scheme)
                }
                Activity::Binomial { population, p_a } => {
                    success_probability_random_activity(p_a, population, &base, scheme)
                }
            };
            v.map(|v| (v, scheme.source())).map_err(|e| e.to_string())
        }
    }
}

/// Evaluate one grid point. Failures are reported in the row, never raised.
pub fn evaluate(spec: &ExperimentSpec, index: usize, point: &Point, pools: &mut PoolCache) -> Row {
    let config = point.scenario(spec);
    let mut row = Row { point: index, config, metric: spec.metric, sim: None, analytic: None, error: None };
    let descriptor = match pools.get(&config) {
        Ok(d) => d,
        Err(e) => {
            row.error = Some(e);
            return row;
        }
    };
    if spec.mode.analytic() {
        match analytic(&config, spec.metric, descriptor.n_p as f64) {
            Ok(v) => row.analytic = Some(v),
            Err(e) => {
                row.error = Some(e);
                return row;
            }
        }
    }
    if spec.mode.simulate() {
        let res = run_point(config, index as u64);
        if let PointStatus::Failed(msg) = res.status {
            row.error = Some(msg);
            return row;
        }
        let n = res.trials_used;
        let hits = match spec.metric {
            Metric::Success => res.successes,
            Metric::NoCollision => n - res.event_counts[TaggedEvent::IdenticalCollision.index()],
        };
        row.sim = Some(Estimate { p: hits as f64 / n as f64, ci: wilson_interval(hits, n), trials: n });
    }
    row
}
