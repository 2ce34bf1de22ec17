use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::stats::wilson_interval;
use super::trial::{Scenario, TaggedEvent, TrialOutcome};
use super::{Activity, ScenarioConfig};
use crate::analytic::{
    success_probability, success_probability_random_activity, AnalyticParams, Scheme,
};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", content = "message", rename_all = "kebab-case")]
pub enum PointStatus {
    Ok,
    Failed(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub point_id: u64,
    pub config: ScenarioConfig,
    pub status: PointStatus,
    pub trials_used: u64,
    pub successes: u64,
    pub empirical_p_success: f64,
    pub wilson_ci_95: (f64, f64),
    pub analytic_p_success: Option<f64>,
    /// `closed-form` or `derived`, see [`Scheme::source`].
    pub analytic_source: Option<String>,
    /// Trials per [`TaggedEvent`], indexed by [`TaggedEvent::index`].
    pub event_counts: [u64; 4],
    pub symbol_errors: u64,
    pub detections: u64,
}

impl SweepResult {
    fn failed(point_id: u64, config: ScenarioConfig, message: String) -> Self {
        Self {
            point_id,
            config,
            status: PointStatus::Failed(message),
            trials_used: 0,
            successes: 0,
            empirical_p_success: f64::NAN,
            wilson_ci_95: (f64::NAN, f64::NAN),
            analytic_p_success: None,
            analytic_source: None,
            event_counts: [0; 4],
            symbol_errors: 0,
            detections: 0,
        }
    }

    pub fn is_ok(&self) -> bool {
        self.status == PointStatus::Ok
    }

    pub fn ci_half_width(&self) -> f64 {
        (self.wilson_ci_95.1 - self.wilson_ci_95.0) / 2.0
    }

    /// Symbol error rate among trials that reached data detection.
    pub fn symbol_error_rate(&self) -> Option<f64> {
        (self.detections > 0).then(|| self.symbol_errors as f64 / self.detections as f64)
    }
}

/// Closed-form success probability for a scenario, when one exists.
pub fn analytic_value(config: &ScenarioConfig) -> Option<(f64, Scheme)> {
    let scheme = Scheme::from_l(config.pool.l).ok()?;
    let p = config.pool;
    let base = AnalyticParams::new(1, p.r_roots, p.n_ss, p.n_zc, config.alpha_th_linear());
    let value = match config.activity {
        Activity::Fixed { n_active } => {
            success_probability(&AnalyticParams { n_active, ..base }, scheme)
        }
        Activity::Binomial { population, p_a } => {
            success_probability_random_activity(p_a, population, &base, scheme)
        }
    };
    value.ok().map(|v| (v, scheme))
}

fn aggregate(point_id: u64, config: ScenarioConfig, outcomes: &[TrialOutcome]) -> SweepResult {
    let trials = outcomes.len() as u64;
    let successes = outcomes.iter().filter(|o| o.success).count() as u64;
    let mut event_counts = [0u64; 4];
    let (mut detections, mut symbol_errors) = (0, 0);
    for o in outcomes {
        event_counts[o.tagged_event.index()] += 1;
        if let Some(err) = o.symbol_error {
            detections += 1;
            symbol_errors += u64::from(err);
        }
    }
    let analytic = analytic_value(&config);
    SweepResult {
        point_id,
        config,
        status: PointStatus::Ok,
        trials_used: trials,
        successes,
        empirical_p_success: successes as f64 / trials as f64,
        wilson_ci_95: wilson_interval(successes, trials),
        analytic_p_success: analytic.map(|(v, _)| v),
        analytic_source: analytic.map(|(_, s)| s.source().to_string()),
        event_counts,
        symbol_errors,
        detections,
    }
}

/// Run all trials of a prepared scenario on the current rayon pool. Outcomes
/// come back in trial order.
pub fn run_outcomes(scenario: &Scenario) -> Vec<TrialOutcome> {
    (0..scenario.config().trials)
        .into_par_iter()
        .map(|t| scenario.run_trial(t))
        .collect()
}

/// Run one grid point; configuration errors are reported in the status.
pub fn run_point(config: ScenarioConfig, point_id: u64) -> SweepResult {
    match Scenario::prepare(config, point_id) {
        Ok(scenario) => aggregate(point_id, config, &run_outcomes(&scenario)),
        Err(e) => SweepResult::failed(point_id, config, e.to_string()),
    }
}

/// Run every grid point in order; point `i` uses substreams keyed by `i`.
pub fn run_campaign(points: &[ScenarioConfig]) -> Vec<SweepResult> {
    points
        .iter()
        .enumerate()
        .map(|(i, &config)| run_point(config, i as u64))
        .collect()
}

/// Event frequencies of a finished point.
pub fn event_rate(result: &SweepResult, event: TaggedEvent) -> f64 {
    result.event_counts[event.index()] as f64 / result.trials_used as f64
}
