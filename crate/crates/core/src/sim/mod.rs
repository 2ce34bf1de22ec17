//! Monte-Carlo simulation of one random-access opportunity and campaigns of
//! many.
//!
//! Power convention: noise variance is 1 and the per-UE received power `P`
//! equals the linear SNR.

mod campaign;
mod receiver;
pub mod rng;
mod stats;
mod trial;

pub use campaign::{
    analytic_value, event_rate, run_campaign, run_outcomes, run_point, PointStatus, SweepResult,
};
pub use receiver::{
    build_received_pilot, detect_data_symbol, mf_channel_estimate, mf_sinr, qpsk_decide,
    qpsk_symbol,
};
pub use stats::wilson_interval;
pub use trial::{classify_tagged_collision, run_trial, Despreader, Scenario, TaggedEvent, TrialOutcome};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{CellLayout, ChannelModelSpec};
use crate::units::db_to_linear;

/// How many UEs contend in one opportunity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Activity {
    /// Exactly `n_active` UEs, the tagged one included.
    Fixed { n_active: usize },
    /// The tagged UE plus each of the other `population - 1` UEs
    /// independently with probability `p_a`.
    Binomial { population: usize, p_a: f64 },
}

/// How the despread pilot observation is produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ReceiverPath {
    /// Despread analytically: pilot inner products come from the
    /// correlation table and the despread noise `W d* / |d|` is drawn
    /// directly as `CN(0, I_M)`. Same distribution as [`ReceiverPath::Full`].
    #[default]
    Projected,
    /// Materialize the full `M x N_ZC` received pilot matrix.
    Full,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PoolSpec {
    pub n_zc: usize,
    pub r_roots: usize,
    pub n_ss: usize,
    pub l: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScenarioConfig {
    pub pool: PoolSpec,
    pub activity: Activity,
    pub channel: ChannelModelSpec,
    pub layout: CellLayout,
    pub snr_db: f64,
    pub alpha_th_db: f64,
    pub trials: u64,
    pub master_seed: u64,
    pub receiver: ReceiverPath,
}

impl ScenarioConfig {
    pub fn m_antennas(&self) -> usize {
        self.channel.m_antennas
    }

    pub fn snr_linear(&self) -> f64 {
        db_to_linear(self.snr_db)
    }

    pub fn alpha_th_linear(&self) -> f64 {
        db_to_linear(self.alpha_th_db)
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::InvalidScenario("trials must be >= 1".into()));
        }
        if !self.snr_db.is_finite() || !self.alpha_th_db.is_finite() {
            return Err(Error::InvalidScenario("snr_db and alpha_th_db must be finite".into()));
        }
        match self.activity {
            Activity::Fixed { n_active: 0 } => {
                return Err(Error::InvalidScenario("n_active must be >= 1".into()));
            }
            Activity::Binomial { population, p_a }
                if population == 0 || !(0.0..=1.0).contains(&p_a) =>
            {
                return Err(Error::InvalidScenario(format!(
                    "need population >= 1 and p_a in [0, 1], got {population} and {p_a}"
                )));
            }
            _ => {}
        }
        self.channel.validate()?;
        self.layout.validate()
    }
}
