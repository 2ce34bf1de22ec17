use nalgebra::DVector;
use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};
use serde::{Deserialize, Serialize};

use super::receiver::{
    build_received_pilot, detect_data_symbol, mf_channel_estimate, mf_sinr, qpsk_decide, qpsk_symbol,
};
use super::rng::substream;
use super::{Activity, ReceiverPath, ScenarioConfig};
use crate::error::{Error, Result};
use crate::geometry::{complex_normal, drop_ue, sample_channel, ChannelKind, UePlacement};
use crate::pool::{CorrelationTable, PatternId, PilotPool};

/// What the tagged UE's pattern collided with.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TaggedEvent {
    /// Another UE drew the identical pattern.
    IdenticalCollision,
    /// No component is shared with a same-root UE.
    E0,
    /// Exactly one component is shared.
    E1,
    /// Two or more components are shared (by different UEs).
    E2,
}

impl TaggedEvent {
    pub const ALL: [TaggedEvent; 4] = [
        TaggedEvent::IdenticalCollision,
        TaggedEvent::E0,
        TaggedEvent::E1,
        TaggedEvent::E2,
    ];

    pub fn index(self) -> usize {
        match self {
            TaggedEvent::IdenticalCollision => 0,
            TaggedEvent::E0 => 1,
            TaggedEvent::E1 => 2,
            TaggedEvent::E2 => 3,
        }
    }

    pub fn allows_estimation(self) -> bool {
        matches!(self, TaggedEvent::E0 | TaggedEvent::E1)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrialOutcome {
    pub n_active: usize,
    /// Other UEs on a different root than the tagged UE.
    pub k_different_root: usize,
    pub tagged_event: TaggedEvent,
    /// Absent when the event rules out channel estimation.
    pub sinr_linear: Option<f64>,
    pub symbol_error: Option<bool>,
    pub success: bool,
}

/// Classify the tagged pattern against all other active UEs. Components of
/// different-root UEs never count as collisions.
pub fn classify_tagged_collision(tagged: &PatternId, others: &[PatternId]) -> TaggedEvent {
    if others.iter().any(|o| o == tagged) {
        return TaggedEvent::IdenticalCollision;
    }
    match shared_components(tagged, others).iter().filter(|&&s| s).count() {
        0 => TaggedEvent::E0,
        1 => TaggedEvent::E1,
        _ => TaggedEvent::E2,
    }
}

fn shared_components(tagged: &PatternId, others: &[PatternId]) -> Vec<bool> {
    tagged
        .shifts
        .iter()
        .map(|v| {
            others
                .iter()
                .any(|o| o.root_idx == tagged.root_idx && o.shifts.contains(v))
        })
        .collect()
}

/// Despreading vector `weight * sum_v c_{root, v}`.
#[derive(Debug, Clone, PartialEq)]
pub struct Despreader {
    pub root_idx: usize,
    pub shifts: Vec<usize>,
    pub weight: f64,
}

impl Despreader {
    /// Full pattern for E0, first collision-free component for E1.
    pub fn for_event(tagged: &PatternId, others: &[PatternId], event: TaggedEvent) -> Option<Self> {
        match event {
            TaggedEvent::E0 => Some(Self {
                root_idx: tagged.root_idx,
                shifts: tagged.shifts.clone(),
                weight: 1.0 / (tagged.shifts.len() as f64).sqrt(),
            }),
            TaggedEvent::E1 => {
                let shared = shared_components(tagged, others);
                let free = tagged
                    .shifts
                    .iter()
                    .zip(&shared)
                    .find(|(_, &s)| !s)
                    .map(|(&v, _)| v)?;
                Some(Self {
                    root_idx: tagged.root_idx,
                    shifts: vec![free],
                    weight: 1.0,
                })
            }
            _ => None,
        }
    }

    pub fn materialize(&self, pool: &PilotPool) -> Result<Vec<Complex64>> {
        let mut out = vec![Complex64::new(0.0, 0.0); pool.n_zc()];
        for &v in &self.shifts {
            let c = pool.component(self.root_idx, v)?;
            for (o, x) in out.iter_mut().zip(c.samples()) {
                *o += x * self.weight;
            }
        }
        Ok(out)
    }
}

/// A validated scenario with its pool and correlation table built once.
#[derive(Debug, Clone)]
pub struct Scenario {
    config: ScenarioConfig,
    point_id: u64,
    pool: PilotPool,
    table: CorrelationTable,
    snr: f64,
    alpha_th: f64,
}

impl Scenario {
    pub fn prepare(config: ScenarioConfig, point_id: u64) -> Result<Self> {
        config.validate()?;
        let p = config.pool;
        let pool = PilotPool::with_default_roots(p.n_zc, p.r_roots, p.n_ss, p.l)?;
        let table = CorrelationTable::new(&pool);
        Ok(Self {
            snr: config.snr_linear(),
            alpha_th: config.alpha_th_linear(),
            config,
            point_id,
            pool,
            table,
        })
    }

    pub fn config(&self) -> &ScenarioConfig {
        &self.config
    }

    pub fn pool(&self) -> &PilotPool {
        &self.pool
    }

    pub fn point_id(&self) -> u64 {
        self.point_id
    }

    fn rng(&self, trial_index: u64) -> ChaCha8Rng {
        substream(self.config.master_seed, self.point_id, trial_index)
    }

    fn draw_active(&self, rng: &mut ChaCha8Rng) -> usize {
        match self.config.activity {
            Activity::Fixed { n_active } => n_active,
            Activity::Binomial { population, p_a } => {
                let others = Binomial::new((population - 1) as u64, p_a)
                    .expect("validated activity")
                    .sample(rng);
                1 + others as usize
            }
        }
    }

    /// One random-access opportunity from the point of view of UE 0.
    pub fn run_trial(&self, trial_index: u64) -> TrialOutcome {
        let mut rng = self.rng(trial_index);
        let n_active = self.draw_active(&mut rng);
        let ids: Vec<PatternId> = (0..n_active)
            .map(|_| {
                let idx = self.pool.sample_pattern(&mut rng);
                self.pool.pattern_id(idx).expect("sampled index is in range")
            })
            .collect();
        let event = classify_tagged_collision(&ids[0], &ids[1..]);
        self.finish(ids, event, &mut rng)
    }

    /// E0 trial with exactly `k` other UEs, all on roots different from the
    /// tagged UE's. Needs at least two roots.
    pub fn run_interference_trial(&self, k: usize, trial_index: u64) -> Result<TrialOutcome> {
        let r = self.pool.n_roots();
        if r < 2 && k > 0 {
            return Err(Error::InvalidScenario(
                "different-root interferers need at least two roots".into(),
            ));
        }
        let mut rng = self.rng(trial_index);
        let n_ps = self.pool.n_ps();
        let mut ids = Vec::with_capacity(k + 1);
        ids.push(self.pool.pattern_id(rng.random_range(0..n_ps))?);
        for _ in 0..k {
            let root = rng.random_range(1..r as u64);
            ids.push(self.pool.pattern_id(root * n_ps + rng.random_range(0..n_ps))?);
        }
        let event = classify_tagged_collision(&ids[0], &ids[1..]);
        debug_assert_eq!(event, TaggedEvent::E0);
        Ok(self.finish(ids, event, &mut rng))
    }

    fn finish(&self, ids: Vec<PatternId>, event: TaggedEvent, rng: &mut ChaCha8Rng) -> TrialOutcome {
        let n_active = ids.len();
        let k_different_root = ids[1..]
            .iter()
            .filter(|o| o.root_idx != ids[0].root_idx)
            .count();
        let Some(despreader) = Despreader::for_event(&ids[0], &ids[1..], event) else {
            return TrialOutcome {
                n_active,
                k_different_root,
                tagged_event: event,
                sinr_linear: None,
                symbol_error: None,
                success: false,
            };
        };

        let channels = self.draw_channels(n_active, rng);
        let g = match self.config.receiver {
            ReceiverPath::Projected => self.projected_estimate(&ids, &channels, &despreader, rng),
            ReceiverPath::Full => self
                .full_estimate(&ids, &channels, &despreader, rng)
                .expect("pool-consistent dimensions"),
        };
        let sinr = mf_sinr(&g, &channels, self.snr);

        let m = self.config.m_antennas();
        let amp = self.snr.sqrt();
        let symbols: Vec<Complex64> = (0..n_active).map(|_| qpsk_symbol(rng.random_range(0..4u8))).collect();
        let mut z = DVector::from_fn(m, |_, _| complex_normal(rng));
        for (h, d) in channels.iter().zip(&symbols) {
            z.axpy(*d * amp, h, Complex64::new(1.0, 0.0));
        }
        let detected = detect_data_symbol(&g, &z);

        TrialOutcome {
            n_active,
            k_different_root,
            tagged_event: event,
            sinr_linear: Some(sinr),
            symbol_error: Some(qpsk_decide(detected) != symbols[0]),
            success: sinr >= self.alpha_th,
        }
    }

    fn draw_channels(&self, n: usize, rng: &mut ChaCha8Rng) -> Vec<DVector<Complex64>> {
        let spec = &self.config.channel;
        (0..n)
            .map(|_| {
                let placement = match spec.kind {
                    ChannelKind::IidRayleigh => UePlacement::broadside(),
                    ChannelKind::CorrelatedRayleigh => drop_ue(&self.config.layout, rng),
                };
                sample_channel(spec, &placement, rng)
            })
            .collect()
    }

    /// `g = sum_n sqrt(P) h_n <s_n, d>/|d| + w`, `w ~ CN(0, I)`.
    fn projected_estimate(
        &self,
        ids: &[PatternId],
        channels: &[DVector<Complex64>],
        d: &Despreader,
        rng: &mut ChaCha8Rng,
    ) -> DVector<Complex64> {
        let t = &self.table;
        let d_norm = t
            .superposition(d.root_idx, &d.shifts, d.weight, d.root_idx, &d.shifts, d.weight)
            .re
            .sqrt();
        let amp = self.snr.sqrt();
        let mut g = DVector::from_fn(self.config.m_antennas(), |_, _| complex_normal(rng));
        for (id, h) in ids.iter().zip(channels) {
            let w = 1.0 / (id.shifts.len() as f64).sqrt();
            let beta = t.superposition(id.root_idx, &id.shifts, w, d.root_idx, &d.shifts, d.weight) / d_norm;
            if beta.norm_sqr() > 0.0 {
                g.axpy(beta * amp, h, Complex64::new(1.0, 0.0));
            }
        }
        g
    }

    fn full_estimate(
        &self,
        ids: &[PatternId],
        channels: &[DVector<Complex64>],
        d: &Despreader,
        rng: &mut ChaCha8Rng,
    ) -> Result<DVector<Complex64>> {
        let waveforms = ids
            .iter()
            .map(|id| self.pool.materialize(id).map(|p| p.waveform))
            .collect::<Result<Vec<_>>>()?;
        let refs: Vec<&[Complex64]> = waveforms.iter().map(Vec::as_slice).collect();
        let y = build_received_pilot(
            channels,
            &refs,
            self.snr,
            self.config.m_antennas(),
            self.pool.n_zc(),
            rng,
        )?;
        mf_channel_estimate(&y, &d.materialize(&self.pool)?)
    }
}

/// Prepare `config` and run one trial of grid point 0.
pub fn run_trial(config: &ScenarioConfig, trial_index: u64) -> Result<TrialOutcome> {
    Ok(Scenario::prepare(*config, 0)?.run_trial(trial_index))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn id(root_idx: usize, shifts: &[usize]) -> PatternId {
        PatternId {
            root_idx,
            shifts: shifts.to_vec(),
        }
    }

    #[test]
    fn classification() {
        let tagged = id(0, &[0, 1]);
        assert_eq!(classify_tagged_collision(&tagged, &[]), TaggedEvent::E0);
        assert_eq!(
            classify_tagged_collision(&tagged, &[id(0, &[0, 1])]),
            TaggedEvent::IdenticalCollision
        );
        assert_eq!(
            classify_tagged_collision(&tagged, &[id(0, &[1, 2]), id(0, &[3, 4])]),
            TaggedEvent::E1
        );
        assert_eq!(
            classify_tagged_collision(&tagged, &[id(0, &[1, 2]), id(0, &[0, 4])]),
            TaggedEvent::E2
        );
        // same shifts on another root do not collide
        assert_eq!(
            classify_tagged_collision(&tagged, &[id(1, &[0, 1]), id(2, &[0, 5])]),
            TaggedEvent::E0
        );
    }

    #[test]
    fn e1_despreads_by_the_free_component() {
        let tagged = id(0, &[0, 1]);
        let others = [id(0, &[0, 7])];
        let d = Despreader::for_event(&tagged, &others, TaggedEvent::E1).unwrap();
        assert_eq!(d.shifts, vec![1]);
        assert_eq!(d.weight, 1.0);
        assert!(Despreader::for_event(&tagged, &others, TaggedEvent::E2).is_none());
    }
}
