//! Experiment specification: presets, config files and grid expansion.
//!
//! Values are layered preset < config file < command line (flags, then
//! environment). A field set in a later layer replaces the whole list from
//! the earlier one.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::ValueEnum;
use pdra_core::sim::PoolSpec;
use pdra_core::{Activity, CellLayout, ChannelModelSpec, ReceiverPath, ScenarioConfig};
use serde::{Deserialize, Serialize};

pub const DEFAULT_SEED: u64 = 1;
pub const DEFAULT_TRIALS: u64 = 10_000;
pub const DEFAULT_POPULATION: usize = 10_000;

/// Per-UE SNR of the noise-limited presets (fig2, fig6).
pub const SNR_LOW_DB: f64 = -13.0;
/// Per-UE SNR of the interference-limited presets (fig3, fig5).
pub const SNR_HIGH_DB: f64 = 0.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Preset {
    /// Success vs R for M in {128, 256, 512}, N = 10.
    Fig2,
    /// Success vs R at M = 128, P_A = 0.1%, PDRA and conventional.
    Fig3,
    /// Pattern-collision-free probability vs N for L in {1, 2, 3}.
    Fig4,
    /// As fig3 with P_A = 0.15%.
    Fig5,
    /// As fig3 under correlated fading, rho in {0, 0.7}, M in {128, 256}.
    Fig6,
    /// The 19-cell layout and one UE drop.
    Topology,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    Analytic,
    Simulate,
    #[default]
    Both,
}

impl Mode {
    pub fn analytic(self) -> bool {
        matches!(self, Mode::Analytic | Mode::Both)
    }

    pub fn simulate(self) -> bool {
        matches!(self, Mode::Simulate | Mode::Both)
    }
}

/// What a point reports as its probability.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Metric {
    /// Successful access: no blocking collision and SINR above threshold.
    #[default]
    Success,
    /// No other UE drew the tagged UE's pattern.
    NoCollision,
}

impl Metric {
    pub fn as_str(self) -> &'static str {
        match self {
            Metric::Success => "success",
            Metric::NoCollision => "no-collision",
        }
    }
}

/// Innermost grid axis, i.e. the x-axis of the figure.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum XAxis {
    #[default]
    R,
    Load,
}

/// A scalar or a list in the config file.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum OneOrMany<T> {
    One(T),
    Many(Vec<T>),
}

impl<T> OneOrMany<T> {
    fn into_vec(self) -> Vec<T> {
        match self {
            OneOrMany::One(x) => vec![x],
            OneOrMany::Many(v) => v,
        }
    }
}

/// Flat key-value config file.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub preset: Option<Preset>,
    pub mode: Option<Mode>,
    pub out: Option<PathBuf>,
    pub seed: Option<u64>,
    pub trials: Option<u64>,
    pub threads: Option<usize>,
    pub metric: Option<Metric>,
    pub receiver: Option<ReceiverPath>,
    pub x_axis: Option<XAxis>,
    pub n_zc: Option<usize>,
    pub population: Option<usize>,
    pub r: Option<OneOrMany<usize>>,
    pub m: Option<OneOrMany<usize>>,
    pub n_ss: Option<OneOrMany<usize>>,
    pub l: Option<OneOrMany<usize>>,
    pub n: Option<OneOrMany<usize>>,
    pub p_a: Option<OneOrMany<f64>>,
    pub rho: Option<OneOrMany<f64>>,
    pub snr_db: Option<OneOrMany<f64>>,
    pub alpha_th_db: Option<OneOrMany<f64>>,
}

impl ConfigFile {
    pub fn parse(text: &str) -> Result<Self> {
        Ok(toml::from_str(text)?)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("cannot read config {}", path.display()))?;
        Self::parse(&text).with_context(|| format!("invalid config {}", path.display()))
    }
}

/// Number of active UEs: fixed, or random with each of `population - 1`
/// others active with probability `p_a`.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Load {
    Fixed { n: Vec<usize> },
    Random { population: usize, p_a: Vec<f64> },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Grid {
    pub n_zc: usize,
    pub r: Vec<usize>,
    pub m: Vec<usize>,
    pub n_ss: Vec<usize>,
    pub l: Vec<usize>,
    pub load: Load,
    pub rho: Vec<f64>,
    pub snr_db: Vec<f64>,
    pub alpha_th_db: Vec<f64>,
}

impl Default for Grid {
    fn default() -> Self {
        Self {
            n_zc: 839,
            r: vec![1, 2, 3, 4],
            m: vec![128],
            n_ss: vec![32],
            l: vec![2],
            load: Load::Fixed { n: vec![10] },
            rho: vec![0.0],
            snr_db: vec![SNR_HIGH_DB],
            alpha_th_db: vec![5.0],
        }
    }
}

/// Fully resolved experiment.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentSpec {
    pub preset: Option<Preset>,
    pub mode: Mode,
    pub metric: Metric,
    pub receiver: ReceiverPath,
    pub x_axis: XAxis,
    pub out: PathBuf,
    pub seed: u64,
    pub trials: u64,
    pub threads: Option<usize>,
    pub grid: Grid,
}

/// Command-line values, already merged with their environment fallbacks.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub preset: Option<Preset>,
    pub mode: Option<Mode>,
    pub out: Option<PathBuf>,
    pub seed: Option<u64>,
    pub trials: Option<u64>,
    pub threads: Option<usize>,
}

fn preset_spec(preset: Option<Preset>) -> ExperimentSpec {
    let mut spec = ExperimentSpec {
        preset,
        mode: Mode::Both,
        metric: Metric::Success,
        receiver: ReceiverPath::Projected,
        x_axis: XAxis::R,
        out: PathBuf::from(format!(
            "{}.csv",
            preset
                .and_then(|p| p.to_possible_value())
                .map_or("pdra".to_string(), |v| v.get_name().to_string())
        )),
        seed: DEFAULT_SEED,
        trials: DEFAULT_TRIALS,
        threads: None,
        grid: Grid::default(),
    };
    let random = |p_a| Load::Random { population: DEFAULT_POPULATION, p_a: vec![p_a] };
    let g = &mut spec.grid;
    match preset {
        None | Some(Preset::Topology) => {}
        Some(Preset::Fig2) => {
            g.m = vec![128, 256, 512];
            g.snr_db = vec![SNR_LOW_DB];
        }
        Some(Preset::Fig3) | Some(Preset::Fig5) => {
            g.n_ss = vec![32, 64];
            g.l = vec![1, 2];
            g.load = random(if preset == Some(Preset::Fig3) { 0.001 } else { 0.0015 });
        }
        Some(Preset::Fig4) => {
            spec.mode = Mode::Analytic;
            spec.metric = Metric::NoCollision;
            spec.x_axis = XAxis::Load;
            g.l = vec![1, 2, 3];
            g.load = Load::Fixed { n: (1..=100).collect() };
        }
        Some(Preset::Fig6) => {
            g.m = vec![128, 256];
            g.n_ss = vec![32, 64];
            g.l = vec![1, 2];
            g.rho = vec![0.0, 0.7];
            g.snr_db = vec![SNR_LOW_DB];
            g.load = random(0.001);
        }
    }
    spec
}

fn non_empty<T>(key: &str, v: Vec<T>) -> Result<Vec<T>> {
    if v.is_empty() {
        bail!("`{key}` must not be empty");
    }
    Ok(v)
}

/// Layer preset, config file and command line into a validated spec.
pub fn resolve(config: ConfigFile, cli: Overrides) -> Result<ExperimentSpec> {
    let preset = cli.preset.or(config.preset);
    let mut spec = preset_spec(preset);
    let g = &mut spec.grid;

    if let Some(v) = config.n_zc {
        g.n_zc = v;
    }
    if let Some(v) = config.r {
        g.r = non_empty("r", v.into_vec())?;
    }
    if let Some(v) = config.m {
        g.m = non_empty("m", v.into_vec())?;
    }
    if let Some(v) = config.n_ss {
        g.n_ss = non_empty("n_ss", v.into_vec())?;
    }
    if let Some(v) = config.l {
        g.l = non_empty("l", v.into_vec())?;
    }
    if let Some(v) = config.rho {
        g.rho = non_empty("rho", v.into_vec())?;
    }
    if let Some(v) = config.snr_db {
        g.snr_db = non_empty("snr_db", v.into_vec())?;
    }
    if let Some(v) = config.alpha_th_db {
        g.alpha_th_db = non_empty("alpha_th_db", v.into_vec())?;
    }
    match (config.n, config.p_a) {
        (Some(_), Some(_)) => bail!("`n` (fixed number of active UEs) and `p_a` (activity probability) are mutually exclusive"),
        (Some(n), None) => {
            if config.population.is_some() {
                bail!("`population` only applies with `p_a`, not with a fixed `n`");
            }
            g.load = Load::Fixed { n: non_empty("n", n.into_vec())? };
        }
        (None, Some(p_a)) => {
            g.load = Load::Random {
                population: config.population.unwrap_or(DEFAULT_POPULATION),
                p_a: non_empty("p_a", p_a.into_vec())?,
            };
        }
        (None, None) => {
            if let Some(pop) = config.population {
                match &mut g.load {
                    Load::Random { population, .. } => *population = pop,
                    Load::Fixed { .. } => bail!("`population` only applies with `p_a`, not with a fixed `n`"),
                }
            }
        }
    }
    if let Some(v) = config.metric {
        spec.metric = v;
    }
    if let Some(v) = config.receiver {
        spec.receiver = v;
    }
    if let Some(v) = config.x_axis {
        spec.x_axis = v;
    }

    spec.mode = cli.mode.or(config.mode).unwrap_or(spec.mode);
    spec.out = cli.out.or(config.out).unwrap_or(spec.out);
    spec.seed = cli.seed.or(config.seed).unwrap_or(spec.seed);
    spec.trials = cli.trials.or(config.trials).unwrap_or(spec.trials);
    spec.threads = cli.threads.or(config.threads);

    validate(&spec)?;
    Ok(spec)
}

fn validate(spec: &ExperimentSpec) -> Result<()> {
    let g = &spec.grid;
    if spec.trials == 0 {
        bail!("`trials` must be >= 1");
    }
    if spec.threads == Some(0) {
        bail!("`threads` must be >= 1");
    }
    if spec.mode.analytic() && spec.metric == Metric::Success && g.l.iter().any(|&l| l > 2) {
        bail!("analytic model defined only for L ∈ {{1,2}} (got l = {:?}); use mode = \"simulate\" or metric = \"no-collision\"", g.l);
    }
    if g.r.contains(&0) || g.m.contains(&0) || g.l.contains(&0) {
        bail!("`r`, `m` and `l` must be >= 1");
    }
    if let Some(&l) = g.l.iter().find(|&&l| g.n_ss.iter().any(|&s| l > s)) {
        bail!("`l` = {l} exceeds a subset size in `n_ss` = {:?}", g.n_ss);
    }
    if let Some(rho) = g.rho.iter().find(|r| !(0.0..1.0).contains(*r)) {
        bail!("`rho` must lie in [0, 1), got {rho}");
    }
    if g.snr_db.iter().chain(&g.alpha_th_db).any(|x| !x.is_finite()) {
        bail!("`snr_db` and `alpha_th_db` must be finite");
    }
    match &g.load {
        Load::Fixed { n } if n.contains(&0) => bail!("`n` must be >= 1"),
        Load::Random { population, p_a } => {
            if *population == 0 {
                bail!("`population` must be >= 1");
            }
            if let Some(p) = p_a.iter().find(|p| !(0.0..=1.0).contains(*p)) {
                bail!("`p_a` must lie in [0, 1], got {p}");
            }
        }
        _ => {}
    }
    Ok(())
}

/// Activity of one grid point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PointLoad {
    Fixed(usize),
    Random { population: usize, p_a: f64 },
}

/// One expanded grid point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point {
    pub r: usize,
    pub m: usize,
    pub n_ss: usize,
    pub l: usize,
    pub load: PointLoad,
    pub rho: f64,
    pub snr_db: f64,
    pub alpha_th_db: f64,
}

impl Point {
    pub fn scenario(&self, spec: &ExperimentSpec) -> ScenarioConfig {
        let channel = if self.rho == 0.0 {
            ChannelModelSpec::iid(self.m)
        } else {
            ChannelModelSpec::correlated(self.m, self.rho)
        };
        ScenarioConfig {
            pool: PoolSpec {
                n_zc: spec.grid.n_zc,
                r_roots: self.r,
                n_ss: self.n_ss,
                l: self.l,
            },
            activity: match self.load {
                PointLoad::Fixed(n_active) => Activity::Fixed { n_active },
                PointLoad::Random { population, p_a } => Activity::Binomial { population, p_a },
            },
            channel,
            layout: CellLayout::default(),
            snr_db: self.snr_db,
            alpha_th_db: self.alpha_th_db,
            trials: spec.trials,
            master_seed: spec.seed,
            receiver: spec.receiver,
        }
    }
}

impl ExperimentSpec {
    /// Grid points in output order; the x-axis varies fastest.
    pub fn points(&self) -> Vec<Point> {
        let g = &self.grid;
        let loads: Vec<PointLoad> = match &g.load {
            Load::Fixed { n } => n.iter().map(|&n| PointLoad::Fixed(n)).collect(),
            Load::Random { population, p_a } => p_a
                .iter()
                .map(|&p_a| PointLoad::Random { population: *population, p_a })
                .collect(),
        };
        let mut out = Vec::new();
        for &m in &g.m {
            for &n_ss in &g.n_ss {
                for &l in &g.l {
                    for &rho in &g.rho {
                        for &snr_db in &g.snr_db {
                            for &alpha_th_db in &g.alpha_th_db {
                                let mut push = |r, load| {
                                    out.push(Point { r, m, n_ss, l, load, rho, snr_db, alpha_th_db })
                                };
                                match self.x_axis {
                                    XAxis::R => {
                                        for &load in &loads {
                                            for &r in &g.r {
                                                push(r, load);
                                            }
                                        }
                                    }
                                    XAxis::Load => {
                                        for &r in &g.r {
                                            for &load in &loads {
                                                push(r, load);
                                            }
                                        }
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
        out
    }
}
