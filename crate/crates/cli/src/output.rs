use std::fs::File;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use anyhow::{Context, Result};
use pdra_core::geometry::{drop_ue, pathloss_db, LinkScenario};
use pdra_core::sim::rng::substream;
use pdra_core::{Activity, CellLayout, ChannelKind, PoolDescriptor};
use serde::Serialize;

use crate::run::Row;
use crate::spec::ExperimentSpec;

#[derive(Serialize)]
struct CsvRow<'a> {
    point: usize,
    r: usize,
    m: usize,
    n_ss: usize,
    l: usize,
    n_zc: usize,
    n_active: Option<usize>,
    population: Option<usize>,
    p_a: Option<f64>,
    rho: f64,
    channel: &'static str,
    snr_db: f64,
    snr_linear: f64,
    alpha_th_db: f64,
    alpha_th_linear: f64,
    metric: &'static str,
    p_success_sim: Option<f64>,
    ci_lo: Option<f64>,
    ci_hi: Option<f64>,
    p_success_analytic: Option<f64>,
    analytic_source: Option<&'static str>,
    trials: Option<u64>,
    seed: u64,
    status: &'a str,
}

pub struct SweepWriter {
    csv: csv::Writer<File>,
}

impl SweepWriter {
    pub fn create(path: &Path) -> Result<Self> {
        let csv = csv::Writer::from_path(path)
            .with_context(|| format!("cannot create {}", path.display()))?;
        Ok(Self { csv })
    }

    pub fn write(&mut self, row: &Row) -> Result<()> {
        let c = &row.config;
        let (n_active, population, p_a) = match c.activity {
            Activity::Fixed { n_active } => (Some(n_active), None, None),
            Activity::Binomial { population, p_a } => (None, Some(population), Some(p_a)),
        };
        let status = match &row.error {
            None => "ok".to_string(),
            Some(msg) => format!("failed: {msg}"),
        };
        self.csv.serialize(CsvRow {
            point: row.point,
            r: c.pool.r_roots,
            m: c.channel.m_antennas,
            n_ss: c.pool.n_ss,
            l: c.pool.l,
            n_zc: c.pool.n_zc,
            n_active,
            population,
            p_a,
            rho: c.channel.rho,
            channel: match c.channel.kind {
                ChannelKind::IidRayleigh => "iid-rayleigh",
                ChannelKind::CorrelatedRayleigh => "correlated-rayleigh",
            },
            snr_db: c.snr_db,
            snr_linear: c.snr_linear(),
            alpha_th_db: c.alpha_th_db,
            alpha_th_linear: c.alpha_th_linear(),
            metric: row.metric.as_str(),
            p_success_sim: row.sim.map(|s| s.p),
            ci_lo: row.sim.map(|s| s.ci.0),
            ci_hi: row.sim.map(|s| s.ci.1),
            p_success_analytic: row.analytic.map(|a| a.0),
            analytic_source: row.analytic.map(|a| a.1),
            trials: row.sim.map(|s| s.trials),
            seed: c.master_seed,
            status: &status,
        })?;
        // one row per point so partial sweeps survive an interrupt
        self.csv.flush()?;
        Ok(())
    }
}

#[derive(Serialize)]
struct TopologyRow {
    kind: &'static str,
    id: usize,
    x_m: f64,
    y_m: f64,
    distance_m: f64,
    angle_rad: f64,
    pathloss_nlos_db: Option<f64>,
}

/// Cell sites of the default layout plus one UE drop in the centre cell.
pub fn write_topology(path: &Path, seed: u64) -> Result<usize> {
    let layout = CellLayout::default();
    let mut w = csv::Writer::from_path(path)
        .with_context(|| format!("cannot create {}", path.display()))?;
    let cells = layout.cell_centers();
    for c in &cells {
        w.serialize(TopologyRow {
            kind: "cell",
            id: c.id,
            x_m: c.x,
            y_m: c.y,
            distance_m: c.x.hypot(c.y),
            angle_rad: c.y.atan2(c.x),
            pathloss_nlos_db: None,
        })?;
    }
    let ue = drop_ue(&layout, &mut substream(seed, 0, 0));
    w.serialize(TopologyRow {
        kind: "ue",
        id: 0,
        x_m: ue.x,
        y_m: ue.y,
        distance_m: ue.distance_m,
        angle_rad: ue.angle_rad,
        pathloss_nlos_db: Some(pathloss_db(ue.distance_m, LinkScenario::Nlos)),
    })?;
    w.flush()?;
    Ok(cells.len())
}

#[derive(Serialize)]
struct Provenance<'a> {
    tool: &'static str,
    version: &'static str,
    created_unix_s: u64,
    spec: &'a ExperimentSpec,
    pools: &'a [PoolDescriptor],
    points: usize,
    failed: usize,
}

pub fn sidecar_path(out: &Path) -> PathBuf {
    out.with_extension("provenance.json")
}

pub fn write_provenance(
    spec: &ExperimentSpec,
    pools: &[PoolDescriptor],
    points: usize,
    failed: usize,
) -> Result<PathBuf> {
    let path = sidecar_path(&spec.out);
    let record = Provenance {
        tool: env!("CARGO_PKG_NAME"),
        version: env!("CARGO_PKG_VERSION"),
        created_unix_s: SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs()),
        spec,
        pools,
        points,
        failed,
    };
    let mut f = File::create(&path).with_context(|| format!("cannot create {}", path.display()))?;
    serde_json::to_writer_pretty(&mut f, &record)?;
    writeln!(f)?;
    Ok(path)
}
