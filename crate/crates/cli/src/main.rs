//! `pdra`: parameter sweeps of pattern-division random access.

mod output;
mod run;
mod spec;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use anyhow::{Context, Result};
use clap::Parser;

use crate::run::{evaluate, PoolCache};
use crate::spec::{ConfigFile, Mode, Overrides, Preset};

const AFTER_HELP: &str = "\
Precedence: command-line flag > environment variable > config file > preset > built-in default.

Config file (TOML, flat keys; list-valued keys also accept a scalar):
  preset, mode, out, seed, trials, threads
  metric       success | no-collision             [default: success]
  receiver     projected | full                   [default: projected]
  x_axis       r | load (innermost grid axis)     [default: r]
  n_zc         ZC length                          [default: 839]
  r            number of roots                    [default: [1, 2, 3, 4]]
  m            BS antennas                        [default: [128]]
  n_ss         shifts per root                    [default: [32]]
  l            shifts per pattern                 [default: [2]]
  n            active UEs (fixed)                 [default: [10]]
  p_a          activity probability (random)      exclusive with n
  population   UEs eligible under p_a             [default: 10000]
  rho          antenna correlation, 0 = i.i.d.    [default: [0.0]]
  snr_db       per-UE pilot SNR                   [default: [0.0]]
  alpha_th_db  SINR threshold                     [default: [5.0]]

Presets fig2 and fig6 run at snr_db = -13, fig3 and fig5 at snr_db = 0.

Exit status: 0 if every point succeeded, 1 if any point failed, 2 on a usage or config error.";

#[derive(Debug, Parser)]
#[command(name = "pdra", version, about = "Pattern-division random access sweeps", after_help = AFTER_HELP)]
struct Cli {
    /// Built-in experiment
    #[arg(long, value_enum)]
    preset: Option<Preset>,

    /// TOML config file
    #[arg(long)]
    config: Option<PathBuf>,

    /// What to compute [default: both, analytic for fig4]
    #[arg(long, value_enum)]
    mode: Option<Mode>,

    /// Output CSV [default: <preset>.csv, or pdra.csv]
    #[arg(long)]
    out: Option<PathBuf>,

    /// Master seed [default: 1]
    #[arg(long, env = "PDRA_SEED")]
    seed: Option<u64>,

    /// Monte-Carlo trials per point [default: 10000]
    #[arg(long)]
    trials: Option<u64>,

    /// Worker threads [default: all cores]
    #[arg(long, env = "PDRA_THREADS")]
    threads: Option<usize>,
}

fn execute(cli: Cli) -> Result<ExitCode, Failure> {
    let config = match &cli.config {
        Some(path) => ConfigFile::load(path).map_err(Failure::Usage)?,
        None => ConfigFile::default(),
    };
    let overrides = Overrides {
        preset: cli.preset,
        mode: cli.mode,
        out: cli.out,
        seed: cli.seed,
        trials: cli.trials,
        threads: cli.threads,
    };
    let spec = spec::resolve(config, overrides).map_err(Failure::Usage)?;

    if let Some(n) = spec.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .context("cannot configure the thread pool")?;
    }

    if spec.preset == Some(Preset::Topology) {
        let cells = output::write_topology(&spec.out, spec.seed)?;
        eprintln!("wrote {} cells and 1 UE drop to {}", cells, spec.out.display());
        return Ok(ExitCode::SUCCESS);
    }

    let points = spec.points();
    let mut writer = output::SweepWriter::create(&spec.out)?;
    let mut pools = PoolCache::default();
    let mut failed = 0;
    let mut stderr = std::io::stderr();
    let mut last_report: Option<Instant> = None;
    for (i, point) in points.iter().enumerate() {
        let row = evaluate(&spec, i, point, &mut pools);
        if let Some(e) = &row.error {
            failed += 1;
            let _ = writeln!(stderr, "point {i}: {e}");
        }
        writer.write(&row)?;
        let done = i + 1 == points.len();
        if done || last_report.is_none_or(|t| t.elapsed() >= Duration::from_millis(250)) {
            let _ = write!(stderr, "\r[{}/{}]", i + 1, points.len());
            last_report = Some(Instant::now());
        }
    }
    let _ = writeln!(stderr);
    let sidecar = output::write_provenance(&spec, &pools.descriptors(), points.len(), failed)?;
    eprintln!(
        "wrote {} points ({} failed) to {}, provenance in {}",
        points.len(),
        failed,
        spec.out.display(),
        sidecar.display()
    );
    Ok(if failed == 0 { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

enum Failure {
    Usage(anyhow::Error),
    Runtime(anyhow::Error),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Runtime(e)
    }
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(code) => code,
        Err(Failure::Usage(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
        Err(Failure::Runtime(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
