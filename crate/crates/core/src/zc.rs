//! Zadoff-Chu root sequences, cyclic shifts and shift planning.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Speed of light used by the cyclic-shift sizing rule (m/s).
pub const SPEED_OF_LIGHT: f64 = 3.0e8;

/// Length and root of one ZC sequence family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ZcConfig {
    n_zc: usize,
    root_u: usize,
}

impl ZcConfig {
    pub fn new(n_zc: usize, root_u: usize) -> Result<Self> {
        if n_zc == 0 || n_zc.is_multiple_of(2) {
            return Err(Error::InvalidZcConfig(format!(
                "n_zc must be a positive odd integer, got {n_zc}"
            )));
        }
        if root_u == 0 || root_u >= n_zc {
            return Err(Error::InvalidZcConfig(format!(
                "root_u must lie in [1, {}], got {root_u}",
                n_zc - 1
            )));
        }
        if gcd(root_u, n_zc) != 1 {
            return Err(Error::InvalidZcConfig(format!(
                "gcd(root_u, n_zc) must be 1, got gcd({root_u}, {n_zc}) = {}",
                gcd(root_u, n_zc)
            )));
        }
        Ok(Self { n_zc, root_u })
    }

    pub fn n_zc(&self) -> usize {
        self.n_zc
    }

    pub fn root_u(&self) -> usize {
        self.root_u
    }
}

/// A (possibly cyclically shifted) ZC sequence.
///
/// `samples[l] == root[(l + rotation) % n_zc]` where `root` is the unshifted
/// sequence of `config`.
#[derive(Debug, Clone, PartialEq)]
pub struct ZcSequence {
    config: ZcConfig,
    shift_v: usize,
    rotation: usize,
    samples: Vec<Complex64>,
}

impl ZcSequence {
    pub fn config(&self) -> ZcConfig {
        self.config
    }

    /// Accumulated cyclic-shift index `v`.
    pub fn shift_v(&self) -> usize {
        self.shift_v
    }

    /// Accumulated rotation in samples, modulo `n_zc`.
    pub fn rotation(&self) -> usize {
        self.rotation
    }

    pub fn samples(&self) -> &[Complex64] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn into_samples(self) -> Vec<Complex64> {
        self.samples
    }
}

/// Cyclic shift offset `n_cs` and the resulting number of orthogonal shifts
/// per root, `n_ss = floor(n_zc / n_cs)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ShiftPlan {
    n_zc: usize,
    n_cs: usize,
    n_ss: usize,
}

impl ShiftPlan {
    /// Plan from an explicit shift offset.
    pub fn from_ncs(n_zc: usize, n_cs: usize) -> Result<Self> {
        if n_cs == 0 {
            return Err(Error::InvalidShiftPlan("n_cs must be positive".into()));
        }
        let n_ss = n_zc / n_cs;
        if n_ss < 2 {
            return Err(Error::InvalidShiftPlan(format!(
                "n_ss = floor({n_zc} / {n_cs}) = {n_ss} < 2"
            )));
        }
        Ok(Self { n_zc, n_cs, n_ss })
    }

    /// Plan that yields exactly `n_ss` shifts, using the widest offset
    /// `n_cs = floor(n_zc / n_ss)`.
    pub fn from_subset_size(n_zc: usize, n_ss: usize) -> Result<Self> {
        if n_ss < 2 || n_ss > n_zc {
            return Err(Error::InvalidShiftPlan(format!(
                "n_ss must lie in [2, {n_zc}], got {n_ss}"
            )));
        }
        let plan = Self::from_ncs(n_zc, n_zc / n_ss)?;
        if plan.n_ss != n_ss {
            return Err(Error::InvalidShiftPlan(format!(
                "no shift offset gives exactly {n_ss} shifts for n_zc = {n_zc}"
            )));
        }
        Ok(plan)
    }

    pub fn n_zc(&self) -> usize {
        self.n_zc
    }

    pub fn n_cs(&self) -> usize {
        self.n_cs
    }

    pub fn n_ss(&self) -> usize {
        self.n_ss
    }
}

/// `c_u[l] = exp(-j*pi*u*l*(l+1)/n_zc)` for `l = 0..n_zc`.
pub fn generate_root_sequence(config: ZcConfig) -> ZcSequence {
    let n = config.n_zc as u64;
    let u = config.root_u as u64;
    let period = 2 * n;
    let samples = (0..n)
        .map(|l| {
            // l(l+1) is even, so the phase only depends on u*l*(l+1) mod 2n.
            let k = (u * ((l * (l + 1)) % period)) % period;
            Complex64::from_polar(1.0, -PI * k as f64 / n as f64)
        })
        .collect();
    ZcSequence {
        config,
        shift_v: 0,
        rotation: 0,
        samples,
    }
}

/// Rotate `seq` left by `v * n_cs` samples: `out[l] = seq[(l + v*n_cs) % n_zc]`.
pub fn cyclic_shift(seq: &ZcSequence, v: usize, plan: &ShiftPlan) -> Result<ZcSequence> {
    if v >= plan.n_ss {
        return Err(Error::ShiftOutOfRange {
            shift: v,
            n_ss: plan.n_ss,
        });
    }
    let n = seq.len();
    if n != plan.n_zc {
        return Err(Error::LengthMismatch {
            left: n,
            right: plan.n_zc,
        });
    }
    let offset = (v * plan.n_cs) % n;
    let mut samples = seq.samples.clone();
    samples.rotate_left(offset);
    Ok(ZcSequence {
        config: seq.config,
        shift_v: seq.shift_v + v,
        rotation: (seq.rotation + offset) % n,
        samples,
    })
}

/// Minimal cyclic shift offset covering round-trip delay, delay spread and
/// guard samples, clamped to at least 1.
pub fn compute_ncs(
    cell_radius_m: f64,
    tau_max_s: f64,
    n_zc: usize,
    delta_f_ra_hz: f64,
    n_g: usize,
) -> Result<usize> {
    for (name, value) in [
        ("cell_radius_m", cell_radius_m),
        ("tau_max_s", tau_max_s),
        ("delta_f_ra_hz", delta_f_ra_hz),
    ] {
        if !(value.is_finite() && value >= 0.0) {
            return Err(Error::InvalidShiftPlan(format!(
                "{name} must be finite and non-negative, got {value}"
            )));
        }
    }
    let span =
        (2.0 * cell_radius_m / SPEED_OF_LIGHT + tau_max_s) * n_zc as f64 * delta_f_ra_hz + n_g as f64;
    let n_cs = (span.ceil() as usize).max(1);
    if n_cs >= n_zc {
        return Err(Error::CellTooLarge { n_cs, n_zc });
    }
    Ok(n_cs)
}

/// `sum_l a[l] * conj(b[(l + lag) % n])`.
pub fn periodic_crosscorrelation(a: &[Complex64], b: &[Complex64], lag: usize) -> Result<Complex64> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch {
            left: a.len(),
            right: b.len(),
        });
    }
    let n = a.len();
    if n == 0 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let lag = lag % n;
    let (b_head, b_tail) = b.split_at(lag);
    let acc = a
        .iter()
        .zip(b_tail.iter().chain(b_head))
        .fold(Complex64::new(0.0, 0.0), |acc, (x, y)| acc + x * y.conj());
    Ok(acc)
}

/// Default root set: the first `r` integers in `1..n_zc` coprime to `n_zc`.
pub fn default_roots(n_zc: usize, r: usize) -> Result<Vec<usize>> {
    let roots: Vec<usize> = (1..n_zc).filter(|&u| gcd(u, n_zc) == 1).take(r).collect();
    if roots.len() < r {
        return Err(Error::InvalidZcConfig(format!(
            "only {} roots coprime to {n_zc} are available, {r} requested",
            roots.len()
        )));
    }
    Ok(roots)
}

pub(crate) fn gcd(mut a: usize, mut b: usize) -> usize {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}
