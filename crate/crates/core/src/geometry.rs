//! Cell layout, UE drops, large-scale parameters and small-scale channels.
//!
//! Hexagons are flat-topped with circumradius `radius_m`; the serving BS sits
//! at the origin and UE angles are measured from the positive x-axis.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, Normal, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const SQRT_3: f64 = 1.732_050_807_568_877_2;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CellLayout {
    pub radius_m: f64,
    pub min_dist_m: f64,
    pub tiers: usize,
}

impl Default for CellLayout {
    fn default() -> Self {
        Self {
            radius_m: 500.0,
            min_dist_m: 30.0,
            tiers: 2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CellSite {
    pub id: usize,
    pub x: f64,
    pub y: f64,
}

impl CellLayout {
    pub fn validate(&self) -> Result<()> {
        if !(self.radius_m > 0.0 && self.min_dist_m >= 0.0 && self.min_dist_m < self.radius_m) {
            return Err(Error::InvalidScenario(format!(
                "need 0 <= min_dist_m < radius_m, got {} and {}",
                self.min_dist_m, self.radius_m
            )));
        }
        Ok(())
    }

    pub fn cell_count(&self) -> usize {
        1 + 3 * self.tiers * (self.tiers + 1)
    }

    /// Cell centres ordered by ring, id 0 being the serving cell.
    pub fn cell_centers(&self) -> Vec<CellSite> {
        let t = self.tiers as i64;
        let mut axial: Vec<(i64, i64)> = Vec::with_capacity(self.cell_count());
        for q in -t..=t {
            for r in -t..=t {
                if (q + r).abs() <= t {
                    axial.push((q, r));
                }
            }
        }
        let ring = |&(q, r): &(i64, i64)| q.abs().max(r.abs()).max((q + r).abs());
        let angle = |&(q, r): &(i64, i64)| {
            let (x, y) = axial_to_xy(q, r, 1.0);
            let a = y.atan2(x);
            if a < 0.0 {
                a + 2.0 * PI
            } else {
                a
            }
        };
        axial.sort_by(|a, b| ring(a).cmp(&ring(b)).then(angle(a).total_cmp(&angle(b))));
        axial
            .into_iter()
            .enumerate()
            .map(|(id, (q, r))| {
                let (x, y) = axial_to_xy(q, r, self.radius_m);
                CellSite { id, x, y }
            })
            .collect()
    }
}

fn axial_to_xy(q: i64, r: i64, radius: f64) -> (f64, f64) {
    (
        radius * 1.5 * q as f64,
        radius * SQRT_3 * (r as f64 + q as f64 / 2.0),
    )
}

/// Whether `(x, y)`, relative to the hexagon centre, lies inside a
/// flat-topped hexagon of circumradius `radius`.
pub fn in_hexagon(x: f64, y: f64, radius: f64) -> bool {
    let (ax, ay) = (x.abs(), y.abs());
    ay <= radius * SQRT_3 / 2.0 && SQRT_3 * ax + ay <= SQRT_3 * radius
}

/// Uniform point in the hexagon by rejection from its bounding box.
pub fn uniform_in_hexagon<R: Rng + ?Sized>(radius: f64, rng: &mut R) -> (f64, f64) {
    let half_h = radius * SQRT_3 / 2.0;
    loop {
        let x = rng.random_range(-radius..=radius);
        let y = rng.random_range(-half_h..=half_h);
        if in_hexagon(x, y, radius) {
            return (x, y);
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UePlacement {
    pub x: f64,
    pub y: f64,
    pub distance_m: f64,
    /// Angle in `(-pi, pi]` from the BS.
    pub angle_rad: f64,
}

impl UePlacement {
    pub fn from_xy(x: f64, y: f64) -> Self {
        Self {
            x,
            y,
            distance_m: x.hypot(y),
            angle_rad: y.atan2(x),
        }
    }

    /// Placement on the array broadside at unit distance.
    pub fn broadside() -> Self {
        Self::from_xy(1.0, 0.0)
    }
}

/// Uniform drop over the serving hexagon outside the exclusion disk.
pub fn drop_ue<R: Rng + ?Sized>(layout: &CellLayout, rng: &mut R) -> UePlacement {
    let min_sq = layout.min_dist_m * layout.min_dist_m;
    loop {
        let (x, y) = uniform_in_hexagon(layout.radius_m, rng);
        if x * x + y * y >= min_sq {
            return UePlacement::from_xy(x, y);
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ChannelKind {
    IidRayleigh,
    CorrelatedRayleigh,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChannelModelSpec {
    pub kind: ChannelKind,
    pub m_antennas: usize,
    /// Adjacent-antenna correlation; ignored for the i.i.d. kind.
    pub rho: f64,
}

impl ChannelModelSpec {
    pub fn iid(m_antennas: usize) -> Self {
        Self {
            kind: ChannelKind::IidRayleigh,
            m_antennas,
            rho: 0.0,
        }
    }

    pub fn correlated(m_antennas: usize, rho: f64) -> Self {
        Self {
            kind: ChannelKind::CorrelatedRayleigh,
            m_antennas,
            rho,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.m_antennas == 0 {
            return Err(Error::InvalidChannel("m_antennas must be >= 1".into()));
        }
        check_rho(self.rho)
    }
}

fn check_rho(rho: f64) -> Result<()> {
    if !(0.0..1.0).contains(&rho) {
        return Err(Error::InvalidChannel(format!("rho must lie in [0, 1), got {rho}")));
    }
    Ok(())
}

/// `R[i][j] = rho^|j-i| * exp(j * delta * (j - i))`.
pub fn correlation_matrix(m: usize, rho: f64, delta: f64) -> Result<DMatrix<Complex64>> {
    check_rho(rho)?;
    Ok(DMatrix::from_fn(m, m, |i, j| {
        let diff = j as f64 - i as f64;
        let mag = if i == j { 1.0 } else { rho.powi((j as i64 - i as i64).abs() as i32) };
        Complex64::from_polar(mag, delta * diff)
    }))
}

/// Lower-triangular `F` with `F F^H = R`, by Cholesky decomposition.
pub fn correlation_factor(m: usize, rho: f64, delta: f64) -> Result<DMatrix<Complex64>> {
    let r = correlation_matrix(m, rho, delta)?;
    let chol = r
        .cholesky()
        .ok_or_else(|| Error::InvalidChannel("correlation matrix is not positive definite".into()))?;
    Ok(chol.l())
}

/// Closed-form lower-triangular factor of the exponential model, i.e. the
/// first-order recursion `h[i] = rho e^{-j delta} h[i-1] + sqrt(1-rho^2) w[i]`
/// written as a matrix.
pub fn exponential_factor(m: usize, rho: f64, delta: f64) -> Result<DMatrix<Complex64>> {
    check_rho(rho)?;
    let innov = (1.0 - rho * rho).sqrt();
    Ok(DMatrix::from_fn(m, m, |i, j| {
        if j > i {
            return Complex64::new(0.0, 0.0);
        }
        let steps = (i - j) as i32;
        let scale = if j == 0 { 1.0 } else { innov };
        Complex64::from_polar(scale * rho.powi(steps), -delta * steps as f64)
    }))
}

/// One `CN(0, 1)` draw.
pub fn complex_normal<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    Complex64::new(re * FRAC_1_SQRT_2, im * FRAC_1_SQRT_2)
}

/// Normalized small-scale channel: `CN(0, I)` or `R^{1/2} w`.
pub fn sample_channel<R: Rng + ?Sized>(
    spec: &ChannelModelSpec,
    placement: &UePlacement,
    rng: &mut R,
) -> DVector<Complex64> {
    let m = spec.m_antennas;
    match spec.kind {
        ChannelKind::IidRayleigh => DVector::from_fn(m, |_, _| complex_normal(rng)),
        ChannelKind::CorrelatedRayleigh => {
            let step = Complex64::from_polar(spec.rho, -placement.angle_rad);
            let innov = (1.0 - spec.rho * spec.rho).sqrt();
            let mut h = DVector::zeros(m);
            let mut prev = Complex64::new(0.0, 0.0);
            for i in 0..m {
                let w = complex_normal(rng);
                prev = if i == 0 { w } else { step * prev + innov * w };
                h[i] = prev;
            }
            h
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LinkScenario {
    Nlos,
    Los,
}

impl LinkScenario {
    pub fn exponent(self) -> f64 {
        match self {
            LinkScenario::Nlos => 3.8,
            LinkScenario::Los => 2.5,
        }
    }

    pub fn shadowing_std_db(self) -> f64 {
        match self {
            LinkScenario::Nlos => 10.0,
            LinkScenario::Los => 4.0,
        }
    }
}

/// Free-space loss at the 1 m reference distance for a 2 GHz carrier.
pub const REFERENCE_LOSS_DB: f64 = 38.46;

/// Mean pathloss `PL0 + 10 n log10(d / 1 m)`.
pub fn pathloss_db(distance_m: f64, scenario: LinkScenario) -> f64 {
    REFERENCE_LOSS_DB + 10.0 * scenario.exponent() * distance_m.log10()
}

/// Log-normal shadowing draw in dB.
pub fn shadow_fading_db<R: Rng + ?Sized>(scenario: LinkScenario, rng: &mut R) -> f64 {
    Normal::new(0.0, scenario.shadowing_std_db())
        .expect("positive std")
        .sample(rng)
}
