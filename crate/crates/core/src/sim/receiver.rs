//! Matched-filter channel estimation and data detection.

use std::f64::consts::FRAC_1_SQRT_2;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;

use crate::error::{Error, Result};
use crate::geometry::complex_normal;

/// `Y = sum_n sqrt(P) h_n s_n^T + W` with `W` i.i.d. `CN(0, 1)`.
pub fn build_received_pilot<R: Rng + ?Sized>(
    channels: &[DVector<Complex64>],
    patterns: &[&[Complex64]],
    snr: f64,
    m_antennas: usize,
    n_zc: usize,
    rng: &mut R,
) -> Result<DMatrix<Complex64>> {
    if channels.len() != patterns.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} channels but {} patterns",
            channels.len(),
            patterns.len()
        )));
    }
    if let Some(h) = channels.iter().find(|h| h.len() != m_antennas) {
        return Err(Error::DimensionMismatch(format!(
            "channel of length {} for {m_antennas} antennas",
            h.len()
        )));
    }
    if let Some(s) = patterns.iter().find(|s| s.len() != n_zc) {
        return Err(Error::DimensionMismatch(format!(
            "pilot of length {} for N_ZC = {n_zc}",
            s.len()
        )));
    }
    let amp = snr.sqrt();
    let mut y = DMatrix::from_fn(m_antennas, n_zc, |_, _| complex_normal(rng));
    for (h, s) in channels.iter().zip(patterns) {
        for (col, &sample) in s.iter().enumerate() {
            let scaled = sample * amp;
            for row in 0..m_antennas {
                y[(row, col)] += h[row] * scaled;
            }
        }
    }
    Ok(y)
}

/// `g = Y conj(d) / |d|`.
pub fn mf_channel_estimate(y: &DMatrix<Complex64>, despread: &[Complex64]) -> Result<DVector<Complex64>> {
    if despread.len() != y.ncols() {
        return Err(Error::DimensionMismatch(format!(
            "despreading vector of length {} for {} pilot samples",
            despread.len(),
            y.ncols()
        )));
    }
    let norm = despread.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
    if norm == 0.0 {
        return Err(Error::ZeroDespreader);
    }
    let d = DVector::from_iterator(despread.len(), despread.iter().map(|x| x.conj() / norm));
    Ok(y * d)
}

/// Matched-filter output SINR of UE 0 (`channels[0]`):
/// `P |g^H h_0|^2 / (sum_{n>0} P |g^H h_n|^2 + |g|^2)`.
pub fn mf_sinr(g: &DVector<Complex64>, channels: &[DVector<Complex64>], snr: f64) -> f64 {
    let signal = snr * g.dotc(&channels[0]).norm_sqr();
    let interference: f64 = channels[1..].iter().map(|h| snr * g.dotc(h).norm_sqr()).sum();
    let noise = g.norm_squared();
    let denom = interference + noise;
    if denom == 0.0 {
        return if signal == 0.0 { 0.0 } else { f64::INFINITY };
    }
    signal / denom
}

/// `g^H z`.
pub fn detect_data_symbol(g: &DVector<Complex64>, z: &DVector<Complex64>) -> Complex64 {
    g.dotc(z)
}

/// Unit-power QPSK symbol for a two-bit label.
pub fn qpsk_symbol(bits: u8) -> Complex64 {
    let re = if bits & 1 == 0 { 1.0 } else { -1.0 };
    let im = if bits & 2 == 0 { 1.0 } else { -1.0 };
    Complex64::new(re * FRAC_1_SQRT_2, im * FRAC_1_SQRT_2)
}

/// Nearest QPSK symbol.
pub fn qpsk_decide(x: Complex64) -> Complex64 {
    let bits = u8::from(x.re < 0.0) | (u8::from(x.im < 0.0) << 1);
    qpsk_symbol(bits)
}
