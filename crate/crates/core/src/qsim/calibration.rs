use std::f64::consts::TAU;

use rustfft::num_complex::Complex;
use rustfft::FftPlanner;
use serde::Serialize;

use crate::error::{FoamError, Result};

const ZERO_PADDING: usize = 16;

/// Dispersive resonator-mediated coupling `g_i g_j / Δ + g_ij` (all MHz).
pub fn effective_coupling(g_i: f64, g_j: f64, delta: f64, g_ij: f64) -> Result<f64> {
    if delta == 0.0 || !delta.is_finite() {
        return Err(FoamError::InvalidArgument(format!("detuning must be finite and non-zero, got {delta}")));
    }
    Ok(g_i * g_j / delta + g_ij)
}

/// Swap populations `P(|10⟩)` over a detuning × time grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Chevron {
    pub detunings_mhz: Vec<f64>,
    pub times_ns: Vec<f64>,
    /// One row per detuning.
    pub probabilities: Vec<Vec<f64>>,
}

/// Two-level swap from `|10⟩`:
/// `P = 1 - 4g²/(Δ²+4g²) · sin²(½√(Δ²+4g²)·t)` in angular units.
pub fn chevron_scan(g_mhz: f64, detunings_mhz: &[f64], times_ns: &[f64]) -> Result<Chevron> {
    if detunings_mhz.is_empty() || times_ns.is_empty() {
        return Err(FoamError::InvalidArgument("chevron grids must be non-empty".into()));
    }
    if !g_mhz.is_finite() {
        return Err(FoamError::InvalidArgument("coupling must be finite".into()));
    }
    let g = TAU * g_mhz * 1e-3;
    let probabilities = detunings_mhz
        .iter()
        .map(|&d| {
            let delta = TAU * d * 1e-3;
            let omega_sq = delta * delta + 4.0 * g * g;
            let amplitude = if omega_sq > 0.0 { 4.0 * g * g / omega_sq } else { 0.0 };
            times_ns
                .iter()
                .map(|&t| 1.0 - amplitude * (0.5 * omega_sq.sqrt() * t).sin().powi(2))
                .collect()
        })
        .collect();
    Ok(Chevron { detunings_mhz: detunings_mhz.to_vec(), times_ns: times_ns.to_vec(), probabilities })
}

/// Dominant oscillation frequency (MHz) of a uniformly sampled trace.
fn dominant_frequency(trace: &[f64], dt_ns: f64, planner: &mut FftPlanner<f64>) -> Option<f64> {
    let mean = trace.iter().sum::<f64>() / trace.len() as f64;
    let len = (trace.len() * ZERO_PADDING).next_power_of_two();
    let mut buf: Vec<Complex<f64>> = trace.iter().map(|&x| Complex::new(x - mean, 0.0)).collect();
    buf.resize(len, Complex::new(0.0, 0.0));
    planner.plan_fft_forward(len).process(&mut buf);
    let mag: Vec<f64> = buf[..len / 2].iter().map(|c| c.norm()).collect();
    let (k, &peak) = mag.iter().enumerate().skip(1).max_by(|a, b| a.1.total_cmp(b.1))?;
    if peak <= 1e-12 * trace.len() as f64 {
        return None;
    }
    let shift = if k + 1 < mag.len() {
        let (l, r) = (mag[k - 1], mag[k + 1]);
        let denom = l - 2.0 * peak + r;
        if denom.abs() > 0.0 { 0.5 * (l - r) / denom } else { 0.0 }
    } else {
        0.0
    };
    Some((k as f64 + shift) / (len as f64 * dt_ns) * 1e3)
}

/// Recovers `g` (MHz) as half the slowest swap frequency across detunings.
pub fn extract_coupling(chevron: &Chevron) -> Result<f64> {
    let t = &chevron.times_ns;
    if t.len() < 8 {
        return Err(FoamError::InvalidArgument("need at least 8 time points".into()));
    }
    let dt = t[1] - t[0];
    if dt.is_nan() || dt <= 0.0 || t.windows(2).any(|w| ((w[1] - w[0]) - dt).abs() > 1e-9 * dt.max(1.0)) {
        return Err(FoamError::InvalidArgument("time grid must be uniform and increasing".into()));
    }
    if chevron.probabilities.len() != chevron.detunings_mhz.len()
        || chevron.probabilities.iter().any(|row| row.len() != t.len())
    {
        return Err(FoamError::InvalidArgument("probability matrix does not match the grids".into()));
    }
    let mut planner = FftPlanner::new();
    chevron
        .probabilities
        .iter()
        .filter_map(|row| dominant_frequency(row, dt, &mut planner))
        .min_by(f64::total_cmp)
        .map(|f| f / 2.0)
        .ok_or_else(|| FoamError::InvalidArgument("no oscillation found in any trace".into()))
}
