use std::f64::consts::{PI, TAU};
use std::io::Write;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use super::{amplitude_double, amplitude_single, Boundary5, Boundary8};
use crate::error::{FoamError, Result};
use crate::intertwiner::IntertwinerBloch;

pub const SCAN_CSV_HEADER: &str = "theta,phi,probability,amplitude_re,amplitude_im";

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScanRow {
    pub theta: f64,
    pub phi: f64,
    pub probability: f64,
    pub amplitude_re: f64,
    pub amplitude_im: f64,
}

impl ScanRow {
    fn new(theta: f64, phi: f64, probability: f64, amplitude: Complex64) -> Self {
        Self { theta, phi, probability, amplitude_re: amplitude.re, amplitude_im: amplitude.im }
    }
}

fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()
}

fn check_points(name: &str, n: usize) -> Result<()> {
    if n < 2 {
        return Err(FoamError::InvalidArgument(format!("{name} needs at least 2 points, got {n}")));
    }
    Ok(())
}

/// Scans the fifth tetrahedron over `θ ∈ [0, π] × φ ∈ [0, 2π]` (both ends
/// included) with the first four fixed. Rows are θ-major.
pub fn scan_single(fixed: &[IntertwinerBloch; 4], n_theta: usize, n_phi: usize) -> Result<Vec<ScanRow>> {
    check_points("theta grid", n_theta)?;
    check_points("phi grid", n_phi)?;
    let thetas = linspace(0.0, PI, n_theta);
    let phis = linspace(0.0, TAU, n_phi);
    Ok((0..n_theta * n_phi)
        .into_par_iter()
        .map(|i| {
            let (theta, phi) = (thetas[i / n_phi], phis[i % n_phi]);
            let mut t = [IntertwinerBloch::zero(); 5];
            t[..4].copy_from_slice(fixed);
            t[4] = IntertwinerBloch { theta, phi };
            let a = amplitude_single(&Boundary5::new(t));
            ScanRow::new(theta, phi, a.probability, a.overlap)
        })
        .collect())
}

/// Scans the eighth tetrahedron over `θ ∈ [0, π]` for each listed `φ`, with
/// the other seven fixed. Rows are grouped by `φ`.
pub fn scan_double(fixed: &[IntertwinerBloch; 7], n_theta: usize, phis: &[f64]) -> Result<Vec<ScanRow>> {
    check_points("theta grid", n_theta)?;
    if phis.is_empty() || phis.iter().any(|p| !p.is_finite()) {
        return Err(FoamError::InvalidArgument("phi list must be non-empty and finite".into()));
    }
    let thetas = linspace(0.0, PI, n_theta);
    Ok((0..phis.len() * n_theta)
        .into_par_iter()
        .map(|i| {
            let (phi, theta) = (phis[i / n_theta], thetas[i % n_theta]);
            let mut t = [IntertwinerBloch::zero(); 8];
            t[..7].copy_from_slice(fixed);
            t[7] = IntertwinerBloch { theta, phi };
            let a = amplitude_double(&Boundary8::new(t));
            ScanRow::new(theta, phi, a.probability, a.overlap)
        })
        .collect())
}

pub fn write_scan_csv<W: Write>(rows: &[ScanRow], mut out: W) -> std::io::Result<()> {
    writeln!(out, "{SCAN_CSV_HEADER}")?;
    for r in rows {
        writeln!(out, "{},{},{},{},{}", r.theta, r.phi, r.probability, r.amplitude_re, r.amplitude_im)?;
    }
    out.flush()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_shape_and_order() {
        let fixed = [IntertwinerBloch::regular_plus(); 4];
        let rows = scan_single(&fixed, 3, 4).unwrap();
        assert_eq!(rows.len(), 12);
        assert_eq!(rows[0].theta, 0.0);
        assert_eq!(rows[3].phi, TAU);
        assert_eq!(rows[4].theta, PI / 2.0);
        assert!(scan_single(&fixed, 1, 4).is_err());
    }

    #[test]
    fn csv_has_header_and_rows() {
        let fixed = [IntertwinerBloch::regular_plus(); 4];
        let rows = scan_single(&fixed, 2, 2).unwrap();
        let mut buf = Vec::new();
        write_scan_csv(&rows, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<_> = text.lines().collect();
        assert_eq!(lines[0], SCAN_CSV_HEADER);
        assert_eq!(lines.len(), 5);
        assert_eq!(lines[1].split(',').count(), 5);
    }

    #[test]
    fn double_scan_rejects_empty_phi_list() {
        let fixed = [IntertwinerBloch::regular_plus(); 7];
        assert!(scan_double(&fixed, 5, &[]).is_err());
    }
}
