use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::{rotation_matrix, StateVector};
use crate::error::{FoamError, Result};

const QST_QUBITS: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct QstConfig {
    /// Shots per setting; `None` uses exact probabilities.
    pub shots: Option<u64>,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct QstResult {
    pub rho: DMatrix<Complex64>,
    /// `⟨ψ|ρ|ψ⟩` for the input state.
    pub fidelity: f64,
    /// Smallest eigenvalue of the linear-inversion estimate before projection.
    pub raw_min_eigenvalue: f64,
}

/// Pre-rotation per qubit: none (reads `Z`), `X/2` (reads `Y`), `Y/2`
/// (reads `-X`).
fn pre_rotation(choice: usize) -> Option<[[Complex64; 2]; 2]> {
    match choice {
        0 => None,
        1 => Some(rotation_matrix(std::f64::consts::FRAC_PI_2, 0.0)),
        _ => Some(rotation_matrix(std::f64::consts::FRAC_PI_2, std::f64::consts::FRAC_PI_2)),
    }
}

fn digit(index: usize, q: usize, base: usize, n: usize) -> usize {
    index / base.pow((n - 1 - q) as u32) % base
}

fn sample_frequencies(p: &[f64], shots: u64, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let cdf: Vec<f64> = p
        .iter()
        .scan(0.0, |acc, &x| {
            *acc += x;
            Some(*acc)
        })
        .collect();
    let total = *cdf.last().expect("non-empty");
    let mut counts = vec![0u64; p.len()];
    for _ in 0..shots {
        let u = rng.random::<f64>() * total;
        let k = cdf.partition_point(|&c| c <= u).min(p.len() - 1);
        counts[k] += 1;
    }
    counts.iter().map(|&c| c as f64 / shots as f64).collect()
}

/// Euclidean projection of a real vector onto the probability simplex.
fn project_simplex(values: &[f64]) -> Vec<f64> {
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    let mut cumulative = 0.0;
    let mut shift = 0.0;
    for (k, &u) in sorted.iter().enumerate() {
        cumulative += u;
        let candidate = (cumulative - 1.0) / (k + 1) as f64;
        if u - candidate > 0.0 {
            shift = candidate;
        }
    }
    values.iter().map(|&v| (v - shift).max(0.0)).collect()
}

/// Emulates five-qubit state tomography over the `{I, X/2, Y/2}^⊗5`
/// pre-rotations, reconstructing `ρ` by linear inversion over Pauli strings
/// and projecting onto unit-trace positive matrices.
pub fn simulate_qst(state: &StateVector, cfg: &QstConfig) -> Result<QstResult> {
    let n = state.n_qubits();
    if n != QST_QUBITS {
        return Err(FoamError::DimensionMismatch { expected: QST_QUBITS, got: n });
    }
    if cfg.shots == Some(0) {
        return Err(FoamError::InvalidArgument("shot count must be positive".into()));
    }
    let dim = 1usize << n;
    let n_settings = 3usize.pow(n as u32);

    let frequencies: Vec<Vec<f64>> = (0..n_settings)
        .into_par_iter()
        .map(|s| {
            let mut rotated = state.clone();
            for q in 0..n {
                if let Some(m) = pre_rotation(digit(s, q, 3, n)) {
                    rotated.apply_gate(q, &m).expect("qubit in range");
                }
            }
            let p: Vec<f64> = rotated.amplitudes().iter().map(|c| c.norm_sqr()).collect();
            match cfg.shots {
                None => p,
                Some(shots) => {
                    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
                    rng.set_stream(s as u64);
                    sample_frequencies(&p, shots, &mut rng)
                }
            }
        })
        .collect();

    // correlators[s][mask] = Σ_o f(o) (-1)^{|o ∧ mask|}
    let correlators: Vec<Vec<f64>> = frequencies
        .iter()
        .map(|f| {
            (0..dim)
                .map(|mask| {
                    f.iter()
                        .enumerate()
                        .map(|(o, &x)| if (o & mask).count_ones() % 2 == 0 { x } else { -x })
                        .sum()
                })
                .collect()
        })
        .collect();

    let i = Complex64::new(0.0, 1.0);
    let mut rho = DMatrix::<Complex64>::zeros(dim, dim);
    for pauli in 0..4usize.pow(n as u32) {
        let ops: Vec<usize> = (0..n).map(|q| digit(pauli, q, 4, n)).collect();
        let mut total = 0.0;
        let mut count = 0usize;
        for (s, corr) in correlators.iter().enumerate() {
            let mut sign = 1.0;
            let mut mask = 0usize;
            let compatible = ops.iter().enumerate().all(|(q, &op)| {
                let choice = digit(s, q, 3, n);
                let bit = 1usize << (n - 1 - q);
                match op {
                    0 => true,
                    1 if choice == 2 => {
                        sign = -sign;
                        mask |= bit;
                        true
                    }
                    2 if choice == 1 => {
                        mask |= bit;
                        true
                    }
                    3 if choice == 0 => {
                        mask |= bit;
                        true
                    }
                    _ => false,
                }
            });
            if compatible {
                total += sign * corr[mask];
                count += 1;
            }
        }
        let expectation = total / count as f64;
        // each Pauli string has one non-zero entry per row
        let flip = ops.iter().enumerate().fold(0usize, |acc, (q, &op)| {
            if op == 1 || op == 2 { acc | 1 << (n - 1 - q) } else { acc }
        });
        for row in 0..dim {
            let col = row ^ flip;
            let mut value = Complex64::new(expectation / dim as f64, 0.0);
            for (q, &op) in ops.iter().enumerate() {
                let col_bit = (col >> (n - 1 - q)) & 1;
                value *= match op {
                    2 => if col_bit == 0 { i } else { -i },
                    3 => if col_bit == 0 { Complex64::new(1.0, 0.0) } else { Complex64::new(-1.0, 0.0) },
                    _ => Complex64::new(1.0, 0.0),
                };
            }
            rho[(row, col)] += value;
        }
    }

    let hermitian = (&rho + rho.adjoint()) * Complex64::new(0.5, 0.0);
    let eig = hermitian.symmetric_eigen();
    let raw: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    let raw_min_eigenvalue = raw.iter().copied().fold(f64::INFINITY, f64::min);
    let projected = project_simplex(&raw);
    let lambda = DVector::from_iterator(dim, projected.iter().map(|&x| Complex64::new(x, 0.0)));
    let v = &eig.eigenvectors;
    let rho = v * DMatrix::from_diagonal(&lambda) * v.adjoint();

    let psi = DVector::from_column_slice(state.amplitudes());
    let fidelity = (psi.adjoint() * &rho * &psi)[(0, 0)].re;
    Ok(QstResult { rho, fidelity, raw_min_eigenvalue })
}
