use num_complex::Complex64;

use super::{bit, product_state, vertex_state};
use crate::error::{FoamError, Result};
use crate::intertwiner::IntertwinerBloch;

/// Glue qubit of vertex A in the ten-qubit layout `A0..A4 B0..B4`.
pub const GLUE_QUBIT_A: usize = 4;
/// Glue qubit of vertex B in the ten-qubit layout.
pub const GLUE_QUBIT_B: usize = 9;

/// Eight-qubit state of two vertices glued along their fifth tetrahedron.
///
/// Qubits `0..4` are the free tetrahedra of vertex A and `4..8` those of
/// vertex B, each in vertex order.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoVertexState {
    amplitudes: Vec<Complex64>,
    contraction_norm: f64,
}

impl TwoVertexState {
    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    /// `‖Σ_k W(·,k) W(·,k)‖` before normalization.
    pub fn contraction_norm(&self) -> f64 {
        self.contraction_norm
    }

    pub fn overlap(&self, phi: &[Complex64]) -> Complex64 {
        self.amplitudes.iter().zip(phi).map(|(w, p)| w.conj() * p).sum()
    }
}

pub fn two_vertex_state() -> TwoVertexState {
    let w = vertex_state().amplitudes();
    let raw: Vec<Complex64> = (0..256usize)
        .map(|idx| {
            let (a, b) = (idx >> 4, idx & 0xf);
            w[a << 1] * w[b << 1] + w[(a << 1) | 1] * w[(b << 1) | 1]
        })
        .collect();
    let norm = raw.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    TwoVertexState {
        amplitudes: raw.into_iter().map(|c| c / norm).collect(),
        contraction_norm: norm,
    }
}

/// Eight boundary tetrahedra: four of vertex A then four of vertex B.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Boundary8 {
    pub tetrahedra: [IntertwinerBloch; 8],
}

impl Boundary8 {
    pub fn new(tetrahedra: [IntertwinerBloch; 8]) -> Self {
        Self { tetrahedra }
    }

    pub fn from_angles(angles: &[(f64, f64)]) -> Result<Self> {
        if angles.len() != 8 {
            return Err(FoamError::Boundary(format!(
                "two-vertex boundary needs 8 tetrahedra, got {}",
                angles.len()
            )));
        }
        let mut t = [IntertwinerBloch::zero(); 8];
        for (slot, &(theta, phi)) in t.iter_mut().zip(angles) {
            *slot = IntertwinerBloch::new(theta, phi)?;
        }
        Ok(Self { tetrahedra: t })
    }

    pub fn state(&self) -> Vec<Complex64> {
        product_state(&self.tetrahedra.map(|t| t.amplitudes()))
    }
}

/// `⟨W_A|⟨W_B| (Φ_A ⊗ Φ_B ⊗ |EPR⟩)` on ten qubits, with the Bell pair
/// `(|00⟩ + |11⟩)/√2` on the two glue qubits.
pub fn glued_epr_overlap(b: &Boundary8) -> Complex64 {
    let w = vertex_state().amplitudes();
    let phi = b.state();
    let inv_sqrt2 = std::f64::consts::FRAC_1_SQRT_2;
    (0..1024usize)
        .filter(|&idx| bit(idx, GLUE_QUBIT_A, 10) == bit(idx, GLUE_QUBIT_B, 10))
        .map(|idx| {
            let (va, vb) = (idx >> 5, idx & 0x1f);
            let free = ((va >> 1) << 4) | (vb >> 1);
            (w[va] * w[vb]).conj() * phi[free] * inv_sqrt2
        })
        .sum()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DoubleAmplitude {
    /// `⟨W_d|Φ⟩` with `W_d` normalized.
    pub overlap: Complex64,
    pub probability: f64,
    /// Ten-qubit overlap through the Bell pair.
    pub epr_overlap: Complex64,
    /// `√2 · 2¹⁶ · Z² · epr_overlap`.
    pub amplitude: Complex64,
}

pub fn amplitude_double(b: &Boundary8) -> DoubleAmplitude {
    let wd = two_vertex_state();
    let overlap = wd.overlap(&b.state());
    let epr_overlap = glued_epr_overlap(b);
    let z = vertex_state().normalization();
    DoubleAmplitude {
        overlap,
        probability: overlap.norm_sqr(),
        epr_overlap,
        amplitude: epr_overlap * std::f64::consts::SQRT_2 * 65536.0 * z * z,
    }
}
