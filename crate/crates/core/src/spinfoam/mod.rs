//! Spin-1/2 Ooguri amplitudes on the pentagon (one 4-simplex) and on two
//! glued 4-simplices.
//!
//! # Pentagon conventions
//!
//! Tetrahedra are labelled `0..5` and sit on a cycle. Leg `k` of tetrahedron
//! `a` is the face shared with tetrahedron `(a + LEG_OFFSETS[k]) mod 5`, so
//! the intertwiner pairing (12)(34) groups the two forward neighbours and the
//! two backward neighbours. Links are oriented `a → a+1` and `a → a+2`; each
//! link contracts the tail leg with the head leg through the spin-0 form
//! `ε(m_tail, m_head)` with `ε(↑,↓) = 1`.
//!
//! With these choices the raw contraction of five orthonormal intertwiners
//! equals `Z · W` where `W` is the normalized vertex state with a positive
//! `|11111⟩` component and `Z = ‖f‖ ≈ 0.62361`.

mod gluing;
mod montecarlo;
mod scan;

pub use gluing::{
    amplitude_double, glued_epr_overlap, two_vertex_state, Boundary8, DoubleAmplitude,
    TwoVertexState, GLUE_QUBIT_A, GLUE_QUBIT_B,
};
pub use montecarlo::{
    contraction_amplitude_double, contraction_amplitude_single, mc_amplitude_double,
    mc_amplitude_single, CoherentBoundary, CoherentBoundary8, McEstimate, MC_BLOCK_SIZE,
    MIN_MC_SAMPLES,
};
pub use scan::{scan_double, scan_single, write_scan_csv, ScanRow, SCAN_CSV_HEADER};

use std::sync::OnceLock;

use num_complex::Complex64;

use crate::error::{FoamError, Result};
use crate::intertwiner::{basis_states, IntertwinerBloch};

/// Neighbour offsets of the four legs of every tetrahedron.
pub const LEG_OFFSETS: [usize; 4] = [1, 2, 4, 3];

/// The value of `Z` quoted alongside the vertex amplitude.
pub const PUBLISHED_Z: f64 = 0.62361;

/// `(tail, head)` of the ten oriented pentagon links.
pub fn pentagon_links() -> [(usize, usize); 10] {
    std::array::from_fn(|l| {
        let a = l % 5;
        let step = 1 + l / 5;
        (a, (a + step) % 5)
    })
}

/// Leg of tetrahedron `a` that faces tetrahedron `b`.
pub fn leg_towards(a: usize, b: usize) -> usize {
    let offset = (b + 5 - a) % 5;
    LEG_OFFSETS
        .iter()
        .position(|&o| o == offset)
        .unwrap_or_else(|| panic!("tetrahedra {a} and {b} do not share a face"))
}

/// Bit `q` (qubit `q`, most significant first) of an `n`-qubit basis index.
#[inline]
pub fn bit(index: usize, q: usize, n: usize) -> usize {
    (index >> (n - 1 - q)) & 1
}

/// The spin-1/2 {15j} values `f(½,…,½; i1,…,i5)`, indexed by
/// `i1 i2 i3 i4 i5` with `i1` most significant.
#[derive(Debug, Clone, PartialEq)]
pub struct FifteenJTensor {
    values: [f64; 32],
}

impl FifteenJTensor {
    pub fn values(&self) -> &[f64; 32] {
        &self.values
    }

    pub fn get(&self, bits: [usize; 5]) -> f64 {
        self.values[bits.iter().fold(0, |acc, &b| (acc << 1) | b)]
    }

    pub fn norm(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum::<f64>().sqrt()
    }
}

/// Contracts five rank-4 intertwiners along the ten pentagon links.
///
/// `ε` is non-zero only for opposite spins, so each link is fixed by the
/// spin `s` at its tail (head carries `1 - s`) with weight `(-1)^s`.
pub fn fifteenj_tensor() -> FifteenJTensor {
    let basis = basis_states();
    let links = pentagon_links();

    // spin on leg k of tetra a is read from link link_of[a][k]
    let mut link_of = [[(0usize, false); 4]; 5];
    for (l, &(tail, head)) in links.iter().enumerate() {
        link_of[tail][leg_towards(tail, head)] = (l, true);
        link_of[head][leg_towards(head, tail)] = (l, false);
    }

    let mut values = [0.0; 32];
    for (idx, value) in values.iter_mut().enumerate() {
        let mut total = 0.0;
        for config in 0..(1usize << 10) {
            let weight = if config.count_ones() % 2 == 0 { 1.0 } else { -1.0 };
            let mut prod = weight;
            for (a, legs) in link_of.iter().enumerate() {
                let leg_index = legs.iter().fold(0usize, |acc, &(l, is_tail)| {
                    let s = (config >> l) & 1;
                    (acc << 1) | if is_tail { s } else { 1 - s }
                });
                prod *= basis.vector(bit(idx, a, 5))[leg_index].re;
                if prod == 0.0 {
                    break;
                }
            }
            total += prod;
        }
        *value = total;
    }
    FifteenJTensor { values }
}

/// The normalized single-vertex state `|W⟩`.
#[derive(Debug, Clone, PartialEq)]
pub struct VertexState {
    amplitudes: [Complex64; 32],
    normalization: f64,
}

impl VertexState {
    pub fn amplitudes(&self) -> &[Complex64; 32] {
        &self.amplitudes
    }

    /// `N` with `f = N·W`; the contraction value of `Z`.
    pub fn normalization(&self) -> f64 {
        self.normalization
    }

    pub fn real_parts(&self) -> [f64; 32] {
        self.amplitudes.map(|c| c.re)
    }

    /// `⟨W|Φ⟩` for a 32-dim product or general state.
    pub fn overlap(&self, phi: &[Complex64]) -> Complex64 {
        self.amplitudes.iter().zip(phi).map(|(w, p)| w.conj() * p).sum()
    }
}

fn build_vertex_state() -> VertexState {
    let f = fifteenj_tensor();
    let norm = f.norm();
    let sign = f.values[31].signum();
    VertexState {
        amplitudes: f.values.map(|v| Complex64::new(sign * v / norm, 0.0)),
        normalization: norm,
    }
}

/// `|W⟩`, with the overall sign fixed by a positive `|11111⟩` entry.
pub fn vertex_state() -> &'static VertexState {
    static W: OnceLock<VertexState> = OnceLock::new();
    W.get_or_init(build_vertex_state)
}

/// Product state `⊗_q (c_q0 |0⟩ + c_q1 |1⟩)` with qubit 0 most significant.
pub fn product_state(factors: &[[Complex64; 2]]) -> Vec<Complex64> {
    let n = factors.len();
    (0..1usize << n)
        .map(|idx| {
            factors
                .iter()
                .enumerate()
                .fold(Complex64::new(1.0, 0.0), |acc, (q, f)| acc * f[bit(idx, q, n)])
        })
        .collect()
}

/// Five boundary tetrahedra of a single 4-simplex.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Boundary5 {
    pub tetrahedra: [IntertwinerBloch; 5],
}

impl Boundary5 {
    pub fn new(tetrahedra: [IntertwinerBloch; 5]) -> Self {
        Self { tetrahedra }
    }

    pub fn from_angles(angles: &[(f64, f64)]) -> Result<Self> {
        if angles.len() != 5 {
            return Err(FoamError::Boundary(format!(
                "single-vertex boundary needs 5 tetrahedra, got {}",
                angles.len()
            )));
        }
        let mut t = [IntertwinerBloch::zero(); 5];
        for (slot, &(theta, phi)) in t.iter_mut().zip(angles) {
            *slot = IntertwinerBloch::new(theta, phi)?;
        }
        Ok(Self { tetrahedra: t })
    }

    pub fn regular() -> Self {
        Self { tetrahedra: [IntertwinerBloch::regular_plus(); 5] }
    }

    pub fn state(&self) -> Vec<Complex64> {
        product_state(&self.tetrahedra.map(|t| t.amplitudes()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SingleAmplitude {
    /// `⟨W|Φ⟩`.
    pub overlap: Complex64,
    /// `|⟨W|Φ⟩|²`, the all-zero readout probability.
    pub probability: f64,
    /// `A_v = 2¹⁰ · Z · ⟨W|Φ⟩` with `Z` the contraction norm.
    pub vertex_amplitude: Complex64,
}

pub fn amplitude_single(b: &Boundary5) -> SingleAmplitude {
    let w = vertex_state();
    let overlap = w.overlap(&b.state());
    SingleAmplitude {
        overlap,
        probability: overlap.norm_sqr(),
        vertex_amplitude: overlap * 1024.0 * w.normalization(),
    }
}
