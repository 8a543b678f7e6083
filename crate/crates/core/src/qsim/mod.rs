//! Ideal state-vector emulation of the vertex-state circuits.
//!
//! Qubit `q` of an `n`-qubit register is bit `n - 1 - q` of the basis index,
//! so qubit 0 is the leftmost label in `|q0 q1 …⟩`.

mod calibration;
mod coupling;
mod schedule;
mod tomography;

pub use calibration::{chevron_scan, effective_coupling, extract_coupling, Chevron};
pub use coupling::{
    bundled_single_vertex, bundled_table_json, bundled_two_vertex, load_couplings, CouplingMatrix,
    XyPropagator,
};
pub use schedule::{
    bundled_vertex_schedule, run_schedule, Device, GateStep, InitRotation, Layer, LayerGate,
    Schedule,
};
pub use tomography::{simulate_qst, QstConfig, QstResult};

use num_complex::Complex64;

use crate::error::{FoamError, Result};
use crate::intertwiner::IntertwinerBloch;

pub const MAX_QUBITS: usize = 10;

pub type Gate1 = [[Complex64; 2]; 2];

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// `R_β(α) = exp(-i α/2 (cos β X + sin β Y))`.
pub fn rotation_matrix(alpha: f64, beta: f64) -> Gate1 {
    let (s, c) = (alpha / 2.0).sin_cos();
    let off = Complex64::new(0.0, -s);
    [
        [Complex64::new(c, 0.0), off * Complex64::from_polar(1.0, -beta)],
        [off * Complex64::from_polar(1.0, beta), Complex64::new(c, 0.0)],
    ]
}

/// `Z(γ) = diag(e^{-iγ/2}, e^{iγ/2})`.
pub fn phase_matrix(gamma: f64) -> Gate1 {
    [
        [Complex64::from_polar(1.0, -gamma / 2.0), ZERO],
        [ZERO, Complex64::from_polar(1.0, gamma / 2.0)],
    ]
}

/// `R_{φ-π/2}(θ)`, which takes `cos(θ/2)|0⟩ + e^{iφ} sin(θ/2)|1⟩` to `|0⟩`.
pub fn u_inverse_matrix(theta: f64, phi: f64) -> Gate1 {
    rotation_matrix(theta, phi - std::f64::consts::FRAC_PI_2)
}

#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    n: usize,
    amps: Vec<Complex64>,
}

impl StateVector {
    /// `|0…0⟩` on `n` qubits.
    pub fn zero(n: usize) -> Result<Self> {
        if n == 0 || n > MAX_QUBITS {
            return Err(FoamError::InvalidArgument(format!("qubit count {n} not in 1..={MAX_QUBITS}")));
        }
        let mut amps = vec![ZERO; 1 << n];
        amps[0] = ONE;
        Ok(Self { n, amps })
    }

    /// Wraps and normalizes a `2^n` amplitude vector.
    pub fn from_amplitudes(amps: Vec<Complex64>) -> Result<Self> {
        let len = amps.len();
        if !len.is_power_of_two() || !(2..=1 << MAX_QUBITS).contains(&len) {
            return Err(FoamError::InvalidArgument(format!("{len} amplitudes is not 2^n with 1 <= n <= {MAX_QUBITS}")));
        }
        let norm = amps.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        if !(norm.is_finite() && norm > 0.0) {
            return Err(FoamError::InvalidArgument("state has zero or non-finite norm".into()));
        }
        Ok(Self { n: len.trailing_zeros() as usize, amps: amps.into_iter().map(|c| c / norm).collect() })
    }

    pub fn basis(n: usize, index: usize) -> Result<Self> {
        let mut s = Self::zero(n)?;
        if index >= s.amps.len() {
            return Err(FoamError::InvalidArgument(format!("basis index {index} out of range")));
        }
        s.amps[0] = ZERO;
        s.amps[index] = ONE;
        Ok(s)
    }

    pub fn n_qubits(&self) -> usize {
        self.n
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub(crate) fn amplitudes_mut(&mut self) -> &mut [Complex64] {
        &mut self.amps
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn check_qubit(&self, q: usize) -> Result<()> {
        if q >= self.n {
            return Err(FoamError::QubitOutOfRange { index: q, n_qubits: self.n });
        }
        Ok(())
    }

    pub fn apply_gate(&mut self, q: usize, m: &Gate1) -> Result<()> {
        self.check_qubit(q)?;
        apply_gate_raw(&mut self.amps, self.n, q, m);
        Ok(())
    }

    pub fn apply_rotation(&mut self, q: usize, alpha: f64, beta: f64) -> Result<()> {
        self.apply_gate(q, &rotation_matrix(alpha, beta))
    }

    pub fn apply_phase(&mut self, q: usize, gamma: f64) -> Result<()> {
        self.apply_gate(q, &phase_matrix(gamma))
    }

    pub fn apply_u_inverse(&mut self, q: usize, theta: f64, phi: f64) -> Result<()> {
        self.apply_gate(q, &u_inverse_matrix(theta, phi))
    }

    /// CNOT from `a` to `b`, then a Hadamard on `a`; maps the Bell pair
    /// `(|00⟩ + |11⟩)/√2` on `(a, b)` to `|00⟩`.
    pub fn apply_glue(&mut self, a: usize, b: usize) -> Result<()> {
        self.check_qubit(a)?;
        self.check_qubit(b)?;
        if a == b {
            return Err(FoamError::QubitClash(a));
        }
        let (ba, bb) = (1usize << (self.n - 1 - a), 1usize << (self.n - 1 - b));
        for i in 0..self.amps.len() {
            if i & ba != 0 && i & bb == 0 {
                self.amps.swap(i, i | bb);
            }
        }
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let hadamard = [[Complex64::new(h, 0.0), Complex64::new(h, 0.0)], [Complex64::new(h, 0.0), Complex64::new(-h, 0.0)]];
        apply_gate_raw(&mut self.amps, self.n, a, &hadamard);
        Ok(())
    }

    /// `exp(-i H τ)` for the XY couplings `c` acting on `qubits`.
    pub fn apply_entangling(&mut self, qubits: &[usize], c: &CouplingMatrix, tau_ns: f64) -> Result<()> {
        self.check_group(qubits, c)?;
        check_tau(tau_ns)?;
        XyPropagator::new(c).evolve(&mut self.amps, self.n, qubits, tau_ns);
        Ok(())
    }

    pub(crate) fn check_group(&self, qubits: &[usize], c: &CouplingMatrix) -> Result<()> {
        if qubits.len() != c.size() {
            return Err(FoamError::DimensionMismatch { expected: c.size(), got: qubits.len() });
        }
        for (k, &q) in qubits.iter().enumerate() {
            self.check_qubit(q)?;
            if qubits[..k].contains(&q) {
                return Err(FoamError::QubitClash(q));
            }
        }
        Ok(())
    }

    /// `|⟨0…0|ψ⟩|²`.
    pub fn all_zero_probability(&self) -> f64 {
        self.amps[0].norm_sqr()
    }

    /// `|⟨target|ψ⟩|²`.
    pub fn fidelity_pure(&self, target: &[Complex64]) -> Result<f64> {
        if target.len() != self.amps.len() {
            return Err(FoamError::DimensionMismatch { expected: self.amps.len(), got: target.len() });
        }
        Ok(inner(target, &self.amps).norm_sqr())
    }

    /// `⟨Σ_q n_q⟩`.
    pub fn excitation_number(&self) -> f64 {
        self.amps.iter().enumerate().map(|(i, c)| c.norm_sqr() * i.count_ones() as f64).sum()
    }

    /// Probability of the all-zero readout after rotating each qubit by
    /// `u_inverse` for the given boundary tetrahedra.
    pub fn boundary_probability(&self, boundary: &[(usize, IntertwinerBloch)]) -> Result<f64> {
        let mut s = self.clone();
        for &(q, t) in boundary {
            s.apply_u_inverse(q, t.theta, t.phi)?;
        }
        Ok(s.all_zero_probability())
    }

    /// Reduced density matrix of a contiguous block of qubits.
    pub fn reduced_density(&self, first: usize, count: usize) -> Result<Vec<Vec<Complex64>>> {
        if count == 0 || first + count > self.n {
            return Err(FoamError::InvalidArgument(format!("block {first}..{} out of range", first + count)));
        }
        let dim = 1usize << count;
        let shift = self.n - first - count;
        let mut rho = vec![vec![ZERO; dim]; dim];
        for (i, a) in self.amps.iter().enumerate() {
            for (j, b) in self.amps.iter().enumerate() {
                let (ki, kj) = ((i >> shift) & (dim - 1), (j >> shift) & (dim - 1));
                let rest_mask = !((dim - 1) << shift);
                if i & rest_mask == j & rest_mask {
                    rho[ki][kj] += a * b.conj();
                }
            }
        }
        Ok(rho)
    }
}

pub(crate) fn check_tau(tau_ns: f64) -> Result<()> {
    if !(tau_ns.is_finite() && tau_ns >= 0.0) {
        return Err(FoamError::InvalidArgument(format!("entangling time must be finite and >= 0, got {tau_ns}")));
    }
    Ok(())
}

/// `⟨u|v⟩`.
pub fn inner(u: &[Complex64], v: &[Complex64]) -> Complex64 {
    u.iter().zip(v).map(|(a, b)| a.conj() * b).sum()
}

pub(crate) fn apply_gate_raw(amps: &mut [Complex64], n: usize, q: usize, m: &Gate1) {
    let b = 1usize << (n - 1 - q);
    for i in 0..amps.len() {
        if i & b == 0 {
            let (x, y) = (amps[i], amps[i | b]);
            amps[i] = m[0][0] * x + m[0][1] * y;
            amps[i | b] = m[1][0] * x + m[1][1] * y;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spinfoam::vertex_state;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::{FRAC_PI_2, PI, SQRT_2, TAU};

    fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
        (a - b).norm() < tol
    }

    fn random_state(rng: &mut ChaCha8Rng, n: usize) -> StateVector {
        let amps = (0..1 << n).map(|_| Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)).collect();
        StateVector::from_amplitudes(amps).unwrap()
    }

    /// Dense `exp(-i A)` for a 2×2 Hermitian `A` by Taylor series.
    fn expm_2x2(a: Gate1) -> Gate1 {
        let mut result = [[ONE, ZERO], [ZERO, ONE]];
        let mut term = result;
        for k in 1..60 {
            let mut next = [[ZERO; 2]; 2];
            for i in 0..2 {
                for j in 0..2 {
                    next[i][j] = (0..2).map(|l| term[i][l] * a[l][j]).sum::<Complex64>() * Complex64::new(0.0, -1.0 / k as f64);
                }
            }
            term = next;
            for i in 0..2 {
                for j in 0..2 {
                    result[i][j] += term[i][j];
                }
            }
        }
        result
    }

    #[test]
    fn rotation_matches_matrix_exponential() {
        for &(alpha, beta) in &[(FRAC_PI_2, FRAC_PI_2), (1.3, 0.4), (2.9, 5.5)] {
            let h = Complex64::new(alpha / 2.0, 0.0);
            let gen = [[ZERO, h * Complex64::from_polar(1.0, -beta)], [h * Complex64::from_polar(1.0, beta), ZERO]];
            let dense = expm_2x2(gen);
            let r = rotation_matrix(alpha, beta);
            for i in 0..2 {
                for j in 0..2 {
                    assert!(close(r[i][j], dense[i][j], 1e-14));
                }
            }
        }
    }

    #[test]
    fn trivial_rotations_and_phases() {
        let mut s = StateVector::zero(3).unwrap();
        s.apply_rotation(1, 0.0, 0.7).unwrap();
        assert!(close(s.amplitudes()[0], ONE, 1e-15));
        s.apply_rotation(0, PI, 0.0).unwrap();
        assert!((s.amplitudes()[0b100].norm() - 1.0).abs() < 1e-15);

        let mut a = random_state(&mut ChaCha8Rng::seed_from_u64(1), 2);
        let mut b = a.clone();
        a.apply_phase(1, 0.4).unwrap();
        a.apply_phase(1, 1.1).unwrap();
        b.apply_phase(1, 1.5).unwrap();
        for (x, y) in a.amplitudes().iter().zip(b.amplitudes()) {
            assert!(close(*x, *y, 1e-12));
        }
        let c = a.clone();
        a.apply_phase(0, TAU).unwrap();
        assert!((inner(a.amplitudes(), c.amplitudes()).norm() - 1.0).abs() < 1e-12);
        assert!(s.apply_phase(3, 0.1).is_err());
    }

    #[test]
    fn y_half_rotation_points_along_x() {
        let mut s = StateVector::zero(1).unwrap();
        s.apply_rotation(0, FRAC_PI_2, FRAC_PI_2).unwrap();
        let a = s.amplitudes();
        let bloch_x = 2.0 * (a[0].conj() * a[1]).re;
        assert!((bloch_x - 1.0).abs() < 1e-14);
    }

    #[test]
    fn u_inverse_maps_bloch_state_to_zero() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..50 {
            let t = IntertwinerBloch::new(rng.random_range(0.0..=PI), rng.random_range(0.0..TAU)).unwrap();
            let s0 = StateVector::from_amplitudes(t.amplitudes().to_vec()).unwrap();
            let mut s = s0.clone();
            s.apply_u_inverse(0, t.theta, t.phi).unwrap();
            assert!((s.amplitudes()[0].norm() - 1.0).abs() < 1e-12);
        }
        let mut s = StateVector::from_amplitudes(vec![ONE, Complex64::new(0.0, 1.0)]).unwrap();
        s.apply_u_inverse(0, FRAC_PI_2, FRAC_PI_2).unwrap();
        assert!((s.amplitudes()[0].norm() - 1.0).abs() < 1e-15);
        let mut z = StateVector::zero(1).unwrap();
        z.apply_u_inverse(0, 0.0, 1.2).unwrap();
        assert!((z.amplitudes()[0].norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn glue_contract() {
        let h = 1.0 / SQRT_2;
        let epr = vec![Complex64::new(h, 0.0), ZERO, ZERO, Complex64::new(h, 0.0)];
        let mut s = StateVector::from_amplitudes(epr).unwrap();
        s.apply_glue(0, 1).unwrap();
        assert!((s.amplitudes()[0].norm() - 1.0).abs() < 1e-12);

        let anti = vec![Complex64::new(h, 0.0), ZERO, ZERO, Complex64::new(-h, 0.0)];
        let mut s = StateVector::from_amplitudes(anti).unwrap();
        s.apply_glue(0, 1).unwrap();
        assert!(s.amplitudes()[0].norm() < 1e-12);

        // columns of the glue unitary are orthonormal
        let cols: Vec<Vec<Complex64>> = (0..4)
            .map(|k| {
                let mut s = StateVector::basis(2, k).unwrap();
                s.apply_glue(0, 1).unwrap();
                s.amplitudes().to_vec()
            })
            .collect();
        for i in 0..4 {
            for j in 0..4 {
                let expect = if i == j { ONE } else { ZERO };
                assert!(close(inner(&cols[i], &cols[j]), expect, 1e-12));
            }
        }
        assert!(matches!(s.apply_glue(1, 1), Err(FoamError::QubitClash(1))));
    }

    #[test]
    fn glue_on_distant_qubits_of_larger_register() {
        let h = 1.0 / SQRT_2;
        let mut amps = vec![ZERO; 8];
        amps[0b000] = Complex64::new(h, 0.0);
        amps[0b101] = Complex64::new(h, 0.0);
        let mut s = StateVector::from_amplitudes(amps).unwrap();
        s.apply_glue(2, 0).unwrap();
        assert!((s.amplitudes()[0].norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn entangling_pair_transfers_at_quarter_period() {
        let g = 1.04;
        let c = CouplingMatrix::uniform(2, g).unwrap();
        let tau = PI / (2.0 * (TAU * g * 1e-3).abs());
        let mut s = StateVector::basis(3, 0b100).unwrap();
        s.apply_entangling(&[0, 1], &c, tau).unwrap();
        assert!((s.amplitudes()[0b010].norm_sqr() - 1.0).abs() < 1e-12);

        let mut s = StateVector::basis(2, 0b10).unwrap();
        s.apply_entangling(&[0, 1], &c, 0.0).unwrap();
        assert!(close(s.amplitudes()[0b10], ONE, 1e-15));
        assert!(s.apply_entangling(&[0, 0], &c, 1.0).is_err());
        assert!(s.apply_entangling(&[0, 1], &c, -1.0).is_err());
    }

    #[test]
    fn entangling_conserves_excitations_without_leakage() {
        let c = bundled_single_vertex();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let mut s = random_state(&mut rng, 5);
            let before = s.excitation_number();
            let sector_weights = |s: &StateVector| {
                let mut w = [0.0; 6];
                for (i, a) in s.amplitudes().iter().enumerate() {
                    w[i.count_ones() as usize] += a.norm_sqr();
                }
                w
            };
            let wb = sector_weights(&s);
            s.apply_entangling(&[0, 1, 2, 3, 4], &c, rng.random_range(0.0..500.0)).unwrap();
            assert!((s.excitation_number() - before).abs() < 1e-12);
            assert!((s.norm() - 1.0).abs() < 1e-10);
            for (x, y) in wb.iter().zip(sector_weights(&s)) {
                assert!((x - y).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn disjoint_groups_commute() {
        let [a, b] = bundled_two_vertex();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let s0 = random_state(&mut rng, 10);
        let (ga, gb): (Vec<usize>, Vec<usize>) = ((0..5).collect(), (5..10).collect());
        let mut x = s0.clone();
        x.apply_entangling(&ga, &a, 120.0).unwrap();
        x.apply_entangling(&gb, &b, 80.0).unwrap();
        let mut y = s0;
        y.apply_entangling(&gb, &b, 80.0).unwrap();
        y.apply_entangling(&ga, &a, 120.0).unwrap();
        for (p, q) in x.amplitudes().iter().zip(y.amplitudes()) {
            assert!(close(*p, *q, 1e-12));
        }
    }

    #[test]
    fn readout_and_fidelity() {
        let s = StateVector::zero(5).unwrap();
        assert_eq!(s.all_zero_probability(), 1.0);
        assert_eq!(StateVector::basis(5, 31).unwrap().all_zero_probability(), 0.0);
        assert!(s.fidelity_pure(&[ONE; 4]).is_err());
        let w = vertex_state().amplitudes();
        assert!((s.fidelity_pure(w).unwrap() - 27.0 / 2688.0).abs() < 1e-14);
    }

    #[test]
    fn boundary_readout_matches_contraction_on_exact_w() {
        use crate::spinfoam::{amplitude_single, Boundary5};
        let w = StateVector::from_amplitudes(vertex_state().amplitudes().to_vec()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..20 {
            let t: [IntertwinerBloch; 5] = std::array::from_fn(|_| {
                IntertwinerBloch::new(rng.random_range(0.0..=PI), rng.random_range(0.0..TAU)).unwrap()
            });
            let boundary: Vec<_> = t.iter().copied().enumerate().collect();
            let p = w.boundary_probability(&boundary).unwrap();
            assert!((p - amplitude_single(&Boundary5::new(t)).probability).abs() < 1e-10);
        }
    }

    #[test]
    fn glued_readout_matches_epr_contraction() {
        use crate::spinfoam::{glued_epr_overlap, Boundary8};
        let w = vertex_state().amplitudes();
        let ww: Vec<Complex64> = (0..1024).map(|i| w[i >> 5] * w[i & 31]).collect();
        let mut s = StateVector::from_amplitudes(ww).unwrap();
        s.apply_glue(4, 9).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for _ in 0..5 {
            let t: [IntertwinerBloch; 8] = std::array::from_fn(|_| {
                IntertwinerBloch::new(rng.random_range(0.0..=PI), rng.random_range(0.0..TAU)).unwrap()
            });
            let qubits = [0, 1, 2, 3, 5, 6, 7, 8];
            let boundary: Vec<_> = qubits.iter().copied().zip(t.iter().copied()).collect();
            let p = s.boundary_probability(&boundary).unwrap();
            let expect = glued_epr_overlap(&Boundary8::new(t)).norm_sqr();
            assert!((p - expect).abs() < 1e-12);
        }
    }

    #[test]
    fn reduced_density_of_product() {
        let w = vertex_state().amplitudes();
        let ww: Vec<Complex64> = (0..1024).map(|i| w[i >> 5] * w[i & 31]).collect();
        let s = StateVector::from_amplitudes(ww).unwrap();
        let rho = s.reduced_density(5, 5).unwrap();
        for i in 0..32 {
            for j in 0..32 {
                assert!(close(rho[i][j], w[i] * w[j].conj(), 1e-14));
            }
        }
    }

    #[test]
    fn constructor_validation() {
        assert!(StateVector::zero(0).is_err());
        assert!(StateVector::zero(11).is_err());
        assert!(StateVector::from_amplitudes(vec![ONE; 3]).is_err());
        assert!(StateVector::from_amplitudes(vec![ZERO; 4]).is_err());
    }
}
