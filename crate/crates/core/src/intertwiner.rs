//! The spin-1/2 rank-4 intertwiner space (the quantum tetrahedron).
//!
//! Four spin-1/2 factors are ordered `|s1 s2 s3 s4⟩` with `s1` the most
//! significant bit and `↑ = 0`, so the 16-dim index of `|↑↓↑↓⟩` is `0b0101`.
//! The intertwiner basis couples (12) and (34) to an intermediate spin
//! `J12 ∈ {0, 1}` and then to total spin zero.

use std::f64::consts::PI;
use std::sync::OnceLock;

use nalgebra::{Matrix2, SMatrix, SVector, Vector2};
use num_complex::Complex64;

use crate::error::{FoamError, Result};
use crate::su2::{CoherentHalfSpin, Spinor};

pub type Vec16 = SVector<Complex64, 16>;
pub type Mat16 = SMatrix<Complex64, 16, 16>;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Unit normals must match to this tolerance before they are accepted.
pub const NORMAL_TOLERANCE: f64 = 1e-9;

/// Face pairs in the order used by the dihedral-angle arrays.
pub const DIHEDRAL_PAIRS: [(usize, usize); 6] = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];

/// `(√2/3)·√(√3/4)`, the volume eigenvalue magnitude of a regular spin-1/2
/// tetrahedron in units where `(√(8πγ) l_p)³ = 1`.
pub fn regular_volume() -> f64 {
    2f64.sqrt() / 3.0 * (3f64.sqrt() / 4.0).sqrt()
}

/// A quantum tetrahedron `cos(θ/2)|0⟩ + e^{iφ} sin(θ/2)|1⟩`.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct IntertwinerBloch {
    pub theta: f64,
    pub phi: f64,
}

impl IntertwinerBloch {
    pub fn new(theta: f64, phi: f64) -> Result<Self> {
        if !(0.0..=PI).contains(&theta) || !phi.is_finite() {
            return Err(FoamError::Boundary(format!(
                "Bloch angles out of range: theta = {theta}, phi = {phi}"
            )));
        }
        Ok(Self { theta, phi })
    }

    /// `|e⁺⟩ = (|0⟩ + i|1⟩)/√2`, positively oriented regular tetrahedron.
    pub fn regular_plus() -> Self {
        Self { theta: PI / 2.0, phi: PI / 2.0 }
    }

    /// `|e⁻⟩ = (|0⟩ - i|1⟩)/√2`.
    pub fn regular_minus() -> Self {
        Self { theta: PI / 2.0, phi: 3.0 * PI / 2.0 }
    }

    pub fn zero() -> Self {
        Self { theta: 0.0, phi: 0.0 }
    }

    /// Bloch angles of the normalized state `c0|0⟩ + c1|1⟩`, global phase
    /// removed. Returns `None` for the zero vector.
    pub fn from_amplitudes(c0: Complex64, c1: Complex64) -> Option<Self> {
        let norm = (c0.norm_sqr() + c1.norm_sqr()).sqrt();
        if norm < 1e-300 {
            return None;
        }
        let theta = 2.0 * (c1.norm() / norm).clamp(0.0, 1.0).asin();
        let phi = if c0.norm() < 1e-15 * norm || c1.norm() < 1e-15 * norm {
            0.0
        } else {
            (c1.arg() - c0.arg()).rem_euclid(2.0 * PI)
        };
        Some(Self { theta, phi })
    }

    /// Qubit amplitudes in the `{|0⟩, |1⟩}` basis.
    pub fn amplitudes(&self) -> [Complex64; 2] {
        let (s, c) = (self.theta / 2.0).sin_cos();
        [Complex64::new(c, 0.0), Complex64::from_polar(s, self.phi)]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct IntertwinerBasis {
    pub zero: Vec16,
    pub one: Vec16,
}

impl IntertwinerBasis {
    pub fn vector(&self, i: usize) -> &Vec16 {
        match i {
            0 => &self.zero,
            1 => &self.one,
            _ => panic!("intertwiner index {i} out of range"),
        }
    }
}

fn index(spins: [usize; 4]) -> usize {
    spins.iter().fold(0, |acc, &s| (acc << 1) | s)
}

fn build_basis() -> IntertwinerBasis {
    const UP: usize = 0;
    const DN: usize = 1;
    let mut zero = Vec16::zeros();
    let mut one = Vec16::zeros();

    // |0⟩ = ½(|↑↓⟩ - |↓↑⟩)(|↑↓⟩ - |↓↑⟩)
    let singlet = [([UP, DN], 1.0), ([DN, UP], -1.0)];
    for (a, sa) in singlet {
        for (b, sb) in singlet {
            zero[index([a[0], a[1], b[0], b[1]])] += Complex64::new(0.5 * sa * sb, 0.0);
        }
    }

    // |1⟩ = (1/√3)[|↓↓↑↑⟩ + |↑↑↓↓⟩ - ½(|↑↓⟩ + |↓↑⟩)(|↑↓⟩ + |↓↑⟩)]
    let r3 = 1.0 / 3f64.sqrt();
    one[index([DN, DN, UP, UP])] += Complex64::new(r3, 0.0);
    one[index([UP, UP, DN, DN])] += Complex64::new(r3, 0.0);
    let triplet0 = [[UP, DN], [DN, UP]];
    for a in triplet0 {
        for b in triplet0 {
            one[index([a[0], a[1], b[0], b[1]])] -= Complex64::new(0.5 * r3, 0.0);
        }
    }
    IntertwinerBasis { zero, one }
}

/// The two orthonormal intertwiners, exactly as tabulated.
pub fn basis_states() -> &'static IntertwinerBasis {
    static BASIS: OnceLock<IntertwinerBasis> = OnceLock::new();
    BASIS.get_or_init(build_basis)
}

/// The 16-dim embedding of a Bloch-parameterized tetrahedron.
pub fn embed(t: &IntertwinerBloch) -> Vec16 {
    let [c0, c1] = t.amplitudes();
    let basis = basis_states();
    basis.zero * c0 + basis.one * c1
}

/// Four unit face normals.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FaceNormals {
    normals: [[f64; 3]; 4],
}

impl FaceNormals {
    /// Accepts normals within [`NORMAL_TOLERANCE`] of unit length and
    /// renormalizes them exactly.
    pub fn new(normals: [[f64; 3]; 4]) -> Result<Self> {
        let mut out = normals;
        for n in out.iter_mut() {
            let norm = n.iter().map(|x| x * x).sum::<f64>().sqrt();
            if !norm.is_finite() || (norm - 1.0).abs() > NORMAL_TOLERANCE {
                return Err(FoamError::NonUnitNormal { norm });
            }
            for x in n.iter_mut() {
                *x /= norm;
            }
        }
        Ok(Self { normals: out })
    }

    /// Outward normals of a regular tetrahedron in a fixed frame.
    pub fn regular() -> Self {
        let s = 1.0 / 3f64.sqrt();
        Self {
            normals: [[s, s, s], [s, -s, -s], [-s, s, -s], [-s, -s, s]],
        }
    }

    pub fn normals(&self) -> &[[f64; 3]; 4] {
        &self.normals
    }

    pub fn coherent_states(&self) -> [CoherentHalfSpin; 4] {
        self.normals.map(|n| {
            CoherentHalfSpin::from_direction(n).expect("normals validated at construction")
        })
    }
}

/// `⊗_k v_k` for four spinors, in the `|s1 s2 s3 s4⟩` ordering.
pub fn tensor_spinors(spinors: &[Spinor; 4]) -> Vec16 {
    Vec16::from_fn(|i, _| {
        (0..4).fold(ONE, |acc, k| acc * spinors[k][(i >> (3 - k)) & 1])
    })
}

/// `g_i = ⟨i| ⊗_k v_k⟩` for arbitrary face spinors.
pub fn project_spinors(spinors: &[Spinor; 4]) -> [Complex64; 2] {
    let v = tensor_spinors(spinors);
    let basis = basis_states();
    [basis.zero.dotc(&v), basis.one.dotc(&v)]
}

/// Projects the product of four face coherent states onto the intertwiner
/// space, returning the (unnormalized) coefficients `(g_0, g_1)`.
pub fn project_coherent(f: &FaceNormals) -> [Complex64; 2] {
    project_spinors(&f.coherent_states().map(|c| c.spinor()))
}

fn pauli(axis: usize) -> Matrix2<Complex64> {
    let i = Complex64::new(0.0, 1.0);
    match axis {
        0 => Matrix2::new(ZERO, ONE, ONE, ZERO),
        1 => Matrix2::new(ZERO, -i, i, ZERO),
        2 => Matrix2::new(ONE, ZERO, ZERO, -ONE),
        _ => panic!("axis {axis} out of range"),
    }
}

/// `J_k^a = σ^a/2` acting on factor `k` of the four-spin space.
pub fn spin_operator(factor: usize, axis: usize) -> Mat16 {
    let half = pauli(axis) * Complex64::new(0.5, 0.0);
    let shift = 3 - factor;
    Mat16::from_fn(|r, c| {
        let others = !(1usize << shift);
        if r & others != c & others {
            return ZERO;
        }
        half[((r >> shift) & 1, (c >> shift) & 1)]
    })
}

fn total_spin(axis: usize) -> Mat16 {
    (0..4).map(|k| spin_operator(k, axis)).fold(Mat16::zeros(), |a, b| a + b)
}

/// `‖J^a_total v‖` for a = x, y, z.
pub fn closure_components(v: &Vec16) -> [f64; 3] {
    std::array::from_fn(|a| (total_spin(a) * v).norm())
}

/// Sum over x, y, z of `‖(Ĵ1+Ĵ2+Ĵ3+Ĵ4)^a v‖`.
pub fn closure_residual(v: &Vec16) -> f64 {
    closure_components(v).iter().sum()
}

fn restrict(op: &Mat16) -> Matrix2<Complex64> {
    let basis = basis_states();
    Matrix2::from_fn(|i, j| basis.vector(i).dotc(&(op * basis.vector(j))))
}

/// The six dihedral-angle cosines from the tabulated closed forms.
///
/// Entries follow [`DIHEDRAL_PAIRS`]. The closed forms give the (12), (13)
/// and (14) pairs; (34) and (24) repeat (12) and (13), and (23) is solved from
/// `cos14 = 1 - cos23 - cos12` together with `cos23 = cos14`.
/// The (13) expression is evaluated as printed, with `sin φ`. See
/// [`dihedral_operator`] for the operator expectation values.
pub fn dihedral_formula(t: &IntertwinerBloch) -> [f64; 6] {
    let (s, c) = (t.theta / 2.0).sin_cos();
    let c12 = c * c - s * s / 3.0;
    let c13 = 2.0 / 3.0 * s * s + 2.0 * 3f64.sqrt() / 3.0 * c * s * t.phi.sin();
    let c14 = (1.0 - c12) / 2.0;
    let c23 = c14;
    [c12, c13, c14, c23, c13, c12]
}

/// Expectation values of `cos θ_km = -(4/3) Ĵ_k·Ĵ_m` for the embedded state.
///
/// The minus sign makes `⟨cos θ12⟩ = cos²(θ/2) - ⅓ sin²(θ/2)`.
pub fn dihedral_operator(t: &IntertwinerBloch) -> [f64; 6] {
    static OPS: OnceLock<[Matrix2<Complex64>; 6]> = OnceLock::new();
    let ops = OPS.get_or_init(|| {
        DIHEDRAL_PAIRS.map(|(k, m)| {
            let dot = (0..3)
                .map(|a| spin_operator(k, a) * spin_operator(m, a))
                .fold(Mat16::zeros(), |x, y| x + y);
            restrict(&(dot * Complex64::new(-4.0 / 3.0, 0.0)))
        })
    });
    let v = Vector2::from(t.amplitudes());
    ops.map(|op| v.dotc(&(op * v)).re)
}

/// `Q = (Ĵ1 × Ĵ2)·Ĵ3` restricted to the intertwiner space.
pub fn volume_matrix() -> Matrix2<Complex64> {
    static Q: OnceLock<Matrix2<Complex64>> = OnceLock::new();
    *Q.get_or_init(|| {
        let mut q = Mat16::zeros();
        for (a, b, c, sign) in [
            (0, 1, 2, 1.0),
            (1, 2, 0, 1.0),
            (2, 0, 1, 1.0),
            (0, 2, 1, -1.0),
            (2, 1, 0, -1.0),
            (1, 0, 2, -1.0),
        ] {
            q += spin_operator(0, a)
                * spin_operator(1, b)
                * spin_operator(2, c)
                * Complex64::new(sign, 0.0);
        }
        restrict(&q)
    })
}

/// Eigen-decomposition of a 2×2 Hermitian matrix, ascending eigenvalues.
fn hermitian_eigen2(m: &Matrix2<Complex64>) -> ([f64; 2], [Vector2<Complex64>; 2]) {
    let a = m[(0, 0)].re;
    let d = m[(1, 1)].re;
    let b = m[(0, 1)];
    let mean = 0.5 * (a + d);
    let half_gap = (0.25 * (a - d) * (a - d) + b.norm_sqr()).sqrt();
    let vals = [mean - half_gap, mean + half_gap];
    if b.norm() < 1e-300 {
        let e0 = Vector2::new(ONE, ZERO);
        let e1 = Vector2::new(ZERO, ONE);
        return if a <= d { (vals, [e0, e1]) } else { (vals, [e1, e0]) };
    }
    let vecs = vals.map(|l| {
        let v = Vector2::new(b, Complex64::new(l - a, 0.0));
        v / Complex64::new(v.norm(), 0.0)
    });
    (vals, vecs)
}

/// Eigenpairs of the restricted `Q` operator (ascending).
pub fn volume_eigenbasis() -> ([f64; 2], [Vector2<Complex64>; 2]) {
    hermitian_eigen2(&volume_matrix())
}

/// Oriented volume `⟨sign(Q)·(√2/3)·√|Q|⟩`, evaluated in `Q`'s eigenbasis.
pub fn volume_expectation(t: &IntertwinerBloch) -> f64 {
    let (vals, vecs) = volume_eigenbasis();
    let psi = Vector2::from(t.amplitudes());
    vals.iter()
        .zip(vecs.iter())
        .map(|(&q, v)| v.dotc(&psi).norm_sqr() * q.signum() * 2f64.sqrt() / 3.0 * q.abs().sqrt())
        .sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Orientation {
    Positive,
    Negative,
    Degenerate,
}

impl Orientation {
    pub fn sign(self) -> i8 {
        match self {
            Orientation::Positive => 1,
            Orientation::Negative => -1,
            Orientation::Degenerate => 0,
        }
    }
}

pub fn orientation(t: &IntertwinerBloch) -> Orientation {
    let v = volume_expectation(t);
    if v.abs() < 1e-12 {
        Orientation::Degenerate
    } else if v > 0.0 {
        Orientation::Positive
    } else {
        Orientation::Negative
    }
}
