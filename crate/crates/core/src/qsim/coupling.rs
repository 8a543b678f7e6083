use std::collections::BTreeMap;
use std::f64::consts::TAU;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{FoamError, Result};

const SYMMETRY_TOLERANCE: f64 = 1e-12;

const BUNDLED_TABLE: &str = include_str!("../../data/couplings.json");

/// Intra-group XY couplings `g_ij/2π` in MHz.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawCoupling", into = "RawCoupling")]
pub struct CouplingMatrix {
    label: String,
    qubits: Vec<String>,
    g_mhz: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct RawCoupling {
    #[serde(default)]
    label: String,
    qubits: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pairs_mhz: Option<BTreeMap<String, f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    matrix_mhz: Option<Vec<Vec<f64>>>,
}

impl TryFrom<RawCoupling> for CouplingMatrix {
    type Error = FoamError;

    fn try_from(raw: RawCoupling) -> Result<Self> {
        let n = raw.qubits.len();
        let matrix = match (raw.pairs_mhz, raw.matrix_mhz) {
            (Some(pairs), None) => {
                let mut m = vec![vec![0.0; n]; n];
                let mut seen = vec![vec![false; n]; n];
                let position = |name: &str| {
                    raw.qubits.iter().position(|q| q == name).ok_or_else(|| {
                        FoamError::Coupling(format!("pair refers to unknown qubit {name:?}"))
                    })
                };
                for (key, value) in pairs {
                    let (a, b) = key.split_once('-').ok_or_else(|| {
                        FoamError::Coupling(format!("pair key {key:?} is not of the form A-B"))
                    })?;
                    let (i, j) = (position(a.trim())?, position(b.trim())?);
                    if i == j {
                        return Err(FoamError::Coupling(format!("self-coupling in {key:?}")));
                    }
                    if seen[i][j] {
                        return Err(FoamError::Coupling(format!("pair {key:?} given twice")));
                    }
                    seen[i][j] = true;
                    seen[j][i] = true;
                    m[i][j] = value;
                    m[j][i] = value;
                }
                m
            }
            (None, Some(m)) => m,
            _ => {
                return Err(FoamError::Coupling(
                    "exactly one of pairs_mhz or matrix_mhz is required".into(),
                ))
            }
        };
        CouplingMatrix::new(raw.label, raw.qubits, matrix)
    }
}

impl From<CouplingMatrix> for RawCoupling {
    fn from(c: CouplingMatrix) -> Self {
        RawCoupling { label: c.label, qubits: c.qubits, pairs_mhz: None, matrix_mhz: Some(c.g_mhz) }
    }
}

impl CouplingMatrix {
    pub fn new(label: String, qubits: Vec<String>, g_mhz: Vec<Vec<f64>>) -> Result<Self> {
        let n = qubits.len();
        if n == 0 || n > super::MAX_QUBITS {
            return Err(FoamError::Coupling(format!("group size {n} not in 1..={}", super::MAX_QUBITS)));
        }
        if g_mhz.len() != n || g_mhz.iter().any(|row| row.len() != n) {
            return Err(FoamError::Coupling(format!("matrix must be {n}x{n}")));
        }
        for (i, row) in g_mhz.iter().enumerate() {
            if row[i] != 0.0 {
                return Err(FoamError::Coupling(format!("non-zero diagonal at {i}")));
            }
            for (j, &g) in row.iter().enumerate() {
                if !g.is_finite() {
                    return Err(FoamError::Coupling(format!("non-finite entry at ({i}, {j})")));
                }
                if (g - g_mhz[j][i]).abs() > SYMMETRY_TOLERANCE {
                    return Err(FoamError::Coupling(format!("asymmetric at ({i}, {j})")));
                }
            }
        }
        Ok(Self { label, qubits, g_mhz })
    }

    /// A group with every pair coupled at `g` MHz.
    pub fn uniform(n: usize, g: f64) -> Result<Self> {
        let names = (0..n).map(|i| format!("q{i}")).collect();
        let m = (0..n).map(|i| (0..n).map(|j| if i == j { 0.0 } else { g }).collect()).collect();
        Self::new(format!("uniform-{g}"), names, m)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn qubit_names(&self) -> &[String] {
        &self.qubits
    }

    pub fn size(&self) -> usize {
        self.qubits.len()
    }

    pub fn g_mhz(&self, i: usize, j: usize) -> f64 {
        self.g_mhz[i][j]
    }

    /// Hopping amplitude in rad/ns.
    pub fn angular(&self, i: usize, j: usize) -> f64 {
        TAU * self.g_mhz[i][j] * 1e-3
    }
}

#[derive(Debug, Deserialize)]
struct Bundle {
    datasets: BTreeMap<String, Vec<CouplingMatrix>>,
}

/// Reads a coupling file: a single group, an array of groups, or a bundle
/// `{"datasets": {name: [groups]}}` from which `dataset` is selected.
pub fn load_couplings(text: &str, dataset: Option<&str>) -> Result<Vec<CouplingMatrix>> {
    let value: serde_json::Value = serde_json::from_str(text)?;
    if value.get("datasets").is_some() {
        let bundle: Bundle = serde_json::from_value(value)?;
        let name = dataset.unwrap_or("single_vertex");
        return bundle.datasets.get(name).cloned().ok_or_else(|| {
            let known: Vec<_> = bundle.datasets.keys().cloned().collect();
            FoamError::Coupling(format!("dataset {name:?} not found (have {known:?})"))
        });
    }
    if dataset.is_some() {
        return Err(FoamError::Coupling("dataset selection needs a bundle file".into()));
    }
    if value.is_array() {
        Ok(serde_json::from_value(value)?)
    } else {
        Ok(vec![serde_json::from_value(value)?])
    }
}

/// The bundled single-vertex group in register order `Q1 Q2 Q5 Q4 Q3`.
pub fn bundled_single_vertex() -> CouplingMatrix {
    load_couplings(BUNDLED_TABLE, Some("single_vertex")).expect("bundled data is valid")[0].clone()
}

/// The two bundled groups `Q1..Q5` and `Q6..Q10` used for parallel synthesis.
pub fn bundled_two_vertex() -> [CouplingMatrix; 2] {
    let v = load_couplings(BUNDLED_TABLE, Some("two_vertex")).expect("bundled data is valid");
    [v[0].clone(), v[1].clone()]
}

pub fn bundled_table_json() -> &'static str {
    BUNDLED_TABLE
}

struct Sector {
    states: Vec<usize>,
    energies: Vec<f64>,
    vectors: DMatrix<f64>,
}

/// Exact propagator `exp(-i H τ)` of the XY exchange Hamiltonian
/// `H = Σ_{i<j} g_ij (σ⁺_i σ⁻_j + σ⁻_i σ⁺_j)` on one group, diagonalized
/// once per excitation-number sector.
pub struct XyPropagator {
    size: usize,
    sectors: Vec<Sector>,
}

impl XyPropagator {
    pub fn new(c: &CouplingMatrix) -> Self {
        let m = c.size();
        let mut sectors = Vec::with_capacity(m + 1);
        for k in 0..=m {
            let states: Vec<usize> = (0..1usize << m).filter(|s| s.count_ones() as usize == k).collect();
            let d = states.len();
            let mut h = DMatrix::<f64>::zeros(d, d);
            for (col, &s) in states.iter().enumerate() {
                for i in 0..m {
                    for j in 0..m {
                        let (bi, bj) = (1 << (m - 1 - i), 1 << (m - 1 - j));
                        // σ⁺_i σ⁻_j moves an excitation from j to i
                        if i != j && s & bj != 0 && s & bi == 0 {
                            let t = (s ^ bj) | bi;
                            let row = states.binary_search(&t).expect("same sector");
                            h[(row, col)] += c.angular(i, j);
                        }
                    }
                }
            }
            let eig = h.symmetric_eigen();
            sectors.push(Sector {
                states,
                energies: eig.eigenvalues.iter().copied().collect(),
                vectors: eig.eigenvectors,
            });
        }
        Self { size: m, sectors }
    }

    pub fn size(&self) -> usize {
        self.size
    }

    /// Energies in rad/ns, sector by sector.
    pub fn spectrum(&self) -> Vec<f64> {
        self.sectors.iter().flat_map(|s| s.energies.iter().copied()).collect()
    }

    /// Applies `f(E)` spectrally to a local `2^m` vector in place.
    fn apply_spectral(&self, local: &mut [Complex64], f: impl Fn(f64) -> Complex64) {
        let mut buf = Vec::new();
        for s in &self.sectors {
            let d = s.states.len();
            buf.clear();
            buf.extend((0..d).map(|k| {
                let coeff: Complex64 =
                    s.states.iter().enumerate().map(|(r, &st)| local[st] * s.vectors[(r, k)]).sum();
                coeff * f(s.energies[k])
            }));
            for (r, &st) in s.states.iter().enumerate() {
                local[st] = (0..d).map(|k| buf[k] * s.vectors[(r, k)]).sum();
            }
        }
    }

    /// `exp(-i H τ)` on `qubits` of an `n`-qubit register.
    pub fn evolve(&self, amps: &mut [Complex64], n: usize, qubits: &[usize], tau_ns: f64) {
        self.on_group(amps, n, qubits, |local| {
            self.apply_spectral(local, |e| Complex64::from_polar(1.0, -e * tau_ns))
        });
    }

    /// `H ψ` on `qubits` of an `n`-qubit register.
    pub fn apply_hamiltonian(&self, amps: &mut [Complex64], n: usize, qubits: &[usize]) {
        self.on_group(amps, n, qubits, |local| self.apply_spectral(local, |e| Complex64::new(e, 0.0)));
    }

    fn on_group(&self, amps: &mut [Complex64], n: usize, qubits: &[usize], mut op: impl FnMut(&mut [Complex64])) {
        assert_eq!(qubits.len(), self.size, "group size mismatch");
        let offsets: Vec<usize> = (0..1usize << self.size)
            .map(|l| {
                qubits.iter().enumerate().fold(0, |acc, (k, &q)| {
                    if l >> (self.size - 1 - k) & 1 == 1 {
                        acc | 1 << (n - 1 - q)
                    } else {
                        acc
                    }
                })
            })
            .collect();
        let mask = offsets[offsets.len() - 1];
        let mut local = vec![Complex64::new(0.0, 0.0); offsets.len()];
        for base in (0..1usize << n).filter(|b| b & mask == 0) {
            for (l, &o) in offsets.iter().enumerate() {
                local[l] = amps[base | o];
            }
            op(&mut local);
            for (l, &o) in offsets.iter().enumerate() {
                amps[base | o] = local[l];
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_tables_load() {
        let single = bundled_single_vertex();
        assert_eq!(single.qubit_names(), ["Q1", "Q2", "Q5", "Q4", "Q3"]);
        assert_eq!(single.g_mhz(0, 2), -0.99);
        assert_eq!(single.g_mhz(2, 4), -1.25);
        let [a, b] = bundled_two_vertex();
        assert_eq!(a.g_mhz(0, 1), -0.58);
        assert_eq!(b.g_mhz(3, 4), -0.67);
        assert_eq!(b.qubit_names()[4], "Q10");
    }

    #[test]
    fn malformed_matrices_rejected() {
        let names = vec!["a".to_string(), "b".to_string()];
        assert!(CouplingMatrix::new("x".into(), names.clone(), vec![vec![0.0, 1.0], vec![2.0, 0.0]]).is_err());
        assert!(CouplingMatrix::new("x".into(), names.clone(), vec![vec![1.0, 1.0], vec![1.0, 0.0]]).is_err());
        assert!(CouplingMatrix::new("x".into(), names, vec![vec![0.0]]).is_err());
        assert!(CouplingMatrix::from_json(r#"{"qubits":["a","b"],"pairs_mhz":{"a-c":1.0}}"#).is_err());
        assert!(CouplingMatrix::from_json(r#"{"qubits":["a","b"],"pairs_mhz":{"a-b":1.0,"b-a":1.0}}"#).is_err());
        assert!(CouplingMatrix::from_json(r#"{"qubits":["a","b"]}"#).is_err());
    }

    #[test]
    fn json_round_trip() {
        let c = bundled_single_vertex();
        let text = serde_json::to_string(&c).unwrap();
        assert_eq!(CouplingMatrix::from_json(&text).unwrap(), c);
    }

    #[test]
    fn load_couplings_variants() {
        let c = bundled_single_vertex();
        let one = serde_json::to_string(&c).unwrap();
        assert_eq!(load_couplings(&one, None).unwrap().len(), 1);
        assert!(load_couplings(&one, Some("two_vertex")).is_err());
        assert_eq!(load_couplings(bundled_table_json(), Some("two_vertex")).unwrap().len(), 2);
        assert!(load_couplings(bundled_table_json(), Some("nope")).is_err());
    }

    #[test]
    fn spectrum_of_a_pair() {
        let c = CouplingMatrix::uniform(2, 1.0).unwrap();
        let mut e = XyPropagator::new(&c).spectrum();
        e.sort_by(f64::total_cmp);
        let g = TAU * 1e-3;
        let expect = [-g, 0.0, 0.0, g];
        for (x, y) in e.iter().zip(expect) {
            assert!((x - y).abs() < 1e-15);
        }
    }
}
