use serde::{Deserialize, Serialize};

use super::{check_tau, CouplingMatrix, StateVector, XyPropagator};
use crate::error::{FoamError, Result};

const BUNDLED_SCHEDULE: &str = include_str!("../../data/vertex_schedule_d4.json");

/// One primitive operation of a circuit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GateStep {
    Rotation { q: usize, alpha: f64, beta: f64 },
    Phase { q: usize, gamma: f64 },
    /// XY evolution of coupling group `group` for `tau_ns`.
    Entangle { group: usize, tau_ns: f64 },
    UInverse { q: usize, theta: f64, phi: f64 },
    Glue { a: usize, b: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InitRotation {
    pub q: usize,
    pub alpha: f64,
    pub beta: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LayerGate {
    pub q: usize,
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
}

/// Entangling evolution of every group, then `R_β(α)` and `Z(γ)` per qubit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Layer {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tau_ns: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tau_ns_by_group: Option<Vec<f64>>,
    pub gates: Vec<LayerGate>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Schedule {
    pub init: Vec<InitRotation>,
    pub layers: Vec<Layer>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub metadata: Option<serde_json::Value>,
}

impl Schedule {
    pub fn empty() -> Self {
        Self { init: Vec::new(), layers: Vec::new(), metadata: None }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| FoamError::Schedule(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("schedules always serialize")
    }

    pub fn depth(&self) -> usize {
        self.layers.len()
    }

    /// Flattens into primitive steps for a device with `n_groups` groups.
    pub fn steps(&self, n_groups: usize) -> Result<Vec<GateStep>> {
        let mut steps: Vec<GateStep> =
            self.init.iter().map(|r| GateStep::Rotation { q: r.q, alpha: r.alpha, beta: r.beta }).collect();
        for (i, layer) in self.layers.iter().enumerate() {
            let taus = match (layer.tau_ns, &layer.tau_ns_by_group) {
                (Some(t), None) => vec![t; n_groups],
                (None, Some(v)) if v.len() == n_groups => v.clone(),
                (None, Some(v)) => {
                    return Err(FoamError::Schedule(format!(
                        "layer {i}: {} durations for {n_groups} groups",
                        v.len()
                    )))
                }
                _ => {
                    return Err(FoamError::Schedule(format!(
                        "layer {i}: exactly one of tau_ns or tau_ns_by_group is required"
                    )))
                }
            };
            for (group, &tau_ns) in taus.iter().enumerate() {
                check_tau(tau_ns).map_err(|e| FoamError::Schedule(format!("layer {i}: {e}")))?;
                steps.push(GateStep::Entangle { group, tau_ns });
            }
            for g in &layer.gates {
                steps.push(GateStep::Rotation { q: g.q, alpha: g.alpha, beta: g.beta });
                steps.push(GateStep::Phase { q: g.q, gamma: g.gamma });
            }
        }
        Ok(steps)
    }
}

/// The frozen depth-4 schedule that prepares the vertex state on the
/// bundled single-vertex couplings.
pub fn bundled_vertex_schedule() -> Schedule {
    Schedule::from_json(BUNDLED_SCHEDULE).expect("bundled schedule is valid")
}

/// Coupling groups laid out on consecutive qubits.
pub struct Device {
    groups: Vec<(Vec<usize>, XyPropagator)>,
    n: usize,
}

impl Device {
    pub fn new(couplings: &[CouplingMatrix]) -> Result<Self> {
        let n: usize = couplings.iter().map(CouplingMatrix::size).sum();
        if couplings.is_empty() || n > super::MAX_QUBITS {
            return Err(FoamError::Coupling(format!(
                "{} groups with {n} qubits in total; need 1..={} qubits",
                couplings.len(),
                super::MAX_QUBITS
            )));
        }
        let mut offset = 0;
        let groups = couplings
            .iter()
            .map(|c| {
                let qubits: Vec<usize> = (offset..offset + c.size()).collect();
                offset += c.size();
                (qubits, XyPropagator::new(c))
            })
            .collect();
        Ok(Self { groups, n })
    }

    pub fn n_qubits(&self) -> usize {
        self.n
    }

    pub fn n_groups(&self) -> usize {
        self.groups.len()
    }

    pub fn group_qubits(&self, group: usize) -> &[usize] {
        &self.groups[group].0
    }

    pub fn propagator(&self, group: usize) -> &XyPropagator {
        &self.groups[group].1
    }

    pub fn apply(&self, s: &mut StateVector, step: &GateStep) -> Result<()> {
        match *step {
            GateStep::Rotation { q, alpha, beta } => s.apply_rotation(q, alpha, beta),
            GateStep::Phase { q, gamma } => s.apply_phase(q, gamma),
            GateStep::UInverse { q, theta, phi } => s.apply_u_inverse(q, theta, phi),
            GateStep::Glue { a, b } => s.apply_glue(a, b),
            GateStep::Entangle { group, tau_ns } => {
                let (qubits, prop) = self.groups.get(group).ok_or_else(|| {
                    FoamError::Schedule(format!("group {group} not present ({} groups)", self.groups.len()))
                })?;
                check_tau(tau_ns)?;
                let n = s.n_qubits();
                prop.evolve(s.amplitudes_mut(), n, qubits, tau_ns);
                Ok(())
            }
        }
    }

    /// Applies `steps` to `|0…0⟩`.
    pub fn run_steps(&self, steps: &[GateStep]) -> Result<StateVector> {
        let mut s = StateVector::zero(self.n)?;
        for step in steps {
            self.apply(&mut s, step)?;
        }
        Ok(s)
    }

    pub fn run_schedule(&self, schedule: &Schedule) -> Result<StateVector> {
        self.run_steps(&schedule.steps(self.n_groups())?)
    }
}

pub fn run_schedule(schedule: &Schedule, couplings: &[CouplingMatrix]) -> Result<StateVector> {
    Device::new(couplings)?.run_schedule(schedule)
}
