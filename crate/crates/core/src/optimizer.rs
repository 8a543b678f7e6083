//! Pulse-schedule synthesis for the vertex state.
//!
//! A schedule is an initial `R_β(α)` on every qubit followed by `d` layers of
//! {XY evolution of each group, `R_β(α)` and `Z(γ)` on every qubit}. The
//! infidelity gradient is computed exactly by a forward/backward sweep and
//! minimized with L-BFGS from several random starts.
//!
//! Durations are optimized through `τ = s·u²` with `s = TAU_SCALE_NS`, which
//! keeps `τ ≥ 0` without bounds and puts durations on the same footing as
//! angles.

use std::collections::VecDeque;
use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::json;

use crate::error::{FoamError, Result};
use crate::qsim::{
    apply_gate_raw, inner, phase_matrix, rotation_matrix, CouplingMatrix,
    Device, Gate1, InitRotation, Layer, LayerGate, Schedule,
};

pub const TAU_SCALE_NS: f64 = 100.0;
pub const TAU_INIT_RANGE_NS: (f64, f64) = (50.0, 500.0);

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Flat parameter vector: `(α, β)` per qubit, then per layer one `τ` per
/// group followed by `(α, β, γ)` per qubit.
#[derive(Debug, Clone, PartialEq)]
pub struct PulseSchedule {
    n_qubits: usize,
    n_groups: usize,
    depth: usize,
    params: Vec<f64>,
}

impl PulseSchedule {
    pub fn param_len(n_qubits: usize, n_groups: usize, depth: usize) -> usize {
        2 * n_qubits + depth * (n_groups + 3 * n_qubits)
    }

    pub fn new(n_qubits: usize, n_groups: usize, depth: usize, params: Vec<f64>) -> Result<Self> {
        let expected = Self::param_len(n_qubits, n_groups, depth);
        if params.len() != expected {
            return Err(FoamError::DimensionMismatch { expected, got: params.len() });
        }
        if params.iter().any(|x| !x.is_finite()) {
            return Err(FoamError::Schedule("non-finite parameter".into()));
        }
        let p = Self { n_qubits, n_groups, depth, params };
        for l in 0..depth {
            for g in 0..n_groups {
                if p.tau(l, g) < 0.0 {
                    return Err(FoamError::Schedule(format!("negative duration in layer {l}")));
                }
            }
        }
        Ok(p)
    }

    /// Angles uniform in `[0, π]` (α) and `[0, 2π]` (β, γ); durations uniform
    /// in [`TAU_INIT_RANGE_NS`], shared across groups when `tied`.
    pub fn random<R: Rng + ?Sized>(rng: &mut R, n_qubits: usize, n_groups: usize, depth: usize, tied: bool) -> Self {
        let mut params = Vec::with_capacity(Self::param_len(n_qubits, n_groups, depth));
        for _ in 0..n_qubits {
            params.push(rng.random_range(0.0..PI));
            params.push(rng.random_range(0.0..TAU));
        }
        for _ in 0..depth {
            let shared = rng.random_range(TAU_INIT_RANGE_NS.0..TAU_INIT_RANGE_NS.1);
            for g in 0..n_groups {
                params.push(if tied || g == 0 { shared } else { rng.random_range(TAU_INIT_RANGE_NS.0..TAU_INIT_RANGE_NS.1) });
            }
            for _ in 0..n_qubits {
                params.push(rng.random_range(0.0..PI));
                params.push(rng.random_range(0.0..TAU));
                params.push(rng.random_range(0.0..TAU));
            }
        }
        Self { n_qubits, n_groups, depth, params }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn n_groups(&self) -> usize {
        self.n_groups
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn params(&self) -> &[f64] {
        &self.params
    }

    fn layer_start(&self, layer: usize) -> usize {
        2 * self.n_qubits + layer * (self.n_groups + 3 * self.n_qubits)
    }

    fn tau_index(&self, layer: usize, group: usize) -> usize {
        self.layer_start(layer) + group
    }

    fn gate_index(&self, layer: usize, q: usize) -> usize {
        self.layer_start(layer) + self.n_groups + 3 * q
    }

    pub fn tau(&self, layer: usize, group: usize) -> f64 {
        self.params[self.tau_index(layer, group)]
    }

    pub fn to_schedule(&self) -> Schedule {
        let init = (0..self.n_qubits)
            .map(|q| InitRotation { q, alpha: self.params[2 * q], beta: self.params[2 * q + 1] })
            .collect();
        let layers = (0..self.depth)
            .map(|l| {
                let taus: Vec<f64> = (0..self.n_groups).map(|g| self.tau(l, g)).collect();
                let (tau_ns, tau_ns_by_group) = if self.n_groups == 1 { (Some(taus[0]), None) } else { (None, Some(taus)) };
                let gates = (0..self.n_qubits)
                    .map(|q| {
                        let i = self.gate_index(l, q);
                        LayerGate { q, alpha: self.params[i], beta: self.params[i + 1], gamma: self.params[i + 2] }
                    })
                    .collect();
                Layer { tau_ns, tau_ns_by_group, gates }
            })
            .collect();
        Schedule { init, layers, metadata: None }
    }

    /// Inverse of [`to_schedule`](Self::to_schedule) for schedules that set
    /// every qubit exactly once per stage.
    pub fn from_schedule(s: &Schedule, n_qubits: usize, n_groups: usize) -> Result<Self> {
        let mut params = vec![f64::NAN; Self::param_len(n_qubits, n_groups, s.layers.len())];
        let shape = |what: &str| FoamError::Schedule(format!("not a layered schedule: {what}"));
        if s.init.len() != n_qubits {
            return Err(shape("initial rotations must cover every qubit once"));
        }
        for r in &s.init {
            if r.q >= n_qubits || !params[2 * r.q].is_nan() {
                return Err(shape("initial rotation qubits"));
            }
            params[2 * r.q] = r.alpha;
            params[2 * r.q + 1] = r.beta;
        }
        let probe = Self { n_qubits, n_groups, depth: s.layers.len(), params: Vec::new() };
        for (l, layer) in s.layers.iter().enumerate() {
            let taus = match (layer.tau_ns, &layer.tau_ns_by_group) {
                (Some(t), None) => vec![t; n_groups],
                (None, Some(v)) if v.len() == n_groups => v.clone(),
                _ => return Err(shape("durations")),
            };
            let start = probe.layer_start(l);
            params[start..start + n_groups].copy_from_slice(&taus);
            if layer.gates.len() != n_qubits {
                return Err(shape("each layer must set every qubit once"));
            }
            for g in &layer.gates {
                if g.q >= n_qubits || !params[probe.gate_index(l, g.q)].is_nan() {
                    return Err(shape("layer gate qubits"));
                }
                let i = probe.gate_index(l, g.q);
                params[i..i + 3].copy_from_slice(&[g.alpha, g.beta, g.gamma]);
            }
        }
        Self::new(n_qubits, n_groups, s.layers.len(), params)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimizerConfig {
    pub restarts: usize,
    pub max_iterations: usize,
    /// Stop when the gradient norm in the internal variables falls below.
    pub gradient_tolerance: f64,
    pub seed: u64,
    /// L-BFGS history length.
    pub memory: usize,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self { restarts: 10, max_iterations: 2000, gradient_tolerance: 1e-6, seed: 1, memory: 10 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RestartReport {
    pub index: usize,
    pub initial_fidelity: f64,
    pub fidelity: f64,
    pub iterations: usize,
    pub gradient_norm: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptimizationResult {
    pub schedule: PulseSchedule,
    pub fidelity: f64,
    pub best_restart: usize,
    pub restarts: Vec<RestartReport>,
}

impl OptimizationResult {
    /// The best schedule as JSON with a metadata block.
    pub fn to_schedule(&self, seed: u64) -> Schedule {
        let mut s = self.schedule.to_schedule();
        let best = &self.restarts[self.best_restart];
        s.metadata = Some(json!({
            "fidelity": self.fidelity,
            "iterations": best.iterations,
            "seed": seed,
            "depth": self.schedule.depth(),
            "restarts": self.restarts.len(),
            "best_restart": self.best_restart,
        }));
        s
    }
}

enum Op {
    Gate { q: usize, m: Gate1, derivs: Vec<(usize, Gate1)> },
    Entangle { group: usize, tau: f64, param: usize },
}

/// Forward/backward evaluation of the infidelity for one device and target.
pub struct Evaluator {
    device: Device,
    target: Vec<Complex64>,
}

fn d_rotation_alpha(alpha: f64, beta: f64) -> Gate1 {
    let (s, c) = (alpha / 2.0).sin_cos();
    let off = Complex64::new(0.0, -c / 2.0);
    [
        [Complex64::new(-s / 2.0, 0.0), off * Complex64::from_polar(1.0, -beta)],
        [off * Complex64::from_polar(1.0, beta), Complex64::new(-s / 2.0, 0.0)],
    ]
}

fn d_rotation_beta(alpha: f64, beta: f64) -> Gate1 {
    let s = (alpha / 2.0).sin();
    [[ZERO, -Complex64::from_polar(s, -beta)], [Complex64::from_polar(s, beta), ZERO]]
}

fn d_phase(gamma: f64) -> Gate1 {
    let i_half = Complex64::new(0.0, 0.5);
    [[-i_half * Complex64::from_polar(1.0, -gamma / 2.0), ZERO], [ZERO, i_half * Complex64::from_polar(1.0, gamma / 2.0)]]
}

fn adjoint(m: &Gate1) -> Gate1 {
    [[m[0][0].conj(), m[1][0].conj()], [m[0][1].conj(), m[1][1].conj()]]
}

/// `⟨χ| D_q |ψ⟩`.
fn sandwich(chi: &[Complex64], psi: &[Complex64], n: usize, q: usize, d: &Gate1) -> Complex64 {
    let b = 1usize << (n - 1 - q);
    let mut acc = ZERO;
    for i in 0..psi.len() {
        if i & b == 0 {
            let (x, y) = (psi[i], psi[i | b]);
            acc += chi[i].conj() * (d[0][0] * x + d[0][1] * y) + chi[i | b].conj() * (d[1][0] * x + d[1][1] * y);
        }
    }
    acc
}

impl Evaluator {
    pub fn new(couplings: &[CouplingMatrix], target: &[Complex64]) -> Result<Self> {
        let device = Device::new(couplings)?;
        let dim = 1usize << device.n_qubits();
        if target.len() != dim {
            return Err(FoamError::DimensionMismatch { expected: dim, got: target.len() });
        }
        let norm = target.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        if !(norm > 0.0 && norm.is_finite()) {
            return Err(FoamError::InvalidArgument("target has zero norm".into()));
        }
        Ok(Self { device, target: target.iter().map(|c| c / norm).collect() })
    }

    pub fn n_qubits(&self) -> usize {
        self.device.n_qubits()
    }

    pub fn n_groups(&self) -> usize {
        self.device.n_groups()
    }

    fn check(&self, p: &PulseSchedule) -> Result<()> {
        if p.n_qubits != self.n_qubits() || p.n_groups != self.n_groups() {
            return Err(FoamError::DimensionMismatch { expected: self.n_qubits(), got: p.n_qubits });
        }
        Ok(())
    }

    fn ops(&self, p: &PulseSchedule) -> Vec<Op> {
        let mut ops = Vec::new();
        for q in 0..p.n_qubits {
            let (a, b) = (p.params[2 * q], p.params[2 * q + 1]);
            ops.push(Op::Gate {
                q,
                m: rotation_matrix(a, b),
                derivs: vec![(2 * q, d_rotation_alpha(a, b)), (2 * q + 1, d_rotation_beta(a, b))],
            });
        }
        for l in 0..p.depth {
            for g in 0..p.n_groups {
                ops.push(Op::Entangle { group: g, tau: p.tau(l, g), param: p.tau_index(l, g) });
            }
            for q in 0..p.n_qubits {
                let i = p.gate_index(l, q);
                let (a, b, c) = (p.params[i], p.params[i + 1], p.params[i + 2]);
                ops.push(Op::Gate {
                    q,
                    m: rotation_matrix(a, b),
                    derivs: vec![(i, d_rotation_alpha(a, b)), (i + 1, d_rotation_beta(a, b))],
                });
                ops.push(Op::Gate { q, m: phase_matrix(c), derivs: vec![(i + 2, d_phase(c))] });
            }
        }
        ops
    }

    fn forward(&self, op: &Op, amps: &mut [Complex64], inverse: bool) {
        let n = self.n_qubits();
        match op {
            Op::Gate { q, m, .. } => apply_gate_raw(amps, n, *q, &if inverse { adjoint(m) } else { *m }),
            Op::Entangle { group, tau, .. } => {
                let t = if inverse { -tau } else { *tau };
                self.device.propagator(*group).evolve(amps, n, self.device.group_qubits(*group), t);
            }
        }
    }

    pub fn final_state(&self, p: &PulseSchedule) -> Result<Vec<Complex64>> {
        self.check(p)?;
        let mut psi = vec![ZERO; 1 << self.n_qubits()];
        psi[0] = Complex64::new(1.0, 0.0);
        for op in &self.ops(p) {
            self.forward(op, &mut psi, false);
        }
        Ok(psi)
    }

    pub fn infidelity(&self, p: &PulseSchedule) -> Result<f64> {
        let psi = self.final_state(p)?;
        Ok(1.0 - inner(&self.target, &psi).norm_sqr())
    }

    /// Infidelity and its exact gradient with respect to `p.params()`.
    pub fn infidelity_and_gradient(&self, p: &PulseSchedule) -> Result<(f64, Vec<f64>)> {
        self.check(p)?;
        let n = self.n_qubits();
        let ops = self.ops(p);
        let mut states = Vec::with_capacity(ops.len() + 1);
        let mut psi = vec![ZERO; 1 << n];
        psi[0] = Complex64::new(1.0, 0.0);
        states.push(psi.clone());
        for op in &ops {
            self.forward(op, &mut psi, false);
            states.push(psi.clone());
        }
        let overlap = inner(&self.target, &psi);
        let mut grad = vec![0.0; p.params.len()];
        let mut chi = self.target.clone();
        let mut scratch = vec![ZERO; 1 << n];
        for (k, op) in ops.iter().enumerate().rev() {
            match op {
                Op::Gate { q, derivs, .. } => {
                    for (param, d) in derivs {
                        let da = sandwich(&chi, &states[k], n, *q, d);
                        grad[*param] -= 2.0 * (overlap.conj() * da).re;
                    }
                }
                Op::Entangle { group, param, .. } => {
                    scratch.copy_from_slice(&states[k + 1]);
                    self.device.propagator(*group).apply_hamiltonian(&mut scratch, n, self.device.group_qubits(*group));
                    let da = inner(&chi, &scratch) * Complex64::new(0.0, -1.0);
                    grad[*param] -= 2.0 * (overlap.conj() * da).re;
                }
            }
            self.forward(op, &mut chi, true);
        }
        Ok((1.0 - overlap.norm_sqr(), grad))
    }
}

pub fn infidelity(p: &PulseSchedule, couplings: &[CouplingMatrix], target: &[Complex64]) -> Result<f64> {
    Evaluator::new(couplings, target)?.infidelity(p)
}

pub fn gradient(p: &PulseSchedule, couplings: &[CouplingMatrix], target: &[Complex64]) -> Result<Vec<f64>> {
    Ok(Evaluator::new(couplings, target)?.infidelity_and_gradient(p)?.1)
}

/// Central differences with step `rel_step · max(|x|, 1)`.
pub fn finite_difference_gradient(
    p: &PulseSchedule,
    couplings: &[CouplingMatrix],
    target: &[Complex64],
    rel_step: f64,
) -> Result<Vec<f64>> {
    let ev = Evaluator::new(couplings, target)?;
    let mut probe = p.clone();
    (0..p.params.len())
        .map(|i| {
            let x = p.params[i];
            let h = rel_step * x.abs().max(1.0);
            probe.params[i] = x + h;
            let up = ev.infidelity(&probe)?;
            probe.params[i] = x - h;
            let down = ev.infidelity(&probe)?;
            probe.params[i] = x;
            Ok((up - down) / (2.0 * h))
        })
        .collect()
}

/// Free variables seen by the minimizer: durations become `u` with
/// `τ = s·u²`, and tied layers carry a single `u`.
struct Reparam {
    n_qubits: usize,
    n_groups: usize,
    depth: usize,
    tied: bool,
}

impl Reparam {
    fn taus_per_layer(&self) -> usize {
        if self.tied { 1 } else { self.n_groups }
    }

    fn encode(&self, p: &PulseSchedule) -> Vec<f64> {
        let mut x: Vec<f64> = p.params[..2 * self.n_qubits].to_vec();
        for l in 0..self.depth {
            for g in 0..self.taus_per_layer() {
                x.push((p.tau(l, g) / TAU_SCALE_NS).sqrt());
            }
            let i = p.gate_index(l, 0);
            x.extend_from_slice(&p.params[i..i + 3 * self.n_qubits]);
        }
        x
    }

    fn decode(&self, x: &[f64]) -> PulseSchedule {
        let mut params = x[..2 * self.n_qubits].to_vec();
        let mut k = 2 * self.n_qubits;
        for _ in 0..self.depth {
            let us: Vec<f64> = x[k..k + self.taus_per_layer()].to_vec();
            k += us.len();
            for g in 0..self.n_groups {
                let u = if self.tied { us[0] } else { us[g] };
                params.push(TAU_SCALE_NS * u * u);
            }
            params.extend_from_slice(&x[k..k + 3 * self.n_qubits]);
            k += 3 * self.n_qubits;
        }
        PulseSchedule { n_qubits: self.n_qubits, n_groups: self.n_groups, depth: self.depth, params }
    }

    /// Chain rule from schedule gradient to free-variable gradient.
    fn pull_back(&self, x: &[f64], p: &PulseSchedule, g: &[f64]) -> Vec<f64> {
        let mut out = g[..2 * self.n_qubits].to_vec();
        let mut k = 2 * self.n_qubits;
        for l in 0..self.depth {
            for t in 0..self.taus_per_layer() {
                let u = x[k];
                let d_tau: f64 = if self.tied {
                    (0..self.n_groups).map(|grp| g[p.tau_index(l, grp)]).sum()
                } else {
                    g[p.tau_index(l, t)]
                };
                out.push(d_tau * 2.0 * TAU_SCALE_NS * u);
                k += 1;
            }
            let i = p.gate_index(l, 0);
            out.extend_from_slice(&g[i..i + 3 * self.n_qubits]);
            k += 3 * self.n_qubits;
        }
        out
    }
}

struct Outcome {
    x: Vec<f64>,
    value: f64,
    iterations: usize,
    gradient_norm: f64,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// L-BFGS with a backtracking Armijo line search.
fn lbfgs(mut f: impl FnMut(&[f64]) -> (f64, Vec<f64>), x0: Vec<f64>, cfg: &OptimizerConfig) -> Outcome {
    let mut x = x0;
    let (mut fx, mut g) = f(&x);
    let mut history: VecDeque<(Vec<f64>, Vec<f64>, f64)> = VecDeque::with_capacity(cfg.memory);
    let mut iterations = 0;
    let mut restarted = false;
    while iterations < cfg.max_iterations {
        let gnorm = dot(&g, &g).sqrt();
        if gnorm <= cfg.gradient_tolerance {
            break;
        }
        // two-loop recursion
        let mut d: Vec<f64> = g.iter().map(|v| -v).collect();
        let mut alphas = Vec::with_capacity(history.len());
        for (s, y, rho) in history.iter().rev() {
            let a = rho * dot(s, &d);
            for (di, yi) in d.iter_mut().zip(y) {
                *di -= a * yi;
            }
            alphas.push(a);
        }
        let scale = match history.back() {
            Some((s, y, _)) => dot(s, y) / dot(y, y),
            None => 1.0 / gnorm.max(1.0),
        };
        d.iter_mut().for_each(|v| *v *= scale);
        for ((s, y, rho), a) in history.iter().zip(alphas.iter().rev()) {
            let b = rho * dot(y, &d);
            for (di, si) in d.iter_mut().zip(s) {
                *di += (a - b) * si;
            }
        }
        let mut slope = dot(&g, &d);
        if slope >= 0.0 {
            d = g.iter().map(|v| -v / gnorm.max(1.0)).collect();
            slope = dot(&g, &d);
            history.clear();
        }

        let mut step = 1.0;
        let mut accepted = None;
        for _ in 0..40 {
            let trial: Vec<f64> = x.iter().zip(&d).map(|(xi, di)| xi + step * di).collect();
            let (ft, gt) = f(&trial);
            if ft.is_finite() && ft <= fx + 1e-4 * step * slope {
                accepted = Some((trial, ft, gt));
                break;
            }
            step *= 0.5;
        }
        iterations += 1;
        let Some((xn, fnew, gn)) = accepted else {
            if restarted || history.is_empty() {
                break;
            }
            history.clear();
            restarted = true;
            continue;
        };
        restarted = false;
        let s: Vec<f64> = xn.iter().zip(&x).map(|(a, b)| a - b).collect();
        let y: Vec<f64> = gn.iter().zip(&g).map(|(a, b)| a - b).collect();
        let sy = dot(&s, &y);
        if sy > 1e-12 * dot(&y, &y).sqrt() * dot(&s, &s).sqrt() {
            if history.len() == cfg.memory {
                history.pop_front();
            }
            history.push_back((s, y, 1.0 / sy));
        }
        x = xn;
        fx = fnew;
        g = gn;
    }
    let gradient_norm = dot(&g, &g).sqrt();
    Outcome { x, value: fx, iterations, gradient_norm }
}

fn optimize(
    couplings: &[CouplingMatrix],
    target: &[Complex64],
    depth: usize,
    cfg: &OptimizerConfig,
    tied: bool,
) -> Result<OptimizationResult> {
    if depth == 0 {
        return Err(FoamError::InvalidArgument("depth must be at least 1".into()));
    }
    if cfg.restarts == 0 {
        return Err(FoamError::InvalidArgument("at least one restart is required".into()));
    }
    let ev = Evaluator::new(couplings, target)?;
    let rp = Reparam { n_qubits: ev.n_qubits(), n_groups: ev.n_groups(), depth, tied };

    let runs: Vec<(RestartReport, PulseSchedule)> = (0..cfg.restarts)
        .into_par_iter()
        .map(|index| {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            rng.set_stream(index as u64);
            let start = PulseSchedule::random(&mut rng, rp.n_qubits, rp.n_groups, depth, tied);
            let x0 = rp.encode(&start);
            let initial = ev.infidelity(&start).expect("shape checked");
            let out = lbfgs(
                |x| {
                    let p = rp.decode(x);
                    let (v, g) = ev.infidelity_and_gradient(&p).expect("shape checked");
                    (v, rp.pull_back(x, &p, &g))
                },
                x0,
                cfg,
            );
            let schedule = rp.decode(&out.x);
            let report = RestartReport {
                index,
                initial_fidelity: 1.0 - initial,
                fidelity: 1.0 - out.value,
                iterations: out.iterations,
                gradient_norm: out.gradient_norm,
            };
            (report, schedule)
        })
        .collect();

    let mut best = 0;
    for (i, (r, _)) in runs.iter().enumerate() {
        if r.fidelity > runs[best].0.fidelity {
            best = i;
        }
    }
    let (reports, schedules): (Vec<_>, Vec<_>) = runs.into_iter().unzip();
    Ok(OptimizationResult {
        schedule: schedules[best].clone(),
        fidelity: reports[best].fidelity,
        best_restart: best,
        restarts: reports,
    })
}

/// Best-of-restarts synthesis of `target` (normally the vertex state) on one
/// coupling group.
pub fn optimize_single(c: &CouplingMatrix, target: &[Complex64], depth: usize, cfg: &OptimizerConfig) -> Result<OptimizationResult> {
    optimize(std::slice::from_ref(c), target, depth, cfg, false)
}

/// Synthesis of `|W⟩⊗|W⟩` on two groups with identical durations per layer.
pub fn optimize_parallel(
    a: &CouplingMatrix,
    b: &CouplingMatrix,
    target_a: &[Complex64],
    target_b: &[Complex64],
    depth: usize,
    cfg: &OptimizerConfig,
) -> Result<OptimizationResult> {
    if a.size() + b.size() > crate::qsim::MAX_QUBITS {
        return Err(FoamError::Coupling("groups exceed the register".into()));
    }
    let target: Vec<Complex64> =
        target_a.iter().flat_map(|x| target_b.iter().map(move |y| x * y)).collect();
    optimize(&[a.clone(), b.clone()], &target, depth, cfg, true)
}
