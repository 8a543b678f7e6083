use std::f64::consts::FRAC_PI_2;
use std::fs;
use std::path::Path;

use anyhow::{bail, ensure, Context, Result};
use serde_json::{json, Value};

use foam_core::intertwiner::IntertwinerBloch;
use foam_core::io::{parse_angle_rows, parse_vector_rows};
use foam_core::optimizer::{optimize_parallel, optimize_single, OptimizerConfig};
use foam_core::qsim::{
    bundled_table_json, chevron_scan, extract_coupling, load_couplings, simulate_qst, CouplingMatrix,
    Device, QstConfig, Schedule, StateVector,
};
use foam_core::spinfoam::{
    amplitude_double, amplitude_single, contraction_amplitude_single, glued_epr_overlap,
    mc_amplitude_single, scan_double, scan_single, vertex_state, write_scan_csv, Boundary5,
    Boundary8, CoherentBoundary, GLUE_QUBIT_A, GLUE_QUBIT_B,
};

use crate::output::{emit_json, write_atomic};
use crate::{Command, ScanMode};

/// Free qubits of the ten-qubit register, in boundary-file order.
const GLUED_BOUNDARY_QUBITS: [usize; 8] = [0, 1, 2, 3, 5, 6, 7, 8];

pub fn run(command: Command) -> Result<()> {
    match command {
        Command::Vertex { out } => vertex(out.as_deref()),
        Command::Amplitude { boundary, two_vertex, out } => amplitude(&boundary, two_vertex, out.as_deref()),
        Command::Scan { mode, grid, out } => scan(mode, &grid, &out),
        Command::Optimize { layers, couplings, dataset, parallel, seed, restarts, max_iterations, out } => {
            let cfg = OptimizerConfig { restarts, max_iterations, seed, ..Default::default() };
            optimize(layers, couplings.as_deref(), dataset.as_deref(), parallel, &cfg, out.as_deref())
        }
        Command::Simulate { schedule, boundary, couplings, dataset, out } => {
            simulate(&schedule, &boundary, couplings.as_deref(), dataset.as_deref(), out.as_deref())
        }
        Command::Mc { samples, seed, normals, out } => mc(samples, seed, normals.as_deref(), out.as_deref()),
        Command::Chevron { g_mhz, detuning_span_mhz, detuning_step_mhz, duration_ns, step_ns, out } => {
            chevron(g_mhz, detuning_span_mhz, detuning_step_mhz, duration_ns, step_ns, out.as_deref())
        }
        Command::Tomography { schedule, couplings, shots, seed, out } => {
            tomography(schedule.as_deref(), couplings.as_deref(), shots, seed, out.as_deref())
        }
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn read_boundary(path: &Path) -> Result<Vec<(f64, f64)>> {
    parse_angle_rows(&read(path)?).with_context(|| format!("in {}", path.display()))
}

fn couplings_for(path: Option<&Path>, dataset: Option<&str>, default_dataset: &str) -> Result<Vec<CouplingMatrix>> {
    match path {
        Some(p) => load_couplings(&read(p)?, dataset).with_context(|| format!("in {}", p.display())),
        None => Ok(load_couplings(bundled_table_json(), Some(dataset.unwrap_or(default_dataset)))?),
    }
}

fn vertex(out: Option<&Path>) -> Result<()> {
    let pairs: Vec<Value> = vertex_state().amplitudes().iter().map(|c| json!([c.re, c.im])).collect();
    emit_json(&Value::Array(pairs), out)
}

fn amplitude(path: &Path, two_vertex: bool, out: Option<&Path>) -> Result<()> {
    let rows = read_boundary(path)?;
    let report = if two_vertex {
        ensure!(rows.len() == 8, "two-vertex boundary needs 8 rows, found {}", rows.len());
        let a = amplitude_double(&Boundary8::from_angles(&rows)?);
        json!({
            "amplitude_re": a.overlap.re,
            "amplitude_im": a.overlap.im,
            "probability": a.probability,
            "glued_amplitude_re": a.amplitude.re,
            "glued_amplitude_im": a.amplitude.im,
        })
    } else {
        ensure!(
            rows.len() == 5,
            "single-vertex boundary needs 5 rows, found {}{}",
            rows.len(),
            if rows.len() == 8 { " (use --two-vertex for 8 rows)" } else { "" }
        );
        let a = amplitude_single(&Boundary5::from_angles(&rows)?);
        json!({
            "amplitude_re": a.overlap.re,
            "amplitude_im": a.overlap.im,
            "probability": a.probability,
            "vertex_amplitude_re": a.vertex_amplitude.re,
            "vertex_amplitude_im": a.vertex_amplitude.im,
        })
    };
    emit_json(&report, out)
}

fn parse_grid(grid: &str) -> Result<(usize, Option<usize>)> {
    let parse = |s: &str| s.trim().parse::<usize>().with_context(|| format!("bad grid size {s:?}"));
    match grid.split_once(['x', 'X']) {
        Some((a, b)) => Ok((parse(a)?, Some(parse(b)?))),
        None => Ok((parse(grid)?, None)),
    }
}

fn scan(mode: ScanMode, grid: &str, out: &Path) -> Result<()> {
    let (n_theta, n_phi) = parse_grid(grid)?;
    let rows = match mode {
        ScanMode::Single => {
            let fixed = [IntertwinerBloch::regular_plus(); 4];
            scan_single(&fixed, n_theta, n_phi.unwrap_or(n_theta))?
        }
        ScanMode::Double => {
            if n_phi.is_some() {
                bail!("double mode takes a single theta count, e.g. --grid 181");
            }
            let plus = IntertwinerBloch::regular_plus();
            let minus = IntertwinerBloch::regular_minus();
            let fixed = [plus, plus, plus, plus, minus, minus, minus];
            scan_double(&fixed, n_theta, &[FRAC_PI_2, 3.0 * FRAC_PI_2])?
        }
    };
    write_atomic(out, |w| write_scan_csv(&rows, w))
}

fn optimize(
    layers: usize,
    couplings: Option<&Path>,
    dataset: Option<&str>,
    parallel: bool,
    cfg: &OptimizerConfig,
    out: Option<&Path>,
) -> Result<()> {
    ensure!(layers >= 1, "--layers must be at least 1");
    let groups = couplings_for(couplings, dataset, if parallel { "two_vertex" } else { "single_vertex" })?;
    let w = vertex_state().amplitudes();
    for g in &groups {
        ensure!(g.size() == 5, "group {:?} has {} qubits; the vertex state needs 5", g.label(), g.size());
    }
    let result = if parallel {
        ensure!(groups.len() == 2, "--parallel needs exactly two coupling groups, found {}", groups.len());
        optimize_parallel(&groups[0], &groups[1], w, w, layers, cfg)?
    } else {
        ensure!(groups.len() == 1, "expected one coupling group, found {} (use --parallel for two)", groups.len());
        optimize_single(&groups[0], w, layers, cfg)?
    };
    let schedule = result.to_schedule(cfg.seed);
    let value = serde_json::to_value(&schedule)?;
    emit_json(&value, out)?;
    if out.is_some() {
        println!("{}", json!({ "fidelity": result.fidelity, "best_restart": result.best_restart }));
    }
    Ok(())
}

/// A non-empty schedule must reach the last qubit the boundary reads.
fn check_schedule_span(schedule: &Schedule, n_qubits: usize) -> Result<()> {
    let gates = schedule.layers.iter().flat_map(|l| l.gates.iter().map(|g| g.q));
    if let Some(top) = schedule.init.iter().map(|g| g.q).chain(gates).max() {
        ensure!(
            top + 1 == n_qubits,
            "schedule addresses {} qubits but the boundary needs {n_qubits}",
            top + 1
        );
    }
    Ok(())
}

fn simulate(
    schedule_path: &Path,
    boundary_path: &Path,
    couplings: Option<&Path>,
    dataset: Option<&str>,
    out: Option<&Path>,
) -> Result<()> {
    let schedule = Schedule::from_json(&read(schedule_path)?).with_context(|| format!("in {}", schedule_path.display()))?;
    let rows = read_boundary(boundary_path)?;
    let w = vertex_state().amplitudes();
    let report = match rows.len() {
        5 => {
            let groups = couplings_for(couplings, dataset, "single_vertex")?;
            let device = Device::new(&groups)?;
            ensure!(device.n_qubits() == 5, "single-vertex readout needs a 5-qubit device, found {}", device.n_qubits());
            check_schedule_span(&schedule, 5)?;
            let state = device.run_schedule(&schedule)?;
            let boundary = Boundary5::from_angles(&rows)?;
            let readout: Vec<_> = boundary.tetrahedra.iter().copied().enumerate().collect();
            json!({
                "all_zero_probability": state.boundary_probability(&readout)?,
                "fidelity_to_target": state.fidelity_pure(w)?,
                "contraction_probability": amplitude_single(&boundary).probability,
            })
        }
        8 => {
            let groups = couplings_for(couplings, dataset, "two_vertex")?;
            let device = Device::new(&groups)?;
            ensure!(device.n_qubits() == 10, "two-vertex readout needs a 10-qubit device, found {}", device.n_qubits());
            check_schedule_span(&schedule, 10)?;
            let mut state = device.run_schedule(&schedule)?;
            let target: Vec<_> = w.iter().flat_map(|a| w.iter().map(move |b| a * b)).collect();
            let fidelity = state.fidelity_pure(&target)?;
            state.apply_glue(GLUE_QUBIT_A, GLUE_QUBIT_B)?;
            let boundary = Boundary8::from_angles(&rows)?;
            let readout: Vec<_> = GLUED_BOUNDARY_QUBITS.iter().copied().zip(boundary.tetrahedra).collect();
            json!({
                "all_zero_probability": state.boundary_probability(&readout)?,
                "fidelity_to_target": fidelity,
                "contraction_probability": glued_epr_overlap(&boundary).norm_sqr(),
            })
        }
        n => bail!("boundary must have 5 or 8 rows, found {n}"),
    };
    emit_json(&report, out)
}

fn mc(samples: usize, seed: u64, normals: Option<&Path>, out: Option<&Path>) -> Result<()> {
    let boundary = match normals {
        Some(p) => {
            let rows = parse_vector_rows(&read(p)?).with_context(|| format!("in {}", p.display()))?;
            CoherentBoundary::from_rows(&rows).with_context(|| format!("in {}", p.display()))?
        }
        None => CoherentBoundary::regular_simplex(),
    };
    let est = mc_amplitude_single(&boundary, samples, seed)?;
    let exact = contraction_amplitude_single(&boundary);
    let z = vertex_state().normalization();
    // |estimate| / |2¹⁰ ⟨W|Φ⟩|
    let empirical_z = if exact.norm() > 1e-12 { Some(est.mean.norm() * z / exact.norm()) } else { None };
    emit_json(
        &json!({
            "estimate_re": est.mean.re,
            "estimate_im": est.mean.im,
            "std_error": est.std_error(),
            "std_error_re": est.std_error_re,
            "std_error_im": est.std_error_im,
            "empirical_Z": empirical_z,
            "exact_re": exact.re,
            "exact_im": exact.im,
            "samples": samples,
            "seed": seed,
        }),
        out,
    )
}

fn uniform_grid(lo: f64, hi: f64, step: f64) -> Result<Vec<f64>> {
    ensure!(step > 0.0 && hi >= lo, "grid bounds must satisfy step > 0 and hi >= lo");
    let n = ((hi - lo) / step).round() as usize;
    Ok((0..=n).map(|i| lo + step * i as f64).collect())
}

fn chevron(g_mhz: f64, span: f64, dstep: f64, duration: f64, tstep: f64, out: Option<&Path>) -> Result<()> {
    let detunings = uniform_grid(-span, span, dstep)?;
    let times = uniform_grid(0.0, duration, tstep)?;
    let c = chevron_scan(g_mhz, &detunings, &times)?;
    let g = extract_coupling(&c)?;
    let mut report = json!({
        "g_input_mhz": g_mhz,
        "g_extracted_mhz": g,
        "relative_error": (g - g_mhz).abs() / g_mhz.abs(),
    });
    if out.is_some() {
        report["chevron"] = serde_json::to_value(&c)?;
    }
    emit_json(&report, out)
}

fn tomography(
    schedule: Option<&Path>,
    couplings: Option<&Path>,
    shots: Option<u64>,
    seed: u64,
    out: Option<&Path>,
) -> Result<()> {
    let state = match schedule {
        Some(p) => {
            let s = Schedule::from_json(&read(p)?).with_context(|| format!("in {}", p.display()))?;
            Device::new(&couplings_for(couplings, None, "single_vertex")?)?.run_schedule(&s)?
        }
        None => StateVector::from_amplitudes(vertex_state().amplitudes().to_vec())?,
    };
    let r = simulate_qst(&state, &QstConfig { shots, seed })?;
    let w = vertex_state().amplitudes();
    let target_fidelity = (0..32)
        .flat_map(|i| (0..32).map(move |j| (i, j)))
        .map(|(i, j)| (w[i].conj() * r.rho[(i, j)] * w[j]).re)
        .sum::<f64>();
    emit_json(
        &json!({
            "fidelity_to_input": r.fidelity,
            "fidelity_to_vertex_state": target_fidelity,
            "raw_min_eigenvalue": r.raw_min_eigenvalue,
            "shots": shots,
            "seed": seed,
        }),
        out,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use foam_core::qsim::{InitRotation, Layer, LayerGate};

    #[test]
    fn grid_forms() {
        assert_eq!(parse_grid("101x101").unwrap(), (101, Some(101)));
        assert_eq!(parse_grid("7X9").unwrap(), (7, Some(9)));
        assert_eq!(parse_grid("181").unwrap(), (181, None));
        assert!(parse_grid("10x").is_err());
        assert!(parse_grid("-3").is_err());
    }

    #[test]
    fn uniform_grid_includes_both_ends() {
        let g = uniform_grid(-1.0, 1.0, 0.5).unwrap();
        assert_eq!(g, vec![-1.0, -0.5, 0.0, 0.5, 1.0]);
        assert!(uniform_grid(0.0, 1.0, 0.0).is_err());
    }

    #[test]
    fn schedule_span() {
        let mut s = Schedule::empty();
        assert!(check_schedule_span(&s, 10).is_ok());
        s.init.push(InitRotation { q: 4, alpha: 1.0, beta: 0.0 });
        assert!(check_schedule_span(&s, 5).is_ok());
        assert!(check_schedule_span(&s, 10).is_err());
        s.layers.push(Layer { tau_ns: Some(1.0), tau_ns_by_group: None, gates: vec![LayerGate { q: 9, alpha: 0.0, beta: 0.0, gamma: 0.0 }] });
        assert!(check_schedule_span(&s, 10).is_ok());
    }
}
