//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any fails. Run with `cargo test -p foam-core --test acceptance`.

use std::f64::consts::{FRAC_PI_2, PI, TAU};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use foam_core::intertwiner::IntertwinerBloch;
use foam_core::optimizer::{optimize_single, OptimizerConfig};
use foam_core::qsim::{
    bundled_single_vertex, bundled_vertex_schedule, chevron_scan, extract_coupling, run_schedule, simulate_qst,
    QstConfig, StateVector,
};
use foam_core::spinfoam::{
    amplitude_single, bit, contraction_amplitude_single, mc_amplitude_single, scan_double,
    scan_single, vertex_state, Boundary5, CoherentBoundary, PUBLISHED_Z,
};

/// Printed coefficients in units of `1/(8√42)`, as `(integer, carries √3)`.
const PRINTED_COEFFICIENTS: [(i64, bool); 32] = [
    (3, true), (9, false), (9, false), (-3, true), (9, false), (9, true), (-3, true), (3, false),
    (9, false), (9, true), (9, true), (-9, false), (-3, true), (-9, false), (3, false), (-1, true),
    (9, false), (-3, true), (9, true), (3, false), (9, true), (-9, false), (-9, false), (-1, true),
    (-3, true), (3, false), (-9, false), (-1, true), (3, false), (-1, true), (-1, true), (21, false),
];

struct Outcome {
    passed: bool,
    detail: String,
}

impl Outcome {
    fn new(passed: bool, detail: impl Into<String>) -> Self {
        Self { passed, detail: detail.into() }
    }
}

struct Report {
    failures: usize,
}

impl Report {
    fn check(&mut self, name: &str, budget: Option<Duration>, run: impl FnOnce() -> Outcome) {
        let start = Instant::now();
        let mut outcome = run();
        let elapsed = start.elapsed();
        if let Some(limit) = budget {
            if elapsed > limit {
                outcome.passed = false;
                outcome.detail.push_str(&format!("; over the {:.0?} budget", limit));
            }
        }
        let tag = if outcome.passed { "PASS" } else { "FAIL" };
        println!("{tag} {name}: {} [{:.2?}]", outcome.detail, elapsed);
        if !outcome.passed {
            self.failures += 1;
        }
    }
}

fn random_bloch(rng: &mut ChaCha8Rng) -> IntertwinerBloch {
    let theta = (1.0 - 2.0 * rng.random::<f64>()).acos();
    IntertwinerBloch::new(theta, TAU * rng.random::<f64>()).unwrap()
}

fn coefficient_table() -> Outcome {
    let w = vertex_state().real_parts();
    let scale = 8.0 * 42f64.sqrt();
    let mut worst = 0f64;
    for (i, &(k, root)) in PRINTED_COEFFICIENTS.iter().enumerate() {
        let printed = k as f64 * if root { 3f64.sqrt() } else { 1.0 } / scale;
        worst = worst.max((w[i] - printed).abs());
    }
    let numerator_sum: i64 = PRINTED_COEFFICIENTS.iter().map(|&(k, root)| k * k * if root { 3 } else { 1 }).sum();
    Outcome::new(
        worst <= 1e-10 && numerator_sum == 2688,
        format!("max |Δ| = {worst:.2e}, Σ numerator² = {numerator_sum}"),
    )
}

fn pentagon_symmetry() -> Outcome {
    let w = vertex_state().real_parts();
    let mut worst = 0f64;
    let mut checked = 0;
    for shift in 0..5 {
        for flip in [false, true] {
            let image = |q: usize| if flip { (5 + shift - q) % 5 } else { (q + shift) % 5 };
            for i in 0..32 {
                let j = (0..5).fold(0, |acc, q| acc | (bit(i, q, 5) << (4 - image(q))));
                worst = worst.max((w[i] - w[j]).abs());
                checked += 1;
            }
        }
    }
    Outcome::new(worst <= 1e-12 && checked == 320, format!("{checked} images, max |Δ| = {worst:.2e}"))
}

fn single_landscape() -> Outcome {
    let n = 101;
    let rows = scan_single(&[IntertwinerBloch::regular_plus(); 4], n, n).unwrap();
    let best = rows.iter().max_by(|a, b| a.probability.total_cmp(&b.probability)).unwrap();
    let step_t = PI / (n - 1) as f64;
    let step_p = TAU / (n - 1) as f64;
    let nearest = ((FRAC_PI_2 / step_t).round() * step_t, (FRAC_PI_2 / step_p).round() * step_p);
    let hit = (best.theta - nearest.0).abs() < 1e-12 && (best.phi - nearest.1).abs() < 1e-12;
    Outcome::new(
        hit,
        format!("argmax (θ, φ) = ({:.4}, {:.4}), P = {:.6}", best.theta, best.phi, best.probability),
    )
}

/// Least-squares fit of `a + b cos θ + c sin θ`; returns the max residual.
fn sinusoid_residual(points: &[(f64, f64)]) -> f64 {
    let design = nalgebra::DMatrix::from_fn(points.len(), 3, |i, j| match j {
        0 => 1.0,
        1 => points[i].0.cos(),
        _ => points[i].0.sin(),
    });
    let values = nalgebra::DVector::from_iterator(points.len(), points.iter().map(|p| p.1));
    let coeffs = design.clone().svd(true, true).solve(&values, 1e-14).unwrap();
    (design * coeffs - values).amax()
}

fn double_landscape() -> Outcome {
    let plus = IntertwinerBloch::regular_plus();
    let minus = IntertwinerBloch::regular_minus();
    let fixed = [plus, plus, plus, plus, minus, minus, minus];
    let phis = [FRAC_PI_2, 3.0 * FRAC_PI_2];
    let n = 181;
    let rows = scan_double(&fixed, n, &phis).unwrap();
    let residual = phis
        .iter()
        .map(|&phi| {
            let pts: Vec<_> = rows.iter().filter(|r| r.phi == phi).map(|r| (r.theta, r.probability)).collect();
            sinusoid_residual(&pts)
        })
        .fold(0f64, f64::max);
    let best = rows.iter().max_by(|a, b| a.probability.total_cmp(&b.probability)).unwrap();
    let consistent = (best.theta - FRAC_PI_2).abs() < 1e-12 && best.phi == 3.0 * FRAC_PI_2;
    Outcome::new(
        residual <= 1e-10 && consistent,
        format!("fit residual {residual:.2e}, max at (θ, φ) = ({:.4}, {:.4})", best.theta, best.phi),
    )
}

fn monte_carlo_oracle() -> Outcome {
    let samples = 1_000_000;
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut boundaries = vec![CoherentBoundary::regular_simplex()];
    boundaries.extend((0..5).map(|_| CoherentBoundary::random(&mut rng)));
    let mut worst_sigma = 0f64;
    let mut empirical_z = f64::NAN;
    for (k, b) in boundaries.iter().enumerate() {
        let exact = contraction_amplitude_single(b);
        let est = mc_amplitude_single(b, samples, 1).unwrap();
        let dev = est.mean - exact;
        worst_sigma = worst_sigma.max((dev.re / est.std_error_re).abs()).max((dev.im / est.std_error_im).abs());
        if k == 0 {
            empirical_z = est.mean.norm() * vertex_state().normalization() / exact.norm();
        }
    }
    let z_error = (empirical_z - PUBLISHED_Z).abs() / PUBLISHED_Z;
    Outcome::new(
        worst_sigma <= 3.0 && z_error <= 0.01,
        format!("worst deviation {worst_sigma:.2}σ over 6 boundaries, empirical Z = {empirical_z:.5} ({:.2}% off)", 100.0 * z_error),
    )
}

fn circuit_identity() -> Outcome {
    let prepared = run_schedule(&bundled_vertex_schedule(), &[bundled_single_vertex()]).unwrap();
    let fidelity = prepared.fidelity_pure(vertex_state().amplitudes()).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut worst = 0f64;
    for _ in 0..20 {
        let tets: [IntertwinerBloch; 5] = std::array::from_fn(|_| random_bloch(&mut rng));
        let exact = amplitude_single(&Boundary5::new(tets)).probability;
        let readout: Vec<_> = tets.iter().copied().enumerate().collect();
        let measured = prepared.boundary_probability(&readout).unwrap();
        worst = worst.max((measured - exact).abs());
    }
    Outcome::new(
        worst <= 1e-3 && fidelity >= 0.99,
        format!("fixture fidelity {fidelity:.10}, max |ΔP| = {worst:.2e} over 20 boundaries"),
    )
}

fn optimizer_claim() -> Outcome {
    let target: Vec<Complex64> = vertex_state().amplitudes().to_vec();
    let cfg = OptimizerConfig { seed: 1, ..OptimizerConfig::default() };
    let result = optimize_single(&bundled_single_vertex(), &target, 4, &cfg).unwrap();
    Outcome::new(
        result.fidelity >= 0.99,
        format!("d = 4, 10 restarts, seed 1: fidelity {:.10} (restart {})", result.fidelity, result.best_restart),
    )
}

fn chevron_round_trip() -> Outcome {
    let g = 1.04;
    let detunings: Vec<f64> = (0..=40).map(|i| -10.0 + 0.5 * i as f64).collect();
    let times: Vec<f64> = (0..=600).map(|i| 5.0 * i as f64).collect();
    let est = extract_coupling(&chevron_scan(g, &detunings, &times).unwrap()).unwrap();
    let rel = (est - g).abs() / g;
    Outcome::new(rel <= 0.02, format!("g = {g} MHz recovered as {est:.4} MHz ({:.2}% off)", 100.0 * rel))
}

fn tomography_round_trip() -> Outcome {
    let state = StateVector::from_amplitudes(vertex_state().amplitudes().to_vec()).unwrap();
    let exact = simulate_qst(&state, &QstConfig { shots: None, seed: 0 }).unwrap().fidelity;
    let sampled = simulate_qst(&state, &QstConfig { shots: Some(10_000), seed: 3 }).unwrap().fidelity;
    Outcome::new(
        exact >= 0.999 && sampled >= 0.98,
        format!("noiseless fidelity {exact:.6}, 10^4 shots per setting {sampled:.4}"),
    )
}

fn main() -> ExitCode {
    let mut report = Report { failures: 0 };
    report.check("vertex coefficient table", Some(Duration::from_secs(1)), coefficient_table);
    report.check("pentagon symmetry orbits", None, pentagon_symmetry);
    report.check("single-vertex landscape 101x101", Some(Duration::from_secs(10)), single_landscape);
    report.check("two-vertex landscape sinusoids", None, double_landscape);
    report.check("Monte Carlo oracle at 10^6 samples", Some(Duration::from_secs(120)), monte_carlo_oracle);
    report.check("circuit-contraction identity", None, circuit_identity);
    report.check("optimizer d = 4", Some(Duration::from_secs(600)), optimizer_claim);
    report.check("chevron round trip", None, chevron_round_trip);
    report.check("tomography round trip", None, tomography_round_trip);
    println!(
        "INFO hardware fidelities 0.832 ± 0.005, 0.704 ± 0.007 and 0.722 ± 0.015 are noise-limited \
         measurements, not targets; the ideal-simulation checks above stand in for them"
    );
    if report.failures == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{} acceptance check(s) failed", report.failures);
        ExitCode::FAILURE
    }
}
