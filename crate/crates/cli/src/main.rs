use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

mod commands;
mod output;

#[derive(Debug, Parser)]
#[command(name = "foam", version, about = "Spin-1/2 spin foam amplitudes and vertex-state circuit emulation")]
struct Cli {
    /// Worker threads for parallel sections (defaults to all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ScanMode {
    Single,
    Double,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Print the 32 vertex-state amplitudes as `[re, im]` pairs.
    Vertex {
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Amplitude and all-zero probability for a boundary file of `theta phi` rows.
    Amplitude {
        #[arg(long)]
        boundary: PathBuf,
        /// Treat the boundary as the eight free tetrahedra of two glued vertices.
        #[arg(long)]
        two_vertex: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Probability landscape over the last tetrahedron's Bloch angles.
    Scan {
        #[arg(long, value_enum, default_value = "single")]
        mode: ScanMode,
        /// `N` or `NxM` (θ points × φ points); double mode uses only `N`.
        #[arg(long, default_value = "101x101")]
        grid: String,
        #[arg(long)]
        out: PathBuf,
    },
    /// Synthesize a pulse schedule preparing the vertex state.
    Optimize {
        #[arg(long)]
        layers: usize,
        /// Coupling JSON; defaults to the bundled table.
        #[arg(long)]
        couplings: Option<PathBuf>,
        /// Dataset name inside a bundle file.
        #[arg(long)]
        dataset: Option<String>,
        /// Prepare two vertex states in parallel with matched durations.
        #[arg(long)]
        parallel: bool,
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = 10)]
        restarts: usize,
        #[arg(long, default_value_t = 2000)]
        max_iterations: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a schedule, apply the boundary readout rotations and report the
    /// all-zero probability.
    Simulate {
        #[arg(long)]
        schedule: PathBuf,
        #[arg(long)]
        boundary: PathBuf,
        #[arg(long)]
        couplings: Option<PathBuf>,
        #[arg(long)]
        dataset: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Monte Carlo evaluation of the single-vertex group integral.
    Mc {
        #[arg(long)]
        samples: usize,
        #[arg(long)]
        seed: u64,
        /// Twenty `x y z` face normals; defaults to a regular 4-simplex.
        #[arg(long)]
        normals: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Synthetic chevron scan and coupling extraction.
    Chevron {
        #[arg(long)]
        g_mhz: f64,
        #[arg(long, default_value_t = 10.0)]
        detuning_span_mhz: f64,
        #[arg(long, default_value_t = 0.5)]
        detuning_step_mhz: f64,
        #[arg(long, default_value_t = 3000.0)]
        duration_ns: f64,
        #[arg(long, default_value_t = 5.0)]
        step_ns: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Emulated state tomography of a prepared five-qubit state.
    Tomography {
        /// Schedule to prepare; the exact vertex state is used when absent.
        #[arg(long)]
        schedule: Option<PathBuf>,
        #[arg(long)]
        couplings: Option<PathBuf>,
        /// Shots per setting; exact probabilities when absent.
        #[arg(long)]
        shots: Option<u64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: cannot configure thread pool: {e}");
            return ExitCode::FAILURE;
        }
    }
    match commands::run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", format!("{e:#}").replace('\n', " "));
            ExitCode::FAILURE
        }
    }
}
