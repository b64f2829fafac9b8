//! Command-line driver: loads a problem file (or a bundled preset), runs one
//! verification command and emits a deterministic report as an aligned text
//! table or JSON. The exit status is 0 exactly when every check passed.

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, ValueEnum};

use graphforms::driver::{run_command, RunOptions};
use graphforms::error::Error;
use graphforms::presets;
use graphforms::problem::{build_problem, BuiltProblem};
use graphforms::report::Report;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Command {
    /// Betti numbers and kernel dimensions of the decorated graph.
    Betti,
    /// Index, curvature and Gauss-Bonnet bookkeeping.
    Index,
    /// Hodge decomposition dimensions and orthogonality residuals.
    Hodge,
    /// Laplacian spectra on 0- and 1-forms with the supersymmetry pairing.
    Spectrum,
    /// Line-graph, subdivision and dual spectral relations.
    Relations,
    /// Kernel of the metric Dirac operator and its discrete isomorphism.
    MetricKernel,
    /// Eigenvalues of the metric Laplacian through the secular matrix.
    MetricSpectrum,
    /// Vertex scattering matrices.
    Scatter,
    /// Quantum-graph curvature and its integral.
    Curvature,
    /// Index stability under random vertex-space deformations.
    Fuzz,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::Betti => "betti",
            Command::Index => "index",
            Command::Hodge => "hodge",
            Command::Spectrum => "spectrum",
            Command::Relations => "relations",
            Command::MetricKernel => "metric-kernel",
            Command::MetricSpectrum => "metric-spectrum",
            Command::Scatter => "scatter",
            Command::Curvature => "curvature",
            Command::Fuzz => "fuzz",
        }
    }
}

/// Verification toolkit for first-order calculus on decorated graphs.
#[derive(Debug, Parser)]
#[command(name = "graphforms", version, about)]
struct Args {
    #[arg(value_enum)]
    command: Command,

    /// Problem file path, or the name of a bundled preset
    /// (e.g. `c3-standard`, `k4-standard`, `interval-dirichlet`).
    problem: String,

    /// Master seed for randomised checks.
    #[arg(long, default_value_t = 0)]
    seed: u64,

    /// Number of random trials for `fuzz`.
    #[arg(long, default_value_t = 20)]
    trials: usize,

    /// Tolerance for spectral pairings.
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,

    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,

    /// Override the solver's upper spectral parameter.
    #[arg(long)]
    mu_max: Option<f64>,

    /// Override the solver's grid resolution.
    #[arg(long)]
    grid: Option<usize>,

    /// Append wall-clock timings to the report (off by default so reports
    /// are byte-identical across runs).
    #[arg(long, default_value_t = false)]
    timings: bool,
}

fn load(problem: &str) -> Result<(BuiltProblem, Vec<u8>), Error> {
    let path = PathBuf::from(problem);
    let bytes = if path.exists() {
        std::fs::read(&path)?
    } else if let Some(doc) = presets::lookup(problem) {
        doc.as_bytes().to_vec()
    } else {
        return Err(Error::SchemaError(format!(
            "`{problem}` is neither a file nor a preset; presets: {}",
            presets::names().join(", ")
        )));
    };
    Ok((build_problem(&bytes)?, bytes))
}

fn run(args: &Args) -> Result<Report, Error> {
    let started = Instant::now();
    let (built, bytes) = load(&args.problem)?;
    let opts = RunOptions {
        seed: args.seed,
        trials: args.trials,
        tol: args.tol,
        mu_max: args.mu_max,
        grid: args.grid,
    };
    let mut report = run_command(args.command.name(), &built, &bytes, &opts)?;
    if args.timings {
        report.timings_ms =
            Some(vec![("total".into(), started.elapsed().as_secs_f64() * 1e3)]);
    }
    Ok(report)
}

fn main() -> ExitCode {
    let args = Args::parse();
    match run(&args) {
        Ok(report) => {
            match args.format {
                Format::Text => print!("{}", report.to_text()),
                Format::Json => println!("{}", report.to_json()),
            }
            if report.all_pass() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
