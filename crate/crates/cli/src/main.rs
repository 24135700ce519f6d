/*
Copyright 2025 mory22k

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
*/

//! `scprsm` command-line tool. Exit codes: 0 success, 1 validation error,
//! 2 runtime error.

use clap::{Args, Parser, Subcommand};
use scprsm::analysis::{build_matrices, compute_constants, summarize, AnalysisError};
use scprsm::bench::{
    build_problem, rate_slope, rate_slope_window, read_csv, run_experiment, BenchError,
    ExperimentFile, ExperimentSpec, Manifest, ModelKind, ProblemSpec,
};
use scprsm::data::write_libsvm;
use scprsm::linalg::DenseMatrix;
use scprsm::solvers::{SemiProximal, StepSchedule};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Debug, Parser)]
#[command(name = "scprsm", version, about = "Stochastic semi-proximal splitting toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run an experiment and write traces and a manifest.
    Run(RunArgs),
    /// Build and check the contraction certificate for (alpha, gamma, beta).
    Certify(CertifyArgs),
    /// Generate a synthetic dataset in LIBSVM format.
    Gen(GenArgs),
    /// Fit log-log rate slopes on an existing trace CSV.
    Slope(SlopeArgs),
}

#[derive(Debug, Args)]
struct RunArgs {
    /// TOML experiment file; flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    gamma: Option<f64>,
    #[arg(long)]
    beta: Option<f64>,
    /// power:C:p, sc:mu or const:eta
    #[arg(long)]
    schedule: Option<StepSchedule>,
    /// Sampling seed of every solver.
    #[arg(long)]
    seed: Option<u64>,
    /// Seed of the synthetic data generator.
    #[arg(long)]
    data_seed: Option<u64>,
    /// Iteration budget of every solver.
    #[arg(long)]
    iters: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// simulation1, simulation2, synthetic or a LIBSVM path.
    #[arg(long)]
    dataset: Option<String>,
    /// lasso, group_lasso or logistic.
    #[arg(long)]
    model: Option<ModelKind>,
    #[arg(long)]
    mu: Option<f64>,
    #[arg(long)]
    rho: Option<f64>,
    #[arg(long)]
    cadence: Option<usize>,
    /// Fill the Lyapunov column.
    #[arg(long)]
    lyapunov: bool,
    /// Record wall-clock time.
    #[arg(long)]
    timing: bool,
    /// Skip the reference solve (no f*).
    #[arg(long)]
    no_reference: bool,
}

#[derive(Debug, Args)]
struct CertifyArgs {
    #[arg(long)]
    alpha: f64,
    #[arg(long)]
    gamma: f64,
    #[arg(long, default_value_t = 1.0)]
    beta: f64,
    /// S as zero, identity, identity:<c> or c.
    #[arg(long, default_value = "zero")]
    s: SemiProximal,
    #[arg(long, default_value = "zero")]
    t: SemiProximal,
    /// Dimension of x, y and λ; B = −I.
    #[arg(long, default_value_t = 1)]
    dim: usize,
    /// Override the midpoint δ for gamma > 1.
    #[arg(long)]
    delta: Option<f64>,
}

#[derive(Debug, Args)]
struct GenArgs {
    #[arg(long, default_value = "lasso")]
    model: ModelKind,
    /// simulation1, simulation2 or synthetic.
    #[arg(long)]
    dataset: Option<String>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    d: Option<usize>,
    #[arg(long)]
    nnz: Option<usize>,
    /// Output LIBSVM file; the manifest goes to <out>.json.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct SlopeArgs {
    #[arg(long)]
    csv: PathBuf,
    /// Optimal value; read from --manifest when absent.
    #[arg(long)]
    f_star: Option<f64>,
    #[arg(long)]
    manifest: Option<PathBuf>,
    #[arg(long, default_value_t = 1.0)]
    rho: f64,
    #[arg(long, default_value_t = 0.0)]
    burn_in: f64,
    #[arg(long, requires = "t_max")]
    t_min: Option<usize>,
    #[arg(long, requires = "t_min")]
    t_max: Option<usize>,
    /// Restrict to one solver.
    #[arg(long)]
    solver: Option<String>,
}

enum Failure {
    Validation(String),
    Runtime(String),
}

impl From<BenchError> for Failure {
    fn from(e: BenchError) -> Self {
        if e.is_validation() {
            Failure::Validation(e.to_string())
        } else {
            Failure::Runtime(e.to_string())
        }
    }
}

impl From<AnalysisError> for Failure {
    fn from(e: AnalysisError) -> Self {
        match e {
            AnalysisError::InvalidParameters(_)
            | AnalysisError::DimensionMismatch { .. }
            | AnalysisError::EmptyDeltaInterval { .. }
            | AnalysisError::DeltaOutOfRange { .. } => Failure::Validation(e.to_string()),
            _ => Failure::Runtime(e.to_string()),
        }
    }
}

fn runtime(e: impl std::fmt::Display) -> Failure {
    Failure::Runtime(e.to_string())
}

fn build_spec(args: RunArgs) -> Result<ExperimentSpec, Failure> {
    let mut spec = match &args.config {
        Some(path) => ExperimentFile::load(path)?.into_spec()?,
        None => ExperimentSpec::default(),
    };
    for s in &mut spec.solvers {
        let c = &mut s.config;
        if let Some(v) = args.alpha {
            c.alpha = v;
        }
        if let Some(v) = args.gamma {
            c.gamma = v;
        }
        if let Some(v) = args.beta {
            c.beta = v;
        }
        if let Some(v) = args.schedule {
            c.schedule = v;
        }
        if let Some(v) = args.seed {
            c.seed = v;
        }
        if let Some(v) = args.iters {
            c.max_iters = v;
        }
    }
    let p = &mut spec.problem;
    if let Some(m) = args.model {
        if m != p.model {
            p.dataset = None;
        }
        p.model = m;
    }
    if let Some(d) = args.dataset {
        p.dataset = Some(d);
    }
    if let Some(s) = args.data_seed {
        p.seed = s;
    }
    if let Some(mu) = args.mu {
        p.mu = Some(mu);
    }
    if let Some(r) = args.rho {
        spec.rho = r;
    }
    if let Some(c) = args.cadence {
        spec.cadence = c;
    }
    if let Some(o) = args.out {
        spec.out_dir = Some(o);
    }
    spec.lyapunov |= args.lyapunov;
    spec.timing |= args.timing;
    if args.no_reference {
        spec.reference = false;
    }
    Ok(spec)
}

fn cmd_run(args: RunArgs) -> Result<(), Failure> {
    let spec = build_spec(args)?;
    let result = run_experiment(&spec)?;
    let f_star = result.manifest.f_star;
    for t in &result.traces {
        let Some(last) = t.last() else { continue };
        match f_star {
            Some(f) => println!(
                "{}: iteration {} objective {:.10e} gap {:.6e}",
                t.solver,
                last.iteration,
                last.objective,
                last.gap(f, spec.rho)
            ),
            None => println!(
                "{}: iteration {} objective {:.10e}",
                t.solver, last.iteration, last.objective
            ),
        }
    }
    if let Some(dir) = &spec.out_dir {
        println!("wrote {}", dir.display());
    }
    Ok(())
}

fn cmd_certify(args: CertifyArgs) -> Result<(), Failure> {
    if args.dim == 0 {
        return Err(Failure::Validation("dim must be at least 1".into()));
    }
    let dense = |m: &SemiProximal| -> Result<DenseMatrix, Failure> {
        match m.isotropic() {
            Some(c) if c >= 0.0 => Ok(m.to_dense(args.dim)),
            _ => Err(Failure::Validation(format!("{m} is not positive semidefinite"))),
        }
    };
    let b = DenseMatrix::scaled_identity(args.dim, -1.0);
    let mut cert = build_matrices(args.alpha, args.gamma, args.beta, &b, &dense(&args.s)?, &dense(&args.t)?)?;
    compute_constants(&mut cert, args.delta)?;
    let summary = summarize(&mut cert)?;
    println!("{}", serde_json::to_string_pretty(&summary).map_err(runtime)?);
    Ok(())
}

fn cmd_gen(args: GenArgs) -> Result<(), Failure> {
    let spec = ProblemSpec {
        model: args.model,
        dataset: args.dataset,
        seed: args.seed,
        n: args.n,
        d: args.d,
        nnz: args.nnz,
        ..ProblemSpec::default()
    };
    if spec.dataset.as_deref().is_some_and(|d| std::path::Path::new(d).is_file()) {
        return Err(Failure::Validation("gen only runs the synthetic generators".into()));
    }
    let built = build_problem(&spec)?;
    write_libsvm(&args.out, built.problem.data()).map_err(runtime)?;
    let mut manifest_path = args.out.clone().into_os_string();
    manifest_path.push(".json");
    let json = serde_json::to_string_pretty(&built.generator).map_err(runtime)?;
    std::fs::write(&manifest_path, json + "\n").map_err(runtime)?;
    println!(
        "wrote {} ({} samples, {} features, mu = {})",
        args.out.display(),
        built.problem.n_samples(),
        built.problem.d1(),
        built.mu
    );
    Ok(())
}

fn cmd_slope(args: SlopeArgs) -> Result<(), Failure> {
    let f_star = match (args.f_star, &args.manifest) {
        (Some(f), _) => f,
        (None, Some(path)) => {
            let text = std::fs::read_to_string(path).map_err(runtime)?;
            let m: Manifest = serde_json::from_str(&text)
                .map_err(|e| Failure::Validation(format!("manifest: {e}")))?;
            m.f_star
                .ok_or_else(|| Failure::Validation("manifest has no f_star".into()))?
        }
        (None, None) => return Err(Failure::Validation("pass --f-star or --manifest".into())),
    };
    let traces = read_csv(&args.csv)?;
    let mut found = false;
    for t in traces.iter().filter(|t| args.solver.as_ref().is_none_or(|s| *s == t.solver)) {
        found = true;
        let fit = match (args.t_min, args.t_max) {
            (Some(lo), Some(hi)) => rate_slope_window(&t.records, f_star, args.rho, lo, hi)?,
            _ => rate_slope(&t.records, f_star, args.rho, args.burn_in)?,
        };
        println!(
            "{}: slope {:.6} ({} points, {} clipped)",
            t.solver, fit.slope, fit.points, fit.clipped
        );
    }
    if !found {
        return Err(Failure::Validation("no matching solver in the CSV".into()));
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let outcome = match cli.command {
        Command::Run(a) => cmd_run(a),
        Command::Certify(a) => cmd_certify(a),
        Command::Gen(a) => cmd_gen(a),
        Command::Slope(a) => cmd_slope(a),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Validation(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Runtime(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
