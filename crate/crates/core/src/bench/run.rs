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

use super::spec::{build_problem, ExperimentSpec, NamedSolver, ProblemSpec};
use super::trace::{emit_csv, Trace, TraceRecord};
use super::BenchError;
use crate::analysis::{certificate_for, Potential};
use crate::data::GeneratorManifest;
use crate::problem::SplittingProblem;
use crate::solvers::{reference_solution, ReferenceOptions, ReferenceSolution, Solver};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};
use std::time::Instant;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub schema_version: u32,
    pub crate_version: String,
    pub problem: ProblemSpec,
    pub mu: f64,
    pub n_samples: usize,
    pub n_features: usize,
    pub generator: Option<GeneratorManifest>,
    pub solvers: Vec<NamedSolver>,
    pub cadence: usize,
    pub rho: f64,
    pub f_star: Option<f64>,
    pub reference_iterations: Option<usize>,
    pub reference_converged: Option<bool>,
    pub lyapunov: bool,
    pub timing: bool,
    pub files: Vec<String>,
}

#[derive(Debug, Clone)]
pub struct ExperimentResult {
    /// In declared solver order.
    pub traces: Vec<Trace>,
    pub manifest: Manifest,
    pub reference: Option<ReferenceSolution>,
}

impl ExperimentResult {
    pub fn trace(&self, name: &str) -> Option<&Trace> {
        self.traces.iter().find(|t| t.solver == name)
    }
}

/// Builds the problem, optionally solves the reference, runs every solver
/// (concurrently, merged in declared order) and writes outputs when
/// `out_dir` is set.
pub fn run_experiment(spec: &ExperimentSpec) -> Result<ExperimentResult, BenchError> {
    spec.validate()?;
    let built = build_problem(&spec.problem)?;
    let problem = &built.problem;
    // Reject bad configurations before any expensive work.
    for s in &spec.solvers {
        Solver::new(problem, s.config.clone()).map_err(|source| BenchError::Solver {
            solver: s.name.clone(),
            source,
        })?;
    }
    let reference = if spec.reference {
        Some(reference_solution(problem, ReferenceOptions::default()).map_err(BenchError::Reference)?)
    } else {
        None
    };
    let traces = spec
        .solvers
        .par_iter()
        .map(|s| run_one(problem, s, spec, reference.as_ref()))
        .collect::<Result<Vec<_>, _>>()?;
    let mut manifest = Manifest {
        schema_version: SCHEMA_VERSION,
        crate_version: env!("CARGO_PKG_VERSION").to_string(),
        problem: spec.problem.clone(),
        mu: built.mu,
        n_samples: problem.n_samples(),
        n_features: problem.d1(),
        generator: built.generator,
        solvers: spec.solvers.clone(),
        cadence: spec.cadence,
        rho: spec.rho,
        f_star: reference.as_ref().map(|r| r.f_star),
        reference_iterations: reference.as_ref().map(|r| r.iterations),
        reference_converged: reference.as_ref().map(|r| r.converged),
        lyapunov: spec.lyapunov,
        timing: spec.timing,
        files: Vec::new(),
    };
    if let Some(dir) = &spec.out_dir {
        manifest.files = write_outputs(&traces, &manifest, dir)?
            .into_iter()
            .map(|p| p.display().to_string())
            .collect();
    }
    Ok(ExperimentResult {
        traces,
        manifest,
        reference,
    })
}

fn run_one(
    problem: &SplittingProblem,
    named: &NamedSolver,
    spec: &ExperimentSpec,
    reference: Option<&ReferenceSolution>,
) -> Result<Trace, BenchError> {
    let wrap = |source| BenchError::Solver {
        solver: named.name.clone(),
        source,
    };
    let solver = Solver::new(problem, named.config.clone()).map_err(wrap)?;
    let cert = match (spec.lyapunov, reference) {
        (true, Some(_)) => Some(certificate_for(&solver)?),
        _ => None,
    };
    let potential = match (&cert, reference) {
        (Some(c), Some(r)) => Some(Potential::new(c, &r.x, &r.y, &r.lambda)?),
        _ => None,
    };
    let mut st = solver.init_state();
    let mut trace = Trace::new(named.name.clone());
    let max = named.config.max_iters;
    let start = Instant::now();
    for k in 1..=max {
        solver.step(&mut st).map_err(wrap)?;
        if k % spec.cadence != 0 && k != max {
            continue;
        }
        let wall_ns = if spec.timing {
            start.elapsed().as_nanos() as u64
        } else {
            0
        };
        let (xb, yb) = st.ergodic_point();
        let lyapunov = match &potential {
            Some(p) => Some(p.value(problem, &st)?),
            None => None,
        };
        trace.records.push(TraceRecord {
            iteration: k,
            objective: problem.objective(xb, yb)?,
            constraint_norm: problem.constraint_residual(xb, yb)?.norm(),
            raw_objective: problem.objective(&st.x, &st.y)?,
            wall_ns,
            lyapunov,
        });
    }
    Ok(trace)
}

/// Writes `traces.csv`, one `<solver>.csv` per solver and `manifest.json`.
pub fn write_outputs(
    traces: &[Trace],
    manifest: &Manifest,
    dir: &Path,
) -> Result<Vec<PathBuf>, BenchError> {
    std::fs::create_dir_all(dir)?;
    let mut files = vec![dir.join("traces.csv")];
    emit_csv(traces, &files[0])?;
    for t in traces {
        let path = dir.join(format!("{}.csv", t.solver));
        emit_csv(std::slice::from_ref(t), &path)?;
        files.push(path);
    }
    let manifest_path = dir.join("manifest.json");
    files.push(manifest_path.clone());
    let mut m = manifest.clone();
    m.files = files.iter().map(|p| p.display().to_string()).collect();
    std::fs::write(&manifest_path, serde_json::to_string_pretty(&m)? + "\n")?;
    Ok(files)
}
