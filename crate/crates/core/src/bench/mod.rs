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

//! Experiment harness: problem construction, concurrent solver runs, trace
//! recording, CSV/JSON output and empirical rate fitting.

mod run;
mod slope;
mod spec;
mod trace;

pub use run::{run_experiment, write_outputs, ExperimentResult, Manifest, SCHEMA_VERSION};
pub use slope::{rate_slope, rate_slope_window, SlopeFit, GAP_FLOOR, MAX_CLIPPED_FRACTION, MIN_POINTS};
pub use spec::{
    build_problem, BuiltProblem, ExperimentFile, ExperimentSpec, ModelKind, NamedSolver,
    ProblemSpec, SolverEntry,
};
pub use trace::{emit_csv, read_csv, render_csv, Trace, TraceRecord, CSV_HEADER};

use crate::analysis::AnalysisError;
use crate::data::{DataError, LibsvmError};
use crate::problem::ProblemError;
use crate::solvers::SolverError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("invalid experiment: {0}")]
    Validation(String),
    #[error("need at least {needed} trace points after burn-in, got {got}")]
    InsufficientData { needed: usize, got: usize },
    #[error("{fraction:.3} of the gaps are nonpositive (limit {limit})")]
    NonpositiveGap { fraction: f64, limit: f64 },
    #[error("solver '{solver}': {source}")]
    Solver {
        solver: String,
        #[source]
        source: SolverError,
    },
    #[error("reference solve failed: {0}")]
    Reference(#[source] SolverError),
    #[error(transparent)]
    Analysis(#[from] AnalysisError),
    #[error(transparent)]
    Problem(#[from] ProblemError),
    #[error(transparent)]
    Data(#[from] DataError),
    #[error(transparent)]
    Libsvm(#[from] LibsvmError),
    #[error("malformed CSV at line {line}: {reason}")]
    Csv { line: usize, reason: String },
    #[error("config file: {0}")]
    Config(#[from] toml::de::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl BenchError {
    /// Whether the error comes from bad user input rather than a failed run.
    pub fn is_validation(&self) -> bool {
        match self {
            BenchError::Validation(_) | BenchError::Config(_) => true,
            BenchError::Solver { source, .. } => matches!(
                source,
                SolverError::InvalidConfig(_) | SolverError::DimensionMismatch { .. }
            ),
            BenchError::Problem(_) | BenchError::Data(_) => true,
            _ => false,
        }
    }
}
