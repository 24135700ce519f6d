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

//! Splitting solvers: deterministic ADMM, PRSM, SCPRSM and SPB-SCPRSM, and
//! their stochastic variants.

mod config;
mod engine;
mod reference;
mod state;
mod updates;

pub use config::{
    gamma_upper_bound, validate_config, Algorithm, ConfigViolation, ErgodicIndex, SemiProximal,
    SolverConfig, StepSchedule,
};
pub use engine::Solver;
pub use reference::{reference_solution, ReferenceOptions, ReferenceSolution};
pub use state::IterateState;
pub use updates::{solve_x_subproblem, x_update_lasso, x_update_logistic, MAX_DENSE_DIM};

use crate::linalg::LinalgError;
use crate::problem::ProblemError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SolverError {
    #[error("invalid solver configuration: {}", join(.0))]
    InvalidConfig(Vec<ConfigViolation>),
    #[error("{what} has dimension {got}, expected {expected}")]
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        got: usize,
    },
    #[error("subproblem cannot be solved: {0}")]
    SubproblemUnsolvable(String),
    #[error("dataset has no samples")]
    EmptyDataset,
    #[error("step size must be positive, got {0}")]
    NonpositiveEta(f64),
    #[error("iteration index must be at least 1, got {0}")]
    KOutOfRange(usize),
    #[error("alpha must lie in [0, 1), got {0}")]
    AlphaOutOfRange(f64),
    #[error("iterates became non-finite at iteration {iteration}")]
    Diverged { iteration: usize },
    #[error(transparent)]
    Problem(#[from] ProblemError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

fn join(v: &[ConfigViolation]) -> String {
    v.iter().map(|c| c.to_string()).collect::<Vec<_>>().join("; ")
}
