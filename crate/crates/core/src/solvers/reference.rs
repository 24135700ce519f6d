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

use super::config::{Algorithm, SolverConfig};
use super::engine::Solver;
use super::SolverError;
use crate::linalg::DenseVector;
use crate::problem::SplittingProblem;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReferenceOptions {
    pub max_iters: usize,
    /// Stop once successive iterates and the constraint residual fall below this.
    pub tol: f64,
    pub beta: f64,
}

impl Default for ReferenceOptions {
    fn default() -> Self {
        ReferenceOptions {
            max_iters: 20_000,
            tol: 1e-12,
            beta: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReferenceSolution {
    pub x: DenseVector,
    pub y: DenseVector,
    pub lambda: DenseVector,
    /// Objective at (y, y) for consensus problems, at (x, y) otherwise.
    pub f_star: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// High-accuracy solution by deterministic ADMM with exact subproblems.
pub fn reference_solution(
    problem: &SplittingProblem,
    opts: ReferenceOptions,
) -> Result<ReferenceSolution, SolverError> {
    let cfg = SolverConfig {
        beta: opts.beta,
        max_iters: opts.max_iters.max(1),
        ..SolverConfig::new(Algorithm::Admm)
    };
    let solver = Solver::new(problem, cfg)?;
    let mut st = solver.init_state();
    let mut converged = false;
    while st.k < opts.max_iters {
        solver.step(&mut st)?;
        let dx = st.x.max_abs_diff(&st.x_prev)?;
        let dy = st.y.max_abs_diff(&st.y_prev)?;
        let dl = st.lambda.max_abs_diff(&st.lambda_prev)?;
        let scale = 1.0 + st.x.max_abs().max(st.lambda.max_abs());
        if dx.max(dy).max(dl) <= opts.tol * scale {
            converged = true;
            break;
        }
    }
    // For x − y = 0 the y-iterate is feasible for the regularizer and the
    // objective is evaluated at the consensus point.
    let f_star = if problem.is_consensus() {
        problem.objective(&st.y, &st.y)?
    } else {
        problem.objective(&st.x, &st.y)?
    };
    Ok(ReferenceSolution {
        x: st.x,
        y: st.y,
        lambda: st.lambda,
        f_star,
        iterations: st.k,
        converged,
    })
}
