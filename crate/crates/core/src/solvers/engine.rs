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

use super::config::{validate_config, Algorithm, SemiProximal, SolverConfig};
use super::state::IterateState;
use super::updates::{
    consensus_x_step, coupling_matrix, isotropic_x_step, isotropic_y_step, solve_x_subproblem,
    MAX_DENSE_DIM,
};
use super::SolverError;
use crate::linalg::{axpy, Cholesky, DenseVector};
use crate::problem::{softplus, SplittingProblem, Theta1};
use rand::Rng;

/// How the stochastic x-subproblem is solved.
#[derive(Debug, Clone, Copy)]
enum XMode {
    /// A = I, B = −I, b = 0 and S = s·I.
    Consensus { s: f64 },
    /// A = a·I and S = s·I.
    Isotropic { a: f64, s: f64 },
    /// Dense stationarity solve.
    Dense,
}

/// Exact x-step for the batch algorithms.
#[derive(Debug, Clone)]
enum BatchX {
    /// (DᵀD/n + ridge·I + βAᵀA + S) x = Dᵀr/n + Aᵀλ − βAᵀ(By − b) + S x_k.
    LeastSquares { chol: Cholesky, dtr: Vec<f64> },
    /// Damped Newton on the smooth x-subproblem.
    Logistic { intercept: f64 },
}

/// A configured solver bound to one problem instance.
#[derive(Debug, Clone)]
pub struct Solver<'p> {
    problem: &'p SplittingProblem,
    config: SolverConfig,
    alpha: f64,
    gamma: f64,
    s: SemiProximal,
    t: SemiProximal,
    x_mode: XMode,
    y_b: f64,
    y_t: f64,
    batch: Option<BatchX>,
}

const NEWTON_MAX_ITERS: usize = 100;
const NEWTON_TOL: f64 = 1e-13;

impl<'p> Solver<'p> {
    pub fn new(problem: &'p SplittingProblem, config: SolverConfig) -> Result<Self, SolverError> {
        let violations = validate_config(&config);
        if !violations.is_empty() {
            return Err(SolverError::InvalidConfig(violations));
        }
        let (alpha, gamma) = config.effective_relaxation();
        let (s, t) = config.effective_semi_proximal();
        for (what, m, dim) in [("S", &s, problem.d1()), ("T", &t, problem.d2())] {
            if let Some(got) = m.explicit_dim() {
                if got != dim {
                    return Err(SolverError::DimensionMismatch {
                        what,
                        expected: dim,
                        got,
                    });
                }
            }
        }
        let y_b = problem.b_op().scaled_identity_factor().ok_or_else(|| {
            SolverError::SubproblemUnsolvable(
                "the y-step needs B to be a scaled identity (no generic nonsmooth solver)".into(),
            )
        })?;
        if y_b == 0.0 {
            return Err(SolverError::SubproblemUnsolvable("B is zero".into()));
        }
        let y_t = t.isotropic().ok_or_else(|| {
            SolverError::SubproblemUnsolvable(
                "the y-step needs T to be zero or a scaled identity".into(),
            )
        })?;
        let x_mode = match (problem.a().scaled_identity_factor(), s.isotropic()) {
            (Some(_), Some(s)) if problem.is_consensus() => XMode::Consensus { s },
            (Some(a), Some(s)) if a != 0.0 => XMode::Isotropic { a, s },
            _ => XMode::Dense,
        };
        if matches!(x_mode, XMode::Dense) && problem.d1() > MAX_DENSE_DIM {
            return Err(SolverError::SubproblemUnsolvable(format!(
                "dimension {} too large for a dense x-step",
                problem.d1()
            )));
        }
        let batch = if config.algorithm.is_stochastic() {
            None
        } else {
            Some(build_batch_x(problem, config.beta, &s)?)
        };
        Ok(Solver {
            problem,
            config,
            alpha,
            gamma,
            s,
            t,
            x_mode,
            y_b,
            y_t,
            batch,
        })
    }

    pub fn config(&self) -> &SolverConfig {
        &self.config
    }

    pub fn problem(&self) -> &SplittingProblem {
        self.problem
    }

    /// (α, γ) after applying the algorithm's fixed values.
    pub fn relaxation(&self) -> (f64, f64) {
        (self.alpha, self.gamma)
    }

    /// (S, T) after applying the algorithm's fixed values.
    pub fn semi_proximal(&self) -> (&SemiProximal, &SemiProximal) {
        (&self.s, &self.t)
    }

    /// The start point w₀ = 0 with this configuration's seed.
    pub fn init_state(&self) -> IterateState {
        IterateState::zeros(
            self.problem.d1(),
            self.problem.d2(),
            self.problem.m(),
            self.config.seed,
            self.config.ergodic,
        )
    }

    fn check_state(&self, st: &IterateState) -> Result<(), SolverError> {
        let p = self.problem;
        for (what, got, expected) in [
            ("x", st.x.dim(), p.d1()),
            ("y", st.y.dim(), p.d2()),
            ("lambda", st.lambda.dim(), p.m()),
        ] {
            if got != expected {
                return Err(SolverError::DimensionMismatch { what, expected, got });
            }
        }
        Ok(())
    }

    /// One iteration of the configured algorithm.
    pub fn step(&self, st: &mut IterateState) -> Result<(), SolverError> {
        match self.config.algorithm {
            Algorithm::Admm => self.step_batch_admm(st),
            Algorithm::Prsm | Algorithm::Scprsm | Algorithm::SpbScprsm => {
                self.step_batch_spb_scprsm(st)
            }
            Algorithm::StoAdmm => self.step_sto_admm(st),
            Algorithm::StoSpbScprsm => self.step_sto_spb_scprsm(st),
        }
    }

    /// Runs `iters` iterations.
    pub fn run(&self, st: &mut IterateState, iters: usize) -> Result<(), SolverError> {
        for _ in 0..iters {
            self.step(st)?;
        }
        Ok(())
    }

    /// Deterministic ADMM: exact x-step, y-step against λ_k, one multiplier update.
    pub fn step_batch_admm(&self, st: &mut IterateState) -> Result<(), SolverError> {
        self.check_state(st)?;
        let x = self.batch_x(st, &SemiProximal::Zero)?;
        let y = self.y_step(&x, st.y.as_slice(), st.lambda.as_slice(), 0.0);
        let r = self.problem.residual_slice(&x, &y);
        let beta = self.config.beta;
        let lambda: Vec<f64> = st.lambda.iter().zip(&r).map(|(l, ri)| l - beta * ri).collect();
        st.advance(x, y, st.lambda.as_slice().to_vec(), lambda)
    }

    /// Semi-proximal SCPRSM with exact subproblems; PRSM and SCPRSM are the
    /// S = T = 0 instances.
    pub fn step_batch_spb_scprsm(&self, st: &mut IterateState) -> Result<(), SolverError> {
        self.check_state(st)?;
        let x = self.batch_x(st, &self.s)?;
        self.finish_spb(st, x)
    }

    /// Stochastic SPB-SCPRSM: linearized x-step on a sampled subgradient.
    pub fn step_sto_spb_scprsm(&self, st: &mut IterateState) -> Result<(), SolverError> {
        self.check_state(st)?;
        let s = match self.x_mode {
            XMode::Consensus { s } | XMode::Isotropic { s, .. } => s,
            XMode::Dense => 0.0,
        };
        let x = self.sto_x(st, s, &self.s)?;
        self.finish_spb(st, x)
    }

    /// Stochastic ADMM: the x-step of the stochastic scheme without a
    /// semi-proximal term, then plain ADMM y- and multiplier updates.
    pub fn step_sto_admm(&self, st: &mut IterateState) -> Result<(), SolverError> {
        self.check_state(st)?;
        let x = self.sto_x(st, 0.0, &SemiProximal::Zero)?;
        let y = self.y_step(&x, st.y.as_slice(), st.lambda.as_slice(), 0.0);
        let r = self.problem.residual_slice(&x, &y);
        let beta = self.config.beta;
        let lambda: Vec<f64> = st.lambda.iter().zip(&r).map(|(l, ri)| l - beta * ri).collect();
        st.advance(x, y, st.lambda.as_slice().to_vec(), lambda)
    }

    /// λ_{k+1/2}, y-step with T, λ_{k+1}.
    fn finish_spb(&self, st: &mut IterateState, x: Vec<f64>) -> Result<(), SolverError> {
        let p = self.problem;
        let beta = self.config.beta;
        let ab = self.alpha * beta;
        let gb = self.gamma * beta;
        let r_half = p.residual_slice(&x, st.y.as_slice());
        let lambda_half: Vec<f64> = st
            .lambda
            .iter()
            .zip(&r_half)
            .map(|(l, r)| l - ab * r)
            .collect();
        let y = self.y_step(&x, st.y.as_slice(), &lambda_half, self.y_t);
        let r = p.residual_slice(&x, &y);
        let lambda: Vec<f64> = lambda_half.iter().zip(&r).map(|(l, ri)| l - gb * ri).collect();
        st.advance(x, y, lambda_half, lambda)
    }

    fn y_step(&self, x: &[f64], y: &[f64], lambda: &[f64], t: f64) -> Vec<f64> {
        let p = self.problem;
        let mut ax_b = p.a().apply_slice(x);
        for (v, c) in ax_b.iter_mut().zip(p.rhs().iter()) {
            *v -= c;
        }
        isotropic_y_step(p, self.y_b, t, self.config.beta, &ax_b, y, lambda)
    }

    /// Draws the minibatch and returns the stochastic x-step.
    fn sto_x(&self, st: &mut IterateState, s_iso: f64, s: &SemiProximal) -> Result<Vec<f64>, SolverError> {
        let p = self.problem;
        let n = p.n_samples();
        if n == 0 {
            return Err(SolverError::EmptyDataset);
        }
        let eta = self.config.schedule.eta(st.k + 1)?;
        if !(eta > 0.0) {
            return Err(SolverError::NonpositiveEta(eta));
        }
        let mb = self.config.minibatch;
        let idx: Vec<usize> = (0..mb).map(|_| st.rng.random_range(0..n)).collect();
        let x = st.x.as_slice();
        let w = -1.0 / mb as f64;
        let add_neg_grad = |num: &mut [f64]| -> Result<(), SolverError> {
            for &i in &idx {
                let sample = p.sample(i)?;
                if let Theta1::Custom(_) = p.theta1() {
                    let g = p.theta1_subgradient(&st.x, &sample)?;
                    axpy(w, g.as_slice(), num);
                } else {
                    p.add_subgradient(x, &sample, w, num);
                }
            }
            Ok(())
        };
        let beta = self.config.beta;
        match self.x_mode {
            XMode::Consensus { .. } => {
                let mut res = Ok(());
                let out = consensus_x_step(
                    x,
                    st.y.as_slice(),
                    st.lambda.as_slice(),
                    beta,
                    s_iso,
                    eta,
                    |num| res = add_neg_grad(num),
                );
                res.map(|_| out)
            }
            XMode::Isotropic { a, .. } => {
                let mut neg_grad = vec![0.0; x.len()];
                add_neg_grad(&mut neg_grad)?;
                Ok(isotropic_x_step(
                    p,
                    a,
                    x,
                    st.y.as_slice(),
                    st.lambda.as_slice(),
                    beta,
                    s_iso,
                    1.0 / eta,
                    &neg_grad,
                ))
            }
            XMode::Dense => {
                let mut neg_grad = vec![0.0; x.len()];
                add_neg_grad(&mut neg_grad)?;
                let g = DenseVector::from_vec_unchecked(neg_grad.iter().map(|v| -v).collect());
                let sol = solve_x_subproblem(p, beta, s, Some(eta), &g, &st.x, &st.y, &st.lambda)?;
                Ok(sol.into_vec())
            }
        }
    }

    fn batch_x(&self, st: &IterateState, s: &SemiProximal) -> Result<Vec<f64>, SolverError> {
        let p = self.problem;
        let beta = self.config.beta;
        // The ADMM step uses S = 0; rebuild when the cached factor carries a nonzero S.
        let rebuilt;
        let batch = match (&self.batch, s.is_zero() && !self.s.is_zero()) {
            (Some(b), false) => b,
            (Some(_), true) => {
                rebuilt = build_batch_x(p, beta, s)?;
                &rebuilt
            }
            (None, _) => {
                rebuilt = build_batch_x(p, beta, s)?;
                &rebuilt
            }
        };
        let a = p.a();
        let by = p.b_op().apply_slice(st.y.as_slice());
        let coupling: Vec<f64> = by.iter().zip(p.rhs().iter()).map(|(u, c)| u - c).collect();
        let at_lambda = a.apply_transpose_slice(st.lambda.as_slice());
        let at_coupling = a.apply_transpose_slice(&coupling);
        let sx = s.apply(st.x.as_slice());
        // Linear part shared by both losses: Aᵀλ − βAᵀ(By − b) + S x_k.
        let lin: Vec<f64> = (0..p.d1())
            .map(|j| at_lambda[j] - beta * at_coupling[j] + sx[j])
            .collect();
        match batch {
            BatchX::LeastSquares { chol, dtr } => {
                let rhs: Vec<f64> = dtr.iter().zip(&lin).map(|(a, b)| a + b).collect();
                Ok(chol.solve_slice(&rhs))
            }
            BatchX::Logistic { intercept } => self.newton_logistic(st, s, *intercept, &lin),
        }
    }

    /// Minimizes mean log-loss + ½xᵀ(βAᵀA + S)x − linᵀx by damped Newton.
    fn newton_logistic(
        &self,
        st: &IterateState,
        s: &SemiProximal,
        intercept: f64,
        lin: &[f64],
    ) -> Result<Vec<f64>, SolverError> {
        let p = self.problem;
        let data = p.data();
        let n = p.n_samples() as f64;
        let d = p.d1();
        let quad = coupling_matrix(p, self.config.beta, s)?;
        let phi = |x: &[f64]| -> f64 {
            let loss: f64 = (0..p.n_samples())
                .map(|i| {
                    let row = data.design.row(i);
                    softplus(-data.response[i] * (row.dot(x) + intercept))
                })
                .sum::<f64>()
                / n;
            let qx = quad.matvec_slice(x);
            loss + 0.5 * crate::linalg::dot(x, &qx) - crate::linalg::dot(lin, x)
        };
        let mut x = st.x.as_slice().to_vec();
        let mut f = phi(&x);
        for _ in 0..NEWTON_MAX_ITERS {
            let mut grad = quad.matvec_slice(&x);
            for (g, l) in grad.iter_mut().zip(lin) {
                *g -= l;
            }
            let mut hess = quad.clone();
            for i in 0..p.n_samples() {
                let row = data.design.row(i);
                let r = data.response[i];
                let z = r * (row.dot(&x) + intercept);
                let sig = 1.0 / (1.0 + z.exp());
                row.axpy_into(-r * sig / n, &mut grad);
                let wdiag = sig * (1.0 - sig) / n;
                if wdiag > 0.0 {
                    let dense = row.to_dense();
                    let dv = dense.as_slice();
                    for a in 0..d {
                        if dv[a] != 0.0 {
                            for b in 0..d {
                                let h = hess.get(a, b) + wdiag * dv[a] * dv[b];
                                hess.set(a, b, h);
                            }
                        }
                    }
                }
            }
            let gnorm = grad.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
            if gnorm <= NEWTON_TOL {
                break;
            }
            let chol = hess
                .cholesky()
                .map_err(|e| SolverError::SubproblemUnsolvable(e.to_string()))?;
            let dir = chol.solve_slice(&grad);
            let slope: f64 = -crate::linalg::dot(&grad, &dir);
            let mut step = 1.0;
            let mut accepted = false;
            for _ in 0..60 {
                let trial: Vec<f64> = x.iter().zip(&dir).map(|(xi, di)| xi - step * di).collect();
                let ft = phi(&trial);
                if ft <= f + 1e-4 * step * slope || (ft - f).abs() <= 1e-15 * f.abs().max(1.0) {
                    x = trial;
                    f = ft;
                    accepted = true;
                    break;
                }
                step *= 0.5;
            }
            if !accepted {
                break;
            }
        }
        Ok(x)
    }
}

fn build_batch_x(p: &SplittingProblem, beta: f64, s: &SemiProximal) -> Result<BatchX, SolverError> {
    let d = p.d1();
    match p.theta1() {
        Theta1::LeastSquares { ridge } => {
            if d > MAX_DENSE_DIM {
                return Err(SolverError::SubproblemUnsolvable(format!(
                    "dimension {d} too large for a dense batch solve"
                )));
            }
            let n = p.n_samples() as f64;
            let mut q = p.data().design.gram().scaled(1.0 / n);
            q = q.add(&coupling_matrix(p, beta, s)?)?;
            for j in 0..d {
                q.set(j, j, q.get(j, j) + ridge);
            }
            let chol = q
                .cholesky()
                .map_err(|e| SolverError::SubproblemUnsolvable(e.to_string()))?;
            let dtr = p
                .data()
                .correlation()
                .into_iter()
                .map(|v| v / n)
                .collect();
            Ok(BatchX::LeastSquares { chol, dtr })
        }
        Theta1::Logistic { intercept } => {
            if d > MAX_DENSE_DIM {
                return Err(SolverError::SubproblemUnsolvable(format!(
                    "dimension {d} too large for a dense Newton solve"
                )));
            }
            Ok(BatchX::Logistic {
                intercept: *intercept,
            })
        }
        Theta1::Custom(_) => Err(SolverError::SubproblemUnsolvable(
            "batch algorithms need an exact x-solver, none is available for custom losses".into(),
        )),
    }
}
