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

//! Closed-form and generic subproblem solutions.

use super::config::{SemiProximal, SolverConfig};
use super::state::IterateState;
use super::SolverError;
use crate::linalg::{DenseMatrix, DenseVector};
use crate::problem::{SampleRef, SplittingProblem};

/// Largest x-dimension for which dense factorizations are attempted.
pub const MAX_DENSE_DIM: usize = 4096;

fn check_eta(eta: f64) -> Result<(), SolverError> {
    if !(eta > 0.0) {
        return Err(SolverError::NonpositiveEta(eta));
    }
    Ok(())
}

/// x-step for the x − y = 0 encoding with S = s·I:
/// x = (−g + λ + βy + (s + 1/η)x_k) / (β + s + 1/η).
/// `add_neg_grad` adds −g into the numerator.
pub(crate) fn consensus_x_step(
    x: &[f64],
    y: &[f64],
    lambda: &[f64],
    beta: f64,
    s: f64,
    eta: f64,
    add_neg_grad: impl FnOnce(&mut [f64]),
) -> Vec<f64> {
    let inv_eta = 1.0 / eta;
    let c = s + inv_eta;
    let den = beta + s + inv_eta;
    let mut num: Vec<f64> = lambda
        .iter()
        .zip(y)
        .zip(x)
        .map(|((l, yi), xi)| l + beta * yi + c * xi)
        .collect();
    add_neg_grad(&mut num);
    for v in num.iter_mut() {
        *v /= den;
    }
    num
}

/// x-step for A = a·I, S = s·I and arbitrary B, b.
#[allow(clippy::too_many_arguments)]
pub(crate) fn isotropic_x_step(
    p: &SplittingProblem,
    a: f64,
    x: &[f64],
    y: &[f64],
    lambda: &[f64],
    beta: f64,
    s: f64,
    inv_eta: f64,
    neg_grad: &[f64],
) -> Vec<f64> {
    let by = p.b_op().apply_slice(y);
    let c = s + inv_eta;
    let den = beta * a * a + c;
    (0..x.len())
        .map(|j| {
            let coupling = by[j] - p.rhs()[j];
            (neg_grad[j] + a * lambda[j] - beta * a * coupling + c * x[j]) / den
        })
        .collect()
}

fn semi_proximal_scale(cfg: &SolverConfig) -> Option<f64> {
    cfg.effective_semi_proximal().0.isotropic()
}

/// Closed-form stochastic x-step for least squares under x − y = 0:
/// ((r − dᵀx_k)d + λ_k + βy_k + (s + 1/η)x_k) / (β + s + 1/η), with S = s·I.
/// Explicit S falls back to the dense stationarity system.
pub fn x_update_lasso(
    state: &IterateState,
    cfg: &SolverConfig,
    sample: &SampleRef<'_>,
    eta: f64,
) -> Result<DenseVector, SolverError> {
    check_eta(eta)?;
    let x = state.x.as_slice();
    let coef = sample.response - sample.row.dot(x);
    consensus_update(state, cfg, eta, |num| sample.row.axpy_into(coef, num))
}

/// Closed-form stochastic x-step for logistic loss under x − y = 0:
/// (r d/(1 + exp(r(dᵀx_k + x₀))) + λ_k + βy_k + (s + 1/η)x_k) / (β + s + 1/η).
pub fn x_update_logistic(
    state: &IterateState,
    cfg: &SolverConfig,
    sample: &SampleRef<'_>,
    intercept: f64,
    eta: f64,
) -> Result<DenseVector, SolverError> {
    check_eta(eta)?;
    let x = state.x.as_slice();
    let z = sample.response * (sample.row.dot(x) + intercept);
    let coef = sample.response / (1.0 + z.exp());
    consensus_update(state, cfg, eta, |num| sample.row.axpy_into(coef, num))
}

fn consensus_update(
    state: &IterateState,
    cfg: &SolverConfig,
    eta: f64,
    add_neg_grad: impl FnOnce(&mut [f64]),
) -> Result<DenseVector, SolverError> {
    let (x, y, l) = (state.x.as_slice(), state.y.as_slice(), state.lambda.as_slice());
    if let Some(s) = semi_proximal_scale(cfg) {
        return Ok(DenseVector::from_vec_unchecked(consensus_x_step(
            x, y, l, cfg.beta, s, eta, add_neg_grad,
        )));
    }
    let (s_mat, _) = cfg.effective_semi_proximal();
    let d = x.len();
    let mut rhs: Vec<f64> = l.iter().zip(y).map(|(li, yi)| li + cfg.beta * yi).collect();
    add_neg_grad(&mut rhs);
    let sx = s_mat.apply(x);
    for j in 0..d {
        rhs[j] += x[j] / eta + sx[j];
    }
    let mut q = s_mat.to_dense(d);
    for j in 0..d {
        q.set(j, j, q.get(j, j) + cfg.beta + 1.0 / eta);
    }
    let chol = q
        .cholesky()
        .map_err(|e| SolverError::SubproblemUnsolvable(e.to_string()))?;
    Ok(DenseVector::from_vec_unchecked(chol.solve_slice(&rhs)))
}

/// Generic x-subproblem by a dense solve of its stationarity system
/// (βAᵀA + I/η + S)x = −g + Aᵀλ − βAᵀ(By − b) + (I/η + S)x_k.
/// `eta = None` drops the proximity term.
#[allow(clippy::too_many_arguments)]
pub fn solve_x_subproblem(
    p: &SplittingProblem,
    beta: f64,
    s: &SemiProximal,
    eta: Option<f64>,
    grad: &DenseVector,
    x_k: &DenseVector,
    y_k: &DenseVector,
    lambda: &DenseVector,
) -> Result<DenseVector, SolverError> {
    let d = p.d1();
    if d > MAX_DENSE_DIM {
        return Err(SolverError::SubproblemUnsolvable(format!(
            "dimension {d} too large for a dense solve"
        )));
    }
    for (what, v, n) in [
        ("gradient", grad, d),
        ("x", x_k, d),
        ("y", y_k, p.d2()),
        ("lambda", lambda, p.m()),
    ] {
        if v.dim() != n {
            return Err(SolverError::DimensionMismatch {
                what,
                expected: n,
                got: v.dim(),
            });
        }
    }
    let inv_eta = match eta {
        Some(e) => {
            check_eta(e)?;
            1.0 / e
        }
        None => 0.0,
    };
    let a = p.a().to_dense();
    let mut q = a.gram().scaled(beta).add(&s.to_dense(d))?;
    for j in 0..d {
        q.set(j, j, q.get(j, j) + inv_eta);
    }
    let by = p.b_op().apply_slice(y_k.as_slice());
    let coupling: Vec<f64> = by.iter().zip(p.rhs().iter()).map(|(u, c)| u - c).collect();
    let at_lambda = a.matvec_transpose_slice(lambda.as_slice());
    let at_coupling = a.matvec_transpose_slice(&coupling);
    let sx = s.apply(x_k.as_slice());
    let rhs: Vec<f64> = (0..d)
        .map(|j| -grad[j] + at_lambda[j] - beta * at_coupling[j] + inv_eta * x_k[j] + sx[j])
        .collect();
    let chol = q
        .cholesky()
        .map_err(|e| SolverError::SubproblemUnsolvable(e.to_string()))?;
    Ok(DenseVector::from_vec_unchecked(chol.solve_slice(&rhs)))
}

/// y-step for B = c·I, T = t·I:
/// argmin θ₂(y)/scale − λᵀBy + (β/2)∥Ax + By − b∥² + (t/2)∥y − y_k∥².
#[allow(clippy::too_many_arguments)]
pub(crate) fn isotropic_y_step(
    p: &SplittingProblem,
    c: f64,
    t: f64,
    beta: f64,
    ax_minus_b: &[f64],
    y: &[f64],
    lambda: &[f64],
) -> Vec<f64> {
    let kappa = beta * c * c + t;
    let w = beta * c / kappa;
    let v: Vec<f64> = (0..y.len())
        .map(|j| (t * y[j] + c * lambda[j]) / kappa - w * ax_minus_b[j])
        .collect();
    let mut out = vec![0.0; y.len()];
    p.prox_into(&v, kappa * p.objective_scale(), &mut out);
    out
}

/// Dense matrix helper used by batch solvers: βAᵀA + S.
pub(crate) fn coupling_matrix(p: &SplittingProblem, beta: f64, s: &SemiProximal) -> Result<DenseMatrix, SolverError> {
    let d = p.d1();
    let mut q = match p.a().scaled_identity_factor() {
        Some(a) => DenseMatrix::scaled_identity(d, beta * a * a),
        None => p.a().to_dense().gram().scaled(beta),
    };
    q = q.add(&s.to_dense(d))?;
    Ok(q)
}
