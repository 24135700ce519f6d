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

//! The splitting problem  min θ₁(x) + θ₂(y)  s.t.  Ax + By = b.
//!
//! Reported objectives follow the batch form: for least squares θ₁(x) is
//! ½∥Dx − r∥² summed over all samples, for logistic regression it is the
//! sample mean of the log-loss. Solvers work on the expectation form
//! θ(x)/scale with `scale = objective_scale()`, so that the per-sample
//! subgradients they draw are unbiased for the problem they minimize.

use crate::data::{Dataset, RowView};
use crate::linalg::{
    block_soft_threshold_into, shrink, DenseMatrix, DenseVector, GroupPartition, LinalgError,
};
use std::fmt;
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ProblemError {
    #[error("dimension mismatch for {what}: expected {expected}, got {got}")]
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        got: usize,
    },
    #[error("regularization weight must be nonnegative, got {0}")]
    NegativeMu(f64),
    #[error("prox scale must be positive, got {0}")]
    NonpositiveScale(f64),
    #[error("sample index {index} out of range for {n} samples")]
    SampleOutOfRange { index: usize, n: usize },
    #[error("dataset has no samples")]
    EmptyDataset,
    #[error("group penalty requires a group partition of y")]
    MissingGroups,
    #[error("custom loss does not provide {0}")]
    UnsupportedTheta1(&'static str),
    #[error("parameter {name} is invalid: {value}")]
    InvalidParameter { name: &'static str, value: f64 },
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// A user-supplied loss θ₁ evaluated on samples of the problem's dataset.
pub trait Theta1Oracle: Send + Sync + fmt::Debug {
    /// Per-sample subgradient θ₁′(x, ξ).
    fn sample_subgradient(&self, x: &DenseVector, sample: &SampleRef<'_>) -> Option<DenseVector>;

    /// Full-data value in reported units.
    fn value(&self, _x: &DenseVector) -> Option<f64> {
        None
    }
}

/// A user-supplied regularizer θ₂ with its proximal map.
pub trait ProxOracle: Send + Sync + fmt::Debug {
    fn value(&self, y: &DenseVector) -> f64;

    /// argmin_u θ₂(u) + (scale/2)∥u − v∥².
    fn prox(&self, v: &DenseVector, scale: f64) -> DenseVector;
}

#[derive(Debug, Clone)]
pub enum Theta1 {
    /// ½(dᵀx − r)² per sample, plus (ridge/2)∥x∥².
    LeastSquares { ridge: f64 },
    /// log(1 + exp(−r(dᵀx + x₀))) per sample.
    Logistic { intercept: f64 },
    Custom(Arc<dyn Theta1Oracle>),
}

#[derive(Debug, Clone)]
pub enum Theta2 {
    L1,
    GroupL2(GroupPartition),
    Custom(Arc<dyn ProxOracle>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Theta1Kind {
    LeastSquares,
    Logistic,
    Custom,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Theta2Kind {
    L1,
    GroupL2,
    Custom,
}

/// Constraint operator; identity-like maps avoid dense storage.
#[derive(Debug, Clone, PartialEq)]
pub enum LinearMap {
    ScaledIdentity { dim: usize, scale: f64 },
    Dense(DenseMatrix),
}

impl LinearMap {
    pub fn scaled_identity(dim: usize, scale: f64) -> Self {
        LinearMap::ScaledIdentity { dim, scale }
    }

    pub fn identity(dim: usize) -> Self {
        LinearMap::ScaledIdentity { dim, scale: 1.0 }
    }

    pub fn rows(&self) -> usize {
        match self {
            LinearMap::ScaledIdentity { dim, .. } => *dim,
            LinearMap::Dense(m) => m.rows(),
        }
    }

    pub fn cols(&self) -> usize {
        match self {
            LinearMap::ScaledIdentity { dim, .. } => *dim,
            LinearMap::Dense(m) => m.cols(),
        }
    }

    pub fn scaled_identity_factor(&self) -> Option<f64> {
        match self {
            LinearMap::ScaledIdentity { scale, .. } => Some(*scale),
            LinearMap::Dense(_) => None,
        }
    }

    pub(crate) fn apply_slice(&self, v: &[f64]) -> Vec<f64> {
        match self {
            LinearMap::ScaledIdentity { scale, .. } => v.iter().map(|x| scale * x).collect(),
            LinearMap::Dense(m) => m.matvec_slice(v),
        }
    }

    pub(crate) fn apply_transpose_slice(&self, v: &[f64]) -> Vec<f64> {
        match self {
            LinearMap::ScaledIdentity { scale, .. } => v.iter().map(|x| scale * x).collect(),
            LinearMap::Dense(m) => m.matvec_transpose_slice(v),
        }
    }

    pub fn to_dense(&self) -> DenseMatrix {
        match self {
            LinearMap::ScaledIdentity { dim, scale } => DenseMatrix::scaled_identity(*dim, *scale),
            LinearMap::Dense(m) => m.clone(),
        }
    }
}

/// One training sample ξ.
#[derive(Debug, Clone, Copy)]
pub struct SampleRef<'a> {
    pub index: usize,
    pub row: RowView<'a>,
    pub response: f64,
}

#[derive(Debug, Clone)]
pub struct SplittingProblem {
    a: LinearMap,
    b_op: LinearMap,
    rhs: DenseVector,
    data: Arc<Dataset>,
    theta1: Theta1,
    theta2: Theta2,
    mu: f64,
}

/// Numerically stable log(1 + exp(t)).
pub(crate) fn softplus(t: f64) -> f64 {
    if t > 0.0 {
        t + (-t).exp().ln_1p()
    } else {
        t.exp().ln_1p()
    }
}

fn check_dim(what: &'static str, expected: usize, got: usize) -> Result<(), ProblemError> {
    if expected != got {
        return Err(ProblemError::DimensionMismatch { what, expected, got });
    }
    Ok(())
}

impl SplittingProblem {
    pub fn new(
        a: LinearMap,
        b_op: LinearMap,
        rhs: DenseVector,
        data: Arc<Dataset>,
        theta1: Theta1,
        theta2: Theta2,
        mu: f64,
    ) -> Result<Self, ProblemError> {
        let m = a.rows();
        check_dim("B rows", m, b_op.rows())?;
        check_dim("b", m, rhs.dim())?;
        if data.n_samples() == 0 {
            return Err(ProblemError::EmptyDataset);
        }
        check_dim("response", data.n_samples(), data.response.len())?;
        if !matches!(theta1, Theta1::Custom(_)) {
            check_dim("design columns", a.cols(), data.n_features())?;
        }
        if !(mu >= 0.0) || !mu.is_finite() {
            return Err(ProblemError::NegativeMu(mu));
        }
        match &theta1 {
            Theta1::LeastSquares { ridge } if !(*ridge >= 0.0) || !ridge.is_finite() => {
                return Err(ProblemError::InvalidParameter {
                    name: "ridge",
                    value: *ridge,
                })
            }
            Theta1::Logistic { intercept } if !intercept.is_finite() => {
                return Err(ProblemError::InvalidParameter {
                    name: "intercept",
                    value: *intercept,
                })
            }
            _ => {}
        }
        if let Theta2::GroupL2(g) = &theta2 {
            check_dim("group partition", b_op.cols(), g.dim())?;
        }
        Ok(SplittingProblem {
            a,
            b_op,
            rhs,
            data,
            theta1,
            theta2,
            mu,
        })
    }

    /// x − y = 0 encoding: A = I, B = −I, b = 0.
    fn consensus(data: Arc<Dataset>, theta1: Theta1, theta2: Theta2, mu: f64) -> Result<Self, ProblemError> {
        let d = data.n_features();
        SplittingProblem::new(
            LinearMap::identity(d),
            LinearMap::ScaledIdentity { dim: d, scale: -1.0 },
            DenseVector::zeros(d),
            data,
            theta1,
            theta2,
            mu,
        )
    }

    pub fn lasso(data: Arc<Dataset>, mu: f64) -> Result<Self, ProblemError> {
        SplittingProblem::consensus(data, Theta1::LeastSquares { ridge: 0.0 }, Theta2::L1, mu)
    }

    /// Lasso with an added per-sample ridge term (ridge/2)∥x∥².
    pub fn ridge_lasso(data: Arc<Dataset>, mu: f64, ridge: f64) -> Result<Self, ProblemError> {
        SplittingProblem::consensus(data, Theta1::LeastSquares { ridge }, Theta2::L1, mu)
    }

    pub fn group_lasso(data: Arc<Dataset>, mu: f64) -> Result<Self, ProblemError> {
        let groups = data.groups.clone().ok_or(ProblemError::MissingGroups)?;
        SplittingProblem::consensus(
            data,
            Theta1::LeastSquares { ridge: 0.0 },
            Theta2::GroupL2(groups),
            mu,
        )
    }

    pub fn logistic(data: Arc<Dataset>, mu: f64, intercept: f64) -> Result<Self, ProblemError> {
        SplittingProblem::consensus(data, Theta1::Logistic { intercept }, Theta2::L1, mu)
    }

    pub fn d1(&self) -> usize {
        self.a.cols()
    }

    pub fn d2(&self) -> usize {
        self.b_op.cols()
    }

    pub fn m(&self) -> usize {
        self.a.rows()
    }

    pub fn n_samples(&self) -> usize {
        self.data.n_samples()
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn a(&self) -> &LinearMap {
        &self.a
    }

    pub fn b_op(&self) -> &LinearMap {
        &self.b_op
    }

    pub fn rhs(&self) -> &DenseVector {
        &self.rhs
    }

    pub fn data(&self) -> &Dataset {
        &self.data
    }

    pub fn theta1(&self) -> &Theta1 {
        &self.theta1
    }

    pub fn theta2(&self) -> &Theta2 {
        &self.theta2
    }

    pub fn theta1_kind(&self) -> Theta1Kind {
        match self.theta1 {
            Theta1::LeastSquares { .. } => Theta1Kind::LeastSquares,
            Theta1::Logistic { .. } => Theta1Kind::Logistic,
            Theta1::Custom(_) => Theta1Kind::Custom,
        }
    }

    pub fn theta2_kind(&self) -> Theta2Kind {
        match self.theta2 {
            Theta2::L1 => Theta2Kind::L1,
            Theta2::GroupL2(_) => Theta2Kind::GroupL2,
            Theta2::Custom(_) => Theta2Kind::Custom,
        }
    }

    pub fn groups(&self) -> Option<&GroupPartition> {
        match &self.theta2 {
            Theta2::GroupL2(g) => Some(g),
            _ => None,
        }
    }

    /// True for the A = I, B = −I, b = 0 encoding.
    pub fn is_consensus(&self) -> bool {
        self.a.scaled_identity_factor() == Some(1.0)
            && self.b_op.scaled_identity_factor() == Some(-1.0)
            && self.rhs.iter().all(|v| *v == 0.0)
    }

    /// Ratio between the reported objective and the expectation form.
    pub fn objective_scale(&self) -> f64 {
        match self.theta1 {
            Theta1::LeastSquares { .. } => self.n_samples() as f64,
            _ => 1.0,
        }
    }

    pub fn sample(&self, index: usize) -> Result<SampleRef<'_>, ProblemError> {
        let n = self.n_samples();
        if index >= n {
            return Err(ProblemError::SampleOutOfRange { index, n });
        }
        Ok(SampleRef {
            index,
            row: self.data.design.row(index),
            response: self.data.response[index],
        })
    }

    pub fn objective(&self, x: &DenseVector, y: &DenseVector) -> Result<f64, ProblemError> {
        Ok(self.theta1_value(x)? + self.theta2_value(y)?)
    }

    pub fn theta1_value(&self, x: &DenseVector) -> Result<f64, ProblemError> {
        check_dim("x", self.d1(), x.dim())?;
        let design = &self.data.design;
        let r = &self.data.response;
        match &self.theta1 {
            Theta1::LeastSquares { ridge } => {
                let fit = design.apply(x.as_slice());
                let loss: f64 = fit.iter().zip(r).map(|(f, ri)| (f - ri).powi(2)).sum::<f64>();
                Ok(0.5 * loss + 0.5 * ridge * self.n_samples() as f64 * x.norm_sq())
            }
            Theta1::Logistic { intercept } => {
                let fit = design.apply(x.as_slice());
                let total: f64 = fit
                    .iter()
                    .zip(r)
                    .map(|(f, ri)| softplus(-ri * (f + intercept)))
                    .sum();
                Ok(total / self.n_samples() as f64)
            }
            Theta1::Custom(o) => o.value(x).ok_or(ProblemError::UnsupportedTheta1("value")),
        }
    }

    pub fn theta2_value(&self, y: &DenseVector) -> Result<f64, ProblemError> {
        check_dim("y", self.d2(), y.dim())?;
        Ok(match &self.theta2 {
            Theta2::L1 => self.mu * y.norm_l1(),
            Theta2::GroupL2(g) => {
                self.mu
                    * g.groups()
                        .iter()
                        .map(|b| b.iter().map(|&i| y[i] * y[i]).sum::<f64>().sqrt())
                        .sum::<f64>()
            }
            Theta2::Custom(o) => o.value(y),
        })
    }

    /// Per-sample loss θ₁(x, ξ) for built-in models.
    pub fn sample_loss(&self, x: &DenseVector, s: &SampleRef<'_>) -> Result<f64, ProblemError> {
        check_dim("x", self.d1(), x.dim())?;
        match &self.theta1 {
            Theta1::LeastSquares { ridge } => {
                let res = s.row.dot(x.as_slice()) - s.response;
                Ok(0.5 * res * res + 0.5 * ridge * x.norm_sq())
            }
            Theta1::Logistic { intercept } => {
                Ok(softplus(-s.response * (s.row.dot(x.as_slice()) + intercept)))
            }
            Theta1::Custom(_) => Err(ProblemError::UnsupportedTheta1("per-sample loss")),
        }
    }

    pub fn theta1_subgradient(&self, x: &DenseVector, s: &SampleRef<'_>) -> Result<DenseVector, ProblemError> {
        check_dim("x", self.d1(), x.dim())?;
        check_dim("sample row", self.d1(), s.row.dim())?;
        match &self.theta1 {
            Theta1::Custom(o) => {
                let g = o
                    .sample_subgradient(x, s)
                    .ok_or(ProblemError::UnsupportedTheta1("per-sample subgradient"))?;
                check_dim("custom subgradient", self.d1(), g.dim())?;
                Ok(g)
            }
            _ => {
                let mut out = vec![0.0; self.d1()];
                self.add_subgradient(x.as_slice(), s, 1.0, &mut out);
                Ok(DenseVector::from_vec_unchecked(out))
            }
        }
    }

    /// out += w · θ₁′(x, ξ) for built-in losses.
    pub(crate) fn add_subgradient(&self, x: &[f64], s: &SampleRef<'_>, w: f64, out: &mut [f64]) {
        match &self.theta1 {
            Theta1::LeastSquares { ridge } => {
                let res = s.row.dot(x) - s.response;
                s.row.axpy_into(w * res, out);
                if *ridge != 0.0 {
                    crate::linalg::axpy(w * ridge, x, out);
                }
            }
            Theta1::Logistic { intercept } => {
                let z = s.response * (s.row.dot(x) + intercept);
                s.row.axpy_into(-w * s.response / (1.0 + z.exp()), out);
            }
            Theta1::Custom(_) => unreachable!("custom losses go through the oracle"),
        }
    }

    /// Sample mean of per-sample subgradients (gradient of the expectation form).
    pub fn mean_gradient(&self, x: &DenseVector) -> Result<DenseVector, ProblemError> {
        check_dim("x", self.d1(), x.dim())?;
        let n = self.n_samples();
        let mut out = vec![0.0; self.d1()];
        for i in 0..n {
            let s = self.sample(i)?;
            match &self.theta1 {
                Theta1::Custom(_) => {
                    let g = self.theta1_subgradient(x, &s)?;
                    crate::linalg::axpy(1.0 / n as f64, g.as_slice(), &mut out);
                }
                _ => self.add_subgradient(x.as_slice(), &s, 1.0 / n as f64, &mut out),
            }
        }
        Ok(DenseVector::from_vec_unchecked(out))
    }

    /// argmin_u θ₂(u) + (scale/2)∥u − v∥² with θ₂ in reported units.
    pub fn theta2_prox(&self, v: &DenseVector, scale: f64) -> Result<DenseVector, ProblemError> {
        check_dim("v", self.d2(), v.dim())?;
        if !(scale > 0.0) || !scale.is_finite() {
            return Err(ProblemError::NonpositiveScale(scale));
        }
        if let Theta2::Custom(o) = &self.theta2 {
            let u = o.prox(v, scale);
            check_dim("custom prox output", self.d2(), u.dim())?;
            return Ok(u);
        }
        let mut out = vec![0.0; v.dim()];
        self.prox_into(v.as_slice(), scale, &mut out);
        Ok(DenseVector::from_vec_unchecked(out))
    }

    /// Built-in prox writing into `out`; custom regularizers fall back to the oracle.
    pub(crate) fn prox_into(&self, v: &[f64], scale: f64, out: &mut [f64]) {
        let a = self.mu / scale;
        match &self.theta2 {
            Theta2::L1 => {
                for (o, vi) in out.iter_mut().zip(v) {
                    *o = shrink(*vi, a);
                }
            }
            Theta2::GroupL2(g) => block_soft_threshold_into(v, g, a, out),
            Theta2::Custom(o) => {
                let u = o.prox(&DenseVector::from_vec_unchecked(v.to_vec()), scale);
                out.copy_from_slice(u.as_slice());
            }
        }
    }

    /// Ax + By − b.
    pub fn constraint_residual(&self, x: &DenseVector, y: &DenseVector) -> Result<DenseVector, ProblemError> {
        check_dim("x", self.d1(), x.dim())?;
        check_dim("y", self.d2(), y.dim())?;
        Ok(DenseVector::from_vec_unchecked(self.residual_slice(x.as_slice(), y.as_slice())))
    }

    pub(crate) fn residual_slice(&self, x: &[f64], y: &[f64]) -> Vec<f64> {
        let mut r = self.a.apply_slice(x);
        let by = self.b_op.apply_slice(y);
        for ((ri, bi), ci) in r.iter_mut().zip(&by).zip(self.rhs.iter()) {
            *ri = *ri + bi - ci;
        }
        r
    }
}
