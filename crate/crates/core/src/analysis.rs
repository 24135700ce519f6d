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

//! Block matrices of the contraction analysis, the constants of the three
//! γ regimes, eigenvalue checks of the matrix inequalities and the Lyapunov
//! potential along deterministic runs.
//!
//! F(w) = (−Aᵀλ, −Bᵀλ, Ax + By − b) is affine with a skew-symmetric linear
//! part, so ⟨w − w′, F(w) − F(w′)⟩ = 0 and monotonicity holds identically.

use crate::linalg::{DenseMatrix, DenseVector, LinalgError, EPS_PSD};
use crate::problem::SplittingProblem;
use crate::solvers::{gamma_upper_bound, IterateState, SemiProximal, Solver, SolverError};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Tolerance for the MᵀHM identity.
pub const IDENTITY_TOL: f64 = 1e-10;
/// |γ − 1| below this counts as γ = 1.
pub const GAMMA_ONE_TOL: f64 = 1e-12;

#[derive(Debug, Error)]
pub enum AnalysisError {
    #[error("{what} has dimension {got}, expected {expected}")]
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        got: usize,
    },
    #[error("invalid parameters: {0}")]
    InvalidParameters(String),
    #[error("operation needs the {expected} regime, certificate is {got}")]
    WrongRegime { expected: Regime, got: Regime },
    #[error("no admissible delta for alpha = {alpha}, gamma = {gamma}")]
    EmptyDeltaInterval { alpha: f64, gamma: f64 },
    #[error("delta = {delta} lies outside ({lo}, {hi})")]
    DeltaOutOfRange { delta: f64, lo: f64, hi: f64 },
    #[error("constants have not been computed")]
    MissingConstants,
    #[error("certificate does not match the run: {0}")]
    ConfigMismatch(String),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Solver(#[from] SolverError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    #[serde(rename = "gamma_lt_1")]
    GammaLt1,
    #[serde(rename = "gamma_eq_1")]
    GammaEq1,
    #[serde(rename = "gamma_gt_1")]
    GammaGt1,
}

impl std::fmt::Display for Regime {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Regime::GammaLt1 => "gamma_lt_1",
            Regime::GammaEq1 => "gamma_eq_1",
            Regime::GammaGt1 => "gamma_gt_1",
        })
    }
}

impl Regime {
    pub fn classify(gamma: f64) -> Regime {
        if (gamma - 1.0).abs() <= GAMMA_ONE_TOL {
            Regime::GammaEq1
        } else if gamma < 1.0 {
            Regime::GammaLt1
        } else {
            Regime::GammaGt1
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContractionCertificate {
    pub alpha: f64,
    pub gamma: f64,
    pub beta: f64,
    pub b: DenseMatrix,
    pub m: DenseMatrix,
    pub k: DenseMatrix,
    pub h: DenseMatrix,
    pub g: DenseMatrix,
    pub p: DenseMatrix,
    pub mthm: DenseMatrix,
    pub c1: Option<f64>,
    pub c2: Option<f64>,
    pub c3: Option<f64>,
    pub tau: Option<f64>,
    pub regime: Regime,
    pub delta: Option<f64>,
    pub verified: bool,
}

impl ContractionCertificate {
    pub fn d1(&self) -> usize {
        self.p.rows() - self.b.cols()
    }

    pub fn d2(&self) -> usize {
        self.b.cols()
    }

    pub fn m_rows(&self) -> usize {
        self.b.rows()
    }

    /// diag((1−α)βBᵀB, (α+γ)βI_m)
    pub fn mthm_target(&self) -> DenseMatrix {
        let (d2, m) = (self.d2(), self.m_rows());
        let mut out = DenseMatrix::zeros(d2 + m, d2 + m);
        let btb = self.b.gram().scaled((1.0 - self.alpha) * self.beta);
        out.set_block(0, 0, &btb).expect("block fits");
        let lower = DenseMatrix::scaled_identity(m, (self.alpha + self.gamma) * self.beta);
        out.set_block(d2, d2, &lower).expect("block fits");
        out
    }
}

fn check_parameters(alpha: f64, gamma: f64, beta: f64) -> Result<(), AnalysisError> {
    let finite = alpha.is_finite() && gamma.is_finite() && beta.is_finite();
    if !finite || !(0.0..1.0).contains(&alpha) || !(gamma > 0.0) || !(beta > 0.0) {
        return Err(AnalysisError::InvalidParameters(format!(
            "need alpha in [0, 1), gamma > 0, beta > 0; got ({alpha}, {gamma}, {beta})"
        )));
    }
    Ok(())
}

fn check_square(what: &'static str, m: &DenseMatrix, dim: usize) -> Result<(), AnalysisError> {
    for got in [m.rows(), m.cols()] {
        if got != dim {
            return Err(AnalysisError::DimensionMismatch {
                what,
                expected: dim,
                got,
            });
        }
    }
    Ok(())
}

/// Assembles P, M, K, H, G and MᵀHM; B is m×d₂, S is d₁×d₁, T is d₂×d₂.
pub fn build_matrices(
    alpha: f64,
    gamma: f64,
    beta: f64,
    b: &DenseMatrix,
    s: &DenseMatrix,
    t: &DenseMatrix,
) -> Result<ContractionCertificate, AnalysisError> {
    check_parameters(alpha, gamma, beta)?;
    let (m, d2, d1) = (b.rows(), b.cols(), s.rows());
    check_square("S", s, d1)?;
    check_square("T", t, d2)?;
    let sum = alpha + gamma;
    let bt = b.transpose();
    let btb = b.gram();

    let mut p = DenseMatrix::zeros(d1 + d2, d1 + d2);
    p.set_block(0, 0, s)?;
    p.set_block(d1, d1, t)?;

    let mut mm = DenseMatrix::identity(d2 + m);
    mm.set_block(d2, 0, &b.scaled(alpha * beta))?;
    mm.set_block(d2, d2, &DenseMatrix::scaled_identity(m, sum * beta))?;

    let mut k = DenseMatrix::zeros(d2 + m, d2 + m);
    k.set_block(0, 0, &btb.scaled((1.0 - alpha) * beta))?;
    k.set_block(0, d2, &bt.scaled((1.0 - alpha) * beta))?;
    k.set_block(d2, 0, &b.scaled((1.0 - alpha) * beta))?;
    k.set_block(d2, d2, &DenseMatrix::scaled_identity(m, (2.0 - alpha - gamma) * beta))?;

    let h_yy = btb.scaled((sum - alpha * gamma) * beta / sum);
    let h_yl = bt.scaled(-alpha / sum);
    let h_ly = b.scaled(-alpha / sum);
    let h_ll = DenseMatrix::scaled_identity(m, 1.0 / (sum * beta));
    let mut h = DenseMatrix::zeros(d2 + m, d2 + m);
    h.set_block(0, 0, &h_yy)?;
    h.set_block(0, d2, &h_yl)?;
    h.set_block(d2, 0, &h_ly)?;
    h.set_block(d2, d2, &h_ll)?;

    let mut g = DenseMatrix::zeros(d1 + d2 + m, d1 + d2 + m);
    g.set_block(0, 0, s)?;
    g.set_block(d1, d1, &t.add(&h_yy)?)?;
    g.set_block(d1, d1 + d2, &h_yl)?;
    g.set_block(d1 + d2, d1, &h_ly)?;
    g.set_block(d1 + d2, d1 + d2, &h_ll)?;

    let mthm = mm.transpose().matmul(&h)?.matmul(&mm)?;
    Ok(ContractionCertificate {
        alpha,
        gamma,
        beta,
        b: b.clone(),
        m: mm,
        k,
        h,
        g,
        p,
        mthm,
        c1: None,
        c2: None,
        c3: None,
        tau: None,
        regime: Regime::classify(gamma),
        delta: None,
        verified: false,
    })
}

/// Certificate for a configured solver on its problem; needs a dense B.
pub fn certificate_for(solver: &Solver<'_>) -> Result<ContractionCertificate, AnalysisError> {
    let p = solver.problem();
    let (alpha, gamma) = solver.relaxation();
    let (s, t) = solver.semi_proximal();
    let mut cert = build_matrices(
        alpha,
        gamma,
        solver.config().beta,
        &p.b_op().to_dense(),
        &s.to_dense(p.d1()),
        &t.to_dense(p.d2()),
    )?;
    compute_constants(&mut cert, None)?;
    Ok(cert)
}

/// Max-norm distance between MᵀHM and its closed form.
pub fn mthm_identity_error(cert: &ContractionCertificate) -> f64 {
    cert.mthm
        .max_abs_diff(&cert.mthm_target())
        .unwrap_or(f64::INFINITY)
}

pub fn check_mthm_identity(cert: &ContractionCertificate) -> bool {
    mthm_identity_error(cert) <= IDENTITY_TOL
}

/// (1 − √(1 − (α+γ)(1−γ)))/(α+γ)
pub fn c1(alpha: f64, gamma: f64) -> f64 {
    let s = alpha + gamma;
    (1.0 - (1.0 - s * (1.0 - gamma)).sqrt()) / s
}

/// (1−α)/(1+α)
pub fn c2(alpha: f64) -> f64 {
    (1.0 - alpha) / (1.0 + alpha)
}

/// Open interval ((γ−1)/(1−α), (1+α)/(γ−1) − (1+α)/(1−α)) for γ > 1, or
/// None when it is empty.
pub fn delta_interval(alpha: f64, gamma: f64) -> Option<(f64, f64)> {
    if !(gamma > 1.0) || !(0.0..1.0).contains(&alpha) {
        return None;
    }
    let lo = (gamma - 1.0) / (1.0 - alpha);
    let hi = (1.0 + alpha) / (gamma - 1.0) - (1.0 + alpha) / (1.0 - alpha);
    (lo < hi).then_some((lo, hi))
}

/// (c₃, τ) for a given δ.
pub fn c3_tau(alpha: f64, gamma: f64, delta: f64) -> (f64, f64) {
    let base = c2(alpha);
    let c3 = delta * (gamma - 1.0) * base;
    let first = 1.0 - (gamma - 1.0) / (1.0 - alpha) / delta;
    let second = (gamma - 1.0) / (alpha + gamma)
        * ((1.0 + alpha) / (gamma - 1.0) - (1.0 + alpha) / (1.0 - alpha) - delta);
    (c3, base * first.min(second))
}

/// Fills the constants of the certificate's regime. `delta` overrides the
/// midpoint choice for γ > 1.
pub fn compute_constants(
    cert: &mut ContractionCertificate,
    delta: Option<f64>,
) -> Result<(), AnalysisError> {
    let (alpha, gamma) = (cert.alpha, cert.gamma);
    cert.c1 = None;
    cert.c2 = None;
    cert.c3 = None;
    cert.tau = None;
    cert.delta = None;
    match cert.regime {
        Regime::GammaLt1 => cert.c1 = Some(c1(alpha, gamma)),
        Regime::GammaEq1 => cert.c2 = Some(c2(alpha)),
        Regime::GammaGt1 => {
            let upper = gamma_upper_bound(alpha)?;
            let (lo, hi) = match delta_interval(alpha, gamma) {
                Some(iv) if gamma < upper => iv,
                _ => return Err(AnalysisError::EmptyDeltaInterval { alpha, gamma }),
            };
            let d = delta.unwrap_or(0.5 * (lo + hi));
            if !(d > lo && d < hi) {
                return Err(AnalysisError::DeltaOutOfRange { delta: d, lo, hi });
            }
            let (c3, tau) = c3_tau(alpha, gamma, d);
            cert.c2 = Some(c2(alpha));
            cert.c3 = Some(c3);
            cert.tau = Some(tau);
            cert.delta = Some(d);
        }
    }
    Ok(())
}

/// Smallest eigenvalue of K − multiplier·c₁·MᵀHM.
pub fn contraction_margin(cert: &ContractionCertificate, multiplier: f64) -> Result<f64, AnalysisError> {
    if cert.regime != Regime::GammaLt1 {
        return Err(AnalysisError::WrongRegime {
            expected: Regime::GammaLt1,
            got: cert.regime,
        });
    }
    let c1 = cert.c1.ok_or(AnalysisError::MissingConstants)?;
    let diff = cert.k.sub(&cert.mthm.scaled(multiplier * c1))?;
    Ok(diff.min_eigenvalue()?)
}

/// K ⪰ c₁MᵀHM up to EPS_PSD; records the outcome in `cert.verified`.
pub fn verify_contraction(cert: &mut ContractionCertificate) -> Result<bool, AnalysisError> {
    let ok = contraction_margin(cert, 1.0)? >= -EPS_PSD;
    cert.verified = ok;
    Ok(ok)
}

fn in_unit_interval(v: Option<f64>) -> bool {
    v.is_none_or(|c| c > 0.0 && c < 1.0)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertificateSummary {
    pub alpha: f64,
    pub gamma: f64,
    pub beta: f64,
    pub regime: Regime,
    pub gamma_upper_bound: f64,
    pub c1: Option<f64>,
    pub c2: Option<f64>,
    pub c3: Option<f64>,
    pub tau: Option<f64>,
    pub delta: Option<f64>,
    pub delta_interval: Option<(f64, f64)>,
    pub mthm_identity_error: f64,
    /// eigmin(K − c₁MᵀHM), γ < 1 only.
    pub contraction_margin: Option<f64>,
    pub g_min_eigenvalue: f64,
    pub constants_in_unit_interval: bool,
    pub verified: bool,
}

/// Runs every check that applies to the regime. `verified` requires the
/// identity, G ⪰ 0, constants in (0, 1) and, for γ < 1, K ⪰ c₁MᵀHM.
pub fn summarize(cert: &mut ContractionCertificate) -> Result<CertificateSummary, AnalysisError> {
    if cert.c1.is_none() && cert.c2.is_none() {
        compute_constants(cert, None)?;
    }
    let identity = mthm_identity_error(cert);
    let margin = match cert.regime {
        Regime::GammaLt1 => Some(contraction_margin(cert, 1.0)?),
        _ => None,
    };
    let g_min = cert.g.min_eigenvalue()?;
    let unit = [cert.c1, cert.c2, cert.c3, cert.tau]
        .into_iter()
        .all(in_unit_interval);
    let verified = identity <= IDENTITY_TOL
        && g_min >= -EPS_PSD
        && unit
        && margin.is_none_or(|m| m >= -EPS_PSD);
    cert.verified = verified;
    Ok(CertificateSummary {
        alpha: cert.alpha,
        gamma: cert.gamma,
        beta: cert.beta,
        regime: cert.regime,
        gamma_upper_bound: gamma_upper_bound(cert.alpha)?,
        c1: cert.c1,
        c2: cert.c2,
        c3: cert.c3,
        tau: cert.tau,
        delta: cert.delta,
        delta_interval: delta_interval(cert.alpha, cert.gamma),
        mthm_identity_error: identity,
        contraction_margin: margin,
        g_min_eigenvalue: g_min,
        constants_in_unit_interval: unit,
        verified,
    })
}

/// Potential ∥w_k − w*∥²_G + c₂∥y_k − y_{k−1}∥²_T + c₃β∥r_k∥², with the
/// c₂ and c₃ terms present only in the regimes that define them.
#[derive(Debug, Clone)]
pub struct Potential<'a> {
    cert: &'a ContractionCertificate,
    t: DenseMatrix,
    w_star: DenseVector,
}

impl<'a> Potential<'a> {
    pub fn new(
        cert: &'a ContractionCertificate,
        x_star: &DenseVector,
        y_star: &DenseVector,
        lambda_star: &DenseVector,
    ) -> Result<Self, AnalysisError> {
        let (d1, d2) = (cert.d1(), cert.d2());
        for (what, v, n) in [
            ("x*", x_star, d1),
            ("y*", y_star, d2),
            ("lambda*", lambda_star, cert.m_rows()),
        ] {
            if v.dim() != n {
                return Err(AnalysisError::DimensionMismatch {
                    what,
                    expected: n,
                    got: v.dim(),
                });
            }
        }
        Ok(Potential {
            cert,
            t: cert.p.block(d1, d1, d2, d2),
            w_star: DenseVector::concat(&[x_star, y_star, lambda_star]),
        })
    }

    /// Φ at the state's current iterate; `problem` supplies r_k.
    pub fn value(&self, problem: &SplittingProblem, st: &IterateState) -> Result<f64, AnalysisError> {
        let w = DenseVector::concat(&[&st.x, &st.y, &st.lambda]);
        let dw = w.sub(&self.w_star)?;
        let mut phi = self.cert.g.quadratic_form(&dw)?;
        if let Some(c2) = self.cert.c2 {
            let dy = st.y.sub(&st.y_prev)?;
            phi += c2 * self.t.quadratic_form(&dy)?;
        }
        if let Some(c3) = self.cert.c3 {
            let r = problem.constraint_residual(&st.x, &st.y).map_err(SolverError::from)?;
            phi += c3 * self.cert.beta * r.norm_sq();
        }
        Ok(phi)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LyapunovReport {
    /// Φ_k for k = 1..=iters.
    pub values: Vec<f64>,
    /// Count of k ≥ 1 with Φ_{k+1} > Φ_k + slack.
    pub violations: usize,
    pub slack: f64,
}

/// Runs `iters` iterations of a deterministic solver from its zero start and
/// records the potential. `rel_slack` scales Φ₁ into the per-step slack.
pub fn lyapunov_trace(
    solver: &Solver<'_>,
    cert: &ContractionCertificate,
    x_star: &DenseVector,
    y_star: &DenseVector,
    lambda_star: &DenseVector,
    iters: usize,
    rel_slack: f64,
) -> Result<LyapunovReport, AnalysisError> {
    let (alpha, gamma) = solver.relaxation();
    let beta = solver.config().beta;
    if alpha != cert.alpha || gamma != cert.gamma || beta != cert.beta {
        return Err(AnalysisError::ConfigMismatch(format!(
            "solver uses (alpha, gamma, beta) = ({alpha}, {gamma}, {beta}), certificate ({}, {}, {})",
            cert.alpha, cert.gamma, cert.beta
        )));
    }
    if solver.config().algorithm.is_stochastic() {
        return Err(AnalysisError::ConfigMismatch(
            "the hard descent check needs a deterministic solver".into(),
        ));
    }
    let p = solver.problem();
    let (s, t) = solver.semi_proximal();
    let same = |sp: &SemiProximal, dense: DenseMatrix| {
        sp.to_dense(dense.rows()).max_abs_diff(&dense).is_ok_and(|d| d == 0.0)
    };
    let (d1, d2) = (cert.d1(), cert.d2());
    if d1 != p.d1() || d2 != p.d2() || !same(s, cert.p.block(0, 0, d1, d1)) || !same(t, cert.p.block(d1, d1, d2, d2)) {
        return Err(AnalysisError::ConfigMismatch(
            "semi-proximal matrices or dimensions differ".into(),
        ));
    }
    let potential = Potential::new(cert, x_star, y_star, lambda_star)?;
    let mut st = solver.init_state();
    let mut values = Vec::with_capacity(iters);
    for _ in 0..iters {
        solver.step(&mut st)?;
        values.push(potential.value(p, &st)?);
    }
    let slack = rel_slack * values.first().copied().unwrap_or(0.0).abs();
    let violations = values.windows(2).filter(|w| w[1] > w[0] + slack).count();
    Ok(LyapunovReport {
        values,
        violations,
        slack,
    })
}
