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

use super::SolverError;
use crate::linalg::{is_psd, DenseMatrix, EPS_PSD};
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Algorithm {
    Admm,
    Prsm,
    Scprsm,
    SpbScprsm,
    StoAdmm,
    StoSpbScprsm,
}

impl Algorithm {
    pub const ALL: [Algorithm; 6] = [
        Algorithm::Admm,
        Algorithm::Prsm,
        Algorithm::Scprsm,
        Algorithm::SpbScprsm,
        Algorithm::StoAdmm,
        Algorithm::StoSpbScprsm,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Admm => "admm",
            Algorithm::Prsm => "prsm",
            Algorithm::Scprsm => "scprsm",
            Algorithm::SpbScprsm => "spb_scprsm",
            Algorithm::StoAdmm => "sto_admm",
            Algorithm::StoSpbScprsm => "sto_spb_scprsm",
        }
    }

    pub fn is_stochastic(self) -> bool {
        matches!(self, Algorithm::StoAdmm | Algorithm::StoSpbScprsm)
    }

    /// Whether α, γ come from the configuration and must lie in the valid region.
    fn uses_relaxation_region(self) -> bool {
        matches!(
            self,
            Algorithm::Scprsm | Algorithm::SpbScprsm | Algorithm::StoSpbScprsm
        )
    }

    fn uses_semi_proximal(self) -> bool {
        matches!(self, Algorithm::SpbScprsm | Algorithm::StoSpbScprsm)
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let norm = s.trim().to_ascii_lowercase().replace('-', "_");
        Algorithm::ALL
            .into_iter()
            .find(|a| a.name() == norm)
            .ok_or_else(|| format!("unknown algorithm '{s}'"))
    }
}

/// Semi-proximal weight matrix S or T.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SemiProximal {
    Zero,
    IdentityScaled(f64),
    Explicit(DenseMatrix),
}

impl SemiProximal {
    pub fn identity() -> Self {
        SemiProximal::IdentityScaled(1.0)
    }

    /// c when the matrix is c·I (zero counts as c = 0).
    pub fn isotropic(&self) -> Option<f64> {
        match self {
            SemiProximal::Zero => Some(0.0),
            SemiProximal::IdentityScaled(c) => Some(*c),
            SemiProximal::Explicit(_) => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            SemiProximal::Zero => true,
            SemiProximal::IdentityScaled(c) => *c == 0.0,
            SemiProximal::Explicit(m) => m.max_abs() == 0.0,
        }
    }

    pub fn to_dense(&self, dim: usize) -> DenseMatrix {
        match self {
            SemiProximal::Zero => DenseMatrix::zeros(dim, dim),
            SemiProximal::IdentityScaled(c) => DenseMatrix::scaled_identity(dim, *c),
            SemiProximal::Explicit(m) => m.clone(),
        }
    }

    pub fn explicit_dim(&self) -> Option<usize> {
        match self {
            SemiProximal::Explicit(m) => Some(m.rows()),
            _ => None,
        }
    }

    pub(crate) fn apply(&self, v: &[f64]) -> Vec<f64> {
        match self {
            SemiProximal::Zero => vec![0.0; v.len()],
            SemiProximal::IdentityScaled(c) => v.iter().map(|x| c * x).collect(),
            SemiProximal::Explicit(m) => m.matvec_slice(v),
        }
    }

    fn psd_violation(&self) -> Option<String> {
        match self {
            SemiProximal::Zero => None,
            SemiProximal::IdentityScaled(c) if *c >= 0.0 && c.is_finite() => None,
            SemiProximal::IdentityScaled(c) => Some(format!("scale {c} is negative")),
            SemiProximal::Explicit(m) => match is_psd(m, EPS_PSD) {
                Ok(true) => None,
                Ok(false) => Some("smallest eigenvalue below -1e-10".into()),
                Err(e) => Some(e.to_string()),
            },
        }
    }
}

impl fmt::Display for SemiProximal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SemiProximal::Zero => f.write_str("zero"),
            SemiProximal::IdentityScaled(c) => write!(f, "identity_scaled({c})"),
            SemiProximal::Explicit(m) => write!(f, "explicit({}x{})", m.rows(), m.cols()),
        }
    }
}

impl FromStr for SemiProximal {
    type Err = String;
    /// Accepts `zero`, `identity`, `identity:<c>` or a bare number c.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim().to_ascii_lowercase();
        match s.as_str() {
            "zero" | "0" => return Ok(SemiProximal::Zero),
            "identity" | "i" => return Ok(SemiProximal::identity()),
            _ => {}
        }
        let c = s.strip_prefix("identity:").unwrap_or(&s);
        c.parse::<f64>()
            .map(SemiProximal::IdentityScaled)
            .map_err(|_| format!("cannot parse semi-proximal spec '{s}'"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum StepSchedule {
    /// η_k = C·k^(−p)
    Power { c: f64, p: f64 },
    /// η_k = 1/(k·mu_sc)
    StronglyConvex { mu_sc: f64 },
    Constant { eta: f64 },
}

impl StepSchedule {
    pub fn eta(&self, k: usize) -> Result<f64, SolverError> {
        if k < 1 {
            return Err(SolverError::KOutOfRange(k));
        }
        let k = k as f64;
        Ok(match *self {
            StepSchedule::Power { c, p } => c * k.powf(-p),
            StepSchedule::StronglyConvex { mu_sc } => 1.0 / (k * mu_sc),
            StepSchedule::Constant { eta } => eta,
        })
    }

    pub fn violation(&self) -> Option<String> {
        let ok = match *self {
            StepSchedule::Power { c, p } => c > 0.0 && c.is_finite() && p > 0.0 && p < 1.0,
            StepSchedule::StronglyConvex { mu_sc } => mu_sc > 0.0 && mu_sc.is_finite(),
            StepSchedule::Constant { eta } => eta > 0.0 && eta.is_finite(),
        };
        (!ok).then(|| format!("schedule {self} has parameters out of range"))
    }
}

impl fmt::Display for StepSchedule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StepSchedule::Power { c, p } => write!(f, "power:{c}:{p}"),
            StepSchedule::StronglyConvex { mu_sc } => write!(f, "sc:{mu_sc}"),
            StepSchedule::Constant { eta } => write!(f, "const:{eta}"),
        }
    }
}

impl FromStr for StepSchedule {
    type Err = String;
    /// `power:C:p`, `sc:mu` (or `strongly_convex:mu`), `const:eta` (or `constant:eta`).
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<&str> = s.trim().split(':').collect();
        let num = |t: &str| {
            t.parse::<f64>()
                .map_err(|_| format!("invalid number '{t}' in schedule '{s}'"))
        };
        let sch = match parts.as_slice() {
            ["power", c, p] => StepSchedule::Power { c: num(c)?, p: num(p)? },
            ["sc" | "strongly_convex", mu] => StepSchedule::StronglyConvex { mu_sc: num(mu)? },
            ["const" | "constant", eta] => StepSchedule::Constant { eta: num(eta)? },
            _ => return Err(format!("unrecognized schedule '{s}'")),
        };
        Ok(sch)
    }
}

/// Index convention for running averages.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ErgodicIndex {
    /// x̄ over x₁..x_t, ȳ and λ̄ over iterates 2..t+1.
    #[default]
    Lagged,
    /// All averages over iterates 1..t.
    Uniform,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub algorithm: Algorithm,
    pub alpha: f64,
    pub gamma: f64,
    pub beta: f64,
    pub s: SemiProximal,
    pub t: SemiProximal,
    pub schedule: StepSchedule,
    pub max_iters: usize,
    pub seed: u64,
    pub minibatch: usize,
    #[serde(default)]
    pub ergodic: ErgodicIndex,
}

impl Default for SolverConfig {
    /// Stochastic SPB-SCPRSM with α = γ = 0.9, β = 1, S = I, T = 0.
    fn default() -> Self {
        SolverConfig {
            algorithm: Algorithm::StoSpbScprsm,
            alpha: 0.9,
            gamma: 0.9,
            beta: 1.0,
            s: SemiProximal::identity(),
            t: SemiProximal::Zero,
            schedule: StepSchedule::Power { c: 2e-3, p: 0.5 },
            max_iters: 50_000,
            seed: 0,
            minibatch: 1,
            ergodic: ErgodicIndex::Lagged,
        }
    }
}

impl SolverConfig {
    pub fn new(algorithm: Algorithm) -> Self {
        let base = SolverConfig::default();
        match algorithm {
            Algorithm::StoSpbScprsm | Algorithm::SpbScprsm => SolverConfig { algorithm, ..base },
            _ => SolverConfig {
                algorithm,
                s: SemiProximal::Zero,
                ..base
            },
        }
    }

    /// The (α, γ) pair the algorithm actually uses.
    pub fn effective_relaxation(&self) -> (f64, f64) {
        match self.algorithm {
            Algorithm::Admm | Algorithm::StoAdmm => (0.0, 1.0),
            Algorithm::Prsm => (1.0, 1.0),
            Algorithm::Scprsm => (self.alpha, self.alpha),
            Algorithm::SpbScprsm | Algorithm::StoSpbScprsm => (self.alpha, self.gamma),
        }
    }

    /// The (S, T) pair the algorithm actually uses.
    pub fn effective_semi_proximal(&self) -> (SemiProximal, SemiProximal) {
        if self.algorithm.uses_semi_proximal() {
            (self.s.clone(), self.t.clone())
        } else {
            (SemiProximal::Zero, SemiProximal::Zero)
        }
    }
}

/// Upper end of the admissible γ range for a given α ∈ [0, 1).
pub fn gamma_upper_bound(alpha: f64) -> Result<f64, SolverError> {
    if !(0.0..1.0).contains(&alpha) {
        return Err(SolverError::AlphaOutOfRange(alpha));
    }
    let disc = (1.0 + alpha).powi(2) + 4.0 * (1.0 - alpha * alpha);
    Ok((1.0 - alpha + disc.sqrt()) / 2.0)
}

#[derive(Debug, Clone, PartialEq)]
pub enum ConfigViolation {
    NonpositiveBeta(f64),
    AlphaOutOfRange(f64),
    GammaOutOfRange { gamma: f64, upper: f64 },
    UnequalScprsmFactors { alpha: f64, gamma: f64 },
    NotPositiveSemidefinite { which: char, reason: String },
    InvalidSchedule(String),
    ZeroMinibatch,
    ZeroIterations,
}

impl fmt::Display for ConfigViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConfigViolation::NonpositiveBeta(b) => write!(f, "beta must be positive, got {b}"),
            ConfigViolation::AlphaOutOfRange(a) => write!(f, "alpha must lie in [0, 1), got {a}"),
            ConfigViolation::GammaOutOfRange { gamma, upper } => {
                write!(f, "gamma must lie in (0, {upper}), got {gamma}")
            }
            ConfigViolation::UnequalScprsmFactors { alpha, gamma } => write!(
                f,
                "scprsm uses one relaxation factor; alpha = {alpha} and gamma = {gamma} differ"
            ),
            ConfigViolation::NotPositiveSemidefinite { which, reason } => {
                write!(f, "{which} is not positive semidefinite: {reason}")
            }
            ConfigViolation::InvalidSchedule(s) => f.write_str(s),
            ConfigViolation::ZeroMinibatch => f.write_str("minibatch must be at least 1"),
            ConfigViolation::ZeroIterations => f.write_str("max_iters must be at least 1"),
        }
    }
}

/// Every violated constraint; empty means valid.
pub fn validate_config(cfg: &SolverConfig) -> Vec<ConfigViolation> {
    let mut out = Vec::new();
    if !(cfg.beta > 0.0) || !cfg.beta.is_finite() {
        out.push(ConfigViolation::NonpositiveBeta(cfg.beta));
    }
    if cfg.algorithm.uses_relaxation_region() {
        match gamma_upper_bound(cfg.alpha) {
            Err(_) => out.push(ConfigViolation::AlphaOutOfRange(cfg.alpha)),
            Ok(upper) => {
                if !(cfg.gamma > 0.0 && cfg.gamma < upper) {
                    out.push(ConfigViolation::GammaOutOfRange {
                        gamma: cfg.gamma,
                        upper,
                    });
                }
            }
        }
        if cfg.algorithm == Algorithm::Scprsm && cfg.alpha != cfg.gamma {
            out.push(ConfigViolation::UnequalScprsmFactors {
                alpha: cfg.alpha,
                gamma: cfg.gamma,
            });
        }
    }
    if cfg.algorithm.uses_semi_proximal() {
        for (which, m) in [('S', &cfg.s), ('T', &cfg.t)] {
            if let Some(reason) = m.psd_violation() {
                out.push(ConfigViolation::NotPositiveSemidefinite { which, reason });
            }
        }
    }
    if cfg.algorithm.is_stochastic() {
        if let Some(msg) = cfg.schedule.violation() {
            out.push(ConfigViolation::InvalidSchedule(msg));
        }
        if cfg.minibatch == 0 {
            out.push(ConfigViolation::ZeroMinibatch);
        }
    }
    if cfg.max_iters == 0 {
        out.push(ConfigViolation::ZeroIterations);
    }
    out
}
