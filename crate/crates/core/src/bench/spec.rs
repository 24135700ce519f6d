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

use super::BenchError;
use crate::data::{
    gen_group_lasso, gen_lasso, gen_logistic, read_libsvm, GeneratorManifest, GroupLassoSpec,
    LassoSpec, LibsvmOptions, LogisticSpec, TaskKind, LOGISTIC_MU,
};
use crate::problem::SplittingProblem;
use crate::solvers::{Algorithm, ErgodicIndex, SemiProximal, SolverConfig, StepSchedule};
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};
use std::sync::Arc;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    #[default]
    Lasso,
    GroupLasso,
    Logistic,
}

impl std::str::FromStr for ModelKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().replace('-', "_").as_str() {
            "lasso" => Ok(ModelKind::Lasso),
            "group_lasso" | "group" => Ok(ModelKind::GroupLasso),
            "logistic" => Ok(ModelKind::Logistic),
            _ => Err(format!("unknown model '{s}'")),
        }
    }
}

/// Which model to fit and where its data comes from.
///
/// `dataset` is `simulation1`, `simulation2`, `synthetic` (the model's own
/// generator) or a LIBSVM file path; unset means `simulation1` for Lasso and
/// `synthetic` otherwise. Unset generator fields keep the generator defaults.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ProblemSpec {
    pub model: ModelKind,
    pub dataset: Option<String>,
    pub seed: u64,
    pub n: Option<usize>,
    pub d: Option<usize>,
    pub nnz: Option<usize>,
    pub noise_var: Option<f64>,
    pub normalize_rows: Option<bool>,
    pub n_groups: Option<usize>,
    pub max_block: Option<usize>,
    pub frac_nnz: Option<f64>,
    /// Overrides the data-dependent μ.
    pub mu: Option<f64>,
    /// Per-sample ridge weight added to the least-squares loss.
    pub ridge: f64,
    /// Fixed logistic intercept.
    pub intercept: f64,
    /// Feature dimension for LIBSVM files.
    pub n_features: Option<usize>,
}

pub struct BuiltProblem {
    pub problem: SplittingProblem,
    pub mu: f64,
    pub generator: Option<GeneratorManifest>,
}

fn apply_lasso_overrides(spec: &ProblemSpec, mut ls: LassoSpec) -> LassoSpec {
    ls.seed = spec.seed;
    ls.n = spec.n.unwrap_or(ls.n);
    ls.d = spec.d.unwrap_or(ls.d);
    ls.nnz = spec.nnz.unwrap_or(ls.nnz);
    ls.noise_var = spec.noise_var.unwrap_or(ls.noise_var);
    ls.normalize_rows = spec.normalize_rows.unwrap_or(ls.normalize_rows);
    ls
}

pub fn build_problem(spec: &ProblemSpec) -> Result<BuiltProblem, BenchError> {
    if let Some(mu) = spec.mu {
        if !(mu >= 0.0) || !mu.is_finite() {
            return Err(BenchError::Validation(format!("mu = {mu} must be nonnegative")));
        }
    }
    if !(spec.ridge >= 0.0) {
        return Err(BenchError::Validation(format!("ridge = {} must be nonnegative", spec.ridge)));
    }
    let source = spec.dataset.clone().unwrap_or_else(|| match spec.model {
        ModelKind::Lasso => "simulation1".into(),
        _ => "synthetic".into(),
    });
    let (data, default_mu, mut generator) = match (spec.model, source.as_str()) {
        (ModelKind::Lasso, "simulation1" | "sim1" | "synthetic") => {
            let ls = apply_lasso_overrides(spec, LassoSpec::simulation1(spec.seed));
            let (data, mu) = gen_lasso(&ls)?;
            (data, mu, Some(ls.manifest(mu)))
        }
        (ModelKind::Lasso, "simulation2" | "sim2") => {
            let ls = apply_lasso_overrides(spec, LassoSpec::simulation2(spec.seed));
            let (data, mu) = gen_lasso(&ls)?;
            (data, mu, Some(ls.manifest(mu)))
        }
        (ModelKind::GroupLasso, "synthetic") => {
            let mut gs = GroupLassoSpec {
                seed: spec.seed,
                ..GroupLassoSpec::default()
            };
            gs.n = spec.n.unwrap_or(gs.n);
            gs.n_groups = spec.n_groups.unwrap_or(gs.n_groups);
            gs.max_block = spec.max_block.unwrap_or(gs.max_block);
            gs.frac_nnz = spec.frac_nnz.unwrap_or(gs.frac_nnz);
            gs.noise_var = spec.noise_var.unwrap_or(gs.noise_var);
            let (data, mu) = gen_group_lasso(&gs)?;
            let manifest = gs.manifest(&data, mu);
            (data, mu, Some(manifest))
        }
        (ModelKind::Logistic, "synthetic") => {
            let mut lg = LogisticSpec {
                seed: spec.seed,
                ..LogisticSpec::default()
            };
            lg.n = spec.n.unwrap_or(lg.n);
            lg.d = spec.d.unwrap_or(lg.d);
            lg.nnz = spec.nnz.unwrap_or(lg.nnz);
            lg.noise_var = spec.noise_var.unwrap_or(lg.noise_var);
            lg.normalize_rows = spec.normalize_rows.unwrap_or(lg.normalize_rows);
            let data = gen_logistic(&lg)?;
            (data, LOGISTIC_MU, Some(lg.manifest()))
        }
        (ModelKind::GroupLasso, path) if Path::new(path).is_file() => {
            return Err(BenchError::Validation(format!(
                "group lasso needs a group partition; '{path}' carries none"
            )))
        }
        (model, path) => {
            if !Path::new(path).is_file() {
                return Err(BenchError::Validation(format!(
                    "dataset '{path}' is neither a known generator for {model:?} nor a file"
                )));
            }
            let opts = LibsvmOptions {
                n_features: spec.n_features,
                binary: model == ModelKind::Logistic,
            };
            let data = read_libsvm(path, opts)?;
            if model == ModelKind::Logistic && data.kind != TaskKind::Binary {
                return Err(BenchError::Validation(format!("'{path}' does not have two labels")));
            }
            let mu = match model {
                ModelKind::Logistic => LOGISTIC_MU,
                _ => 0.1 * data.correlation().iter().fold(0.0_f64, |m, v| m.max(v.abs())),
            };
            (data, mu, None)
        }
    };
    let mu = spec.mu.unwrap_or(default_mu);
    if let Some(g) = generator.as_mut() {
        g.mu = mu;
    }
    let data = Arc::new(data);
    let problem = match spec.model {
        ModelKind::Lasso => SplittingProblem::ridge_lasso(data, mu, spec.ridge)?,
        ModelKind::GroupLasso => SplittingProblem::group_lasso(data, mu)?,
        ModelKind::Logistic => SplittingProblem::logistic(data, mu, spec.intercept)?,
    };
    Ok(BuiltProblem {
        problem,
        mu,
        generator,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NamedSolver {
    pub name: String,
    pub config: SolverConfig,
}

impl NamedSolver {
    pub fn new(config: SolverConfig) -> Self {
        NamedSolver {
            name: config.algorithm.name().to_string(),
            config,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSpec {
    pub problem: ProblemSpec,
    pub solvers: Vec<NamedSolver>,
    /// Record every `cadence` iterations (and at the last one).
    pub cadence: usize,
    /// Weight of the constraint norm in the reported gap.
    pub rho: f64,
    /// Compute f* and w* with the batch reference solver.
    pub reference: bool,
    /// Fill the Lyapunov column (needs the reference point).
    pub lyapunov: bool,
    /// Record wall-clock time; off keeps output byte-deterministic.
    pub timing: bool,
    pub out_dir: Option<PathBuf>,
}

impl Default for ExperimentSpec {
    /// Stochastic ADMM against stochastic SPB-SCPRSM on Simulation 1.
    fn default() -> Self {
        ExperimentSpec {
            problem: ProblemSpec::default(),
            solvers: vec![
                NamedSolver::new(SolverConfig::new(Algorithm::StoAdmm)),
                NamedSolver::new(SolverConfig::default()),
            ],
            cadence: 50,
            rho: 1.0,
            reference: true,
            lyapunov: false,
            timing: false,
            out_dir: None,
        }
    }
}

impl ExperimentSpec {
    pub fn validate(&self) -> Result<(), BenchError> {
        if self.solvers.is_empty() {
            return Err(BenchError::Validation("at least one solver is required".into()));
        }
        if self.cadence == 0 {
            return Err(BenchError::Validation("cadence must be at least 1".into()));
        }
        if !(self.rho > 0.0) || !self.rho.is_finite() {
            return Err(BenchError::Validation(format!("rho = {} must be positive", self.rho)));
        }
        if self.lyapunov && !self.reference {
            return Err(BenchError::Validation(
                "the Lyapunov column needs the reference solve".into(),
            ));
        }
        for (i, s) in self.solvers.iter().enumerate() {
            let bad = s.name.is_empty()
                || !s
                    .name
                    .chars()
                    .all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-' || c == '.');
            if bad {
                return Err(BenchError::Validation(format!(
                    "solver name '{}' must be nonempty and use [A-Za-z0-9_.-]",
                    s.name
                )));
            }
            if self.solvers[..i].iter().any(|o| o.name == s.name) {
                return Err(BenchError::Validation(format!("duplicate solver name '{}'", s.name)));
            }
        }
        Ok(())
    }
}

/// One `[[solver]]` table of a config file; unset fields keep the
/// algorithm's defaults.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverEntry {
    pub name: Option<String>,
    pub algorithm: Option<String>,
    pub alpha: Option<f64>,
    pub gamma: Option<f64>,
    pub beta: Option<f64>,
    /// `zero`, `identity`, `identity:<c>` or a number.
    pub s: Option<String>,
    pub t: Option<String>,
    /// `power:C:p`, `sc:mu` or `const:eta`.
    pub schedule: Option<String>,
    pub iters: Option<usize>,
    pub seed: Option<u64>,
    pub minibatch: Option<usize>,
    pub ergodic: Option<ErgodicIndex>,
}

impl SolverEntry {
    pub fn to_named(&self) -> Result<NamedSolver, BenchError> {
        let v = |e: String| BenchError::Validation(e);
        let alg: Algorithm = self
            .algorithm
            .as_deref()
            .ok_or_else(|| v("solver entry without algorithm".into()))?
            .parse()
            .map_err(v)?;
        let mut cfg = SolverConfig::new(alg);
        if let Some(a) = self.alpha {
            cfg.alpha = a;
        }
        if let Some(g) = self.gamma {
            cfg.gamma = g;
        }
        if let Some(b) = self.beta {
            cfg.beta = b;
        }
        if let Some(s) = &self.s {
            cfg.s = s.parse::<SemiProximal>().map_err(v)?;
        }
        if let Some(t) = &self.t {
            cfg.t = t.parse::<SemiProximal>().map_err(v)?;
        }
        if let Some(s) = &self.schedule {
            cfg.schedule = s.parse::<StepSchedule>().map_err(v)?;
        }
        if let Some(k) = self.iters {
            cfg.max_iters = k;
        }
        if let Some(s) = self.seed {
            cfg.seed = s;
        }
        if let Some(m) = self.minibatch {
            cfg.minibatch = m;
        }
        if let Some(e) = self.ergodic {
            cfg.ergodic = e;
        }
        Ok(NamedSolver {
            name: self.name.clone().unwrap_or_else(|| alg.name().to_string()),
            config: cfg,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentSection {
    pub cadence: usize,
    pub rho: f64,
    pub reference: bool,
    pub lyapunov: bool,
    pub timing: bool,
    pub out: Option<PathBuf>,
}

impl Default for ExperimentSection {
    fn default() -> Self {
        let d = ExperimentSpec::default();
        ExperimentSection {
            cadence: d.cadence,
            rho: d.rho,
            reference: d.reference,
            lyapunov: d.lyapunov,
            timing: d.timing,
            out: None,
        }
    }
}

/// TOML layout: `[experiment]`, `[problem]` and any number of `[[solver]]`.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentFile {
    pub experiment: ExperimentSection,
    pub problem: ProblemSpec,
    pub solver: Vec<SolverEntry>,
}

impl ExperimentFile {
    pub fn parse(text: &str) -> Result<Self, BenchError> {
        Ok(toml::from_str(text)?)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, BenchError> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    /// An empty solver list falls back to the default pair.
    pub fn into_spec(self) -> Result<ExperimentSpec, BenchError> {
        let solvers = if self.solver.is_empty() {
            ExperimentSpec::default().solvers
        } else {
            self.solver
                .iter()
                .map(SolverEntry::to_named)
                .collect::<Result<Vec<_>, _>>()?
        };
        let e = self.experiment;
        Ok(ExperimentSpec {
            problem: self.problem,
            solvers,
            cadence: e.cadence,
            rho: e.rho,
            reference: e.reference,
            lyapunov: e.lyapunov,
            timing: e.timing,
            out_dir: e.out,
        })
    }
}
