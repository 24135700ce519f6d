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

use super::{Dataset, Design, TaskKind};
use crate::linalg::{DenseMatrix, DenseVector, GroupPartition};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Regularization weight used for every logistic instance.
pub const LOGISTIC_MU: f64 = 1.0;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DataError {
    #[error("bad dimensions: {0}")]
    BadDimensions(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct LassoSpec {
    pub n: usize,
    pub d: usize,
    pub nnz: usize,
    pub noise_var: f64,
    pub seed: u64,
    pub normalize_rows: bool,
}

impl Default for LassoSpec {
    fn default() -> Self {
        LassoSpec::simulation1(0)
    }
}

impl LassoSpec {
    /// d = 400, n = 200.
    pub fn simulation1(seed: u64) -> Self {
        LassoSpec {
            n: 200,
            d: 400,
            nnz: 100,
            noise_var: 1e-3,
            seed,
            normalize_rows: false,
        }
    }

    /// d = 1000, n = 500.
    pub fn simulation2(seed: u64) -> Self {
        LassoSpec {
            n: 500,
            d: 1000,
            ..LassoSpec::simulation1(seed)
        }
    }

    pub fn manifest(&self, mu: f64) -> GeneratorManifest {
        GeneratorManifest {
            generator: "lasso".into(),
            seed: self.seed,
            n: self.n,
            d: self.d,
            nnz: Some(self.nnz),
            noise_var: self.noise_var,
            normalize_rows: self.normalize_rows,
            mu,
            group_sizes: None,
            frac_nnz: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GroupLassoSpec {
    pub n: usize,
    pub n_groups: usize,
    pub max_block: usize,
    pub frac_nnz: f64,
    pub noise_var: f64,
    pub seed: u64,
}

impl Default for GroupLassoSpec {
    fn default() -> Self {
        GroupLassoSpec {
            n: 200,
            n_groups: 10,
            max_block: 50,
            frac_nnz: 0.05,
            noise_var: 1e-3,
            seed: 0,
        }
    }
}

impl GroupLassoSpec {
    pub fn manifest(&self, data: &Dataset, mu: f64) -> GeneratorManifest {
        GeneratorManifest {
            generator: "group_lasso".into(),
            seed: self.seed,
            n: self.n,
            d: data.n_features(),
            nnz: data
                .ground_truth
                .as_ref()
                .map(|x| x.iter().filter(|v| **v != 0.0).count()),
            noise_var: self.noise_var,
            normalize_rows: false,
            mu,
            group_sizes: data
                .groups
                .as_ref()
                .map(|g| g.groups().iter().map(|b| b.len()).collect()),
            frac_nnz: Some(self.frac_nnz),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct LogisticSpec {
    pub n: usize,
    pub d: usize,
    pub nnz: usize,
    pub noise_var: f64,
    pub seed: u64,
    pub normalize_rows: bool,
}

impl Default for LogisticSpec {
    fn default() -> Self {
        LogisticSpec {
            n: 200,
            d: 400,
            nnz: 100,
            noise_var: 1e-3,
            seed: 0,
            normalize_rows: true,
        }
    }
}

impl LogisticSpec {
    pub fn manifest(&self) -> GeneratorManifest {
        GeneratorManifest {
            generator: "logistic".into(),
            seed: self.seed,
            n: self.n,
            d: self.d,
            nnz: Some(self.nnz),
            noise_var: self.noise_var,
            normalize_rows: self.normalize_rows,
            mu: LOGISTIC_MU,
            group_sizes: None,
            frac_nnz: None,
        }
    }
}

/// Parameters of a generated dataset, written as JSON next to it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneratorManifest {
    pub generator: String,
    pub seed: u64,
    pub n: usize,
    pub d: usize,
    pub nnz: Option<usize>,
    pub noise_var: f64,
    pub normalize_rows: bool,
    pub mu: f64,
    pub group_sizes: Option<Vec<usize>>,
    pub frac_nnz: Option<f64>,
}

fn normal(rng: &mut ChaCha8Rng) -> f64 {
    rng.sample(StandardNormal)
}

fn gaussian_design(rng: &mut ChaCha8Rng, n: usize, d: usize, normalize_rows: bool) -> DenseMatrix {
    let mut data: Vec<f64> = (0..n * d).map(|_| normal(rng)).collect();
    if normalize_rows {
        for row in data.chunks_mut(d) {
            let norm = row.iter().map(|v| v * v).sum::<f64>().sqrt();
            if norm > 0.0 {
                row.iter_mut().for_each(|v| *v /= norm);
            }
        }
    }
    DenseMatrix::from_vec_unchecked(n, d, data)
}

/// Places `nnz` standard normal entries at uniformly chosen positions of `out`.
fn sparse_truth(rng: &mut ChaCha8Rng, out: &mut [f64], nnz: usize) {
    let mut support = rand::seq::index::sample(rng, out.len(), nnz).into_vec();
    support.sort_unstable();
    for j in support {
        out[j] = normal(rng);
    }
}

fn noisy_response(rng: &mut ChaCha8Rng, design: &DenseMatrix, truth: &[f64], noise_var: f64) -> Vec<f64> {
    let sd = noise_var.sqrt();
    design
        .matvec_slice(truth)
        .into_iter()
        .map(|v| v + sd * normal(rng))
        .collect()
}

fn check_common(n: usize, d: usize, nnz: usize, noise_var: f64) -> Result<(), DataError> {
    if n == 0 || d == 0 {
        return Err(DataError::BadDimensions(format!("n = {n}, d = {d} must be positive")));
    }
    if nnz > d {
        return Err(DataError::BadDimensions(format!("nnz = {nnz} exceeds d = {d}")));
    }
    if !(noise_var >= 0.0) || !noise_var.is_finite() {
        return Err(DataError::BadDimensions(format!("noise variance {noise_var} is invalid")));
    }
    Ok(())
}

/// Sparse linear regression data with μ = 0.1∥Dᵀr∥_∞.
pub fn gen_lasso(spec: &LassoSpec) -> Result<(Dataset, f64), DataError> {
    check_common(spec.n, spec.d, spec.nnz, spec.noise_var)?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let design = gaussian_design(&mut rng, spec.n, spec.d, spec.normalize_rows);
    let mut truth = vec![0.0; spec.d];
    sparse_truth(&mut rng, &mut truth, spec.nnz);
    let response = noisy_response(&mut rng, &design, &truth, spec.noise_var);
    let data = Dataset {
        design: Design::Dense(design),
        response,
        kind: TaskKind::Regression,
        ground_truth: Some(DenseVector::from_vec_unchecked(truth)),
        groups: None,
    };
    let mu = 0.1 * data.correlation().iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    Ok((data, mu))
}

/// Group-sparse regression data; μ = 0.1·maxᵢ∥(Dᵀr)_{group i}∥_∞.
pub fn gen_group_lasso(spec: &GroupLassoSpec) -> Result<(Dataset, f64), DataError> {
    if spec.n_groups == 0 || spec.max_block == 0 {
        return Err(DataError::BadDimensions(
            "n_groups and max_block must be positive".into(),
        ));
    }
    if !(0.0..=1.0).contains(&spec.frac_nnz) {
        return Err(DataError::BadDimensions(format!(
            "frac_nnz = {} outside [0, 1]",
            spec.frac_nnz
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let sizes: Vec<usize> = (0..spec.n_groups)
        .map(|_| rng.random_range(1..=spec.max_block))
        .collect();
    let d: usize = sizes.iter().sum();
    check_common(spec.n, d, 0, spec.noise_var)?;
    let groups = GroupPartition::contiguous(&sizes).expect("contiguous sizes form a partition");
    let design = gaussian_design(&mut rng, spec.n, d, false);
    let mut truth = vec![0.0; d];
    for g in groups.groups() {
        let k = (spec.frac_nnz * g.len() as f64).round() as usize;
        let block = &mut truth[g[0]..g[0] + g.len()];
        sparse_truth(&mut rng, block, k);
    }
    let response = noisy_response(&mut rng, &design, &truth, spec.noise_var);
    let data = Dataset {
        design: Design::Dense(design),
        response,
        kind: TaskKind::Regression,
        ground_truth: Some(DenseVector::from_vec_unchecked(truth)),
        groups: Some(groups),
    };
    let corr = data.correlation();
    let groups = data.groups.as_ref().expect("set above");
    let mu = 0.1
        * groups
            .groups()
            .iter()
            .map(|g| g.iter().fold(0.0_f64, |m, &i| m.max(corr[i].abs())))
            .fold(0.0_f64, f64::max);
    Ok((data, mu))
}

/// Binary classification data with labels sign(Dx̄ + ε), sign(0) = +1.
pub fn gen_logistic(spec: &LogisticSpec) -> Result<Dataset, DataError> {
    check_common(spec.n, spec.d, spec.nnz, spec.noise_var)?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let design = gaussian_design(&mut rng, spec.n, spec.d, spec.normalize_rows);
    let mut truth = vec![0.0; spec.d];
    sparse_truth(&mut rng, &mut truth, spec.nnz);
    let response = noisy_response(&mut rng, &design, &truth, spec.noise_var)
        .into_iter()
        .map(|v| if v >= 0.0 { 1.0 } else { -1.0 })
        .collect();
    Ok(Dataset {
        design: Design::Dense(design),
        response,
        kind: TaskKind::Binary,
        ground_truth: Some(DenseVector::from_vec_unchecked(truth)),
        groups: None,
    })
}
