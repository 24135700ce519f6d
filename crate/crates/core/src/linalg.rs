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

//! Small dense linear algebra: vectors, row-major matrices, Cholesky solves,
//! a cyclic Jacobi eigensolver, weighted norms and the shrinkage operators.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Absolute tolerance for nonnegativity of quadratic forms.
pub const EPS_PSD: f64 = 1e-10;

/// Relative tolerance used when checking symmetry.
pub const SYMMETRY_TOL: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LinalgError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("non-finite entry at position {0}")]
    NonFinite(usize),
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix is not symmetric (max asymmetry {0:e})")]
    NotSymmetric(f64),
    #[error("quadratic form is negative ({0:e})")]
    NotPositiveSemidefiniteQuadraticForm(f64),
    #[error("negative threshold {0}")]
    NegativeThreshold(f64),
    #[error("invalid partition: {0}")]
    InvalidPartition(String),
    #[error("matrix is singular or not positive definite (pivot {pivot} = {value:e})")]
    Singular { pivot: usize, value: f64 },
    #[error("Jacobi iteration did not converge after {0} sweeps")]
    NoConvergence(usize),
}

fn check_finite(data: &[f64]) -> Result<(), LinalgError> {
    match data.iter().position(|v| !v.is_finite()) {
        Some(i) => Err(LinalgError::NonFinite(i)),
        None => Ok(()),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct DenseVector {
    data: Vec<f64>,
}

impl TryFrom<Vec<f64>> for DenseVector {
    type Error = LinalgError;
    fn try_from(data: Vec<f64>) -> Result<Self, Self::Error> {
        DenseVector::new(data)
    }
}

impl From<DenseVector> for Vec<f64> {
    fn from(v: DenseVector) -> Self {
        v.data
    }
}

impl DenseVector {
    pub fn new(data: Vec<f64>) -> Result<Self, LinalgError> {
        check_finite(&data)?;
        Ok(DenseVector { data })
    }

    /// Wraps solver-internal buffers; callers check finiteness themselves.
    pub(crate) fn from_vec_unchecked(data: Vec<f64>) -> Self {
        DenseVector { data }
    }

    pub fn zeros(dim: usize) -> Self {
        DenseVector { data: vec![0.0; dim] }
    }

    pub fn filled(dim: usize, value: f64) -> Result<Self, LinalgError> {
        DenseVector::new(vec![value; dim])
    }

    pub fn dim(&self) -> usize {
        self.data.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.data
    }

    pub fn iter(&self) -> std::slice::Iter<'_, f64> {
        self.data.iter()
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    pub fn dot(&self, other: &DenseVector) -> Result<f64, LinalgError> {
        same_dim(self.dim(), other.dim())?;
        Ok(dot(&self.data, &other.data))
    }

    pub fn norm(&self) -> f64 {
        dot(&self.data, &self.data).sqrt()
    }

    pub fn norm_sq(&self) -> f64 {
        dot(&self.data, &self.data)
    }

    pub fn norm_l1(&self) -> f64 {
        self.data.iter().map(|v| v.abs()).sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn add(&self, other: &DenseVector) -> Result<DenseVector, LinalgError> {
        same_dim(self.dim(), other.dim())?;
        Ok(DenseVector::from_vec_unchecked(
            self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect(),
        ))
    }

    pub fn sub(&self, other: &DenseVector) -> Result<DenseVector, LinalgError> {
        same_dim(self.dim(), other.dim())?;
        Ok(DenseVector::from_vec_unchecked(
            self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect(),
        ))
    }

    pub fn scaled(&self, c: f64) -> DenseVector {
        DenseVector::from_vec_unchecked(self.data.iter().map(|v| c * v).collect())
    }

    /// self += a * x
    pub fn axpy(&mut self, a: f64, x: &DenseVector) -> Result<(), LinalgError> {
        same_dim(self.dim(), x.dim())?;
        axpy(a, &x.data, &mut self.data);
        Ok(())
    }

    pub fn max_abs_diff(&self, other: &DenseVector) -> Result<f64, LinalgError> {
        same_dim(self.dim(), other.dim())?;
        Ok(self
            .data
            .iter()
            .zip(&other.data)
            .fold(0.0, |m, (a, b)| m.max((a - b).abs())))
    }

    /// Concatenates several vectors into one.
    pub fn concat(parts: &[&DenseVector]) -> DenseVector {
        let mut data = Vec::with_capacity(parts.iter().map(|p| p.dim()).sum());
        for p in parts {
            data.extend_from_slice(&p.data);
        }
        DenseVector::from_vec_unchecked(data)
    }
}

impl std::ops::Index<usize> for DenseVector {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.data[i]
    }
}

fn same_dim(expected: usize, got: usize) -> Result<(), LinalgError> {
    if expected != got {
        return Err(LinalgError::DimensionMismatch { expected, got });
    }
    Ok(())
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn axpy(a: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += a * xi;
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawMatrix", into = "RawMatrix")]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct RawMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl TryFrom<RawMatrix> for DenseMatrix {
    type Error = LinalgError;
    fn try_from(raw: RawMatrix) -> Result<Self, Self::Error> {
        DenseMatrix::new(raw.rows, raw.cols, raw.data)
    }
}

impl From<DenseMatrix> for RawMatrix {
    fn from(m: DenseMatrix) -> Self {
        RawMatrix {
            rows: m.rows,
            cols: m.cols,
            data: m.data,
        }
    }
}

impl DenseMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self, LinalgError> {
        same_dim(rows * cols, data.len())?;
        check_finite(&data)?;
        Ok(DenseMatrix { rows, cols, data })
    }

    pub(crate) fn from_vec_unchecked(rows: usize, cols: usize, data: Vec<f64>) -> Self {
        debug_assert_eq!(rows * cols, data.len());
        DenseMatrix { rows, cols, data }
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self, LinalgError> {
        let cols = rows.first().map_or(0, |r| r.len());
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            same_dim(cols, r.len())?;
            data.extend_from_slice(r);
        }
        DenseMatrix::new(rows.len(), cols, data)
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        DenseMatrix {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        DenseMatrix::scaled_identity(n, 1.0)
    }

    pub fn scaled_identity(n: usize, c: f64) -> Self {
        let mut m = DenseMatrix::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = c;
        }
        m
    }

    pub fn diag(values: &[f64]) -> Result<Self, LinalgError> {
        check_finite(values)?;
        let n = values.len();
        let mut m = DenseMatrix::zeros(n, n);
        for (i, v) in values.iter().enumerate() {
            m.data[i * n + i] = *v;
        }
        Ok(m)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    pub(crate) fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.cols + j] = v;
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn transpose(&self) -> DenseMatrix {
        let mut t = DenseMatrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.data[j * self.rows + i] = self.data[i * self.cols + j];
            }
        }
        t
    }

    pub fn matvec(&self, v: &DenseVector) -> Result<DenseVector, LinalgError> {
        same_dim(self.cols, v.dim())?;
        Ok(DenseVector::from_vec_unchecked(self.matvec_slice(v.as_slice())))
    }

    pub(crate) fn matvec_slice(&self, v: &[f64]) -> Vec<f64> {
        (0..self.rows).map(|i| dot(self.row(i), v)).collect()
    }

    /// Computes selfᵀ v.
    pub fn matvec_transpose(&self, v: &DenseVector) -> Result<DenseVector, LinalgError> {
        same_dim(self.rows, v.dim())?;
        Ok(DenseVector::from_vec_unchecked(
            self.matvec_transpose_slice(v.as_slice()),
        ))
    }

    pub(crate) fn matvec_transpose_slice(&self, v: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.cols];
        for (i, vi) in v.iter().enumerate() {
            if *vi != 0.0 {
                axpy(*vi, self.row(i), &mut out);
            }
        }
        out
    }

    pub fn matmul(&self, other: &DenseMatrix) -> Result<DenseMatrix, LinalgError> {
        same_dim(self.cols, other.rows)?;
        let mut out = DenseMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            let orow = &mut out.data[i * other.cols..(i + 1) * other.cols];
            for k in 0..self.cols {
                let a = self.data[i * self.cols + k];
                if a != 0.0 {
                    axpy(a, other.row(k), orow);
                }
            }
        }
        Ok(out)
    }

    /// Computes selfᵀ self.
    pub fn gram(&self) -> DenseMatrix {
        let n = self.cols;
        let mut out = DenseMatrix::zeros(n, n);
        for r in 0..self.rows {
            let row = self.row(r);
            for i in 0..n {
                let a = row[i];
                if a != 0.0 {
                    axpy(a, row, &mut out.data[i * n..(i + 1) * n]);
                }
            }
        }
        out
    }

    pub fn add(&self, other: &DenseMatrix) -> Result<DenseMatrix, LinalgError> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &DenseMatrix) -> Result<DenseMatrix, LinalgError> {
        self.zip_with(other, |a, b| a - b)
    }

    fn zip_with(
        &self,
        other: &DenseMatrix,
        f: impl Fn(f64, f64) -> f64,
    ) -> Result<DenseMatrix, LinalgError> {
        same_dim(self.rows, other.rows)?;
        same_dim(self.cols, other.cols)?;
        Ok(DenseMatrix::from_vec_unchecked(
            self.rows,
            self.cols,
            self.data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| f(*a, *b))
                .collect(),
        ))
    }

    pub fn scaled(&self, c: f64) -> DenseMatrix {
        DenseMatrix::from_vec_unchecked(
            self.rows,
            self.cols,
            self.data.iter().map(|v| c * v).collect(),
        )
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn max_abs_diff(&self, other: &DenseMatrix) -> Result<f64, LinalgError> {
        Ok(self.sub(other)?.max_abs())
    }

    /// Copies `block` into self with its top-left corner at (r0, c0).
    pub fn set_block(&mut self, r0: usize, c0: usize, block: &DenseMatrix) -> Result<(), LinalgError> {
        if r0 + block.rows > self.rows {
            return Err(LinalgError::DimensionMismatch {
                expected: self.rows,
                got: r0 + block.rows,
            });
        }
        if c0 + block.cols > self.cols {
            return Err(LinalgError::DimensionMismatch {
                expected: self.cols,
                got: c0 + block.cols,
            });
        }
        for i in 0..block.rows {
            let dst = (r0 + i) * self.cols + c0;
            self.data[dst..dst + block.cols].copy_from_slice(block.row(i));
        }
        Ok(())
    }

    pub fn block(&self, r0: usize, c0: usize, rows: usize, cols: usize) -> DenseMatrix {
        let mut out = DenseMatrix::zeros(rows, cols);
        for i in 0..rows {
            let src = (r0 + i) * self.cols + c0;
            out.data[i * cols..(i + 1) * cols].copy_from_slice(&self.data[src..src + cols]);
        }
        out
    }

    /// Largest |a_ij - a_ji|, or an error when not square.
    pub fn asymmetry(&self) -> Result<f64, LinalgError> {
        if !self.is_square() {
            return Err(LinalgError::NotSquare {
                rows: self.rows,
                cols: self.cols,
            });
        }
        let n = self.rows;
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in (i + 1)..n {
                worst = worst.max((self.get(i, j) - self.get(j, i)).abs());
            }
        }
        Ok(worst)
    }

    pub fn check_symmetric(&self) -> Result<(), LinalgError> {
        let asym = self.asymmetry()?;
        if asym > SYMMETRY_TOL * self.max_abs().max(1.0) {
            return Err(LinalgError::NotSymmetric(asym));
        }
        Ok(())
    }

    pub fn quadratic_form(&self, v: &DenseVector) -> Result<f64, LinalgError> {
        if !self.is_square() {
            return Err(LinalgError::NotSquare {
                rows: self.rows,
                cols: self.cols,
            });
        }
        same_dim(self.rows, v.dim())?;
        let v = v.as_slice();
        Ok((0..self.rows).map(|i| v[i] * dot(self.row(i), v)).sum())
    }

    pub fn cholesky(&self) -> Result<Cholesky, LinalgError> {
        Cholesky::factor(self)
    }

    /// Eigenvalues of a symmetric matrix in ascending order.
    pub fn symmetric_eigenvalues(&self) -> Result<Vec<f64>, LinalgError> {
        self.check_symmetric()?;
        jacobi_eigenvalues(self)
    }

    pub fn min_eigenvalue(&self) -> Result<f64, LinalgError> {
        Ok(self
            .symmetric_eigenvalues()?
            .first()
            .copied()
            .unwrap_or(0.0))
    }
}

/// Lower-triangular factor L with A = L Lᵀ.
#[derive(Debug, Clone)]
pub struct Cholesky {
    n: usize,
    l: Vec<f64>,
}

impl Cholesky {
    pub fn factor(a: &DenseMatrix) -> Result<Self, LinalgError> {
        if !a.is_square() {
            return Err(LinalgError::NotSquare {
                rows: a.rows,
                cols: a.cols,
            });
        }
        let n = a.rows;
        let scale = a.max_abs().max(f64::MIN_POSITIVE);
        let mut l = vec![0.0; n * n];
        for j in 0..n {
            let mut d = a.get(j, j) - dot(&l[j * n..j * n + j], &l[j * n..j * n + j]);
            if !(d > 1e-14 * scale) {
                return Err(LinalgError::Singular { pivot: j, value: d });
            }
            d = d.sqrt();
            l[j * n + j] = d;
            for i in (j + 1)..n {
                let s = a.get(i, j) - dot(&l[i * n..i * n + j], &l[j * n..j * n + j]);
                l[i * n + j] = s / d;
            }
        }
        Ok(Cholesky { n, l })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn solve(&self, b: &DenseVector) -> Result<DenseVector, LinalgError> {
        same_dim(self.n, b.dim())?;
        Ok(DenseVector::from_vec_unchecked(self.solve_slice(b.as_slice())))
    }

    pub(crate) fn solve_slice(&self, b: &[f64]) -> Vec<f64> {
        let n = self.n;
        let l = &self.l;
        let mut z = b.to_vec();
        for i in 0..n {
            let s = z[i] - dot(&l[i * n..i * n + i], &z[..i]);
            z[i] = s / l[i * n + i];
        }
        for i in (0..n).rev() {
            let mut s = z[i];
            for k in (i + 1)..n {
                s -= l[k * n + i] * z[k];
            }
            z[i] = s / l[i * n + i];
        }
        z
    }
}

const JACOBI_MAX_SWEEPS: usize = 100;

fn jacobi_eigenvalues(m: &DenseMatrix) -> Result<Vec<f64>, LinalgError> {
    let n = m.rows;
    let mut a = m.data.clone();
    // Symmetrize to remove round-off asymmetry.
    for i in 0..n {
        for j in (i + 1)..n {
            let v = 0.5 * (a[i * n + j] + a[j * n + i]);
            a[i * n + j] = v;
            a[j * n + i] = v;
        }
    }
    let frob: f64 = a.iter().map(|v| v * v).sum::<f64>().sqrt();
    if frob == 0.0 {
        return Ok(vec![0.0; n]);
    }
    let target = f64::EPSILON * frob;
    for _ in 0..JACOBI_MAX_SWEEPS {
        let off: f64 = (0..n)
            .flat_map(|i| ((i + 1)..n).map(move |j| (i, j)))
            .map(|(i, j)| 2.0 * a[i * n + j] * a[i * n + j])
            .sum::<f64>()
            .sqrt();
        if off <= target {
            let mut eig: Vec<f64> = (0..n).map(|i| a[i * n + i]).collect();
            eig.sort_by(|x, y| x.total_cmp(y));
            return Ok(eig);
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[p * n + q];
                if apq.abs() <= f64::MIN_POSITIVE {
                    continue;
                }
                let app = a[p * n + p];
                let aqq = a[q * n + q];
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    a[k * n + p] = c * akp - s * akq;
                    a[k * n + q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p * n + k];
                    let aqk = a[q * n + k];
                    a[p * n + k] = c * apk - s * aqk;
                    a[q * n + k] = s * apk + c * aqk;
                }
            }
        }
    }
    Err(LinalgError::NoConvergence(JACOBI_MAX_SWEEPS))
}

/// ∥v∥_G = √(vᵀGv) for symmetric positive semidefinite G.
pub fn weighted_norm(v: &DenseVector, g: &DenseMatrix) -> Result<f64, LinalgError> {
    g.check_symmetric()?;
    let q = g.quadratic_form(v)?;
    if q < -EPS_PSD {
        return Err(LinalgError::NotPositiveSemidefiniteQuadraticForm(q));
    }
    Ok(q.max(0.0).sqrt())
}

pub fn is_psd(g: &DenseMatrix, tol: f64) -> Result<bool, LinalgError> {
    Ok(g.min_eigenvalue()? >= -tol)
}

pub fn soft_threshold(v: &DenseVector, a: f64) -> Result<DenseVector, LinalgError> {
    if !(a >= 0.0) {
        return Err(LinalgError::NegativeThreshold(a));
    }
    let mut out = vec![0.0; v.dim()];
    soft_threshold_into(v.as_slice(), a, &mut out);
    Ok(DenseVector::from_vec_unchecked(out))
}

pub(crate) fn soft_threshold_into(v: &[f64], a: f64, out: &mut [f64]) {
    for (o, vi) in out.iter_mut().zip(v) {
        *o = shrink(*vi, a);
    }
}

#[inline]
pub(crate) fn shrink(v: f64, a: f64) -> f64 {
    if v > a {
        v - a
    } else if v < -a {
        v + a
    } else {
        0.0
    }
}

pub fn block_soft_threshold(
    v: &DenseVector,
    blocks: &GroupPartition,
    a: f64,
) -> Result<DenseVector, LinalgError> {
    if !(a >= 0.0) {
        return Err(LinalgError::NegativeThreshold(a));
    }
    same_dim(blocks.dim(), v.dim())?;
    let mut out = vec![0.0; v.dim()];
    block_soft_threshold_into(v.as_slice(), blocks, a, &mut out);
    Ok(DenseVector::from_vec_unchecked(out))
}

pub(crate) fn block_soft_threshold_into(v: &[f64], blocks: &GroupPartition, a: f64, out: &mut [f64]) {
    for g in blocks.groups() {
        let norm = g.iter().map(|&i| v[i] * v[i]).sum::<f64>().sqrt();
        let factor = if norm > 0.0 { (1.0 - a / norm).max(0.0) } else { 0.0 };
        for &i in g {
            out[i] = factor * v[i];
        }
    }
}

/// A partition of {0, .., dim-1} into disjoint, nonempty groups.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<usize>>", into = "Vec<Vec<usize>>")]
pub struct GroupPartition {
    groups: Vec<Vec<usize>>,
    dim: usize,
}

impl TryFrom<Vec<Vec<usize>>> for GroupPartition {
    type Error = LinalgError;
    fn try_from(groups: Vec<Vec<usize>>) -> Result<Self, Self::Error> {
        let dim = groups.iter().map(|g| g.len()).sum();
        GroupPartition::new(groups, dim)
    }
}

impl From<GroupPartition> for Vec<Vec<usize>> {
    fn from(p: GroupPartition) -> Self {
        p.groups
    }
}

impl GroupPartition {
    pub fn new(groups: Vec<Vec<usize>>, dim: usize) -> Result<Self, LinalgError> {
        let mut seen = vec![false; dim];
        for (gi, g) in groups.iter().enumerate() {
            if g.is_empty() {
                return Err(LinalgError::InvalidPartition(format!("group {gi} is empty")));
            }
            for &i in g {
                if i >= dim {
                    return Err(LinalgError::InvalidPartition(format!(
                        "index {i} out of range for dimension {dim}"
                    )));
                }
                if seen[i] {
                    return Err(LinalgError::InvalidPartition(format!(
                        "index {i} appears in more than one group"
                    )));
                }
                seen[i] = true;
            }
        }
        if let Some(i) = seen.iter().position(|s| !s) {
            return Err(LinalgError::InvalidPartition(format!("index {i} is not covered")));
        }
        Ok(GroupPartition { groups, dim })
    }

    /// Consecutive groups with the given sizes.
    pub fn contiguous(sizes: &[usize]) -> Result<Self, LinalgError> {
        let mut groups = Vec::with_capacity(sizes.len());
        let mut start = 0;
        for &s in sizes {
            groups.push((start..start + s).collect());
            start += s;
        }
        GroupPartition::new(groups, start)
    }

    pub fn singletons(dim: usize) -> Self {
        GroupPartition {
            groups: (0..dim).map(|i| vec![i]).collect(),
            dim,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.groups.len()
    }

    pub fn is_empty(&self) -> bool {
        self.groups.is_empty()
    }

    pub fn groups(&self) -> &[Vec<usize>] {
        &self.groups
    }
}
