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

//! Datasets: design matrices in dense or CSR storage, synthetic generators
//! and a LIBSVM reader/writer.

mod libsvm;
mod synthetic;

pub use libsvm::{read_libsvm, read_libsvm_str, write_libsvm, LibsvmError, LibsvmOptions};
pub use synthetic::{
    gen_group_lasso, gen_lasso, gen_logistic, DataError, GeneratorManifest, GroupLassoSpec,
    LassoSpec, LogisticSpec, LOGISTIC_MU,
};

use crate::linalg::{axpy, dot, DenseMatrix, DenseVector, GroupPartition};
use serde::{Deserialize, Serialize};

/// Compressed sparse row storage.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CsrMatrix {
    rows: usize,
    cols: usize,
    indptr: Vec<usize>,
    indices: Vec<usize>,
    values: Vec<f64>,
}

impl CsrMatrix {
    /// Builds from per-row (index, value) lists; indices must be strictly increasing.
    pub fn from_rows(cols: usize, rows: Vec<Vec<(usize, f64)>>) -> Option<Self> {
        let mut indptr = Vec::with_capacity(rows.len() + 1);
        let mut indices = Vec::new();
        let mut values = Vec::new();
        indptr.push(0);
        for row in &rows {
            let mut last: Option<usize> = None;
            for &(j, v) in row {
                if j >= cols || last.is_some_and(|l| l >= j) || !v.is_finite() {
                    return None;
                }
                last = Some(j);
                if v != 0.0 {
                    indices.push(j);
                    values.push(v);
                }
            }
            indptr.push(indices.len());
        }
        Some(CsrMatrix {
            rows: rows.len(),
            cols,
            indptr,
            indices,
            values,
        })
    }

    pub fn from_dense(m: &DenseMatrix) -> Self {
        let rows = (0..m.rows())
            .map(|i| {
                m.row(i)
                    .iter()
                    .enumerate()
                    .filter(|(_, v)| **v != 0.0)
                    .map(|(j, v)| (j, *v))
                    .collect()
            })
            .collect();
        CsrMatrix::from_rows(m.cols(), rows).expect("dense rows are valid CSR input")
    }

    pub fn to_dense(&self) -> DenseMatrix {
        let mut data = vec![0.0; self.rows * self.cols];
        for i in 0..self.rows {
            for k in self.indptr[i]..self.indptr[i + 1] {
                data[i * self.cols + self.indices[k]] = self.values[k];
            }
        }
        DenseMatrix::from_vec_unchecked(self.rows, self.cols, data)
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    fn row(&self, i: usize) -> (&[usize], &[f64]) {
        let range = self.indptr[i]..self.indptr[i + 1];
        (&self.indices[range.clone()], &self.values[range])
    }
}

/// Borrowed view of one design row.
#[derive(Debug, Clone, Copy)]
pub enum RowView<'a> {
    Dense(&'a [f64]),
    Sparse {
        dim: usize,
        indices: &'a [usize],
        values: &'a [f64],
    },
}

impl<'a> RowView<'a> {
    pub fn dim(&self) -> usize {
        match self {
            RowView::Dense(r) => r.len(),
            RowView::Sparse { dim, .. } => *dim,
        }
    }

    pub fn dot(&self, x: &[f64]) -> f64 {
        match self {
            RowView::Dense(r) => dot(r, x),
            RowView::Sparse { indices, values, .. } => {
                indices.iter().zip(*values).map(|(j, v)| v * x[*j]).sum()
            }
        }
    }

    /// out += a * row
    pub fn axpy_into(&self, a: f64, out: &mut [f64]) {
        match self {
            RowView::Dense(r) => axpy(a, r, out),
            RowView::Sparse { indices, values, .. } => {
                for (j, v) in indices.iter().zip(*values) {
                    out[*j] += a * v;
                }
            }
        }
    }

    pub fn norm_sq(&self) -> f64 {
        match self {
            RowView::Dense(r) => dot(r, r),
            RowView::Sparse { values, .. } => dot(values, values),
        }
    }

    pub fn to_dense(&self) -> DenseVector {
        let mut out = vec![0.0; self.dim()];
        self.axpy_into(1.0, &mut out);
        DenseVector::from_vec_unchecked(out)
    }
}

/// Design matrix D (n × d).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Design {
    Dense(DenseMatrix),
    Sparse(CsrMatrix),
}

impl Design {
    pub fn n_rows(&self) -> usize {
        match self {
            Design::Dense(m) => m.rows(),
            Design::Sparse(m) => m.rows,
        }
    }

    pub fn n_cols(&self) -> usize {
        match self {
            Design::Dense(m) => m.cols(),
            Design::Sparse(m) => m.cols,
        }
    }

    pub fn is_sparse(&self) -> bool {
        matches!(self, Design::Sparse(_))
    }

    pub fn row(&self, i: usize) -> RowView<'_> {
        match self {
            Design::Dense(m) => RowView::Dense(m.row(i)),
            Design::Sparse(m) => {
                let (indices, values) = m.row(i);
                RowView::Sparse {
                    dim: m.cols,
                    indices,
                    values,
                }
            }
        }
    }

    /// D x
    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        (0..self.n_rows()).map(|i| self.row(i).dot(x)).collect()
    }

    /// Dᵀ v
    pub fn apply_transpose(&self, v: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.n_cols()];
        for (i, vi) in v.iter().enumerate() {
            if *vi != 0.0 {
                self.row(i).axpy_into(*vi, &mut out);
            }
        }
        out
    }

    /// DᵀD as a dense matrix.
    pub fn gram(&self) -> DenseMatrix {
        match self {
            Design::Dense(m) => m.gram(),
            Design::Sparse(_) => self.to_dense().gram(),
        }
    }

    pub fn to_dense(&self) -> DenseMatrix {
        match self {
            Design::Dense(m) => m.clone(),
            Design::Sparse(m) => m.to_dense(),
        }
    }

    pub fn nnz(&self) -> usize {
        match self {
            Design::Dense(m) => m.as_slice().iter().filter(|v| **v != 0.0).count(),
            Design::Sparse(m) => m.nnz(),
        }
    }

    /// Entry-wise equality regardless of storage.
    pub fn same_values(&self, other: &Design) -> bool {
        self.n_rows() == other.n_rows()
            && self.n_cols() == other.n_cols()
            && (0..self.n_rows()).all(|i| {
                self.row(i).to_dense().as_slice() == other.row(i).to_dense().as_slice()
            })
    }
}

impl From<DenseMatrix> for Design {
    fn from(m: DenseMatrix) -> Self {
        Design::Dense(m)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TaskKind {
    Regression,
    Binary,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    pub design: Design,
    pub response: Vec<f64>,
    pub kind: TaskKind,
    pub ground_truth: Option<DenseVector>,
    pub groups: Option<GroupPartition>,
}

impl Dataset {
    pub fn n_samples(&self) -> usize {
        self.design.n_rows()
    }

    pub fn n_features(&self) -> usize {
        self.design.n_cols()
    }

    /// Dᵀ r
    pub fn correlation(&self) -> Vec<f64> {
        self.design.apply_transpose(&self.response)
    }
}
