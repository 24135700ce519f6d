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

use super::{CsrMatrix, Dataset, Design, TaskKind};
use std::fmt::Write as _;
use std::path::Path;
use thiserror::Error;

/// Storage switches to CSR below this fill fraction.
const SPARSE_DENSITY: f64 = 0.1;

#[derive(Debug, Error)]
pub enum LibsvmError {
    #[error("line {line}, column {column}: {reason}")]
    ParseError {
        line: usize,
        column: usize,
        reason: String,
    },
    #[error("line {line}, column {column}: feature indices must be strictly increasing")]
    NonIncreasingIndices { line: usize, column: usize },
    #[error("file contains no samples")]
    EmptyFile,
    #[error("labels are not two-valued ({0} distinct values)")]
    NotBinary(usize),
    #[error("feature index {max_index} exceeds requested dimension {n_features}")]
    DimensionTooSmall { max_index: usize, n_features: usize },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, Copy, Default)]
pub struct LibsvmOptions {
    /// Feature dimension; defaults to the largest index seen.
    pub n_features: Option<usize>,
    /// Map two-valued labels to {-1, +1}.
    pub binary: bool,
}

pub fn read_libsvm(path: impl AsRef<Path>, opts: LibsvmOptions) -> Result<Dataset, LibsvmError> {
    let text = std::fs::read_to_string(path)?;
    read_libsvm_str(&text, opts)
}

/// Splits a line into whitespace-separated tokens with 1-based columns.
fn tokens(line: &str) -> impl Iterator<Item = (usize, &str)> {
    let mut rest = line;
    let mut offset = 0;
    std::iter::from_fn(move || {
        let start = rest.find(|c: char| !c.is_whitespace())?;
        let tail = &rest[start..];
        let len = tail.find(char::is_whitespace).unwrap_or(tail.len());
        let col = offset + start + 1;
        let tok = &tail[..len];
        offset += start + len;
        rest = &tail[len..];
        Some((col, tok))
    })
}

pub fn read_libsvm_str(text: &str, opts: LibsvmOptions) -> Result<Dataset, LibsvmError> {
    let mut labels = Vec::new();
    let mut rows: Vec<Vec<(usize, f64)>> = Vec::new();
    let mut max_index = 0usize;
    for (lineno, raw) in text.lines().enumerate() {
        let line = lineno + 1;
        let content = raw.split('#').next().unwrap_or("");
        let mut toks = tokens(content);
        let Some((col, label_tok)) = toks.next() else {
            continue;
        };
        let label: f64 = label_tok
            .parse()
            .ok()
            .filter(|v: &f64| v.is_finite())
            .ok_or_else(|| LibsvmError::ParseError {
                line,
                column: col,
                reason: format!("invalid label '{label_tok}'"),
            })?;
        let mut row = Vec::new();
        let mut last = 0usize;
        for (col, tok) in toks {
            let bad = |reason: String| LibsvmError::ParseError {
                line,
                column: col,
                reason,
            };
            let (idx, val) = tok
                .split_once(':')
                .ok_or_else(|| bad(format!("expected index:value, found '{tok}'")))?;
            let idx: usize = idx
                .parse()
                .map_err(|_| bad(format!("invalid feature index '{idx}'")))?;
            if idx == 0 {
                return Err(bad("feature indices are 1-based".into()));
            }
            let val: f64 = val
                .parse()
                .ok()
                .filter(|v: &f64| v.is_finite())
                .ok_or_else(|| bad(format!("invalid feature value '{val}'")))?;
            if idx <= last {
                return Err(LibsvmError::NonIncreasingIndices { line, column: col });
            }
            last = idx;
            row.push((idx - 1, val));
        }
        max_index = max_index.max(last);
        labels.push(label);
        rows.push(row);
    }
    if labels.is_empty() {
        return Err(LibsvmError::EmptyFile);
    }
    let d = match opts.n_features {
        Some(d) if d < max_index => {
            return Err(LibsvmError::DimensionTooSmall {
                max_index,
                n_features: d,
            })
        }
        Some(d) => d,
        None => max_index,
    };
    let kind = if opts.binary {
        map_binary(&mut labels)?;
        TaskKind::Binary
    } else {
        TaskKind::Regression
    };
    let n = rows.len();
    let nnz: usize = rows.iter().map(|r| r.iter().filter(|(_, v)| *v != 0.0).count()).sum();
    let density = if n * d == 0 { 0.0 } else { nnz as f64 / (n as f64 * d as f64) };
    let csr = CsrMatrix::from_rows(d, rows).expect("indices validated while parsing");
    let design = if density < SPARSE_DENSITY {
        Design::Sparse(csr)
    } else {
        Design::Dense(csr.to_dense())
    };
    Ok(Dataset {
        design,
        response: labels,
        kind,
        ground_truth: None,
        groups: None,
    })
}

fn map_binary(labels: &mut [f64]) -> Result<(), LibsvmError> {
    let mut distinct: Vec<f64> = labels.to_vec();
    distinct.sort_by(f64::total_cmp);
    distinct.dedup();
    if distinct.iter().all(|v| *v == 1.0 || *v == -1.0) {
        return Ok(());
    }
    if distinct.len() != 2 {
        return Err(LibsvmError::NotBinary(distinct.len()));
    }
    let low = distinct[0];
    for l in labels.iter_mut() {
        *l = if *l == low { -1.0 } else { 1.0 };
    }
    Ok(())
}

/// Writes nonzero features with shortest round-trip formatting.
pub fn write_libsvm(path: impl AsRef<Path>, data: &Dataset) -> Result<(), LibsvmError> {
    let mut out = String::new();
    for i in 0..data.n_samples() {
        write!(out, "{:?}", data.response[i]).expect("writing to String");
        let row = data.design.row(i).to_dense();
        for (j, v) in row.iter().enumerate() {
            if *v != 0.0 {
                write!(out, " {}:{:?}", j + 1, v).expect("writing to String");
            }
        }
        out.push('\n');
    }
    std::fs::write(path, out)?;
    Ok(())
}
