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
use serde::{Deserialize, Serialize};
use std::fmt::Write as _;
use std::path::Path;

pub const CSV_HEADER: &str = "solver,iteration,objective,constraint_norm,raw_objective,wall_ns,lyapunov";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceRecord {
    pub iteration: usize,
    /// Batch objective at the ergodic average.
    pub objective: f64,
    /// ∥Ax̄ + Bȳ − b∥₂ at the ergodic average.
    pub constraint_norm: f64,
    /// Batch objective at the current iterate.
    pub raw_objective: f64,
    /// Elapsed time since the start of the run; 0 when timing is off.
    pub wall_ns: u64,
    pub lyapunov: Option<f64>,
}

impl TraceRecord {
    /// objective − f* + ρ·constraint_norm
    pub fn gap(&self, f_star: f64, rho: f64) -> f64 {
        self.objective - f_star + rho * self.constraint_norm
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trace {
    pub solver: String,
    pub records: Vec<TraceRecord>,
}

impl Trace {
    pub fn new(solver: impl Into<String>) -> Self {
        Trace {
            solver: solver.into(),
            records: Vec::new(),
        }
    }

    pub fn last(&self) -> Option<&TraceRecord> {
        self.records.last()
    }

    /// Record at exactly this iteration, if one was taken.
    pub fn at(&self, iteration: usize) -> Option<&TraceRecord> {
        self.records
            .binary_search_by_key(&iteration, |r| r.iteration)
            .ok()
            .map(|i| &self.records[i])
    }
}

fn num(v: f64) -> String {
    format!("{v:.16e}")
}

/// CSV text for the traces in the given order.
pub fn render_csv(traces: &[Trace]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for t in traces {
        for r in &t.records {
            let lyap = r.lyapunov.map(num).unwrap_or_default();
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{}",
                t.solver,
                r.iteration,
                num(r.objective),
                num(r.constraint_norm),
                num(r.raw_objective),
                r.wall_ns,
                lyap
            );
        }
    }
    out
}

pub fn emit_csv(traces: &[Trace], path: impl AsRef<Path>) -> Result<(), BenchError> {
    if traces.is_empty() {
        return Err(BenchError::Validation("no traces to write".into()));
    }
    std::fs::write(path, render_csv(traces))?;
    Ok(())
}

/// Reads a trace CSV; rows of one solver must be contiguous.
pub fn read_csv(path: impl AsRef<Path>) -> Result<Vec<Trace>, BenchError> {
    let text = std::fs::read_to_string(path)?;
    parse_csv(&text)
}

pub(crate) fn parse_csv(text: &str) -> Result<Vec<Trace>, BenchError> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, h)) if h.trim() == CSV_HEADER => {}
        _ => {
            return Err(BenchError::Csv {
                line: 1,
                reason: format!("expected header '{CSV_HEADER}'"),
            })
        }
    }
    let mut traces: Vec<Trace> = Vec::new();
    for (i, line) in lines {
        let line_no = i + 1;
        if line.trim().is_empty() {
            continue;
        }
        let err = |reason: String| BenchError::Csv {
            line: line_no,
            reason,
        };
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 7 {
            return Err(err(format!("expected 7 fields, found {}", fields.len())));
        }
        let float = |s: &str, what: &str| {
            s.trim()
                .parse::<f64>()
                .map_err(|_| err(format!("bad {what} '{s}'")))
        };
        let record = TraceRecord {
            iteration: fields[1]
                .trim()
                .parse()
                .map_err(|_| err(format!("bad iteration '{}'", fields[1])))?,
            objective: float(fields[2], "objective")?,
            constraint_norm: float(fields[3], "constraint_norm")?,
            raw_objective: float(fields[4], "raw_objective")?,
            wall_ns: fields[5]
                .trim()
                .parse()
                .map_err(|_| err(format!("bad wall_ns '{}'", fields[5])))?,
            lyapunov: match fields[6].trim() {
                "" => None,
                s => Some(float(s, "lyapunov")?),
            },
        };
        let name = fields[0];
        match traces.last_mut() {
            Some(t) if t.solver == name => {
                if t.records.last().is_some_and(|r| r.iteration >= record.iteration) {
                    return Err(err("iterations must increase within a solver".into()));
                }
                t.records.push(record)
            }
            _ => {
                if traces.iter().any(|t| t.solver == name) {
                    return Err(err(format!("rows of solver '{name}' are not contiguous")));
                }
                traces.push(Trace {
                    solver: name.to_string(),
                    records: vec![record],
                });
            }
        }
    }
    Ok(traces)
}
