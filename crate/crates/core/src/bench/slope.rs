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

use super::trace::TraceRecord;
use super::BenchError;
use serde::{Deserialize, Serialize};

/// Gaps are clipped below at this value before taking logs.
pub const GAP_FLOOR: f64 = 1e-14;
/// Largest tolerated share of clipped gaps.
pub const MAX_CLIPPED_FRACTION: f64 = 0.05;
/// Minimum number of points in the fitting window.
pub const MIN_POINTS: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SlopeFit {
    pub slope: f64,
    pub intercept: f64,
    pub points: usize,
    pub clipped: usize,
}

/// Least-squares slope of log gap against log t after dropping the first
/// `burn_in` fraction of records.
pub fn rate_slope(
    records: &[TraceRecord],
    f_star: f64,
    rho: f64,
    burn_in: f64,
) -> Result<SlopeFit, BenchError> {
    if !(0.0..1.0).contains(&burn_in) {
        return Err(BenchError::Validation(format!(
            "burn-in fraction {burn_in} outside [0, 1)"
        )));
    }
    let skip = (burn_in * records.len() as f64).floor() as usize;
    fit(&records[skip..], f_star, rho)
}

/// Same fit restricted to iterations in [t_min, t_max].
pub fn rate_slope_window(
    records: &[TraceRecord],
    f_star: f64,
    rho: f64,
    t_min: usize,
    t_max: usize,
) -> Result<SlopeFit, BenchError> {
    let window: Vec<TraceRecord> = records
        .iter()
        .filter(|r| r.iteration >= t_min && r.iteration <= t_max)
        .cloned()
        .collect();
    fit(&window, f_star, rho)
}

fn fit(records: &[TraceRecord], f_star: f64, rho: f64) -> Result<SlopeFit, BenchError> {
    if records.len() < MIN_POINTS {
        return Err(BenchError::InsufficientData {
            needed: MIN_POINTS,
            got: records.len(),
        });
    }
    if records.iter().any(|r| r.iteration == 0) {
        return Err(BenchError::Validation("iteration 0 has no logarithm".into()));
    }
    let mut clipped = 0;
    let pts: Vec<(f64, f64)> = records
        .iter()
        .map(|r| {
            let g = r.gap(f_star, rho);
            let g = if g < GAP_FLOOR {
                clipped += 1;
                GAP_FLOOR
            } else {
                g
            };
            ((r.iteration as f64).ln(), g.ln())
        })
        .collect();
    let fraction = clipped as f64 / pts.len() as f64;
    if fraction > MAX_CLIPPED_FRACTION {
        return Err(BenchError::NonpositiveGap {
            fraction,
            limit: MAX_CLIPPED_FRACTION,
        });
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(BenchError::Validation("all points share one iteration".into()));
    }
    let slope = sxy / sxx;
    Ok(SlopeFit {
        slope,
        intercept: my - slope * mx,
        points: pts.len(),
        clipped,
    })
}
