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

use super::config::ErgodicIndex;
use super::SolverError;
use crate::linalg::DenseVector;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// Iterate w = (x, y, λ), the half-step multiplier, the previous iterate and
/// running ergodic averages. The sampling stream lives here so that a run can
/// be stopped and resumed without changing its trajectory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterateState {
    pub k: usize,
    pub x: DenseVector,
    pub y: DenseVector,
    pub lambda: DenseVector,
    pub lambda_half: DenseVector,
    pub x_prev: DenseVector,
    pub y_prev: DenseVector,
    pub lambda_prev: DenseVector,
    pub x_bar: DenseVector,
    pub y_bar: DenseVector,
    pub lambda_bar: DenseVector,
    pub ergodic_count: usize,
    pub ergodic: ErgodicIndex,
    pub(crate) rng: ChaCha8Rng,
}

impl IterateState {
    /// The zero point w₀ = 0.
    pub fn zeros(d1: usize, d2: usize, m: usize, seed: u64, ergodic: ErgodicIndex) -> Self {
        IterateState::from_point(
            DenseVector::zeros(d1),
            DenseVector::zeros(d2),
            DenseVector::zeros(m),
            seed,
            ergodic,
        )
    }

    pub fn from_point(
        x: DenseVector,
        y: DenseVector,
        lambda: DenseVector,
        seed: u64,
        ergodic: ErgodicIndex,
    ) -> Self {
        IterateState {
            k: 0,
            x_prev: x.clone(),
            y_prev: y.clone(),
            lambda_prev: lambda.clone(),
            lambda_half: lambda.clone(),
            x_bar: DenseVector::zeros(x.dim()),
            y_bar: DenseVector::zeros(y.dim()),
            lambda_bar: DenseVector::zeros(lambda.dim()),
            x,
            y,
            lambda,
            ergodic_count: 0,
            ergodic,
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    /// Averaged point (x̄, ȳ); the current iterate before any average exists.
    pub fn ergodic_point(&self) -> (&DenseVector, &DenseVector) {
        if self.ergodic_count == 0 {
            (&self.x, &self.y)
        } else {
            (&self.x_bar, &self.y_bar)
        }
    }

    pub fn ergodic_multiplier(&self) -> &DenseVector {
        if self.ergodic_count == 0 {
            &self.lambda
        } else {
            &self.lambda_bar
        }
    }

    /// Installs w_{k+1} and updates the averages.
    pub(crate) fn advance(
        &mut self,
        x: Vec<f64>,
        y: Vec<f64>,
        lambda_half: Vec<f64>,
        lambda: Vec<f64>,
    ) -> Result<(), SolverError> {
        let finite = |v: &[f64]| v.iter().all(|t| t.is_finite());
        if !(finite(&x) && finite(&y) && finite(&lambda) && finite(&lambda_half)) {
            return Err(SolverError::Diverged {
                iteration: self.k + 1,
            });
        }
        self.x_prev = std::mem::replace(&mut self.x, DenseVector::from_vec_unchecked(x));
        self.y_prev = std::mem::replace(&mut self.y, DenseVector::from_vec_unchecked(y));
        self.lambda_prev =
            std::mem::replace(&mut self.lambda, DenseVector::from_vec_unchecked(lambda));
        self.lambda_half = DenseVector::from_vec_unchecked(lambda_half);
        self.k += 1;
        match self.ergodic {
            ErgodicIndex::Lagged => {
                // Iteration k contributes x_{k−1}, y_k and λ_k.
                if self.k >= 2 {
                    self.ergodic_count += 1;
                    let t = self.ergodic_count as f64;
                    running_mean(self.x_bar.as_mut_slice(), self.x_prev.as_slice(), t);
                    running_mean(self.y_bar.as_mut_slice(), self.y.as_slice(), t);
                    running_mean(self.lambda_bar.as_mut_slice(), self.lambda.as_slice(), t);
                }
            }
            ErgodicIndex::Uniform => {
                self.ergodic_count += 1;
                let t = self.ergodic_count as f64;
                running_mean(self.x_bar.as_mut_slice(), self.x.as_slice(), t);
                running_mean(self.y_bar.as_mut_slice(), self.y.as_slice(), t);
                running_mean(self.lambda_bar.as_mut_slice(), self.lambda.as_slice(), t);
            }
        }
        Ok(())
    }
}

/// bar ← bar + (v − bar)/t
fn running_mean(bar: &mut [f64], v: &[f64], t: f64) {
    for (b, vi) in bar.iter_mut().zip(v) {
        *b += (vi - *b) / t;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn push(st: &mut IterateState, x: f64, y: f64, l: f64) {
        st.advance(vec![x], vec![y], vec![l], vec![l]).unwrap();
    }

    #[test]
    fn lagged_average_indices() {
        let mut st = IterateState::zeros(1, 1, 1, 0, ErgodicIndex::Lagged);
        // x_k = k, y_k = 10k
        for k in 1..=4 {
            push(&mut st, k as f64, 10.0 * k as f64, 0.0);
        }
        // t = 3: x̄ = mean(x₁..x₃) = 2, ȳ = mean(y₂..y₄) = 30.
        assert_eq!(st.ergodic_count, 3);
        assert!((st.x_bar[0] - 2.0).abs() < 1e-15);
        assert!((st.y_bar[0] - 30.0).abs() < 1e-15);
    }

    #[test]
    fn uniform_average_indices() {
        let mut st = IterateState::zeros(1, 1, 1, 0, ErgodicIndex::Uniform);
        for k in 1..=4 {
            push(&mut st, k as f64, 10.0 * k as f64, 1.0);
        }
        assert!((st.x_bar[0] - 2.5).abs() < 1e-15);
        assert!((st.y_bar[0] - 25.0).abs() < 1e-15);
        assert!((st.lambda_bar[0] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn first_iterate_stands_in_for_empty_average() {
        let mut st = IterateState::zeros(1, 1, 1, 0, ErgodicIndex::Lagged);
        push(&mut st, 3.0, 4.0, 0.0);
        assert_eq!(st.ergodic_count, 0);
        let (x, y) = st.ergodic_point();
        assert_eq!((x[0], y[0]), (3.0, 4.0));
    }

    #[test]
    fn non_finite_iterates_are_reported() {
        let mut st = IterateState::zeros(1, 1, 1, 0, ErgodicIndex::Lagged);
        let err = st.advance(vec![f64::NAN], vec![0.0], vec![0.0], vec![0.0]);
        assert!(matches!(err, Err(SolverError::Diverged { iteration: 1 })));
    }
}
