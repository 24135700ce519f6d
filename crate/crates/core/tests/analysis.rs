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

use proptest::prelude::*;
use scprsm::analysis::{
    build_matrices, c1, c2, c3_tau, certificate_for, check_mthm_identity, compute_constants,
    contraction_margin, delta_interval, lyapunov_trace, summarize, AnalysisError, Regime,
};
use scprsm::data::{Dataset, Design, TaskKind};
use scprsm::linalg::{DenseMatrix, EPS_PSD};
use scprsm::problem::SplittingProblem;
use scprsm::solvers::{
    gamma_upper_bound, reference_solution, Algorithm, ReferenceOptions, SemiProximal, Solver,
    SolverConfig,
};
use std::sync::Arc;

fn matrix(rows: usize, cols: usize, vals: &[f64]) -> DenseMatrix {
    DenseMatrix::new(rows, cols, vals[..rows * cols].to_vec()).unwrap()
}

/// Random PSD matrix LLᵀ.
fn psd(dim: usize, vals: &[f64]) -> DenseMatrix {
    let l = matrix(dim, dim, vals);
    l.matmul(&l.transpose()).unwrap()
}

fn region() -> impl Strategy<Value = (f64, f64, f64)> {
    (0.0..0.999f64, 0.001..0.999f64, 0.05..20.0f64).prop_map(|(a, frac, beta)| {
        let ub = gamma_upper_bound(a).unwrap();
        (a, frac * ub, beta)
    })
}

proptest! {
    #[test]
    fn mthm_identity_holds_in_region(
        (a, g, beta) in region(),
        m in 1usize..4,
        d2 in 1usize..4,
        vals in prop::collection::vec(-2.0..2.0f64, 16),
    ) {
        let b = matrix(m, d2, &vals);
        let cert = build_matrices(a, g, beta, &b, &DenseMatrix::identity(1), &DenseMatrix::zeros(d2, d2)).unwrap();
        prop_assert!(check_mthm_identity(&cert));
    }

    #[test]
    fn lemma_two_matrix_inequality(
        a in 0.0..0.999f64,
        g in 0.001..0.999f64,
        beta in 0.05..20.0f64,
        vals in prop::collection::vec(-2.0..2.0f64, 9),
    ) {
        let b = matrix(3, 3, &vals);
        let z = DenseMatrix::zeros(3, 3);
        let mut cert = build_matrices(a, g, beta, &b, &z, &z).unwrap();
        compute_constants(&mut cert, None).unwrap();
        let margin = contraction_margin(&cert, 1.0).unwrap();
        prop_assert!(margin >= -EPS_PSD, "margin {margin}");
    }

    #[test]
    fn g_is_symmetric_psd(
        (a, g, beta) in region(),
        vals in prop::collection::vec(-2.0..2.0f64, 16),
    ) {
        let b = matrix(2, 2, &vals);
        let s = psd(2, &vals[4..]);
        let t = psd(2, &vals[8..]);
        let cert = build_matrices(a, g, beta, &b, &s, &t).unwrap();
        prop_assert!(cert.g.check_symmetric().is_ok());
        prop_assert!(cert.g.min_eigenvalue().unwrap() >= -EPS_PSD * cert.g.max_abs().max(1.0));
    }
}

#[test]
fn c1_shrinks_near_gamma_one() {
    let z = DenseMatrix::zeros(1, 1);
    let b = DenseMatrix::identity(1);
    let mut cert = build_matrices(0.0, 0.999, 1.0, &b, &z, &z).unwrap();
    compute_constants(&mut cert, None).unwrap();
    let small = contraction_margin(&cert, 1.0).unwrap();
    assert!(small >= -EPS_PSD);
    assert!(c1(0.0, 0.999) < 1e-3);
}

/// Every constant lies in (0, 1) on a midpoint grid over the region, and the
/// δ-interval is nonempty exactly below the γ bound.
#[test]
fn constants_on_grid() {
    for i in 0..50 {
        let a = (i as f64 + 0.5) / 50.0;
        let ub = gamma_upper_bound(a).unwrap();
        for j in 0..50 {
            let g = (j as f64 + 0.5) / 50.0 * ub;
            let in_unit = |v: f64| v > 0.0 && v < 1.0;
            assert!(in_unit(c2(a)));
            if g < 1.0 {
                assert!(in_unit(c1(a, g)), "c1({a}, {g})");
            } else if g > 1.0 {
                let (lo, hi) = delta_interval(a, g).expect("interval inside region");
                let (c3, tau) = c3_tau(a, g, 0.5 * (lo + hi));
                assert!(in_unit(c3) && in_unit(tau), "({a}, {g}): c3 {c3}, tau {tau}");
            }
            // Beyond the bound the interval closes.
            let outside = ub + (j as f64 + 0.5) / 50.0;
            assert!(delta_interval(a, outside).is_none());
        }
    }
}

fn toy() -> SplittingProblem {
    let data = Arc::new(Dataset {
        design: Design::from(DenseMatrix::identity(1)),
        response: vec![1.0],
        kind: TaskKind::Regression,
        ground_truth: None,
        groups: None,
    });
    SplittingProblem::lasso(data, 0.3).unwrap()
}

fn batch_descent(alpha: f64, gamma: f64, s: f64, t: f64) -> usize {
    let p = toy();
    let sol = reference_solution(&p, ReferenceOptions::default()).unwrap();
    let cfg = SolverConfig {
        alpha,
        gamma,
        s: SemiProximal::IdentityScaled(s),
        t: SemiProximal::IdentityScaled(t),
        ..SolverConfig::new(Algorithm::SpbScprsm)
    };
    let solver = Solver::new(&p, cfg).unwrap();
    let cert = certificate_for(&solver).unwrap();
    let report = lyapunov_trace(&solver, &cert, &sol.x, &sol.y, &sol.lambda, 500, 1e-10).unwrap();
    assert!(report.values.iter().all(|v| v.is_finite() && *v >= 0.0));
    report.violations
}

#[test]
fn batch_potential_descends_in_every_regime() {
    assert_eq!(batch_descent(0.9, 0.9, 0.0, 0.0), 0);
    assert_eq!(batch_descent(0.5, 0.7, 0.5, 0.2), 0);
    assert_eq!(batch_descent(0.5, 1.0, 0.5, 0.2), 0);
    assert_eq!(batch_descent(0.2, 1.3, 0.0, 0.3), 0);
}

#[test]
fn potential_is_zero_at_the_solution() {
    let p = toy();
    let sol = reference_solution(&p, ReferenceOptions::default()).unwrap();
    let solver = Solver::new(&p, SolverConfig::new(Algorithm::SpbScprsm)).unwrap();
    let cert = certificate_for(&solver).unwrap();
    let pot = scprsm::analysis::Potential::new(&cert, &sol.x, &sol.y, &sol.lambda).unwrap();
    let st = scprsm::solvers::IterateState::from_point(
        sol.x.clone(),
        sol.y.clone(),
        sol.lambda.clone(),
        0,
        Default::default(),
    );
    assert!(pot.value(&p, &st).unwrap() < 1e-20);
}

#[test]
fn mismatched_certificate_is_rejected() {
    let p = toy();
    let sol = reference_solution(&p, ReferenceOptions::default()).unwrap();
    let solver = Solver::new(&p, SolverConfig::new(Algorithm::SpbScprsm)).unwrap();
    let other = Solver::new(
        &p,
        SolverConfig {
            alpha: 0.5,
            ..SolverConfig::new(Algorithm::SpbScprsm)
        },
    )
    .unwrap();
    let cert = certificate_for(&other).unwrap();
    let err = lyapunov_trace(&solver, &cert, &sol.x, &sol.y, &sol.lambda, 10, 0.0);
    assert!(matches!(err, Err(AnalysisError::ConfigMismatch(_))));
    let sto = Solver::new(&p, SolverConfig::default()).unwrap();
    let cert = certificate_for(&sto).unwrap();
    assert!(lyapunov_trace(&sto, &cert, &sol.x, &sol.y, &sol.lambda, 10, 0.0).is_err());
}

#[test]
fn summary_serializes() {
    let z = DenseMatrix::zeros(1, 1);
    let mut cert = build_matrices(0.2, 1.3, 1.0, &DenseMatrix::identity(1), &z, &z).unwrap();
    let summary = summarize(&mut cert).unwrap();
    assert_eq!(summary.regime, Regime::GammaGt1);
    assert!(summary.verified);
    let json = serde_json::to_string(&summary).unwrap();
    assert!(json.contains("\"regime\":\"gamma_gt_1\""));

    // c2 = (1 − α)/(1 + α) reaches 1 at α = 0, the closed end of the range.
    let mut edge = build_matrices(0.0, 1.5, 1.0, &DenseMatrix::identity(1), &z, &z).unwrap();
    let summary = summarize(&mut edge).unwrap();
    assert_eq!(summary.c2, Some(1.0));
    assert!(!summary.constants_in_unit_interval);
}
