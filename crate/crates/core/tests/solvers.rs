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

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use scprsm::data::{gen_lasso, Dataset, Design, LassoSpec, TaskKind};
use scprsm::linalg::{DenseMatrix, DenseVector};
use scprsm::problem::{LinearMap, SplittingProblem, Theta1, Theta2};
use scprsm::solvers::{
    reference_solution, x_update_lasso, Algorithm, IterateState, ReferenceOptions, SemiProximal,
    Solver, SolverConfig, SolverError, StepSchedule,
};
use std::sync::Arc;

fn dataset(rows: &[Vec<f64>], r: &[f64]) -> Arc<Dataset> {
    Arc::new(Dataset {
        design: Design::from(DenseMatrix::from_rows(rows).unwrap()),
        response: r.to_vec(),
        kind: TaskKind::Regression,
        ground_truth: None,
        groups: None,
    })
}

fn toy() -> SplittingProblem {
    SplittingProblem::lasso(dataset(&[vec![1.0]], &[1.0]), 0.3).unwrap()
}

fn small_lasso(seed: u64) -> SplittingProblem {
    let spec = LassoSpec {
        n: 30,
        d: 12,
        nnz: 4,
        seed,
        ..LassoSpec::default()
    };
    let (data, mu) = gen_lasso(&spec).unwrap();
    SplittingProblem::lasso(Arc::new(data), mu).unwrap()
}

/// Lasso optimality in reported units: Dᵀ(r − Dy) ∈ μ ∂∥y∥₁.
fn kkt_violation(p: &SplittingProblem, y: &DenseVector) -> f64 {
    let d = &p.data().design;
    let fit = d.apply(y.as_slice());
    let res: Vec<f64> = p.data().response.iter().zip(&fit).map(|(r, f)| r - f).collect();
    let g = d.apply_transpose(&res);
    let mu = p.mu();
    g.iter()
        .zip(y.iter())
        .map(|(gj, yj)| {
            if *yj != 0.0 {
                (gj - mu * yj.signum()).abs()
            } else {
                (gj.abs() - mu).max(0.0)
            }
        })
        .fold(0.0, f64::max)
}

#[test]
fn reference_solution_satisfies_optimality() {
    let p = small_lasso(3);
    let sol = reference_solution(&p, ReferenceOptions::default()).unwrap();
    assert!(sol.converged, "stopped after {} iterations", sol.iterations);
    assert!(kkt_violation(&p, &sol.y) < 1e-8);
    assert!(sol.x.max_abs_diff(&sol.y).unwrap() < 1e-9);
    let f = p.objective(&sol.y, &sol.y).unwrap();
    assert!((f - sol.f_star).abs() < 1e-12);
}

#[test]
fn toy_problem_reaches_closed_form() {
    let p = toy();
    let sol = reference_solution(&p, ReferenceOptions::default()).unwrap();
    assert!((sol.y[0] - 0.7).abs() < 1e-10);
    assert!((sol.lambda[0] + 0.3).abs() < 1e-10);
    // ½(0.3)² + 0.3·0.7
    assert!((sol.f_star - 0.255).abs() < 1e-10);
}

#[test]
fn batch_variants_agree_on_the_solution() {
    let p = small_lasso(5);
    let reference = reference_solution(&p, ReferenceOptions::default()).unwrap();
    for (alg, alpha, gamma, s, t) in [
        (Algorithm::Prsm, 0.0, 0.0, SemiProximal::Zero, SemiProximal::Zero),
        (Algorithm::Scprsm, 0.8, 0.8, SemiProximal::Zero, SemiProximal::Zero),
        (
            Algorithm::SpbScprsm,
            0.5,
            1.2,
            SemiProximal::identity(),
            SemiProximal::IdentityScaled(0.5),
        ),
    ] {
        let cfg = SolverConfig {
            alpha,
            gamma,
            s,
            t,
            ..SolverConfig::new(alg)
        };
        let solver = Solver::new(&p, cfg).unwrap();
        let mut st = solver.init_state();
        solver.run(&mut st, 3000).unwrap();
        let gap = st.y.max_abs_diff(&reference.y).unwrap();
        assert!(gap < 1e-6, "{alg}: gap {gap}");
    }
}

#[test]
fn one_batch_spb_step_by_hand() {
    // n = 1, D = [2], r = [1], μ = 0.5, β = 1, S = s, T = t, start at zero.
    let p = SplittingProblem::lasso(dataset(&[vec![2.0]], &[1.0]), 0.5).unwrap();
    let (alpha, gamma, s, t) = (0.5, 1.1, 0.7, 0.3);
    let cfg = SolverConfig {
        alpha,
        gamma,
        s: SemiProximal::IdentityScaled(s),
        t: SemiProximal::IdentityScaled(t),
        ..SolverConfig::new(Algorithm::SpbScprsm)
    };
    let solver = Solver::new(&p, cfg).unwrap();
    let mut st = solver.init_state();
    solver.step(&mut st).unwrap();
    // x: (4 + 1 + s)x = 2
    let x = 2.0 / (5.0 + s);
    let lh = -alpha * x;
    // y: argmin 0.5|y| + λh·y + ½(x − y)² + (t/2)y²
    let v = (x - lh) / (1.0 + t);
    let y = (v.abs() - 0.5 / (1.0 + t)).max(0.0) * v.signum();
    let l = lh - gamma * (x - y);
    assert!((st.x[0] - x).abs() < 1e-15);
    assert!((st.y[0] - y).abs() < 1e-15);
    assert!((st.lambda_half[0] - lh).abs() < 1e-15);
    assert!((st.lambda[0] - l).abs() < 1e-15);
}

#[test]
fn stochastic_step_matches_closed_form_update() {
    let p = small_lasso(7);
    let cfg = SolverConfig {
        seed: 42,
        ..SolverConfig::default()
    };
    let solver = Solver::new(&p, cfg.clone()).unwrap();
    let mut st = solver.init_state();
    solver.run(&mut st, 5).unwrap();
    // Replay the sampling stream.
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    for _ in 0..5 {
        let _: usize = rng.random_range(0..p.n_samples());
    }
    let i = rng.random_range(0..p.n_samples());
    let before = st.clone();
    let eta = cfg.schedule.eta(6).unwrap();
    let expected = x_update_lasso(&before, &cfg, &p.sample(i).unwrap(), eta).unwrap();
    solver.step(&mut st).unwrap();
    assert!(st.x.max_abs_diff(&expected).unwrap() < 1e-14);
}

#[test]
fn closed_form_lasso_update_by_hand() {
    let p = SplittingProblem::lasso(dataset(&[vec![1.0, 2.0]], &[3.0]), 0.1).unwrap();
    let mut st = IterateState::zeros(2, 2, 2, 0, Default::default());
    st.x = DenseVector::new(vec![1.0, 0.0]).unwrap();
    st.y = DenseVector::new(vec![0.5, 0.5]).unwrap();
    st.lambda = DenseVector::new(vec![0.1, -0.1]).unwrap();
    let cfg = SolverConfig::default(); // β = 1, S = I
    let eta = 0.5;
    let got = x_update_lasso(&st, &cfg, &p.sample(0).unwrap(), eta).unwrap();
    // residual coefficient r − dᵀx = 2; denominator 1 + 1 + 2 = 4
    let want = [(2.0 + 0.1 + 0.5 + 3.0) / 4.0, (4.0 - 0.1 + 0.5) / 4.0];
    assert!((got[0] - want[0]).abs() < 1e-15);
    assert!((got[1] - want[1]).abs() < 1e-15);
}

#[test]
fn dense_and_isotropic_paths_agree() {
    let data = small_lasso(11).data().clone();
    let data = Arc::new(data);
    let d = data.n_features();
    let mu = 0.05;
    let iso = SplittingProblem::new(
        LinearMap::scaled_identity(d, 2.0),
        LinearMap::scaled_identity(d, -1.0),
        DenseVector::zeros(d),
        data.clone(),
        Theta1::LeastSquares { ridge: 0.0 },
        Theta2::L1,
        mu,
    )
    .unwrap();
    let dense = SplittingProblem::new(
        LinearMap::Dense(DenseMatrix::scaled_identity(d, 2.0)),
        LinearMap::scaled_identity(d, -1.0),
        DenseVector::zeros(d),
        data,
        Theta1::LeastSquares { ridge: 0.0 },
        Theta2::L1,
        mu,
    )
    .unwrap();
    let cfg = SolverConfig {
        s: SemiProximal::IdentityScaled(0.5),
        ..SolverConfig::default()
    };
    let explicit = SolverConfig {
        s: SemiProximal::Explicit(DenseMatrix::scaled_identity(d, 0.5)),
        ..cfg.clone()
    };
    let a = Solver::new(&iso, cfg).unwrap();
    let b = Solver::new(&dense, explicit).unwrap();
    let (mut sa, mut sb) = (a.init_state(), b.init_state());
    a.run(&mut sa, 50).unwrap();
    b.run(&mut sb, 50).unwrap();
    assert!(sa.x.max_abs_diff(&sb.x).unwrap() < 1e-12);
    assert!(sa.lambda.max_abs_diff(&sb.lambda).unwrap() < 1e-12);
}

#[test]
fn same_seed_same_trajectory() {
    let p = small_lasso(2);
    let run = |seed| {
        let solver = Solver::new(
            &p,
            SolverConfig {
                seed,
                ..SolverConfig::default()
            },
        )
        .unwrap();
        let mut st = solver.init_state();
        solver.run(&mut st, 200).unwrap();
        st
    };
    assert_eq!(run(9), run(9));
    assert_ne!(run(9).x, run(10).x);
}

#[test]
fn huge_steps_are_reported_as_divergence() {
    let p = small_lasso(1);
    let cfg = SolverConfig {
        s: SemiProximal::Zero,
        schedule: StepSchedule::Constant { eta: 1e300 },
        ..SolverConfig::default()
    };
    let solver = Solver::new(&p, cfg).unwrap();
    let mut st = solver.init_state();
    let err = solver.run(&mut st, 100_000).unwrap_err();
    assert!(matches!(err, SolverError::Diverged { .. }), "{err}");
}

#[test]
fn invalid_configuration_is_rejected() {
    let p = toy();
    let cfg = SolverConfig {
        alpha: 0.0,
        gamma: 1.7,
        ..SolverConfig::default()
    };
    assert!(matches!(Solver::new(&p, cfg), Err(SolverError::InvalidConfig(v)) if v.len() == 1));
    let wrong_dim = SolverConfig {
        s: SemiProximal::Explicit(DenseMatrix::identity(3)),
        ..SolverConfig::default()
    };
    assert!(matches!(
        Solver::new(&p, wrong_dim),
        Err(SolverError::DimensionMismatch { what: "S", .. })
    ));
}

#[test]
fn logistic_batch_solver_reaches_stationarity() {
    let data = dataset(
        &[vec![1.0, 0.5], vec![-0.3, 1.0], vec![0.8, -1.2], vec![-1.0, -0.2]],
        &[1.0, 1.0, -1.0, -1.0],
    );
    let p = SplittingProblem::logistic(data, 0.01, 0.0).unwrap();
    let sol = reference_solution(&p, ReferenceOptions::default()).unwrap();
    assert!(sol.converged);
    // mean gradient + μ·sign(y) = 0 on the support.
    let g = p.mean_gradient(&sol.y).unwrap();
    for j in 0..2 {
        if sol.y[j] != 0.0 {
            assert!((g[j] + 0.01 * sol.y[j].signum()).abs() < 1e-8);
        } else {
            assert!(g[j].abs() <= 0.01 + 1e-8);
        }
    }
}
