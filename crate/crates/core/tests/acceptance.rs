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

//! Acceptance suite: one test per criterion, each printing a single
//! `[NN] <name>: PASS|FAIL|SOFT PASS|SOFT FAIL|SKIP (details)` line.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use scprsm::analysis::{
    build_matrices, c2, c3_tau, certificate_for, compute_constants, contraction_margin,
    delta_interval, lyapunov_trace, mthm_identity_error,
};
use scprsm::bench::{rate_slope_window, run_experiment, ExperimentSpec, NamedSolver, ProblemSpec};
use scprsm::data::{
    gen_group_lasso, gen_lasso, gen_logistic, read_libsvm, read_libsvm_str, write_libsvm, Dataset,
    Design, GroupLassoSpec, LassoSpec, LibsvmOptions, LogisticSpec, TaskKind,
};
use scprsm::linalg::{block_soft_threshold, soft_threshold, DenseMatrix, DenseVector, GroupPartition};
use scprsm::problem::SplittingProblem;
use scprsm::solvers::{
    gamma_upper_bound, reference_solution, solve_x_subproblem, x_update_lasso, x_update_logistic,
    Algorithm, IterateState, ReferenceOptions, SemiProximal, Solver, SolverConfig, SolverError,
    StepSchedule,
};
use std::sync::{Arc, Mutex, MutexGuard};
use std::time::{Duration, Instant};

/// Criteria run one at a time so that runtime budgets are measured alone.
static SERIAL: Mutex<()> = Mutex::new(());

fn serial() -> MutexGuard<'static, ()> {
    SERIAL.lock().unwrap_or_else(|e| e.into_inner())
}

/// Writes to the raw stderr handle so the line survives libtest's capture.
fn emit(line: String) {
    use std::io::Write;
    let _ = writeln!(std::io::stderr().lock(), "{line}");
}

fn report(id: u32, name: &str, ok: bool, detail: String) {
    let verdict = if ok { "PASS" } else { "FAIL" };
    emit(format!("[{id:02}] {name}: {verdict} ({detail})"));
    assert!(ok, "criterion {id} ({name}) failed: {detail}");
}

fn within(elapsed: Duration, budget_s: f64) -> bool {
    elapsed.as_secs_f64() < budget_s
}

fn sim1(seed: u64) -> SplittingProblem {
    let (data, mu) = gen_lasso(&LassoSpec::simulation1(seed)).unwrap();
    SplittingProblem::lasso(Arc::new(data), mu).unwrap()
}

fn uniform(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    rng.random_range(lo..hi)
}

fn random_vec(rng: &mut ChaCha8Rng, n: usize, scale: f64) -> DenseVector {
    DenseVector::new((0..n).map(|_| uniform(rng, -scale, scale)).collect()).unwrap()
}

fn random_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> DenseMatrix {
    DenseMatrix::new(rows, cols, (0..rows * cols).map(|_| uniform(rng, -2.0, 2.0)).collect()).unwrap()
}

#[test]
fn c01_reduction_to_stochastic_admm() {
    let _g = serial();
    let start = Instant::now();
    let p = sim1(0);
    let admm = SolverConfig {
        seed: 17,
        ..SolverConfig::new(Algorithm::StoAdmm)
    };
    let spb = SolverConfig {
        algorithm: Algorithm::StoSpbScprsm,
        alpha: 0.0,
        gamma: 1.0,
        s: SemiProximal::Zero,
        t: SemiProximal::Zero,
        ..admm.clone()
    };
    let (a, b) = (Solver::new(&p, admm).unwrap(), Solver::new(&p, spb).unwrap());
    let (mut sa, mut sb) = (a.init_state(), b.init_state());
    let mut worst: f64 = 0.0;
    for _ in 0..1000 {
        a.step(&mut sa).unwrap();
        b.step(&mut sb).unwrap();
        for (u, v) in [(&sa.x, &sb.x), (&sa.y, &sb.y), (&sa.lambda, &sb.lambda)] {
            worst = worst.max(u.max_abs_diff(v).unwrap());
        }
    }
    let t = start.elapsed();
    report(
        1,
        "reduction identity",
        worst <= 1e-12 && within(t, 5.0),
        format!("max deviation {worst:.3e} over 1000 iterations, {:.2}s", t.as_secs_f64()),
    );
}

/// Generic solve of the linearized x-subproblem at a random state.
fn generic_x(p: &SplittingProblem, cfg: &SolverConfig, st: &IterateState, i: usize, eta: f64) -> DenseVector {
    let sample = p.sample(i).unwrap();
    let g = p.theta1_subgradient(&st.x, &sample).unwrap();
    solve_x_subproblem(p, cfg.beta, &cfg.s, Some(eta), &g, &st.x, &st.y, &st.lambda).unwrap()
}

#[test]
fn c02_closed_form_updates_match_generic_solve() {
    let _g = serial();
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let small = |n, d| LassoSpec {
        n,
        d,
        nnz: 5,
        ..LassoSpec::simulation1(5)
    };
    let (lasso_data, mu) = gen_lasso(&small(30, 40)).unwrap();
    let lasso = SplittingProblem::lasso(Arc::new(lasso_data), mu).unwrap();
    let (group_data, gmu) = gen_group_lasso(&GroupLassoSpec {
        n: 30,
        max_block: 8,
        ..GroupLassoSpec::default()
    })
    .unwrap();
    let group = SplittingProblem::group_lasso(Arc::new(group_data), gmu).unwrap();
    let logistic_data = gen_logistic(&LogisticSpec {
        n: 30,
        d: 40,
        nnz: 5,
        ..LogisticSpec::default()
    })
    .unwrap();
    let logistic = SplittingProblem::logistic(Arc::new(logistic_data), 1.0, 0.0).unwrap();

    let mut worst: f64 = 0.0;
    for (which, p) in [("lasso", &lasso), ("group", &group), ("logistic", &logistic)] {
        for _ in 0..50 {
            let d = p.d1();
            let mut st = IterateState::zeros(d, d, d, 0, Default::default());
            st.x = random_vec(&mut rng, d, 2.0);
            st.y = random_vec(&mut rng, d, 2.0);
            st.lambda = random_vec(&mut rng, d, 2.0);
            let cfg = SolverConfig {
                beta: uniform(&mut rng, 0.1, 10.0),
                s: SemiProximal::IdentityScaled(uniform(&mut rng, 0.0, 3.0)),
                ..SolverConfig::default()
            };
            let eta = 10f64.powf(uniform(&mut rng, -4.0, 0.0));
            let i = rng.random_range(0..p.n_samples());
            let sample = p.sample(i).unwrap();
            let closed = match which {
                "logistic" => x_update_logistic(&st, &cfg, &sample, 0.0, eta).unwrap(),
                _ => x_update_lasso(&st, &cfg, &sample, eta).unwrap(),
            };
            let generic = generic_x(p, &cfg, &st, i, eta);
            let scale = generic.max_abs().max(1.0);
            worst = worst.max(closed.max_abs_diff(&generic).unwrap() / scale);
        }
    }
    let t = start.elapsed();
    report(
        2,
        "closed-form x-updates",
        worst <= 1e-10 && within(t, 2.0),
        format!("max scaled deviation {worst:.3e} over 150 states, {:.2}s", t.as_secs_f64()),
    );
}

/// (α, γ, β) drawn inside the admissible region.
fn draw_region(rng: &mut ChaCha8Rng, gamma_below_one: bool) -> (f64, f64, f64) {
    let a = uniform(rng, 0.0, 0.999);
    let hi = if gamma_below_one { 1.0 } else { gamma_upper_bound(a).unwrap() };
    let g = uniform(rng, 1e-3, 1.0 - 1e-3) * hi;
    let beta = 10f64.powf(uniform(rng, -1.0, 1.0));
    (a, g, beta)
}

#[test]
fn c03_mthm_identity() {
    let _g = serial();
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let (a, g, beta) = draw_region(&mut rng, false);
        let (m, d2) = (rng.random_range(1..5), rng.random_range(1..5));
        let b = random_matrix(&mut rng, m, d2);
        let cert = build_matrices(a, g, beta, &b, &DenseMatrix::identity(2), &DenseMatrix::zeros(d2, d2)).unwrap();
        worst = worst.max(mthm_identity_error(&cert));
    }
    let t = start.elapsed();
    report(
        3,
        "MtHM identity",
        worst <= 1e-10 && within(t, 2.0),
        format!("max error {worst:.3e} over 100 draws, {:.2}s", t.as_secs_f64()),
    );
}

#[test]
fn c04_contraction_inequality() {
    let _g = serial();
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut worst = f64::INFINITY;
    let mut adversarial_failures = 0;
    for _ in 0..100 {
        let (a, g, beta) = draw_region(&mut rng, true);
        let b = random_matrix(&mut rng, 3, 3);
        let z = DenseMatrix::zeros(3, 3);
        let mut cert = build_matrices(a, g, beta, &b, &z, &z).unwrap();
        compute_constants(&mut cert, None).unwrap();
        worst = worst.min(contraction_margin(&cert, 1.0).unwrap());
        if contraction_margin(&cert, 1.5).unwrap() < -1e-10 {
            adversarial_failures += 1;
        }
    }
    let t = start.elapsed();
    report(
        4,
        "contraction certificate",
        worst >= -1e-10 && adversarial_failures >= 1 && within(t, 5.0),
        format!(
            "min eigenvalue {worst:.3e}; 1.5*c1 fails on {adversarial_failures}/100 draws; {:.2}s",
            t.as_secs_f64()
        ),
    );
}

#[test]
fn c05_constants_region() {
    let _g = serial();
    let start = Instant::now();
    let in_unit = |v: f64| v > 0.0 && v < 1.0;
    let mut bad = Vec::new();
    let mut mismatches = 0;
    for i in 0..50 {
        let a = (i as f64 + 0.5) / 50.0;
        let ub = gamma_upper_bound(a).unwrap();
        for j in 0..50 {
            let g = (j as f64 + 0.5) / 50.0 * ub;
            let mut cert = build_matrices(a, g, 1.0, &DenseMatrix::identity(1), &DenseMatrix::zeros(1, 1), &DenseMatrix::zeros(1, 1)).unwrap();
            compute_constants(&mut cert, None).unwrap();
            let present = [cert.c1, cert.c2, cert.c3, cert.tau];
            if !present.iter().flatten().all(|c| in_unit(*c)) || !in_unit(c2(a)) {
                bad.push((a, g));
            }
            // Nonemptiness of the δ-interval against the γ bound on (1, 2).
            let probe = 1.0 + (j as f64 + 0.5) / 50.0;
            if delta_interval(a, probe).is_some() != (probe < ub) {
                mismatches += 1;
            }
        }
    }
    let t = start.elapsed();
    // Closed end of the α range: c₂ = (1 − α)/(1 + α) is exactly 1 at α = 0.
    let edge = c2(0.0);
    let (_, tau_edge) = c3_tau(0.0, 1.5, 0.75);
    report(
        5,
        "constants region",
        bad.is_empty() && mismatches == 0 && within(t, 2.0),
        format!(
            "midpoint 50x50 grid: {} points outside (0,1), {mismatches} interval mismatches; \
             note c2(alpha=0) = {edge}, tau(0, 1.5) = {tau_edge:.4}; {:.2}s",
            bad.len(),
            t.as_secs_f64()
        ),
    );
}

#[test]
fn c06_multiplier_algebra() {
    let _g = serial();
    let p = sim1(1);
    let mut worst: f64 = 0.0;
    for (alpha, gamma) in [(0.9, 0.9), (0.3, 1.2)] {
        let cfg = SolverConfig {
            alpha,
            gamma,
            seed: 6,
            ..SolverConfig::default()
        };
        let beta = cfg.beta;
        let solver = Solver::new(&p, cfg).unwrap();
        let mut st = solver.init_state();
        for _ in 0..500 {
            solver.step(&mut st).unwrap();
            // B = −I: λ_k − λ_{k+1} = (α+γ)β r_{k+1} − αβ(y_k − y_{k+1})
            let r = p.constraint_residual(&st.x, &st.y).unwrap();
            for j in 0..p.m() {
                let lhs = st.lambda_prev[j] - st.lambda[j];
                let rhs = (alpha + gamma) * beta * r[j] - alpha * beta * (st.y_prev[j] - st.y[j]);
                worst = worst.max((lhs - rhs).abs());
            }
        }
    }
    report(
        6,
        "multiplier algebra",
        worst <= 1e-10,
        format!("max deviation {worst:.3e} over 2 x 500 iterations"),
    );
}

/// Ergodic-gap slopes over [10³, 5·10⁴] for one solver configuration.
fn slopes(problem: ProblemSpec, config: SolverConfig, seeds: u64) -> Vec<Result<f64, String>> {
    (0..seeds)
        .map(|s| {
            let spec = ExperimentSpec {
                problem: ProblemSpec {
                    seed: s,
                    ..problem.clone()
                },
                solvers: vec![NamedSolver::new(SolverConfig {
                    seed: s,
                    max_iters: 50_000,
                    ..config.clone()
                })],
                cadence: 50,
                ..ExperimentSpec::default()
            };
            let result = run_experiment(&spec).map_err(|e| e.to_string())?;
            let f_star = result.manifest.f_star.unwrap();
            rate_slope_window(&result.traces[0].records, f_star, spec.rho, 1_000, 50_000)
                .map(|f| f.slope)
                .map_err(|e| e.to_string())
        })
        .collect()
}

fn mean_slope(results: &[Result<f64, String>]) -> Result<f64, String> {
    let vals: Vec<f64> = results.iter().cloned().collect::<Result<_, _>>()?;
    Ok(vals.iter().sum::<f64>() / vals.len() as f64)
}

#[test]
fn c07_rate_under_power_schedule() {
    let _g = serial();
    let start = Instant::now();
    // η_k = C/√k with C = n·η₀ = 200·1e−5.
    let cfg = SolverConfig {
        schedule: StepSchedule::Power { c: 2e-3, p: 0.5 },
        ..SolverConfig::default()
    };
    let results = slopes(ProblemSpec::default(), cfg, 5);
    let t = start.elapsed();
    let mean = mean_slope(&results);
    let ok = matches!(mean, Ok(s) if (-0.75..=-0.35).contains(&s)) && within(t, 120.0);
    report(
        7,
        "O(1/sqrt t) rate",
        ok,
        format!("mean slope {mean:?}, per seed {results:?}, {:.1}s", t.as_secs_f64()),
    );
}

#[test]
fn c08_rate_under_strong_convexity() {
    let _g = serial();
    let start = Instant::now();
    let mu_sc = 0.1;
    let cfg = SolverConfig {
        schedule: StepSchedule::StronglyConvex { mu_sc },
        ..SolverConfig::default()
    };
    let normalized = ProblemSpec {
        ridge: mu_sc,
        normalize_rows: Some(true),
        ..ProblemSpec::default()
    };
    let results = slopes(normalized, cfg.clone(), 5);
    let t = start.elapsed();
    let mean = mean_slope(&results);

    // Diagnostic: the unnormalized design, where η₁ = 10 overshoots.
    let (raw_data, mu) = gen_lasso(&LassoSpec::simulation1(0)).unwrap();
    let raw = SplittingProblem::ridge_lasso(Arc::new(raw_data), mu, mu_sc).unwrap();
    let solver = Solver::new(&raw, SolverConfig { max_iters: 50_000, ..cfg }).unwrap();
    let mut st = solver.init_state();
    let raw_outcome = match solver.run(&mut st, 50_000) {
        Err(SolverError::Diverged { iteration }) => format!("raw design diverges at iteration {iteration}"),
        Err(e) => format!("raw design fails: {e}"),
        Ok(()) if st.x.norm() > 1e10 => format!("raw design blows up to |x| = {:.3e}", st.x.norm()),
        Ok(()) => format!("raw design finishes with |x| = {:.3e}", st.x.norm()),
    };
    let ok = matches!(mean, Ok(s) if (-1.15..=-0.70).contains(&s)) && within(t, 120.0);
    report(
        8,
        "O(log t / t) rate",
        ok,
        format!(
            "row-normalized design: mean slope {mean:?}, per seed {results:?}; {raw_outcome}; {:.1}s",
            t.as_secs_f64()
        ),
    );
}

#[test]
fn c09_ordering_against_stochastic_admm() {
    let _g = serial();
    let mut gaps = [0.0f64; 2];
    for seed in 0..5 {
        let spb = SolverConfig {
            seed,
            max_iters: 10_000,
            ..SolverConfig::default()
        };
        let admm = SolverConfig {
            algorithm: Algorithm::StoAdmm,
            s: SemiProximal::Zero,
            ..spb.clone()
        };
        let spec = ExperimentSpec {
            problem: ProblemSpec {
                seed,
                ..ProblemSpec::default()
            },
            solvers: vec![NamedSolver::new(spb), NamedSolver::new(admm)],
            cadence: 10_000,
            ..ExperimentSpec::default()
        };
        let result = run_experiment(&spec).unwrap();
        let f_star = result.manifest.f_star.unwrap();
        for (k, t) in result.traces.iter().enumerate() {
            gaps[k] += t.at(10_000).unwrap().gap(f_star, spec.rho) / 5.0;
        }
    }
    let ok = gaps[0] <= gaps[1];
    // Soft criterion: reported, never fails the suite.
    emit(format!(
        "[09] ordering at 10^4 iterations: {} (mean gap sto_spb_scprsm {:.6e}, sto_admm {:.6e}, ratio {:.6})",
        if ok { "SOFT PASS" } else { "SOFT FAIL" },
        gaps[0],
        gaps[1],
        gaps[0] / gaps[1]
    ));
}

/// Coarse-to-fine grid search of a convex function over [−3, 3]³, ending
/// at spacing 1e−3.
fn grid_argmin(f: impl Fn(&[f64; 3]) -> f64) -> [f64; 3] {
    let mut center = [0.0; 3];
    let mut half: f64 = 3.0;
    for h in [0.1f64, 0.01, 0.001] {
        let steps = (half / h).round() as i64;
        let mut best = (f64::INFINITY, center);
        for i in -steps..=steps {
            for j in -steps..=steps {
                for k in -steps..=steps {
                    let u = [
                        center[0] + i as f64 * h,
                        center[1] + j as f64 * h,
                        center[2] + k as f64 * h,
                    ];
                    let v = f(&u);
                    if v < best.0 {
                        best = (v, u);
                    }
                }
            }
        }
        center = best.1;
        half = 20.0 * h;
    }
    center
}

#[test]
fn c10_prox_and_gradient_oracles() {
    let _g = serial();
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let mut prox_worst: f64 = 0.0;
    let partitions = [
        GroupPartition::singletons(3),
        GroupPartition::contiguous(&[3]).unwrap(),
        GroupPartition::new(vec![vec![0, 2], vec![1]], 3).unwrap(),
    ];
    for trial in 0..6 {
        let v = random_vec(&mut rng, 3, 2.0);
        let a = uniform(&mut rng, 0.05, 1.5);
        let blocks = &partitions[trial % 3];
        let got = if trial % 3 == 0 {
            soft_threshold(&v, a).unwrap()
        } else {
            block_soft_threshold(&v, blocks, a).unwrap()
        };
        let objective = |u: &[f64; 3]| {
            let reg: f64 = blocks
                .groups()
                .iter()
                .map(|g| g.iter().map(|&i| u[i] * u[i]).sum::<f64>().sqrt())
                .sum();
            a * reg + 0.5 * (0..3).map(|i| (u[i] - v[i]).powi(2)).sum::<f64>()
        };
        let best = grid_argmin(objective);
        for i in 0..3 {
            prox_worst = prox_worst.max((best[i] - got[i]).abs());
        }
    }

    let data = gen_logistic(&LogisticSpec {
        n: 20,
        d: 6,
        nnz: 3,
        ..LogisticSpec::default()
    })
    .unwrap();
    let p = SplittingProblem::logistic(Arc::new(data), 1.0, 0.3).unwrap();
    let mut grad_worst: f64 = 0.0;
    for k in 0..20 {
        let x = random_vec(&mut rng, 6, 3.0);
        let s = p.sample(k % p.n_samples()).unwrap();
        let g = p.theta1_subgradient(&x, &s).unwrap();
        let h = 1e-5;
        let fd: Vec<f64> = (0..6)
            .map(|j| {
                let mut up = x.clone().into_vec();
                let mut down = up.clone();
                up[j] += h;
                down[j] -= h;
                let f = |w: Vec<f64>| p.sample_loss(&DenseVector::new(w).unwrap(), &s).unwrap();
                (f(up) - f(down)) / (2.0 * h)
            })
            .collect();
        let fd = DenseVector::new(fd).unwrap();
        let rel = g.sub(&fd).unwrap().norm() / g.norm().max(1e-300);
        grad_worst = grad_worst.max(rel);
    }
    report(
        10,
        "prox and gradient oracles",
        prox_worst <= 2e-3 && grad_worst <= 1e-6,
        format!("prox vs grid search {prox_worst:.2e}; logistic gradient vs finite differences {grad_worst:.2e} relative"),
    );
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

#[test]
fn c11_batch_lyapunov_descent() {
    let _g = serial();
    let p = toy();
    let w_star = reference_solution(&p, ReferenceOptions::default()).unwrap();
    let mut details = Vec::new();
    let mut main_ok = false;
    for (alpha, gamma) in [(0.9, 0.9), (0.5, 1.0), (0.2, 1.3)] {
        let cfg = SolverConfig {
            alpha,
            gamma,
            s: SemiProximal::Zero,
            t: SemiProximal::Zero,
            ..SolverConfig::new(Algorithm::SpbScprsm)
        };
        let solver = Solver::new(&p, cfg).unwrap();
        let cert = certificate_for(&solver).unwrap();
        let rep = lyapunov_trace(&solver, &cert, &w_star.x, &w_star.y, &w_star.lambda, 500, 1e-10).unwrap();
        if (alpha, gamma) == (0.9, 0.9) {
            main_ok = rep.violations == 0;
        }
        details.push(format!(
            "alpha {alpha} gamma {gamma}: {} violations, Phi_1 {:.3e}, Phi_500 {:.3e}",
            rep.violations, rep.values[0], rep.values[499]
        ));
    }
    report(11, "batch Lyapunov descent", main_ok, details.join("; "));
}

fn libsvm_bytes(data: &Dataset) -> Vec<u8> {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("d.svm");
    write_libsvm(&path, data).unwrap();
    std::fs::read(path).unwrap()
}

fn same_dataset(a: &Dataset, b: &Dataset) -> bool {
    a.response.iter().zip(&b.response).all(|(u, v)| u.to_bits() == v.to_bits())
        && a.response.len() == b.response.len()
        && a.design.same_values(&b.design)
}

#[test]
fn c12_data_layer() {
    let _g = serial();
    let mut notes = Vec::new();
    let mut ok = true;

    // Round trip on dense and sparse data.
    let (lasso, _) = gen_lasso(&LassoSpec::simulation1(12)).unwrap();
    let sparse = read_libsvm_str("1 1:0.1 7:-3e-17\n-2.5\n0.3 2:1e300 3:0.30000000000000004\n", LibsvmOptions::default()).unwrap();
    for (name, data) in [("dense", &lasso), ("sparse", &sparse)] {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("rt.svm");
        write_libsvm(&path, data).unwrap();
        let back = read_libsvm(
            &path,
            LibsvmOptions {
                n_features: Some(data.n_features()),
                binary: false,
            },
        )
        .unwrap();
        let same = same_dataset(data, &back);
        ok &= same;
        notes.push(format!("{name} round trip {}", if same { "exact" } else { "differs" }));
    }

    // Seed determinism of every generator.
    let det = libsvm_bytes(&gen_lasso(&LassoSpec::simulation1(3)).unwrap().0)
        == libsvm_bytes(&gen_lasso(&LassoSpec::simulation1(3)).unwrap().0)
        && libsvm_bytes(&gen_group_lasso(&GroupLassoSpec::default()).unwrap().0)
            == libsvm_bytes(&gen_group_lasso(&GroupLassoSpec::default()).unwrap().0)
        && libsvm_bytes(&gen_logistic(&LogisticSpec::default()).unwrap())
            == libsvm_bytes(&gen_logistic(&LogisticSpec::default()).unwrap());
    ok &= det;
    notes.push(format!("generators deterministic: {det}"));

    // Real datasets, when a directory is supplied.
    match std::env::var_os("SCPRSM_TABLE2_DIR") {
        None => notes.push("real datasets SKIP (SCPRSM_TABLE2_DIR unset)".into()),
        Some(dir) => {
            let dir = std::path::PathBuf::from(dir);
            for (names, d, n) in [
                (&["bodyfat", "bodyfat.txt"][..], 14, 252),
                (&["a9a", "a9a.txt"][..], 123, 32_561),
                (&["E2006.train", "E2006", "E2006.txt"][..], 150_360, 16_087),
            ] {
                let Some(path) = names.iter().map(|f| dir.join(f)).find(|p| p.is_file()) else {
                    notes.push(format!("{} SKIP (file missing)", names[0]));
                    continue;
                };
                let data = read_libsvm(&path, LibsvmOptions::default()).unwrap();
                let got = (data.n_features(), data.n_samples());
                let matches = got == (d, n);
                ok &= matches;
                notes.push(format!("{} (d, n) = {got:?}, expected {:?}", names[0], (d, n)));
            }
        }
    }
    report(12, "data layer", ok, notes.join("; "));
}
