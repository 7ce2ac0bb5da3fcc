mod common;

use common::*;
use kng::mechanisms::solve_perturbed_objective;
use kng::optimizer::{kkt_residual, ols, project_l1, projected_subgradient, StepRule, SubgradientOptions};
use kng::{DataBounds, Dataset, ObjectiveSpec};
use rand::Rng;

#[test]
fn ols_matches_normal_equations() {
    let mut r = rng(1);
    let (n, d) = (100, 5);
    let x: Vec<f64> = (0..n * d).map(|_| r.random_range(-1.0..1.0)).collect();
    let y: Vec<f64> = (0..n).map(|_| r.random_range(-1.0..1.0)).collect();
    let theta = ols(&x, n, d, &y).unwrap();
    let mut gram = vec![0.0; d * d];
    let mut xty = vec![0.0; d];
    for i in 0..n {
        for a in 0..d {
            xty[a] += x[i * d + a] * y[i];
            for b in 0..d {
                gram[a * d + b] += x[i * d + a] * x[i * d + b];
            }
        }
    }
    let oracle = gauss_solve(gram, xty.clone()).unwrap();
    for (a, b) in theta.iter().zip(&oracle) {
        assert!((a - b).abs() < 1e-9, "{a} vs {b}");
    }
    // Residual gradient ‖Xᵀ(y − Xθ)‖∞ ≤ 1e-8 n.
    let resid: Vec<f64> = (0..n).map(|i| y[i] - (0..d).map(|j| x[i * d + j] * theta[j]).sum::<f64>()).collect();
    let g: Vec<f64> = (0..d).map(|j| (0..n).map(|i| x[i * d + j] * resid[i]).sum()).collect();
    assert!(linf(&g) <= 1e-8 * n as f64);
}

#[test]
fn projection_matches_grid_search() {
    let v = [1.0, 1.0];
    let p = project_l1(&v, 1.0);
    let mut best = (f64::INFINITY, [0.0, 0.0]);
    let h = 1e-3;
    for i in -1000..=1000 {
        let a = i as f64 * h;
        let rest = ((1.0 - a.abs()) / h + 1e-9).floor() as i64;
        for j in -rest..=rest {
            let b = j as f64 * h;
            let dist = (a - v[0]).powi(2) + (b - v[1]).powi(2);
            if dist < best.0 {
                best = (dist, [a, b]);
            }
        }
    }
    assert!((p[0] - best.1[0]).abs() < 2e-3 && (p[1] - best.1[1]).abs() < 2e-3, "{p:?} vs {:?}", best.1);
    let mut r = rng(2);
    for _ in 0..1000 {
        let v: Vec<f64> = (0..6).map(|_| r.random_range(-3.0..3.0)).collect();
        assert!(l1(&project_l1(&v, 1.5)) <= 1.5 + 1e-12);
    }
}

fn eval_quantile<'a>(x: &'a [[f64; 2]], y: &'a [f64], tau: f64) -> impl FnMut(&[f64], &mut [f64]) -> f64 + 'a {
    move |t, g| {
        g.iter_mut().for_each(|v| *v = 0.0);
        let mut f = 0.0;
        for (xi, yi) in x.iter().zip(y) {
            let res = yi - xi[0] * t[0] - xi[1] * t[1];
            f += rho(tau, res);
            let w = if res <= 0.0 { 1.0 - tau } else { -tau };
            g[0] += w * xi[0];
            g[1] += w * xi[1];
        }
        f
    }
}

fn quantile_instance(seed: u64, n: usize) -> (Vec<[f64; 2]>, Vec<f64>) {
    let mut r = rng(seed);
    let x: Vec<[f64; 2]> = (0..n).map(|_| [1.0, r.random_range(-1.0..1.0)]).collect();
    let y: Vec<f64> = x.iter().map(|xi| 0.2 - 0.5 * xi[1] + 0.3 * r.random_range(-1.0..1.0f64)).collect();
    (x, y)
}

#[test]
fn quantile_solver_matches_grid_and_vertex_oracles() {
    for seed in 0..5 {
        let (x, y) = quantile_instance(seed, 50);
        let sol = projected_subgradient(eval_quantile(&x, &y, 0.5), 1.0, &[0.0, 0.0], &SubgradientOptions::default())
            .unwrap();
        let grid = quantile_grid_min(&x, &y, 0.5, 1.0, 1e-3);
        let exact = quantile_vertex_min(&x, &y, 0.5, 1.0);
        assert!(sol.value <= grid + 1e-4 * grid.abs(), "seed {seed}: {} vs grid {grid}", sol.value);
        assert!((sol.value - exact).abs() <= 1e-4 * exact.abs(), "seed {seed}: {} vs exact {exact}", sol.value);
        assert!(exact <= grid + 1e-12);
    }
}

#[test]
fn median_of_three_points() {
    let x = [[1.0, 0.0]; 3];
    let y = [1.0, 2.0, 3.0];
    let sol =
        projected_subgradient(eval_quantile(&x, &y, 0.5), 100.0, &[0.0, 0.0], &SubgradientOptions::default()).unwrap();
    assert!((sol.theta[0] - 2.0).abs() < 1e-3, "{:?}", sol.theta);
}

#[test]
fn diminishing_rule_reaches_the_quadratic_minimizer() {
    let (gamma, b) = (4.0, [0.8, -0.4]);
    let opts = SubgradientOptions {
        step: StepRule::Diminishing,
        max_iters: 200_000,
        tolerance: 1e-12,
        ..SubgradientOptions::default()
    };
    let sol = projected_subgradient(
        |t, g| {
            g[0] = gamma * t[0] + b[0];
            g[1] = gamma * t[1] + b[1];
            0.5 * gamma * (t[0] * t[0] + t[1] * t[1]) + t[0] * b[0] + t[1] * b[1]
        },
        1.0,
        &[0.0, 0.0],
        &opts,
    )
    .unwrap();
    assert!((sol.theta[0] + 0.2).abs() < 1e-6 && (sol.theta[1] - 0.1).abs() < 1e-6, "{:?}", sol.theta);
}

#[test]
fn best_value_trace_is_monotone_and_iterates_feasible() {
    let (x, y) = quantile_instance(9, 40);
    let mut eval = eval_quantile(&x, &y, 0.3);
    let opts = SubgradientOptions { record_trace: true, ..SubgradientOptions::default() };
    let sol = projected_subgradient(
        |t, g| {
            assert!(l1(t) <= 1.0 + 1e-12);
            eval(t, g)
        },
        1.0,
        &[0.9, 0.9],
        &opts,
    )
    .unwrap();
    assert!(sol.trace.windows(2).all(|w| w[1] <= w[0]));
}

fn linear_data(seed: u64, n: usize, d: usize) -> Dataset {
    let mut r = rng(seed);
    let rows: Vec<Vec<f64>> =
        (0..n).map(|_| std::iter::once(1.0).chain((1..d).map(|_| r.random_range(-1.0..1.0))).collect()).collect();
    let y: Vec<f64> =
        rows.iter().map(|x| (0.3 * x[1] - 0.2 + 0.4 * r.random_range(-1.0..1.0f64)).clamp(-1.0, 1.0)).collect();
    Dataset::from_rows(&rows, Some(y), DataBounds::default()).unwrap()
}

#[test]
fn unperturbed_solution_is_constrained_least_squares() {
    for (seed, radius) in [(1, 1.0), (2, 0.3), (3, 0.05)] {
        let data = linear_data(seed, 200, 3);
        let spec = ObjectiveSpec::linear_sse(3, radius).unwrap();
        let prepared = spec.prepare(&data).unwrap();
        let (theta, kkt) = solve_perturbed_objective(&prepared, 0.0, &[0.0; 3]).unwrap();
        // Oracle on ½θᵀ(2G)θ − (2Xᵀy)ᵀθ.
        let (gram, xty) = prepared.normal_equations().unwrap();
        let a: Vec<f64> = gram.iter().map(|v| 2.0 * v).collect();
        let c: Vec<f64> = xty.iter().map(|v| 2.0 * v).collect();
        let oracle = l1_ball_qp(&a, &c, radius);
        for (p, q) in theta.iter().zip(&oracle) {
            assert!((p - q).abs() < 1e-8, "radius {radius}: {theta:?} vs {oracle:?}");
        }
        assert!(kkt <= 1e-6);
    }
}

#[test]
fn perturbed_objective_is_stationary() {
    let mut r = rng(5);
    for seed in 0..20 {
        let data = linear_data(100 + seed, 200, 3);
        let spec = ObjectiveSpec::linear_sse(3, 1.0).unwrap();
        let prepared = spec.prepare(&data).unwrap();
        let gamma = r.random_range(0.0..40.0);
        let b: Vec<f64> = (0..3).map(|_| r.random_range(-300.0..300.0)).collect();
        let (theta, _) = solve_perturbed_objective(&prepared, gamma, &b).unwrap();
        let mut g = spec.gradient(&data, &theta).unwrap();
        for j in 0..3 {
            g[j] += gamma * theta[j] + b[j];
        }
        let res = kkt_residual(&theta, &g, 1.0);
        assert!(res <= 1e-6, "seed {seed}: kkt {res}");
        // Independent check: the oracle QP with the same terms.
        let (gram, xty) = prepared.normal_equations().unwrap();
        let a: Vec<f64> = (0..9).map(|k| 2.0 * gram[k] + if k % 4 == 0 { gamma } else { 0.0 }).collect();
        let c: Vec<f64> = (0..3).map(|j| 2.0 * xty[j] - b[j]).collect();
        let oracle = l1_ball_qp(&a, &c, 1.0);
        for (p, q) in theta.iter().zip(&oracle) {
            assert!((p - q).abs() < 1e-6, "seed {seed}: {theta:?} vs {oracle:?}");
        }
    }
}
