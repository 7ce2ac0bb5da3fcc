//! Deterministic convex solvers: least squares, Euclidean projection onto
//! the ℓ1 ball, and projected (sub)gradient descent over an ℓ1 ball.

use nalgebra::{DMatrix, DVector};

use crate::error::{invalid, Error, Result};

/// Ordinary least squares `argmin ‖y − Xθ‖₂` for a row-major `n × d` design,
/// via a Householder QR factorization.
pub fn ols(x: &[f64], n: usize, d: usize, y: &[f64]) -> Result<Vec<f64>> {
    if d == 0 || x.len() != n * d || y.len() != n {
        return Err(invalid(format!("ols: design has {} entries and response {} for n={n}, d={d}", x.len(), y.len())));
    }
    if n < d {
        return Err(Error::SingularSystem);
    }
    let qr = DMatrix::from_row_slice(n, d, x).qr();
    let r = qr.r();
    let scale = (0..d).map(|j| r[(j, j)].abs()).fold(0.0, f64::max);
    if scale == 0.0 || (0..d).any(|j| r[(j, j)].abs() <= 1e-12 * scale) {
        return Err(Error::SingularSystem);
    }
    let mut qty = DVector::from_column_slice(y);
    qr.q_tr_mul(&mut qty);
    let head = qty.rows(0, d).into_owned();
    let theta = r.solve_upper_triangular(&head).ok_or(Error::SingularSystem)?;
    Ok(theta.iter().copied().collect())
}

/// Euclidean projection onto `{θ : ‖θ‖₁ ≤ radius}` by the sorted-threshold
/// method.
pub fn project_l1(v: &[f64], radius: f64) -> Vec<f64> {
    let l1: f64 = v.iter().map(|x| x.abs()).sum();
    if l1 <= radius {
        return v.to_vec();
    }
    let mut mags: Vec<f64> = v.iter().map(|x| x.abs()).collect();
    mags.sort_unstable_by(|a, b| b.total_cmp(a));
    let mut cumsum = 0.0;
    let mut threshold = 0.0;
    for (j, m) in mags.iter().enumerate() {
        cumsum += m;
        let t = (cumsum - radius) / (j + 1) as f64;
        if *m > t {
            threshold = t;
        } else {
            break;
        }
    }
    v.iter().map(|x| x.signum() * (x.abs() - threshold).max(0.0)).collect()
}

/// Norm of the projection of `-gradient` onto the tangent cone of the ℓ1
/// ball at `theta`; zero exactly at KKT points.
pub fn kkt_residual(theta: &[f64], gradient: &[f64], radius: f64) -> f64 {
    let u: Vec<f64> = gradient.iter().map(|g| -g).collect();
    let l1: f64 = theta.iter().map(|t| t.abs()).sum();
    if radius - l1 > 1e-12 * radius {
        return u.iter().map(|x| x * x).sum::<f64>().sqrt();
    }
    // Tangent cone at a boundary point: h(v) = Σ_S sign(θ_i) v_i + Σ_{S^c} |v_i| ≤ 0.
    let h = |mu: f64| -> f64 {
        theta
            .iter()
            .zip(&u)
            .map(|(t, ui)| if *t != 0.0 { t.signum() * (ui - mu * t.signum()) } else { (ui.abs() - mu).max(0.0) })
            .sum()
    };
    let project = |mu: f64| -> Vec<f64> {
        theta
            .iter()
            .zip(&u)
            .map(|(t, ui)| if *t != 0.0 { ui - mu * t.signum() } else { ui.signum() * (ui.abs() - mu).max(0.0) })
            .collect()
    };
    let v = if h(0.0) <= 0.0 {
        u.clone()
    } else {
        let mut hi = u.iter().map(|x| x.abs()).fold(0.0, f64::max).max(1e-300);
        while h(hi) > 0.0 {
            hi *= 2.0;
        }
        let mut lo = 0.0;
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if h(mid) > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        project(hi)
    };
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Step-size rule for [`projected_subgradient`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StepRule {
    /// `θ ← P(θ − α₀/√k · g)` with `α₀ = radius / (1 + ‖g₀‖₂)`. Stops when the
    /// moving-average objective over consecutive windows changes by less than
    /// the relative tolerance.
    Diminishing,
    /// Normalized steps of constant length within each epoch, shrunk by
    /// `shrink` between epochs, restarting from the best point. Stops when the
    /// step length times the largest subgradient norm seen in the epoch falls
    /// below the relative tolerance.
    Restarted { epoch_len: usize, shrink: f64 },
    /// Projected gradient with a fixed step, for smooth objectives (use
    /// `1/L`). Stops when the gradient mapping norm falls below the tolerance
    /// (absolute).
    Constant { step: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct SubgradientOptions {
    pub max_iters: usize,
    pub tolerance: f64,
    pub window: usize,
    pub step: StepRule,
    pub record_trace: bool,
    /// First step length of the restarted rule [default: radius / 2].
    pub initial_step: Option<f64>,
}

impl Default for SubgradientOptions {
    fn default() -> Self {
        Self {
            max_iters: 20_000,
            tolerance: 1e-6,
            window: 100,
            step: StepRule::Restarted { epoch_len: 500, shrink: 0.5 },
            record_trace: false,
            initial_step: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SubgradientSolution {
    pub theta: Vec<f64>,
    pub value: f64,
    pub iterations: usize,
    /// Final value of the stopping statistic of the chosen step rule.
    pub gap: f64,
    /// Best-so-far objective after each iteration (when requested).
    pub trace: Vec<f64>,
}

/// Minimizes a convex function over `{‖θ‖₁ ≤ radius}`.
///
/// `eval(θ, g)` returns the objective at `θ` and writes a subgradient into `g`.
pub fn projected_subgradient<F>(
    mut eval: F,
    radius: f64,
    start: &[f64],
    opts: &SubgradientOptions,
) -> Result<SubgradientSolution>
where
    F: FnMut(&[f64], &mut [f64]) -> f64,
{
    if !(radius > 0.0 && radius.is_finite()) {
        return Err(invalid(format!("ball radius must be positive, got {radius}")));
    }
    if start.is_empty() || opts.max_iters == 0 || opts.window == 0 || opts.tolerance.is_nan() || opts.tolerance <= 0.0 {
        return Err(invalid("projected_subgradient: empty start or invalid options"));
    }
    let d = start.len();
    let mut theta = project_l1(start, radius);
    let mut g = vec![0.0; d];
    let mut f = eval(&theta, &mut g);
    if !f.is_finite() {
        return Err(invalid("objective is not finite at the starting point"));
    }
    let mut best = (theta.clone(), f, g.clone());
    let mut trace = Vec::new();
    let norm2 = |v: &[f64]| v.iter().map(|x| x * x).sum::<f64>().sqrt();
    let mut step_point = vec![0.0; d];

    macro_rules! record {
        () => {
            if f < best.1 {
                best.0.copy_from_slice(&theta);
                best.1 = f;
                best.2.copy_from_slice(&g);
            }
            if opts.record_trace {
                trace.push(best.1);
            }
        };
    }

    let mut gap = f64::INFINITY;
    let mut iterations = 0;
    match opts.step {
        StepRule::Diminishing => {
            let alpha0 = radius / (1.0 + norm2(&g));
            let mut history: Vec<f64> = Vec::with_capacity(opts.max_iters);
            while iterations < opts.max_iters {
                iterations += 1;
                let alpha = alpha0 / (iterations as f64).sqrt();
                for ((s, t), gj) in step_point.iter_mut().zip(&theta).zip(&g) {
                    *s = t - alpha * gj;
                }
                theta = project_l1(&step_point, radius);
                f = eval(&theta, &mut g);
                record!();
                history.push(f);
                let w = opts.window;
                if history.len() >= 2 * w {
                    let recent: f64 = history[history.len() - w..].iter().sum::<f64>() / w as f64;
                    let prev: f64 = history[history.len() - 2 * w..history.len() - w].iter().sum::<f64>() / w as f64;
                    gap = (recent - prev).abs() / recent.abs().max(f64::MIN_POSITIVE);
                    if gap < opts.tolerance {
                        break;
                    }
                }
            }
        }
        StepRule::Restarted { epoch_len, shrink } => {
            if epoch_len == 0 || !(shrink > 0.0 && shrink < 1.0) {
                return Err(invalid("restarted step rule needs epoch_len ≥ 1 and shrink in (0, 1)"));
            }
            let mut alpha = opts.initial_step.unwrap_or(0.5 * radius);
            if !(alpha > 0.0 && alpha.is_finite()) {
                return Err(invalid(format!("initial step must be positive, got {alpha}")));
            }
            'epochs: while iterations < opts.max_iters {
                theta.copy_from_slice(&best.0);
                g.copy_from_slice(&best.2);
                let mut g_max = norm2(&g);
                for _ in 0..epoch_len {
                    let gn = norm2(&g);
                    if gn == 0.0 {
                        gap = 0.0;
                        break 'epochs;
                    }
                    if iterations >= opts.max_iters {
                        break;
                    }
                    iterations += 1;
                    for ((s, t), gj) in step_point.iter_mut().zip(&theta).zip(&g) {
                        *s = t - alpha * gj / gn;
                    }
                    theta = project_l1(&step_point, radius);
                    f = eval(&theta, &mut g);
                    g_max = g_max.max(norm2(&g));
                    record!();
                }
                gap = alpha * g_max / best.1.abs().max(1.0);
                if gap < opts.tolerance {
                    break;
                }
                alpha *= shrink;
            }
        }
        StepRule::Constant { step } => {
            if !(step > 0.0 && step.is_finite()) {
                return Err(invalid(format!("constant step must be positive, got {step}")));
            }
            while iterations < opts.max_iters {
                iterations += 1;
                for ((s, t), gj) in step_point.iter_mut().zip(&theta).zip(&g) {
                    *s = t - step * gj;
                }
                let next = project_l1(&step_point, radius);
                gap = next.iter().zip(&theta).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt() / step;
                theta = next;
                f = eval(&theta, &mut g);
                record!();
                if gap <= opts.tolerance {
                    // Gradient steps are monotone; the last iterate is the
                    // most accurate stationary point.
                    return Ok(SubgradientSolution { theta, value: f, iterations, gap, trace });
                }
            }
        }
    }

    if gap.is_nan() || gap >= opts.tolerance {
        return Err(Error::OptimizationFailure { iterations, gap });
    }
    Ok(SubgradientSolution { theta: best.0, value: best.1, iterations, gap, trace })
}
