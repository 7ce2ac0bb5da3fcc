//! Independent reference computations shared by the integration tests.
//! Nothing here calls into the library's numerics.

#![allow(dead_code)]

pub mod cases;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// CDF of Gamma(shape k, rate c) for integer k: `1 − e^{−cx} Σ_{j<k} (cx)^j / j!`.
pub fn gamma_cdf_integer(k: usize, rate: f64, x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    let z = rate * x;
    let mut term = 1.0;
    let mut sum = 1.0;
    for j in 1..k {
        term *= z / j as f64;
        sum += term;
    }
    1.0 - (-z).exp() * sum
}

/// One-sample Kolmogorov–Smirnov statistic.
pub fn ks_statistic(mut sample: Vec<f64>, cdf: impl Fn(f64) -> f64) -> f64 {
    sample.sort_by(f64::total_cmp);
    let n = sample.len() as f64;
    sample
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n).abs().max(((i + 1) as f64 / n - f).abs())
        })
        .fold(0.0, f64::max)
}

/// Composite Simpson rule with `2m` panels.
pub fn simpson(mut f: impl FnMut(f64) -> f64, a: f64, b: f64, m: usize) -> f64 {
    let n = 2 * m;
    let h = (b - a) / n as f64;
    let mut s = f(a) + f(b);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        s += w * f(a + i as f64 * h);
    }
    s * h / 3.0
}

/// Dense Gaussian elimination with partial pivoting; `a` is row-major n×n.
pub fn gauss_solve(mut a: Vec<f64>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| a[i * n + col].abs().total_cmp(&a[j * n + col].abs()))?;
        if a[piv * n + col].abs() < 1e-14 {
            return None;
        }
        for k in 0..n {
            a.swap(col * n + k, piv * n + k);
        }
        b.swap(col, piv);
        for row in col + 1..n {
            let f = a[row * n + col] / a[col * n + col];
            for k in col..n {
                a[row * n + k] -= f * a[col * n + k];
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let s: f64 = (row + 1..n).map(|k| a[row * n + k] * x[k]).sum();
        x[row] = (b[row] - s) / a[row * n + row];
    }
    Some(x)
}

pub fn l1(v: &[f64]) -> f64 {
    v.iter().map(|x| x.abs()).sum()
}

pub fn l2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

pub fn linf(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

pub fn laplace(rate: f64, r: &mut impl Rng) -> f64 {
    let e = -(1.0 - r.random::<f64>()).ln() / rate;
    if r.random::<bool>() {
        e
    } else {
        -e
    }
}

/// Rejection sampler for the density `∝ exp(−c‖b‖)`: propose iid Laplace
/// coordinates with rate `c / k` and accept with probability
/// `exp(−c‖b‖ + (c/k)‖b‖₁)`, where `k` bounds `‖·‖₁ ≤ k‖·‖`.
pub fn knorm_rejection(dim: usize, norm: fn(&[f64]) -> f64, k: f64, c: f64, r: &mut impl Rng) -> Vec<f64> {
    loop {
        let b: Vec<f64> = (0..dim).map(|_| laplace(c / k, r)).collect();
        let log_accept = -c * norm(&b) + (c / k) * l1(&b);
        if r.random::<f64>().ln() < log_accept {
            return b;
        }
    }
}

/// Histogram on `bins × bins` equal cells of `[−half, half]²` plus one
/// overflow cell, normalized.
pub fn hist2(points: &[[f64; 2]], half: f64, bins: usize) -> Vec<f64> {
    let mut h = vec![0.0; bins * bins + 1];
    let w = 2.0 * half / bins as f64;
    for p in points {
        let i = ((p[0] + half) / w).floor();
        let j = ((p[1] + half) / w).floor();
        if i >= 0.0 && j >= 0.0 && (i as usize) < bins && (j as usize) < bins {
            h[i as usize * bins + j as usize] += 1.0;
        } else {
            h[bins * bins] += 1.0;
        }
    }
    let n = points.len() as f64;
    h.iter_mut().for_each(|v| *v /= n);
    h
}

pub fn total_variation(p: &[f64], q: &[f64]) -> f64 {
    0.5 * p.iter().zip(q).map(|(a, b)| (a - b).abs()).sum::<f64>()
}

pub fn rho(tau: f64, z: f64) -> f64 {
    if z <= 0.0 {
        (tau - 1.0) * z
    } else {
        tau * z
    }
}

pub fn quantile_loss(x: &[[f64; 2]], y: &[f64], tau: f64, t: [f64; 2]) -> f64 {
    x.iter().zip(y).map(|(xi, yi)| rho(tau, yi - xi[0] * t[0] - xi[1] * t[1])).sum()
}

/// Exhaustive search over the grid of spacing `h` inside `{‖θ‖₁ ≤ radius}`.
pub fn quantile_grid_min(x: &[[f64; 2]], y: &[f64], tau: f64, radius: f64, h: f64) -> f64 {
    let m = (radius / h).round() as i64;
    let mut best = f64::INFINITY;
    for i in -m..=m {
        let a = i as f64 * h;
        let rest = radius - a.abs();
        let k = (rest / h + 1e-9).floor() as i64;
        for j in -k..=k {
            best = best.min(quantile_loss(x, y, tau, [a, j as f64 * h]));
        }
    }
    best
}

/// Exact minimum of the piecewise-linear quantile loss over the ℓ1 ball in
/// the plane: the minimum is attained at a vertex of the arrangement formed
/// by the lines `y_i = x_iᵀθ` and the four facet lines of the ball.
pub fn quantile_vertex_min(x: &[[f64; 2]], y: &[f64], tau: f64, radius: f64) -> f64 {
    let mut lines: Vec<([f64; 2], f64)> = x.iter().zip(y).map(|(a, b)| (*a, *b)).collect();
    for s in [[1.0, 1.0], [1.0, -1.0], [-1.0, 1.0], [-1.0, -1.0]] {
        lines.push((s, radius));
    }
    let mut best = f64::INFINITY;
    for (i, (a, b)) in lines.iter().enumerate() {
        for (c, d) in &lines[i + 1..] {
            let det = a[0] * c[1] - a[1] * c[0];
            if det.abs() < 1e-12 {
                continue;
            }
            let t = [(b * c[1] - a[1] * d) / det, (a[0] * d - b * c[0]) / det];
            if l1(&t) <= radius * (1.0 + 1e-12) {
                best = best.min(quantile_loss(x, y, tau, t));
            }
        }
    }
    best
}

/// Minimizer of `θᵀAθ/2 − cᵀθ` (A positive definite) over `{‖θ‖₁ ≤ radius}`
/// by enumerating supports and sign patterns and solving each face's KKT
/// system. Small dimensions only.
pub fn l1_ball_qp(a: &[f64], c: &[f64], radius: f64) -> Vec<f64> {
    let d = c.len();
    let value = |t: &[f64]| -> f64 {
        let mut v = 0.0;
        for i in 0..d {
            for j in 0..d {
                v += 0.5 * t[i] * a[i * d + j] * t[j];
            }
            v -= c[i] * t[i];
        }
        v
    };
    let mut best: Option<(f64, Vec<f64>)> = None;
    let mut consider = |t: Vec<f64>| {
        if l1(&t) <= radius * (1.0 + 1e-10) {
            let v = value(&t);
            if best.as_ref().is_none_or(|(bv, _)| v < *bv) {
                best = Some((v, t));
            }
        }
    };
    if let Some(t) = gauss_solve(a.to_vec(), c.to_vec()) {
        consider(t);
    }
    for mask in 1u32..(1 << d) {
        let support: Vec<usize> = (0..d).filter(|j| mask & (1 << j) != 0).collect();
        let k = support.len();
        for signs in 0u32..(1 << k) {
            let s: Vec<f64> = (0..k).map(|i| if signs & (1 << i) != 0 { -1.0 } else { 1.0 }).collect();
            // [A_SS s; sᵀ 0] [θ_S; μ] = [c_S; radius]
            let m = k + 1;
            let mut sys = vec![0.0; m * m];
            let mut rhs = vec![0.0; m];
            for (p, &i) in support.iter().enumerate() {
                for (q, &j) in support.iter().enumerate() {
                    sys[p * m + q] = a[i * d + j];
                }
                sys[p * m + k] = s[p];
                sys[k * m + p] = s[p];
                rhs[p] = c[i];
            }
            rhs[k] = radius;
            if let Some(sol) = gauss_solve(sys, rhs) {
                if (0..k).all(|p| sol[p] * s[p] >= -1e-12) {
                    let mut t = vec![0.0; d];
                    for (p, &i) in support.iter().enumerate() {
                        t[i] = sol[p];
                    }
                    consider(t);
                }
            }
        }
    }
    best.expect("the origin face always yields a candidate").1
}
