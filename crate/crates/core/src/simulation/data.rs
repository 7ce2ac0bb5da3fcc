use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{invalid, Result};
use crate::objectives::{DataBounds, Dataset};

/// Distribution of the additive regression errors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ErrorModel {
    #[default]
    StandardNormal,
    /// Noise-free responses `Y = Xθ*`.
    Zero,
}

/// One synthetic regression instance.
#[derive(Debug, Clone, PartialEq)]
pub struct RegressionData {
    pub n: usize,
    pub d: usize,
    /// Row-major `n × d` design; the first column is all ones.
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    /// `R = max_i |Y_i|`, or 1 when every response is zero.
    pub scale: f64,
    /// `Y / R`, inside `[-1, 1]`.
    pub y_scaled: Vec<f64>,
}

impl RegressionData {
    /// The rescaled instance as a dataset with unit bounds.
    pub fn scaled_dataset(&self) -> Result<Dataset> {
        Dataset::new(self.n, self.d, self.x.clone(), Some(self.y_scaled.clone()), DataBounds::default())
    }
}

/// `θ* = (0, -1, -1 + 2/(d-1), …, 1 - 2/(d-1))`; for `d = 2` this is `(0, -1)`.
pub fn benchmark_theta(d: usize) -> Vec<f64> {
    let mut theta = vec![0.0; d];
    if d > 1 {
        for (j, t) in theta.iter_mut().enumerate().skip(1) {
            *t = -1.0 + 2.0 * (j - 1) as f64 / (d - 1) as f64;
        }
    }
    theta
}

/// `X_i1 = 1`, `X_ij ~ U(-1, 1)` for `j ≥ 2`, `Y = Xθ* + e` with standard
/// normal errors.
pub fn generate_regression_data<R: Rng + ?Sized>(
    n: usize,
    d: usize,
    true_theta: &[f64],
    rng: &mut R,
) -> Result<RegressionData> {
    generate_regression_data_with(n, d, true_theta, ErrorModel::StandardNormal, rng)
}

pub fn generate_regression_data_with<R: Rng + ?Sized>(
    n: usize,
    d: usize,
    true_theta: &[f64],
    errors: ErrorModel,
    rng: &mut R,
) -> Result<RegressionData> {
    if n == 0 || d == 0 {
        return Err(invalid(format!("need n ≥ 1 and d ≥ 1, got n={n}, d={d}")));
    }
    if true_theta.len() != d {
        return Err(invalid(format!("true theta has length {}, expected {d}", true_theta.len())));
    }
    let mut x = Vec::with_capacity(n * d);
    let mut y = Vec::with_capacity(n);
    for _ in 0..n {
        let start = x.len();
        x.push(1.0);
        for _ in 1..d {
            x.push(rng.random_range(-1.0..1.0));
        }
        let signal: f64 = x[start..].iter().zip(true_theta).map(|(a, b)| a * b).sum();
        let e = match errors {
            ErrorModel::StandardNormal => rng.sample::<f64, _>(StandardNormal),
            ErrorModel::Zero => 0.0,
        };
        y.push(signal + e);
    }
    let max = y.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let scale = if max > 0.0 { max } else { 1.0 };
    let y_scaled = y.iter().map(|v| v / scale).collect();
    Ok(RegressionData { n, d, x, y, scale, y_scaled })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn benchmark_vector() {
        let t = benchmark_theta(12);
        assert_eq!(t[0], 0.0);
        assert_eq!(t[1], -1.0);
        assert!((t[2] - (-1.0 + 2.0 / 11.0)).abs() < 1e-15);
        assert!((t[11] - (1.0 - 2.0 / 11.0)).abs() < 1e-15);
        assert_eq!(benchmark_theta(2), vec![0.0, -1.0]);
    }

    #[test]
    fn scaled_responses_touch_one() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for n in [1, 7, 300] {
            let data = generate_regression_data(n, 3, &[0.5, -1.0, 2.0], &mut rng).unwrap();
            assert!(data.y_scaled.iter().all(|v| v.abs() <= 1.0));
            assert_eq!(data.y_scaled.iter().fold(0.0f64, |m, v| m.max(v.abs())), 1.0);
            assert!(data.x.chunks(3).all(|r| r[0] == 1.0 && r[1].abs() < 1.0));
            assert!(data.scaled_dataset().is_ok());
        }
    }

    #[test]
    fn zero_signal_keeps_unit_scale() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let data = generate_regression_data_with(20, 2, &[0.0, 0.0], ErrorModel::Zero, &mut rng).unwrap();
        assert_eq!(data.scale, 1.0);
        assert!(data.y.iter().all(|v| *v == 0.0));
    }

    #[test]
    fn bad_shapes() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        assert!(generate_regression_data(0, 2, &[0.0, 0.0], &mut rng).is_err());
        assert!(generate_regression_data(5, 2, &[0.0], &mut rng).is_err());
    }
}
