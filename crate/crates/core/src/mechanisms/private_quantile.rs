use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::Rng;

use crate::error::{invalid, Error, Result};
use crate::mechanisms::PrivacyBudget;
use crate::objectives::{FeasibleDomain, SensitivityConstants};

/// One interval on which the empirical CDF is constant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuantilePiece {
    pub lo: f64,
    pub hi: f64,
    pub f_hat: f64,
    /// `log ∫_lo^hi exp(-c |τ − F̂|) dθ`; `-∞` for empty pieces.
    pub log_mass: f64,
}

/// Exact sampler for the one-dimensional private quantile with density
/// `∝ exp(-c |τ − F̂(θ; y)|)` on `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PrivateQuantile {
    tau: f64,
    lo: f64,
    hi: f64,
    constants: SensitivityConstants,
}

impl PrivateQuantile {
    pub fn new(tau: f64, lo: f64, hi: f64) -> Result<Self> {
        if !(tau > 0.0 && tau < 1.0) {
            return Err(invalid(format!("tau must lie in (0, 1), got {tau}")));
        }
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(invalid(format!("invalid interval [{lo}, {hi}]")));
        }
        Ok(Self { tau, lo, hi, constants: SensitivityConstants::default() })
    }

    pub fn with_constants(mut self, constants: SensitivityConstants) -> Self {
        self.constants = constants;
        self
    }

    /// `c = εn / (4·max(τ, 1−τ))`, or `εn / (4(1−τ))` with literal constants.
    pub fn coefficient(&self, n: usize, epsilon: f64) -> f64 {
        let scale = match self.constants {
            SensitivityConstants::Safe => self.tau.max(1.0 - self.tau),
            SensitivityConstants::Literal => 1.0 - self.tau,
        };
        epsilon * n as f64 / (4.0 * scale)
    }

    fn sorted(&self, y: &[f64]) -> Result<Vec<f64>> {
        if y.is_empty() {
            return Err(Error::EmptyData);
        }
        if let Some((i, v)) = y.iter().enumerate().find(|(_, v)| !(**v >= self.lo && **v <= self.hi)) {
            return Err(Error::DataBound {
                row: i + 1,
                message: format!("y = {v} outside [{}, {}]", self.lo, self.hi),
            });
        }
        let mut s = y.to_vec();
        s.sort_by(f64::total_cmp);
        Ok(s)
    }

    /// The `n + 1` pieces `[lo, y₍₁₎), [y₍₁₎, y₍₂₎), …, [y₍ₙ₎, hi]`.
    pub fn pieces(&self, y: &[f64], epsilon: f64) -> Result<Vec<QuantilePiece>> {
        let s = self.sorted(y)?;
        let n = s.len();
        let c = self.coefficient(n, epsilon);
        let mut edges = Vec::with_capacity(n + 2);
        edges.push(self.lo);
        edges.extend_from_slice(&s);
        edges.push(self.hi);
        Ok(edges
            .windows(2)
            .enumerate()
            .map(|(k, w)| {
                let f_hat = k as f64 / n as f64;
                let width = w[1] - w[0];
                let log_mass = if width > 0.0 { width.ln() - c * (self.tau - f_hat).abs() } else { f64::NEG_INFINITY };
                QuantilePiece { lo: w[0], hi: w[1], f_hat, log_mass }
            })
            .collect())
    }

    /// Unnormalized log-density at `theta`.
    pub fn log_density(&self, y: &[f64], epsilon: f64, theta: f64) -> Result<f64> {
        if y.is_empty() {
            return Err(Error::EmptyData);
        }
        let f_hat = y.iter().filter(|&&v| v <= theta).count() as f64 / y.len() as f64;
        Ok(-self.coefficient(y.len(), epsilon) * (self.tau - f_hat).abs())
    }

    pub fn sample<R: Rng + ?Sized>(&self, y: &[f64], budget: PrivacyBudget, rng: &mut R) -> Result<f64> {
        let pieces = self.pieces(y, budget.epsilon())?;
        let top = pieces.iter().map(|p| p.log_mass).fold(f64::NEG_INFINITY, f64::max);
        let weights: Vec<f64> = pieces.iter().map(|p| (p.log_mass - top).exp()).collect();
        let index = WeightedIndex::new(&weights).map_err(|e| invalid(format!("piece weights: {e}")))?;
        let piece = pieces[index.sample(rng)];
        Ok(piece.lo + (piece.hi - piece.lo) * rng.random::<f64>())
    }
}

/// One draw of the private `tau`-quantile of `y` over an interval domain.
pub fn private_quantile<R: Rng + ?Sized>(
    y: &[f64],
    tau: f64,
    budget: PrivacyBudget,
    interval: &FeasibleDomain,
    rng: &mut R,
) -> Result<f64> {
    match interval {
        FeasibleDomain::Interval { lo, hi } => PrivateQuantile::new(tau, *lo, *hi)?.sample(y, budget, rng),
        _ => Err(invalid("private_quantile needs an interval domain")),
    }
}
