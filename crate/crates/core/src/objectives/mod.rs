//! Estimation problems as objective functions `ℓ_n(θ; D)`.
//!
//! Each [`ObjectiveSpec`] bundles the loss, its gradient, the sensitivity
//! bounds that calibrate the mechanisms, and the feasible domain that serves
//! as the support of the sampling mechanisms.

mod dataset;
mod domain;

pub use dataset::{DataBounds, Dataset};
pub use domain::FeasibleDomain;

use crate::error::{invalid, Error, Result};
use crate::norms::NormKind;

/// Which sensitivity constants to use where the textbook derivation and a
/// worst-case bound disagree.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SensitivityConstants {
    /// Worst-case bounds over all adjacent datasets.
    #[default]
    Safe,
    /// Literal constants: `2r` for the mean and `2(1-τ)C_X` for quantiles.
    Literal,
}

/// The estimation problem and its constants.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ObjectiveKind {
    /// `Σ ‖x_i − θ‖₂²` with `‖x_i‖ ≤ radius` in the gradient norm.
    MeanSse { radius: f64 },
    /// `Σ (y_i − x_iᵀθ)²` with `‖θ*‖₁ ≤ bound_b`.
    LinearSse { bound_b: f64 },
    /// `Σ ‖x_i − θ‖₂`; `radius` is the half-width of the search box.
    GeometricMedian { radius: f64 },
    /// `Σ ρ_τ(y_i − x_iᵀθ)` with `‖x_i‖ ≤ cx` in the gradient norm.
    QuantileLoss { tau: f64, cx: f64, bound_b: f64 },
}

impl ObjectiveKind {
    pub fn name(&self) -> &'static str {
        match self {
            Self::MeanSse { .. } => "mean",
            Self::LinearSse { .. } => "linear",
            Self::GeometricMedian { .. } => "median",
            Self::QuantileLoss { .. } => "quantile",
        }
    }

    fn needs_response(&self) -> bool {
        matches!(self, Self::LinearSse { .. } | Self::QuantileLoss { .. })
    }
}

/// Tilted absolute value `ρ_τ(z) = (τ−1)z·1[z≤0] + τz·1[z>0]`.
#[inline]
pub fn rho_tau(tau: f64, z: f64) -> f64 {
    if z <= 0.0 {
        (tau - 1.0) * z
    } else {
        tau * z
    }
}

/// Right-continuous empirical CDF `#{i : y_i ≤ θ} / n`.
pub fn empirical_cdf(y: &[f64], theta: f64) -> Result<f64> {
    if y.is_empty() {
        return Err(Error::EmptyData);
    }
    Ok(y.iter().filter(|&&v| v <= theta).count() as f64 / y.len() as f64)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ObjectiveSpec {
    kind: ObjectiveKind,
    dim: usize,
    gradient_norm: NormKind,
    domain: FeasibleDomain,
    bounds: DataBounds,
    constants: SensitivityConstants,
}

fn default_box(dim: usize, half_width: f64) -> Result<FeasibleDomain> {
    if dim == 1 {
        FeasibleDomain::interval(-half_width, half_width)
    } else {
        FeasibleDomain::cube(dim, half_width)
    }
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(invalid(format!("{name} must be positive and finite, got {v}")))
    }
}

impl ObjectiveSpec {
    /// Mean estimation. Defaults: ℓ2 gradient norm, box `[-r, r]^d`.
    pub fn mean_sse(dim: usize, radius: f64) -> Result<Self> {
        positive("radius r", radius)?;
        Self::build(ObjectiveKind::MeanSse { radius }, dim, NormKind::L2, default_box(dim, radius)?)
    }

    /// Linear regression. Defaults: ℓ∞ gradient norm, ℓ1 ball of radius B.
    pub fn linear_sse(dim: usize, bound_b: f64) -> Result<Self> {
        positive("bound B", bound_b)?;
        Self::build(ObjectiveKind::LinearSse { bound_b }, dim, NormKind::LInf, FeasibleDomain::l1_ball(dim, bound_b)?)
    }

    /// Geometric median. Defaults: ℓ2 gradient norm, box `[-radius, radius]^d`.
    pub fn geometric_median(dim: usize, radius: f64) -> Result<Self> {
        positive("radius", radius)?;
        Self::build(ObjectiveKind::GeometricMedian { radius }, dim, NormKind::L2, default_box(dim, radius)?)
    }

    /// Quantile regression. Defaults: ℓ∞ gradient norm, ℓ1 ball of radius B.
    pub fn quantile_loss(dim: usize, tau: f64, cx: f64, bound_b: f64) -> Result<Self> {
        if !(tau > 0.0 && tau < 1.0) {
            return Err(invalid(format!("tau must lie in (0, 1), got {tau}")));
        }
        positive("C_X", cx)?;
        positive("bound B", bound_b)?;
        Self::build(
            ObjectiveKind::QuantileLoss { tau, cx, bound_b },
            dim,
            NormKind::LInf,
            FeasibleDomain::l1_ball(dim, bound_b)?,
        )
    }

    fn build(kind: ObjectiveKind, dim: usize, gradient_norm: NormKind, domain: FeasibleDomain) -> Result<Self> {
        if dim == 0 {
            return Err(invalid("objective dimension must be at least 1"));
        }
        Ok(Self {
            kind,
            dim,
            gradient_norm,
            domain,
            bounds: DataBounds::default(),
            constants: SensitivityConstants::Safe,
        })
    }

    pub fn with_gradient_norm(mut self, kind: NormKind) -> Self {
        self.gradient_norm = kind;
        self
    }

    pub fn with_domain(mut self, domain: FeasibleDomain) -> Result<Self> {
        if domain.dim() != self.dim {
            return Err(invalid(format!("domain has dimension {}, objective has {}", domain.dim(), self.dim)));
        }
        self.domain = domain;
        Ok(self)
    }

    pub fn with_bounds(mut self, bounds: DataBounds) -> Self {
        self.bounds = bounds;
        self
    }

    pub fn with_constants(mut self, constants: SensitivityConstants) -> Self {
        self.constants = constants;
        self
    }

    pub fn kind(&self) -> ObjectiveKind {
        self.kind
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn gradient_norm(&self) -> NormKind {
        self.gradient_norm
    }

    pub fn domain(&self) -> &FeasibleDomain {
        &self.domain
    }

    pub fn bounds(&self) -> DataBounds {
        self.bounds
    }

    pub fn constants(&self) -> SensitivityConstants {
        self.constants
    }

    /// Checks that `data` satisfies every bound the sensitivities rely on.
    pub fn check_data(&self, data: &Dataset) -> Result<()> {
        if data.d() != self.dim {
            return Err(invalid(format!("dataset has {} columns, objective expects {}", data.d(), self.dim)));
        }
        if self.kind.needs_response() && data.y().is_none() {
            return Err(invalid(format!("the {} objective needs a response column y", self.kind.name())));
        }
        let b = self.bounds;
        for (i, row) in data.rows().enumerate() {
            if let Some(v) = row.iter().find(|v| v.abs() > b.x_bound) {
                return Err(Error::DataBound {
                    row: i + 1,
                    message: format!("|x| = {} exceeds {}", v.abs(), b.x_bound),
                });
            }
            let ball = match self.kind {
                ObjectiveKind::MeanSse { radius } => Some(("r", radius)),
                ObjectiveKind::QuantileLoss { cx, .. } => Some(("C_X", cx)),
                _ => None,
            };
            if let Some((name, limit)) = ball {
                let len = self.gradient_norm.eval(row);
                if len > limit {
                    return Err(Error::DataBound {
                        row: i + 1,
                        message: format!("{} norm {len} exceeds {name} = {limit}", self.gradient_norm),
                    });
                }
            }
        }
        if self.kind.needs_response() {
            if let Some((i, v)) = data.y().unwrap_or_default().iter().enumerate().find(|(_, v)| v.abs() > b.y_bound) {
                return Err(Error::DataBound {
                    row: i + 1,
                    message: format!("|y| = {} exceeds {}", v.abs(), b.y_bound),
                });
            }
        }
        Ok(())
    }

    fn check_theta(&self, data: &Dataset, theta: &[f64]) -> Result<()> {
        if theta.len() != self.dim || data.d() != self.dim {
            return Err(invalid(format!(
                "dimension mismatch: theta has {}, data has {}, objective expects {}",
                theta.len(),
                data.d(),
                self.dim
            )));
        }
        Ok(())
    }

    /// `ℓ_n(θ; D)`, evaluated directly from the rows.
    pub fn value(&self, data: &Dataset, theta: &[f64]) -> Result<f64> {
        self.check_theta(data, theta)?;
        let total = match self.kind {
            ObjectiveKind::MeanSse { .. } => {
                data.rows().map(|x| x.iter().zip(theta).map(|(a, t)| (a - t).powi(2)).sum::<f64>()).sum()
            }
            ObjectiveKind::GeometricMedian { .. } => {
                data.rows().map(|x| x.iter().zip(theta).map(|(a, t)| (a - t).powi(2)).sum::<f64>().sqrt()).sum()
            }
            ObjectiveKind::LinearSse { .. } => {
                let y = data.require_y()?;
                data.rows().zip(y).map(|(x, yi)| (yi - dot(x, theta)).powi(2)).sum()
            }
            ObjectiveKind::QuantileLoss { tau, .. } => {
                let y = data.require_y()?;
                data.rows().zip(y).map(|(x, yi)| rho_tau(tau, yi - dot(x, theta))).sum()
            }
        };
        Ok(total)
    }

    /// `∇ℓ_n(θ; D)` in closed form, evaluated directly from the rows.
    pub fn gradient(&self, data: &Dataset, theta: &[f64]) -> Result<Vec<f64>> {
        self.check_theta(data, theta)?;
        let mut g = vec![0.0; self.dim];
        raw_gradient(&self.kind, data, theta, &mut g)?;
        Ok(g)
    }

    /// Sensitivity `Δ` of the gradient in the gradient norm. All four
    /// objectives admit a bound that does not depend on `θ`.
    pub fn gradient_sensitivity(&self) -> f64 {
        let b = self.bounds;
        match self.kind {
            ObjectiveKind::MeanSse { radius } => match self.constants {
                SensitivityConstants::Safe => 4.0 * radius,
                SensitivityConstants::Literal => 2.0 * radius,
            },
            ObjectiveKind::LinearSse { .. } => {
                let residual = b.y_bound + b.x_bound * self.domain.max_l1_norm();
                4.0 * residual * b.x_bound * self.gradient_norm.max_over_unit_box(self.dim)
            }
            ObjectiveKind::GeometricMedian { .. } => 2.0 * self.gradient_norm.max_over_unit_euclidean_ball(self.dim),
            ObjectiveKind::QuantileLoss { tau, cx, .. } => match self.constants {
                SensitivityConstants::Safe => 2.0 * tau.max(1.0 - tau) * cx,
                SensitivityConstants::Literal => 2.0 * (1.0 - tau) * cx,
            },
        }
    }

    /// Sensitivity of `ℓ_n` itself, used by the exponential mechanism.
    pub fn value_sensitivity(&self) -> Result<f64> {
        let b = self.bounds;
        match self.kind {
            ObjectiveKind::MeanSse { radius } => {
                let data_radius = radius * self.gradient_norm.euclidean_radius_of_unit_ball(self.dim);
                Ok((data_radius + self.domain.max_l2_norm()).powi(2))
            }
            ObjectiveKind::LinearSse { .. } => Ok((b.y_bound + b.x_bound * self.domain.max_l1_norm()).powi(2)),
            ObjectiveKind::QuantileLoss { tau, .. } => {
                Ok(2.0 * tau.max(1.0 - tau) * (b.y_bound + b.x_bound * self.domain.max_l1_norm()))
            }
            ObjectiveKind::GeometricMedian { .. } => {
                Err(Error::Unsupported("value sensitivity is not defined for the geometric median".into()))
            }
        }
    }

    /// Binds the objective to a dataset, caching sufficient statistics where
    /// the loss admits them.
    pub fn prepare<'a>(&'a self, data: &'a Dataset) -> Result<PreparedObjective<'a>> {
        self.check_data(data)?;
        PreparedObjective::new(self, data)
    }
}

#[inline]
pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn raw_gradient(kind: &ObjectiveKind, data: &Dataset, theta: &[f64], g: &mut [f64]) -> Result<()> {
    g.iter_mut().for_each(|v| *v = 0.0);
    match *kind {
        ObjectiveKind::MeanSse { .. } => {
            for x in data.rows() {
                for ((gj, xj), tj) in g.iter_mut().zip(x).zip(theta) {
                    *gj -= 2.0 * (xj - tj);
                }
            }
        }
        ObjectiveKind::LinearSse { .. } => {
            let y = data.require_y()?;
            for (x, yi) in data.rows().zip(y) {
                let r = yi - dot(x, theta);
                for (gj, xj) in g.iter_mut().zip(x) {
                    *gj -= 2.0 * r * xj;
                }
            }
        }
        ObjectiveKind::GeometricMedian { .. } => {
            for (i, x) in data.rows().enumerate() {
                let len = x.iter().zip(theta).map(|(a, t)| (a - t).powi(2)).sum::<f64>().sqrt();
                if len == 0.0 {
                    return Err(Error::NonDifferentiable { index: i });
                }
                for ((gj, xj), tj) in g.iter_mut().zip(x).zip(theta) {
                    *gj -= (xj - tj) / len;
                }
            }
        }
        ObjectiveKind::QuantileLoss { tau, .. } => {
            let y = data.require_y()?;
            for (x, yi) in data.rows().zip(y) {
                let weight = if *yi <= dot(x, theta) { 1.0 - tau } else { -tau };
                for (gj, xj) in g.iter_mut().zip(x) {
                    *gj += weight * xj;
                }
            }
        }
    }
    Ok(())
}

#[derive(Debug, Clone)]
enum Stats {
    Mean { n: f64, sum_x: Vec<f64>, sum_sq: f64 },
    Linear { gram: Vec<f64>, xty: Vec<f64>, yty: f64 },
    Rows,
}

/// An objective bound to one dataset. Squared-error losses are evaluated
/// from cached sufficient statistics in `O(d²)` per call.
#[derive(Debug, Clone)]
pub struct PreparedObjective<'a> {
    spec: &'a ObjectiveSpec,
    data: &'a Dataset,
    stats: Stats,
}

impl<'a> PreparedObjective<'a> {
    fn new(spec: &'a ObjectiveSpec, data: &'a Dataset) -> Result<Self> {
        let d = spec.dim;
        let stats = match spec.kind {
            ObjectiveKind::MeanSse { .. } => {
                let mut sum_x = vec![0.0; d];
                let mut sum_sq = 0.0;
                for x in data.rows() {
                    for (s, v) in sum_x.iter_mut().zip(x) {
                        *s += v;
                    }
                    sum_sq += dot(x, x);
                }
                Stats::Mean { n: data.n() as f64, sum_x, sum_sq }
            }
            ObjectiveKind::LinearSse { .. } => {
                let y = data.require_y()?;
                let mut gram = vec![0.0; d * d];
                let mut xty = vec![0.0; d];
                for (x, yi) in data.rows().zip(y) {
                    for j in 0..d {
                        xty[j] += x[j] * yi;
                        for k in j..d {
                            gram[j * d + k] += x[j] * x[k];
                        }
                    }
                }
                for j in 0..d {
                    for k in 0..j {
                        gram[j * d + k] = gram[k * d + j];
                    }
                }
                Stats::Linear { gram, xty, yty: dot(y, y) }
            }
            _ => Stats::Rows,
        };
        Ok(Self { spec, data, stats })
    }

    pub fn spec(&self) -> &ObjectiveSpec {
        self.spec
    }

    pub fn data(&self) -> &Dataset {
        self.data
    }

    pub fn dim(&self) -> usize {
        self.spec.dim
    }

    /// `XᵀX` and `Xᵀy` for the linear objective.
    pub fn normal_equations(&self) -> Option<(&[f64], &[f64])> {
        match &self.stats {
            Stats::Linear { gram, xty, .. } => Some((gram, xty)),
            _ => None,
        }
    }

    pub fn value(&self, theta: &[f64]) -> f64 {
        match &self.stats {
            Stats::Mean { n, sum_x, sum_sq } => sum_sq - 2.0 * dot(sum_x, theta) + n * dot(theta, theta),
            Stats::Linear { gram, xty, yty } => {
                let d = theta.len();
                let mut quad = 0.0;
                for j in 0..d {
                    quad += theta[j] * dot(&gram[j * d..(j + 1) * d], theta);
                }
                yty - 2.0 * dot(xty, theta) + quad
            }
            Stats::Rows => {
                // Dimensions were validated in `prepare`.
                self.spec.value(self.data, theta).unwrap_or(f64::NAN)
            }
        }
    }

    /// Writes `∇ℓ_n(θ; D)` into `out`.
    pub fn gradient_into(&self, theta: &[f64], out: &mut [f64]) -> Result<()> {
        match &self.stats {
            Stats::Mean { n, sum_x, .. } => {
                for ((o, s), t) in out.iter_mut().zip(sum_x).zip(theta) {
                    *o = -2.0 * (s - n * t);
                }
                Ok(())
            }
            Stats::Linear { gram, xty, .. } => {
                let d = theta.len();
                for j in 0..d {
                    out[j] = 2.0 * (dot(&gram[j * d..(j + 1) * d], theta) - xty[j]);
                }
                Ok(())
            }
            Stats::Rows => raw_gradient(&self.spec.kind, self.data, theta, out),
        }
    }

    pub fn gradient(&self, theta: &[f64]) -> Result<Vec<f64>> {
        let mut g = vec![0.0; self.dim()];
        self.gradient_into(theta, &mut g)?;
        Ok(g)
    }
}
