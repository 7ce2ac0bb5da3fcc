//! Privacy mechanisms. Each call spends the full budget on a single release;
//! repeated releases compose and are the caller's responsibility.

mod exponential;
mod kng;
mod knorm_mean;
mod objective_perturbation;
mod private_quantile;

use std::fmt;
use std::str::FromStr;

pub use exponential::{exponential, exponential_mechanism, ExponentialTarget};
pub use kng::{kng, KngTarget};
pub use knorm_mean::{knorm_mean, knorm_mean_rate};
pub use objective_perturbation::{
    objective_perturbation, objective_perturbation_defaults, solve_perturbed_objective, ObjectivePerturbationConfig,
};
pub use private_quantile::{private_quantile, PrivateQuantile, QuantilePiece};

use crate::error::{invalid, Error, Result};
use crate::sampler::SamplerConfig;

/// Privacy-loss parameter `ε > 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PrivacyBudget(f64);

impl PrivacyBudget {
    pub fn new(epsilon: f64) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon.is_finite()) {
            return Err(invalid(format!("epsilon must be positive and finite, got {epsilon}")));
        }
        Ok(Self(epsilon))
    }

    pub fn epsilon(&self) -> f64 {
        self.0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MechanismConfig {
    pub budget: PrivacyBudget,
    pub sampler: SamplerConfig,
    /// Overrides the default regularization and noise rate of objective
    /// perturbation.
    pub objective_perturbation: Option<ObjectivePerturbationConfig>,
}

impl MechanismConfig {
    pub fn new(budget: PrivacyBudget, sampler: SamplerConfig) -> Self {
        Self { budget, sampler, objective_perturbation: None }
    }

    pub fn with_objective_perturbation(mut self, cfg: ObjectivePerturbationConfig) -> Self {
        self.objective_perturbation = Some(cfg);
        self
    }

    pub fn validate(&self) -> Result<()> {
        self.sampler.validate()?;
        if let Some(op) = &self.objective_perturbation {
            op.validate()?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum MechanismName {
    Kng,
    Exponential,
    KNormMean,
    ObjectivePerturbation,
    PrivateQuantile,
}

impl MechanismName {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::Kng => "kng",
            Self::Exponential => "exponential",
            Self::KNormMean => "knorm-mean",
            Self::ObjectivePerturbation => "objective-perturbation",
            Self::PrivateQuantile => "private-quantile",
        }
    }
}

impl fmt::Display for MechanismName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for MechanismName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        [Self::Kng, Self::Exponential, Self::KNormMean, Self::ObjectivePerturbation, Self::PrivateQuantile]
            .into_iter()
            .find(|m| m.as_str() == s)
            .ok_or_else(|| invalid(format!("unknown mechanism '{s}'")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Diagnostics {
    pub mcmc_acceptance_rate: Option<f64>,
    pub optimizer_final_gap: Option<f64>,
}

/// One sanitized release.
#[derive(Debug, Clone, PartialEq)]
pub struct SanitizedEstimate {
    pub theta: Vec<f64>,
    pub mechanism: MechanismName,
    pub diagnostics: Diagnostics,
}

pub(crate) fn from_mcmc(
    draw: crate::sampler::McmcDraw,
    steps: usize,
    mechanism: MechanismName,
) -> Result<SanitizedEstimate> {
    if draw.acceptance_rate == 0.0 {
        return Err(Error::SamplingFailure { steps, acceptance_rate: 0.0 });
    }
    Ok(SanitizedEstimate {
        theta: draw.theta,
        mechanism,
        diagnostics: Diagnostics { mcmc_acceptance_rate: Some(draw.acceptance_rate), optimizer_final_gap: None },
    })
}
