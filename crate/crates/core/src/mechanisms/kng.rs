use super::{from_mcmc, MechanismConfig, MechanismName, PrivacyBudget, SanitizedEstimate};
use crate::error::{Error, Result};
use crate::norms::NormKind;
use crate::objectives::{Dataset, ObjectiveSpec, PreparedObjective};
use crate::sampler::mcmc_draw;

/// Offset applied to the first coordinate when the chain lands exactly on a
/// point where the gradient is undefined.
const COLLISION_NUDGE: f64 = 1e-12;

/// Unnormalized KNG log-density `-ε/(2Δ) · ‖∇ℓ_n(θ; D)‖` for one dataset.
#[derive(Debug, Clone)]
pub struct KngTarget<'a> {
    objective: PreparedObjective<'a>,
    norm: NormKind,
    coefficient: f64,
    gradient: Vec<f64>,
    nudged: Vec<f64>,
}

impl<'a> KngTarget<'a> {
    pub fn new(spec: &'a ObjectiveSpec, data: &'a Dataset, budget: PrivacyBudget) -> Result<Self> {
        let objective = spec.prepare(data)?;
        let coefficient = budget.epsilon() / (2.0 * spec.gradient_sensitivity());
        let d = spec.dim();
        Ok(Self { objective, norm: spec.gradient_norm(), coefficient, gradient: vec![0.0; d], nudged: vec![0.0; d] })
    }

    /// `ε / (2Δ)`.
    pub fn coefficient(&self) -> f64 {
        self.coefficient
    }

    /// The score `‖∇ℓ_n(θ; D)‖`.
    pub fn score(&mut self, theta: &[f64]) -> f64 {
        match self.objective.gradient_into(theta, &mut self.gradient) {
            Ok(()) => self.norm.eval(&self.gradient),
            Err(Error::NonDifferentiable { .. }) => {
                self.nudged.copy_from_slice(theta);
                self.nudged[0] += COLLISION_NUDGE;
                match self.objective.gradient_into(&self.nudged, &mut self.gradient) {
                    Ok(()) => self.norm.eval(&self.gradient),
                    Err(_) => f64::INFINITY,
                }
            }
            Err(_) => f64::INFINITY,
        }
    }

    pub fn log_density(&mut self, theta: &[f64]) -> f64 {
        -self.coefficient * self.score(theta)
    }
}

/// Draws one KNG release: a sample from the density proportional to
/// `exp(-ε/(2Δ) · ‖∇ℓ_n(θ; D)‖)` with respect to the uniform measure on the
/// objective's domain, produced by the coordinate-wise Metropolis sampler.
pub fn kng(spec: &ObjectiveSpec, data: &Dataset, cfg: &MechanismConfig) -> Result<SanitizedEstimate> {
    cfg.validate()?;
    let mut target = KngTarget::new(spec, data, cfg.budget)?;
    let draw = mcmc_draw(|t| target.log_density(t), spec.domain(), &cfg.sampler)?;
    from_mcmc(draw, cfg.sampler.steps, MechanismName::Kng)
}
