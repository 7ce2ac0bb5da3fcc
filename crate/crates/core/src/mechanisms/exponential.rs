use super::{from_mcmc, MechanismConfig, MechanismName, PrivacyBudget, SanitizedEstimate};
use crate::error::{invalid, Result};
use crate::objectives::{Dataset, FeasibleDomain, ObjectiveSpec, PreparedObjective};
use crate::sampler::{mcmc_draw, SamplerConfig};

/// Unnormalized exponential-mechanism log-density `-ε/(2Δ) · ℓ_n(θ; D)`.
#[derive(Debug, Clone)]
pub struct ExponentialTarget<'a> {
    objective: PreparedObjective<'a>,
    coefficient: f64,
}

impl<'a> ExponentialTarget<'a> {
    pub fn new(spec: &'a ObjectiveSpec, data: &'a Dataset, budget: PrivacyBudget) -> Result<Self> {
        let sensitivity = spec.value_sensitivity()?;
        let objective = spec.prepare(data)?;
        Ok(Self { objective, coefficient: budget.epsilon() / (2.0 * sensitivity) })
    }

    /// `ε / (2Δ)`.
    pub fn coefficient(&self) -> f64 {
        self.coefficient
    }

    pub fn log_density(&self, theta: &[f64]) -> f64 {
        -self.coefficient * self.objective.value(theta)
    }
}

/// Exponential mechanism on the objective value, sampled by MCMC.
pub fn exponential(spec: &ObjectiveSpec, data: &Dataset, cfg: &MechanismConfig) -> Result<SanitizedEstimate> {
    cfg.validate()?;
    let target = ExponentialTarget::new(spec, data, cfg.budget)?;
    let draw = mcmc_draw(|t| target.log_density(t), spec.domain(), &cfg.sampler)?;
    from_mcmc(draw, cfg.sampler.steps, MechanismName::Exponential)
}

/// Exponential mechanism for an arbitrary loss with a known sensitivity.
pub fn exponential_mechanism<F>(
    mut loss: F,
    sensitivity: f64,
    budget: PrivacyBudget,
    domain: &FeasibleDomain,
    sampler: &SamplerConfig,
) -> Result<SanitizedEstimate>
where
    F: FnMut(&[f64]) -> f64,
{
    if !(sensitivity > 0.0 && sensitivity.is_finite()) {
        return Err(invalid(format!("sensitivity must be positive, got {sensitivity}")));
    }
    let c = budget.epsilon() / (2.0 * sensitivity);
    let draw = mcmc_draw(|t| -c * loss(t), domain, sampler)?;
    from_mcmc(draw, sampler.steps, MechanismName::Exponential)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;
    use crate::objectives::DataBounds;

    #[test]
    fn linear_coefficient_is_one_eighth() {
        let spec = ObjectiveSpec::linear_sse(2, 1.0).unwrap();
        let data = Dataset::from_rows(&[vec![1.0, 0.5]], Some(vec![0.25]), DataBounds::default()).unwrap();
        let t = ExponentialTarget::new(&spec, &data, PrivacyBudget::new(1.0).unwrap()).unwrap();
        assert_eq!(t.coefficient(), 0.125);
        let theta = [0.1, 0.2];
        let sse = (0.25 - 0.1 - 0.1f64).powi(2);
        assert!((t.log_density(&theta) + sse / 8.0).abs() < 1e-15);
    }

    #[test]
    fn quantile_coefficient_is_one_quarter() {
        let spec = ObjectiveSpec::quantile_loss(1, 0.5, 1.0, 1.0).unwrap();
        let data = Dataset::from_rows(&[vec![1.0], vec![1.0]], Some(vec![0.5, -0.5]), DataBounds::default()).unwrap();
        let t = ExponentialTarget::new(&spec, &data, PrivacyBudget::new(1.0).unwrap()).unwrap();
        assert_eq!(t.coefficient(), 0.25);
        let value = spec.value(&data, &[0.2]).unwrap();
        assert!((t.log_density(&[0.2]) + value / 4.0).abs() < 1e-15);
    }

    #[test]
    fn median_is_unsupported() {
        let spec = ObjectiveSpec::geometric_median(1, 1.0).unwrap();
        let data = Dataset::from_rows(&[vec![0.5]], None, DataBounds::default()).unwrap();
        assert!(matches!(
            ExponentialTarget::new(&spec, &data, PrivacyBudget::new(1.0).unwrap()),
            Err(Error::Unsupported(_))
        ));
    }
}
