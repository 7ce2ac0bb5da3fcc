use nalgebra::DMatrix;
use rand::Rng;

use super::{Diagnostics, MechanismConfig, MechanismName, SanitizedEstimate};
use crate::error::{invalid, Error, Result};
use crate::norms::{sample_knorm_noise, KNormNoiseParams};
use crate::objectives::{Dataset, FeasibleDomain, ObjectiveKind, ObjectiveSpec, PreparedObjective};
use crate::optimizer::{kkt_residual, projected_subgradient, StepRule, SubgradientOptions};

/// Regularization weight `γ` and noise rate of objective perturbation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ObjectivePerturbationConfig {
    pub gamma: f64,
    pub noise_rate: f64,
}

impl ObjectivePerturbationConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.gamma >= 0.0 && self.gamma.is_finite()) {
            return Err(invalid(format!("gamma must be nonnegative, got {}", self.gamma)));
        }
        if !(self.noise_rate > 0.0 && self.noise_rate.is_finite()) {
            return Err(invalid(format!("noise rate must be positive, got {}", self.noise_rate)));
        }
        Ok(())
    }
}

/// Default constants for the linear objective: the per-record Hessian
/// `2 x xᵀ` has largest eigenvalue at most `2 d x_bound²`, giving
/// `γ = 2 d x_bound² / (exp(ε/2) − 1)`; the noise uses the gradient norm with
/// rate `ε / (2Δ)`.
pub fn objective_perturbation_defaults(spec: &ObjectiveSpec, epsilon: f64) -> ObjectivePerturbationConfig {
    let hessian_bound = 2.0 * spec.dim() as f64 * spec.bounds().x_bound.powi(2);
    ObjectivePerturbationConfig {
        gamma: hessian_bound / ((epsilon / 2.0).exp() - 1.0),
        noise_rate: epsilon / (2.0 * spec.gradient_sensitivity()),
    }
}

fn ball_radius(spec: &ObjectiveSpec) -> Result<f64> {
    match (spec.kind(), spec.domain()) {
        (ObjectiveKind::LinearSse { .. }, FeasibleDomain::L1Ball { radius, .. }) => Ok(*radius),
        (ObjectiveKind::LinearSse { .. }, _) => Err(Error::Unsupported(
            "objective perturbation searches an l1 ball; the linear objective's domain is not one".into(),
        )),
        (other, _) => Err(Error::Unsupported(format!(
            "objective perturbation needs a strongly convex loss; the {} objective is not",
            other.name()
        ))),
    }
}

/// Minimizes `ℓ_n(θ) + (γ/2)‖θ‖² + θᵀb` over the linear objective's ℓ1
/// ball. Returns the minimizer and its KKT residual.
pub fn solve_perturbed_objective(objective: &PreparedObjective<'_>, gamma: f64, b: &[f64]) -> Result<(Vec<f64>, f64)> {
    let radius = ball_radius(objective.spec())?;
    let d = objective.dim();
    if b.len() != d {
        return Err(invalid(format!("perturbation has length {}, expected {d}", b.len())));
    }
    let (gram, _) = objective.normal_equations().ok_or_else(|| invalid("missing normal equations"))?;
    let lambda_max = DMatrix::from_row_slice(d, d, gram).symmetric_eigenvalues().iter().fold(0.0f64, |m, v| m.max(*v));
    let smoothness = 2.0 * lambda_max + gamma;
    if smoothness.is_nan() || smoothness <= 0.0 {
        return Err(Error::SingularSystem);
    }
    let opts = SubgradientOptions {
        max_iters: 200_000,
        tolerance: 1e-10 * smoothness * radius,
        step: StepRule::Constant { step: 1.0 / smoothness },
        ..SubgradientOptions::default()
    };
    let eval = |theta: &[f64], g: &mut [f64]| -> f64 {
        // The linear objective always has a gradient.
        let _ = objective.gradient_into(theta, g);
        let mut value = objective.value(theta);
        for ((gj, tj), bj) in g.iter_mut().zip(theta).zip(b) {
            *gj += gamma * tj + bj;
            value += 0.5 * gamma * tj * tj + tj * bj;
        }
        value
    };
    let solution = projected_subgradient(eval, radius, &vec![0.0; d], &opts)?;
    let mut grad = objective.gradient(&solution.theta)?;
    for ((gj, tj), bj) in grad.iter_mut().zip(&solution.theta).zip(b) {
        *gj += gamma * tj + bj;
    }
    let residual = kkt_residual(&solution.theta, &grad, radius);
    Ok((solution.theta, residual))
}

/// Objective perturbation for linear regression: draw `b` from the K-norm
/// distribution in the gradient norm, then release the minimizer of the
/// perturbed, regularized objective over the ℓ1 ball.
pub fn objective_perturbation<R: Rng + ?Sized>(
    spec: &ObjectiveSpec,
    data: &Dataset,
    cfg: &MechanismConfig,
    rng: &mut R,
) -> Result<SanitizedEstimate> {
    ball_radius(spec)?;
    let constants = match cfg.objective_perturbation {
        Some(c) => {
            c.validate()?;
            c
        }
        None => objective_perturbation_defaults(spec, cfg.budget.epsilon()),
    };
    let objective = spec.prepare(data)?;
    let params = KNormNoiseParams::new(spec.dim(), spec.gradient_norm(), constants.noise_rate)?;
    let b = sample_knorm_noise(&params, rng);
    let (theta, residual) = solve_perturbed_objective(&objective, constants.gamma, &b)?;
    Ok(SanitizedEstimate {
        theta,
        mechanism: MechanismName::ObjectivePerturbation,
        diagnostics: Diagnostics { mcmc_acceptance_rate: None, optimizer_final_gap: Some(residual) },
    })
}
