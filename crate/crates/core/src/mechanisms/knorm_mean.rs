use rand::Rng;

use super::{Diagnostics, MechanismName, PrivacyBudget, SanitizedEstimate};
use crate::error::{invalid, Result};
use crate::norms::{sample_knorm_noise, KNormNoiseParams, NormKind};
use crate::objectives::Dataset;

/// Noise rate `nε/(2r)` of the K-norm mechanism for the mean. The output
/// is a location family, so the full budget goes into the exponent.
pub fn knorm_mean_rate(n: usize, radius: f64, budget: PrivacyBudget) -> f64 {
    n as f64 * budget.epsilon() / (2.0 * radius)
}

/// Releases `x̄ + b` with `b` drawn exactly from the K-norm distribution.
pub fn knorm_mean<R: Rng + ?Sized>(
    data: &Dataset,
    kind: NormKind,
    radius: f64,
    budget: PrivacyBudget,
    rng: &mut R,
) -> Result<SanitizedEstimate> {
    if !(radius > 0.0 && radius.is_finite()) {
        return Err(invalid(format!("radius must be positive, got {radius}")));
    }
    if let Some((i, len)) = data.rows().map(|x| kind.eval(x)).enumerate().find(|(_, len)| *len > radius) {
        return Err(invalid(format!("row {} has {kind} norm {len} > r = {radius}", i + 1)));
    }
    let n = data.n();
    let d = data.d();
    let mut mean = vec![0.0; d];
    for x in data.rows() {
        for (m, v) in mean.iter_mut().zip(x) {
            *m += v;
        }
    }
    let params = KNormNoiseParams::new(d, kind, knorm_mean_rate(n, radius, budget))?;
    let noise = sample_knorm_noise(&params, rng);
    let theta = mean.iter().zip(&noise).map(|(m, b)| m / n as f64 + b).collect();
    Ok(SanitizedEstimate { theta, mechanism: MechanismName::KNormMean, diagnostics: Diagnostics::default() })
}
