//! One-at-a-time random-walk Metropolis over a bounded convex domain.
//!
//! A sweep visits coordinates `0..d` in order. Each coordinate proposal is
//! `θ_j + U(-w_j, w_j)`; proposals that leave the domain are rejected, which
//! keeps the uniform base measure on the domain intact. The draw is the state
//! after the last sweep.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{invalid, Result};
use crate::objectives::FeasibleDomain;

/// Fraction of the domain's per-coordinate extent used as the default
/// proposal half-width.
pub const DEFAULT_WIDTH_FRACTION: f64 = 0.05;

#[derive(Debug, Clone, PartialEq)]
pub enum ProposalWidth {
    /// `DEFAULT_WIDTH_FRACTION` × the domain's extent along each coordinate.
    Auto,
    Fixed(f64),
    PerCoordinate(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq)]
pub enum ChainInit {
    DomainCenter,
    Given(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SamplerConfig {
    pub steps: usize,
    pub proposal_width: ProposalWidth,
    pub seed: u64,
    pub init: ChainInit,
    /// Number of decimal proposal scales. With `k > 1` levels each coordinate
    /// proposal first picks a level `l` uniformly from `0..k` and uses the
    /// half-width `w · 10^-l`. A mixture of symmetric kernels is symmetric, so
    /// the target is unchanged; the small levels let the chain resolve
    /// densities much narrower than `w`.
    pub levels: u32,
}

impl SamplerConfig {
    pub fn new(steps: usize, seed: u64) -> Self {
        Self { steps, proposal_width: ProposalWidth::Auto, seed, init: ChainInit::DomainCenter, levels: 1 }
    }

    pub fn with_levels(mut self, levels: u32) -> Self {
        self.levels = levels;
        self
    }

    pub fn with_width(mut self, width: ProposalWidth) -> Self {
        self.proposal_width = width;
        self
    }

    pub fn with_init(mut self, init: ChainInit) -> Self {
        self.init = init;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.steps == 0 {
            return Err(invalid("sampler needs at least one sweep"));
        }
        if !(1..=12).contains(&self.levels) {
            return Err(invalid(format!("proposal levels must lie in 1..=12, got {}", self.levels)));
        }
        let ok = |w: f64| w > 0.0 && w.is_finite();
        match &self.proposal_width {
            ProposalWidth::Auto => {}
            ProposalWidth::Fixed(w) if ok(*w) => {}
            ProposalWidth::PerCoordinate(ws) if !ws.is_empty() && ws.iter().all(|w| ok(*w)) => {}
            other => return Err(invalid(format!("proposal width must be positive, got {other:?}"))),
        }
        Ok(())
    }

    fn widths(&self, domain: &FeasibleDomain) -> Result<Vec<f64>> {
        let d = domain.dim();
        match &self.proposal_width {
            ProposalWidth::Auto => Ok((0..d).map(|j| DEFAULT_WIDTH_FRACTION * domain.coordinate_extent(j)).collect()),
            ProposalWidth::Fixed(w) => Ok(vec![*w; d]),
            ProposalWidth::PerCoordinate(ws) if ws.len() == d => Ok(ws.clone()),
            ProposalWidth::PerCoordinate(ws) => {
                Err(invalid(format!("{} proposal widths for a {d}-dimensional domain", ws.len())))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct McmcDraw {
    pub theta: Vec<f64>,
    /// Accepted moves over all coordinate proposals, including proposals
    /// rejected for leaving the domain.
    pub acceptance_rate: f64,
}

/// Runs one chain and returns its final state.
pub fn mcmc_draw<F>(mut log_density: F, domain: &FeasibleDomain, cfg: &SamplerConfig) -> Result<McmcDraw>
where
    F: FnMut(&[f64]) -> f64,
{
    cfg.validate()?;
    let widths = cfg.widths(domain)?;
    let mut theta = match &cfg.init {
        ChainInit::DomainCenter => domain.center(),
        ChainInit::Given(v) => v.clone(),
    };
    if !domain.contains(&theta) {
        return Err(invalid("chain initialization lies outside the domain"));
    }
    let mut current = log_density(&theta);
    if !current.is_finite() {
        return Err(invalid(format!("log density is not finite at the initial state ({current})")));
    }

    let scales: Vec<f64> = (0..cfg.levels as i32).map(|l| 10f64.powi(-l)).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut accepted = 0usize;
    for _ in 0..cfg.steps {
        for j in 0..theta.len() {
            let old = theta[j];
            let w = if cfg.levels > 1 { widths[j] * scales[rng.random_range(0..scales.len())] } else { widths[j] };
            theta[j] = old + w * (2.0 * rng.random::<f64>() - 1.0);
            // The uniform draw for the accept step is consumed regardless of
            // the outcome so the random stream does not depend on the domain.
            let u: f64 = rng.random();
            if !domain.contains(&theta) {
                theta[j] = old;
                continue;
            }
            let proposed = log_density(&theta);
            // NaN compares false and is rejected.
            if proposed >= current || u.ln() < proposed - current {
                current = proposed;
                accepted += 1;
            } else {
                theta[j] = old;
            }
        }
    }
    let proposals = cfg.steps * theta.len();
    let acceptance_rate = accepted as f64 / proposals as f64;
    if !(0.1..=0.7).contains(&acceptance_rate) {
        log::warn!("mcmc acceptance rate {acceptance_rate:.3} outside [0.1, 0.7]");
    }
    Ok(McmcDraw { theta, acceptance_rate })
}
