use std::fmt;
use std::io::Write;
use std::path::Path;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::data::{benchmark_theta, generate_regression_data_with, ErrorModel, RegressionData};
use crate::error::{invalid, Error, Result};
use crate::mechanisms::{exponential, kng, objective_perturbation, MechanismConfig, PrivacyBudget};
use crate::objectives::{Dataset, ObjectiveSpec, SensitivityConstants};
use crate::optimizer::{ols, projected_subgradient, StepRule, SubgradientOptions};
use crate::sampler::{ProposalWidth, SamplerConfig};

/// Estimators compared by the experiments.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SimMechanism {
    NonPrivate,
    Exponential,
    Kng,
    ObjectivePerturbation,
}

impl SimMechanism {
    pub const ALL: [Self; 4] = [Self::NonPrivate, Self::Exponential, Self::Kng, Self::ObjectivePerturbation];

    pub fn as_str(&self) -> &'static str {
        match self {
            Self::NonPrivate => "non-private",
            Self::Exponential => "exponential",
            Self::Kng => "kng",
            Self::ObjectivePerturbation => "objective-perturbation",
        }
    }

    fn stream(&self) -> u64 {
        *self as u64 + 1
    }
}

impl fmt::Display for SimMechanism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SimMechanism {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|m| m.as_str() == s)
            .ok_or_else(|| invalid(format!("unknown experiment mechanism '{s}'")))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub true_theta: Vec<f64>,
    pub n_grid: Vec<usize>,
    pub replicates: usize,
    pub epsilon: f64,
    pub mcmc_steps: usize,
    /// Quantile level; required by the quantile experiment.
    pub tau: Option<f64>,
    pub base_seed: u64,
    pub mechanisms: Vec<SimMechanism>,
    /// Worker threads; `None` uses the available parallelism.
    pub jobs: Option<usize>,
    pub errors: ErrorModel,
    pub constants: SensitivityConstants,
    pub proposal_width: ProposalWidth,
    /// Decimal proposal scales of the sampler (see [`SamplerConfig::levels`]).
    pub proposal_levels: u32,
}

impl ExperimentConfig {
    /// Desk-scale linear regression: `d = 12`, `n ∈ {10², …, 10⁵}`,
    /// 20 replicates, `ε = 1`, 10000 sweeps.
    pub fn linear() -> Self {
        Self {
            true_theta: benchmark_theta(12),
            n_grid: vec![100, 1_000, 10_000, 100_000],
            replicates: 20,
            epsilon: 1.0,
            mcmc_steps: 10_000,
            tau: None,
            base_seed: 0,
            mechanisms: SimMechanism::ALL.to_vec(),
            jobs: None,
            errors: ErrorModel::StandardNormal,
            constants: SensitivityConstants::default(),
            proposal_width: ProposalWidth::Auto,
            proposal_levels: 4,
        }
    }

    /// Desk-scale median regression: `θ* = (0, -1)`, `n ∈ {10, …, 10⁵}`,
    /// 20 replicates, `ε = 1`, 1000 sweeps.
    pub fn quantile() -> Self {
        Self {
            true_theta: benchmark_theta(2),
            n_grid: vec![10, 100, 1_000, 10_000, 100_000],
            mcmc_steps: 1_000,
            tau: Some(0.5),
            mechanisms: vec![SimMechanism::NonPrivate, SimMechanism::Exponential, SimMechanism::Kng],
            ..Self::linear()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.true_theta.is_empty() {
            return Err(invalid("true theta must be nonempty"));
        }
        if self.n_grid.is_empty() || self.n_grid[0] == 0 || self.n_grid.windows(2).any(|w| w[0] >= w[1]) {
            return Err(invalid("n grid must be nonempty, positive and strictly increasing"));
        }
        if self.replicates == 0 {
            return Err(invalid("replicates must be at least 1"));
        }
        PrivacyBudget::new(self.epsilon)?;
        if self.mcmc_steps == 0 {
            return Err(invalid("mcmc steps must be at least 1"));
        }
        if let Some(tau) = self.tau {
            if !(tau > 0.0 && tau < 1.0) {
                return Err(invalid(format!("tau must lie in (0, 1), got {tau}")));
            }
        }
        if self.mechanisms.is_empty() {
            return Err(invalid("at least one mechanism is required"));
        }
        if self.jobs == Some(0) {
            return Err(invalid("jobs must be at least 1"));
        }
        SamplerConfig::new(1, 0).with_width(self.proposal_width.clone()).with_levels(self.proposal_levels).validate()
    }
}

/// Aggregate over the replicates of one `(mechanism, n)` cell.
#[derive(Debug, Clone, PartialEq)]
pub struct ResultRow {
    pub mechanism: SimMechanism,
    pub n: usize,
    /// Mean Euclidean distance to the true parameter.
    pub mean_error: f64,
    pub log10_mean_error: f64,
    /// `sd(log10 error) / √replicates`.
    pub mc_se: f64,
    /// Replicates that produced an estimate.
    pub replicates: usize,
    pub excluded: usize,
    /// Per-replicate errors in replicate order; `None` marks an excluded
    /// replicate. Replicates share their data across mechanisms, so these
    /// support paired comparisons. Not written to CSV.
    pub errors: Vec<Option<f64>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentResult {
    pub rows: Vec<ResultRow>,
}

pub const CSV_HEADER: [&str; 7] =
    ["mechanism", "n", "mean_error", "log10_mean_error", "mc_se", "replicates", "excluded"];

impl ExperimentResult {
    pub fn row(&self, mechanism: SimMechanism, n: usize) -> Option<&ResultRow> {
        self.rows.iter().find(|r| r.mechanism == mechanism && r.n == n)
    }

    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(CSV_HEADER)?;
        for r in &self.rows {
            w.write_record([
                r.mechanism.as_str().to_string(),
                r.n.to_string(),
                r.mean_error.to_string(),
                r.log10_mean_error.to_string(),
                r.mc_se.to_string(),
                r.replicates.to_string(),
                r.excluded.to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> Result<String> {
        let mut buf = Vec::new();
        self.write_csv(&mut buf)?;
        String::from_utf8(buf).map_err(|e| invalid(e.to_string()))
    }

    pub fn write_csv_path(&self, path: impl AsRef<Path>) -> Result<()> {
        let file = std::fs::File::create(path)?;
        self.write_csv(std::io::BufWriter::new(file))
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed of stream `stream` at sample size `n` for the replicate whose seed is
/// `replicate_seed` (`base_seed + replicate index`). Stream 0 generates the
/// data; each mechanism owns a fixed stream, so selecting a subset of
/// mechanisms leaves the others' numbers unchanged.
pub fn derive_seed(replicate_seed: u64, n: usize, stream: u64) -> u64 {
    splitmix64(splitmix64(splitmix64(replicate_seed) ^ n as u64) ^ stream)
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Problem {
    Linear,
    Quantile(f64),
}

fn distance(estimate: &[f64], scale: f64, truth: &[f64]) -> f64 {
    estimate.iter().zip(truth).map(|(e, t)| (scale * e - t).powi(2)).sum::<f64>().sqrt()
}

fn non_private_quantile(data: &Dataset, tau: f64) -> Result<Vec<f64>> {
    let y = data.y().ok_or_else(|| invalid("quantile fit needs responses"))?;
    let start = ols(data.x(), data.n(), data.d(), y)?;
    let radius = 10.0 * (start.iter().map(|v| v.abs()).sum::<f64>() + 1.0);
    let spec = ObjectiveSpec::quantile_loss(data.d(), tau, data.bounds().x_bound, radius)?;
    let objective = spec.prepare(data)?;
    // Warm-started from least squares, so short epochs from a moderate step suffice.
    let opts = SubgradientOptions {
        max_iters: 50_000,
        step: StepRule::Restarted { epoch_len: 200, shrink: 0.5 },
        tolerance: 1e-10,
        initial_step: Some(0.1 * radius),
        ..SubgradientOptions::default()
    };
    let eval = |theta: &[f64], g: &mut [f64]| match objective.gradient_into(theta, g) {
        Ok(()) => objective.value(theta),
        Err(_) => f64::INFINITY,
    };
    Ok(projected_subgradient(eval, radius, &start, &opts)?.theta)
}

fn estimate(
    cfg: &ExperimentConfig,
    problem: Problem,
    mechanism: SimMechanism,
    data: &RegressionData,
    dataset: &Dataset,
    seed: u64,
) -> Result<Vec<f64>> {
    let d = data.d;
    let spec = match problem {
        Problem::Linear => ObjectiveSpec::linear_sse(d, 1.0)?,
        Problem::Quantile(tau) => ObjectiveSpec::quantile_loss(d, tau, 1.0, 1.0)?,
    }
    .with_constants(cfg.constants);
    let sampler = SamplerConfig::new(cfg.mcmc_steps, seed)
        .with_width(cfg.proposal_width.clone())
        .with_levels(cfg.proposal_levels);
    let mech = MechanismConfig::new(PrivacyBudget::new(cfg.epsilon)?, sampler);
    match (mechanism, problem) {
        (SimMechanism::NonPrivate, Problem::Linear) => ols(&data.x, data.n, d, &data.y_scaled),
        (SimMechanism::NonPrivate, Problem::Quantile(tau)) => non_private_quantile(dataset, tau),
        (SimMechanism::Kng, _) => Ok(kng(&spec, dataset, &mech)?.theta),
        (SimMechanism::Exponential, _) => Ok(exponential(&spec, dataset, &mech)?.theta),
        (SimMechanism::ObjectivePerturbation, _) => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            Ok(objective_perturbation(&spec, dataset, &mech, &mut rng)?.theta)
        }
    }
}

/// Errors of every configured mechanism on one replicate.
fn replicate(cfg: &ExperimentConfig, problem: Problem, n: usize, r: usize) -> Vec<Result<f64>> {
    let replicate_seed = cfg.base_seed.wrapping_add(r as u64);
    let d = cfg.true_theta.len();
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(replicate_seed, n, 0));
    let data = match generate_regression_data_with(n, d, &cfg.true_theta, cfg.errors, &mut rng)
        .and_then(|data| data.scaled_dataset().map(|ds| (data, ds)))
    {
        Ok(pair) => pair,
        Err(e) => {
            let msg = e.to_string();
            return cfg.mechanisms.iter().map(|_| Err(invalid(msg.clone()))).collect();
        }
    };
    cfg.mechanisms
        .iter()
        .map(|&m| {
            let seed = derive_seed(replicate_seed, n, m.stream());
            let out = estimate(cfg, problem, m, &data.0, &data.1, seed);
            if let Err(e) = &out {
                log::warn!("{m} failed at n={n}, replicate {r}: {e}");
            }
            out.map(|theta| distance(&theta, data.0.scale, &cfg.true_theta))
        })
        .collect()
}

fn aggregate(mechanism: SimMechanism, n: usize, errors: &[&Result<f64>]) -> ResultRow {
    let ok: Vec<f64> = errors.iter().filter_map(|e| e.as_ref().ok().copied()).collect();
    let k = ok.len();
    let mean_error = ok.iter().sum::<f64>() / k as f64;
    let logs: Vec<f64> = ok.iter().map(|e| e.log10()).collect();
    let mc_se = if k >= 2 {
        let m = logs.iter().sum::<f64>() / k as f64;
        let var = logs.iter().map(|l| (l - m).powi(2)).sum::<f64>() / (k - 1) as f64;
        (var / k as f64).sqrt()
    } else {
        f64::NAN
    };
    ResultRow {
        mechanism,
        n,
        mean_error,
        log10_mean_error: mean_error.log10(),
        mc_se,
        replicates: k,
        excluded: errors.len() - k,
        errors: errors.iter().map(|e| e.as_ref().ok().copied()).collect(),
    }
}

fn run(cfg: &ExperimentConfig, problem: Problem) -> Result<ExperimentResult> {
    cfg.validate()?;
    let tasks: Vec<(usize, usize)> =
        cfg.n_grid.iter().flat_map(|&n| (0..cfg.replicates).map(move |r| (n, r))).collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.jobs.unwrap_or(0))
        .build()
        .map_err(|e| invalid(format!("thread pool: {e}")))?;
    let outcomes: Vec<Vec<Result<f64>>> =
        pool.install(|| tasks.par_iter().map(|&(n, r)| replicate(cfg, problem, n, r)).collect());
    let mut rows = Vec::with_capacity(cfg.mechanisms.len() * cfg.n_grid.len());
    for (m_index, &m) in cfg.mechanisms.iter().enumerate() {
        for (n_index, &n) in cfg.n_grid.iter().enumerate() {
            let cell: Vec<&Result<f64>> = outcomes[n_index * cfg.replicates..(n_index + 1) * cfg.replicates]
                .iter()
                .map(|o| &o[m_index])
                .collect();
            rows.push(aggregate(m, n, &cell));
        }
    }
    Ok(ExperimentResult { rows })
}

/// Linear regression experiment: for each `n` and replicate, generate data,
/// rescale the responses by `R = max |Y_i|`, fit each estimator with `B = 1`,
/// multiply by `R` and record the distance to the true parameter.
pub fn run_linear_experiment(cfg: &ExperimentConfig) -> Result<ExperimentResult> {
    run(cfg, Problem::Linear)
}

/// Quantile regression experiment with `C_X = 1`, `B = 1` and the ℓ∞
/// gradient norm. Objective perturbation does not apply to this loss.
pub fn run_quantile_experiment(cfg: &ExperimentConfig) -> Result<ExperimentResult> {
    let tau = cfg.tau.ok_or_else(|| invalid("the quantile experiment needs tau"))?;
    if cfg.mechanisms.contains(&SimMechanism::ObjectivePerturbation) {
        return Err(invalid("objective perturbation needs a strongly convex loss; the quantile loss is not"));
    }
    run(cfg, Problem::Quantile(tau))
}
