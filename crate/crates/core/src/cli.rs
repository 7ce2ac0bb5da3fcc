//! Command-line front end. Exit codes: 0 success, 1 runtime failure,
//! 2 usage error.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::mechanisms::{
    exponential, kng, knorm_mean, objective_perturbation, MechanismConfig, MechanismName, PrivacyBudget,
    PrivateQuantile,
};
use crate::norms::NormKind;
use crate::objectives::{DataBounds, Dataset, ObjectiveSpec, SensitivityConstants};
use crate::sampler::SamplerConfig;
use crate::simulation::{
    benchmark_theta, run_linear_experiment, run_quantile_experiment, ExperimentConfig, ExperimentResult, SimMechanism,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "kng", version, about = "Differentially private estimation with the K-norm gradient mechanism")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Linear regression utility experiment; writes one CSV row per (mechanism, n).
    SimulateLinear(SimulateLinear),
    /// Quantile regression utility experiment; writes one CSV row per (mechanism, n).
    SimulateQuantile(SimulateQuantile),
    /// One sanitized release on a CSV dataset; prints the estimate as a CSV row.
    Release(Release),
}

fn parse_mechanism(s: &str) -> std::result::Result<SimMechanism, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

#[derive(Debug, Args)]
struct Common {
    /// Privacy budget per release.
    #[arg(long, default_value_t = 1.0)]
    epsilon: f64,
    /// Replicates per sample size.
    #[arg(long, default_value_t = 20)]
    replicates: usize,
    /// Base seed; replicate r uses seed + r.
    #[arg(long, env = "KNG_SEED", default_value_t = 0)]
    seed: u64,
    /// Worker threads [default: available parallelism].
    #[arg(long)]
    jobs: Option<usize>,
    /// Use the literal textbook sensitivity constants instead of the worst-case ones.
    #[arg(long)]
    paper_constants: bool,
    /// Decimal proposal scales of the Metropolis sampler; 1 gives a single fixed width.
    #[arg(long, default_value_t = 4)]
    proposal_levels: u32,
}

#[derive(Debug, Args)]
struct SimulateLinear {
    #[command(flatten)]
    common: Common,
    /// Comma-separated, strictly increasing sample sizes.
    #[arg(long, value_delimiter = ',', default_value = "100,1000,10000,100000")]
    n_grid: Vec<usize>,
    /// Metropolis sweeps per draw.
    #[arg(long, default_value_t = 10_000)]
    mcmc_steps: usize,
    /// Number of regression coefficients, intercept included.
    #[arg(long, default_value_t = 12)]
    dim: usize,
    /// Comma-separated subset of non-private, exponential, kng, objective-perturbation.
    #[arg(
        long,
        value_delimiter = ',',
        value_parser = parse_mechanism,
        default_value = "non-private,exponential,kng,objective-perturbation"
    )]
    mechanisms: Vec<SimMechanism>,
    /// Output CSV path.
    #[arg(long, default_value = "linear.csv")]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct SimulateQuantile {
    #[command(flatten)]
    common: Common,
    /// Quantile level in (0, 1).
    #[arg(long, default_value_t = 0.5)]
    tau: f64,
    /// Comma-separated, strictly increasing sample sizes.
    #[arg(long, value_delimiter = ',', default_value = "10,100,1000,10000,100000")]
    n_grid: Vec<usize>,
    /// Metropolis sweeps per draw.
    #[arg(long, default_value_t = 1_000)]
    mcmc_steps: usize,
    /// Number of regression coefficients, intercept included.
    #[arg(long, default_value_t = 2)]
    dim: usize,
    /// Comma-separated subset of non-private, exponential, kng.
    #[arg(long, value_delimiter = ',', value_parser = parse_mechanism, default_value = "non-private,exponential,kng")]
    mechanisms: Vec<SimMechanism>,
    /// Output CSV path.
    #[arg(long, default_value = "quantile.csv")]
    out: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ObjectiveArg {
    Mean,
    Linear,
    Median,
    Quantile,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MechanismArg {
    Kng,
    Exponential,
    KnormMean,
    ObjectivePerturbation,
    PrivateQuantile,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum NormArg {
    L1,
    L2,
    Linf,
}

impl From<NormArg> for NormKind {
    fn from(n: NormArg) -> Self {
        match n {
            NormArg::L1 => NormKind::L1,
            NormArg::L2 => NormKind::L2,
            NormArg::Linf => NormKind::LInf,
        }
    }
}

#[derive(Debug, Args)]
struct Release {
    /// CSV with header x1,...,xd and an optional trailing y column.
    #[arg(long)]
    data: PathBuf,
    #[arg(long, value_enum)]
    objective: ObjectiveArg,
    #[arg(long, value_enum)]
    mechanism: MechanismArg,
    /// Privacy budget.
    #[arg(long, default_value_t = 1.0)]
    epsilon: f64,
    /// Seed for all randomness of the release.
    #[arg(long, env = "KNG_SEED", default_value_t = 0)]
    seed: u64,
    /// l1 bound on the regression coefficients (linear, quantile).
    #[arg(long, default_value_t = 1.0)]
    bound_b: f64,
    /// Data radius for the mean, or half-width of the median's search box.
    #[arg(long, default_value_t = 1.0)]
    radius_r: f64,
    /// Quantile level in (0, 1).
    #[arg(long, default_value_t = 0.5)]
    tau: f64,
    /// Bound on the covariate norm for the quantile objective.
    #[arg(long, default_value_t = 1.0)]
    cx: f64,
    /// Bound on |x_ij|.
    #[arg(long, default_value_t = 1.0)]
    x_bound: f64,
    /// Bound on |y_i|.
    #[arg(long, default_value_t = 1.0)]
    y_bound: f64,
    /// Gradient norm [default: l2 for mean and median, linf for regression].
    #[arg(long, value_enum)]
    norm: Option<NormArg>,
    /// Metropolis sweeps for the sampling mechanisms.
    #[arg(long, default_value_t = 10_000)]
    mcmc_steps: usize,
    /// Decimal proposal scales of the Metropolis sampler; 1 gives a single fixed width.
    #[arg(long, default_value_t = 1)]
    proposal_levels: u32,
    /// Lower end of the private-quantile interval [default: -y-bound].
    #[arg(long, allow_hyphen_values = true)]
    interval_lo: Option<f64>,
    /// Upper end of the private-quantile interval [default: y-bound].
    #[arg(long, allow_hyphen_values = true)]
    interval_hi: Option<f64>,
    /// Use the literal textbook sensitivity constants instead of the worst-case ones.
    #[arg(long)]
    paper_constants: bool,
}

fn constants(literal: bool) -> SensitivityConstants {
    if literal {
        SensitivityConstants::Literal
    } else {
        SensitivityConstants::Safe
    }
}

enum Failure {
    Usage(String),
    Runtime(String),
}

impl Failure {
    fn usage(e: Error) -> Self {
        Self::Usage(e.to_string())
    }

    fn runtime(e: Error) -> Self {
        match e {
            Error::InvalidArgument(_) | Error::Unsupported(_) => Self::Usage(e.to_string()),
            other => Self::Runtime(other.to_string()),
        }
    }
}

fn simulate(
    cfg: ExperimentConfig,
    out: &PathBuf,
    run: fn(&ExperimentConfig) -> Result<ExperimentResult>,
    stdout: &mut dyn Write,
) -> std::result::Result<(), Failure> {
    cfg.validate().map_err(Failure::usage)?;
    let start = Instant::now();
    let result = run(&cfg).map_err(Failure::runtime)?;
    result.write_csv_path(out).map_err(|e| Failure::Runtime(e.to_string()))?;
    let _ = writeln!(
        stdout,
        "wrote {} ({} rows) in {:.2}s",
        out.display(),
        result.rows.len(),
        start.elapsed().as_secs_f64()
    );
    Ok(())
}

fn experiment_config(common: &Common, n_grid: &[usize], mcmc_steps: usize, dim: usize) -> ExperimentConfig {
    ExperimentConfig {
        true_theta: benchmark_theta(dim),
        n_grid: n_grid.to_vec(),
        replicates: common.replicates,
        epsilon: common.epsilon,
        mcmc_steps,
        base_seed: common.seed,
        jobs: common.jobs,
        constants: constants(common.paper_constants),
        proposal_levels: common.proposal_levels,
        ..ExperimentConfig::linear()
    }
}

fn simulate_linear(args: &SimulateLinear, stdout: &mut dyn Write) -> std::result::Result<(), Failure> {
    let cfg = ExperimentConfig {
        mechanisms: args.mechanisms.clone(),
        ..experiment_config(&args.common, &args.n_grid, args.mcmc_steps, args.dim)
    };
    simulate(cfg, &args.out, run_linear_experiment, stdout)
}

fn simulate_quantile(args: &SimulateQuantile, stdout: &mut dyn Write) -> std::result::Result<(), Failure> {
    if args.mechanisms.contains(&SimMechanism::ObjectivePerturbation) {
        return Err(Failure::Usage(
            "objective perturbation needs a strongly convex loss; the quantile loss is not".into(),
        ));
    }
    let cfg = ExperimentConfig {
        tau: Some(args.tau),
        mechanisms: args.mechanisms.clone(),
        ..experiment_config(&args.common, &args.n_grid, args.mcmc_steps, args.dim)
    };
    simulate(cfg, &args.out, run_quantile_experiment, stdout)
}

fn release_spec(args: &Release, d: usize) -> Result<ObjectiveSpec> {
    let spec = match args.objective {
        ObjectiveArg::Mean => ObjectiveSpec::mean_sse(d, args.radius_r)?,
        ObjectiveArg::Linear => ObjectiveSpec::linear_sse(d, args.bound_b)?,
        ObjectiveArg::Median => ObjectiveSpec::geometric_median(d, args.radius_r)?,
        ObjectiveArg::Quantile => ObjectiveSpec::quantile_loss(d, args.tau, args.cx, args.bound_b)?,
    };
    let spec =
        spec.with_bounds(DataBounds::new(args.x_bound, args.y_bound)?).with_constants(constants(args.paper_constants));
    Ok(match args.norm {
        Some(n) => spec.with_gradient_norm(n.into()),
        None => spec,
    })
}

fn check_pair(objective: ObjectiveArg, mechanism: MechanismArg) -> std::result::Result<(), Failure> {
    let message = match (mechanism, objective) {
        (MechanismArg::ObjectivePerturbation, ObjectiveArg::Linear)
        | (MechanismArg::KnormMean, ObjectiveArg::Mean)
        | (MechanismArg::PrivateQuantile, ObjectiveArg::Quantile)
        | (MechanismArg::Kng, _) => return Ok(()),
        (MechanismArg::Exponential, ObjectiveArg::Median) => {
            "the exponential mechanism needs a bounded objective-value sensitivity, which the median objective lacks"
                .to_string()
        }
        (MechanismArg::Exponential, _) => return Ok(()),
        (MechanismArg::ObjectivePerturbation, o) => format!(
            "objective perturbation needs a strongly convex loss with a bounded Hessian; \
             the {o:?} objective is not supported (only linear)"
        )
        .to_lowercase(),
        (MechanismArg::KnormMean, _) => "knorm-mean releases a mean; use --objective mean".to_string(),
        (MechanismArg::PrivateQuantile, _) => "private-quantile needs --objective quantile".to_string(),
    };
    Err(Failure::Usage(format!("incompatible objective and mechanism: {message}")))
}

fn release(args: &Release, stdout: &mut dyn Write) -> std::result::Result<(), Failure> {
    check_pair(args.objective, args.mechanism)?;
    let budget = PrivacyBudget::new(args.epsilon).map_err(Failure::usage)?;
    let bounds = DataBounds::new(args.x_bound, args.y_bound).map_err(Failure::usage)?;
    let data = Dataset::from_csv_path(&args.data, bounds).map_err(|e| Failure::Runtime(e.to_string()))?;
    let spec = release_spec(args, data.d()).map_err(Failure::usage)?;
    let sampler = SamplerConfig::new(args.mcmc_steps, args.seed).with_levels(args.proposal_levels);
    let cfg = MechanismConfig::new(budget, sampler);
    cfg.validate().map_err(Failure::usage)?;
    let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
    let theta = match args.mechanism {
        MechanismArg::Kng => kng(&spec, &data, &cfg),
        MechanismArg::Exponential => exponential(&spec, &data, &cfg),
        MechanismArg::ObjectivePerturbation => objective_perturbation(&spec, &data, &cfg, &mut rng),
        MechanismArg::KnormMean => spec
            .check_data(&data)
            .and_then(|()| knorm_mean(&data, spec.gradient_norm(), args.radius_r, budget, &mut rng)),
        MechanismArg::PrivateQuantile => {
            let values = match data.y() {
                Some(y) => y.to_vec(),
                None if data.d() == 1 => data.x().to_vec(),
                None => return Err(Failure::Usage("private-quantile needs a y column or a single x1 column".into())),
            };
            let lo = args.interval_lo.unwrap_or(-args.y_bound);
            let hi = args.interval_hi.unwrap_or(args.y_bound);
            PrivateQuantile::new(args.tau, lo, hi)
                .map_err(Failure::usage)?
                .with_constants(constants(args.paper_constants))
                .sample(&values, budget, &mut rng)
                .map(|v| crate::mechanisms::SanitizedEstimate {
                    theta: vec![v],
                    mechanism: MechanismName::PrivateQuantile,
                    diagnostics: Default::default(),
                })
        }
    }
    .map_err(Failure::runtime)?
    .theta;
    let row: Vec<String> = theta.iter().map(f64::to_string).collect();
    let _ = writeln!(stdout, "{}", row.join(","));
    Ok(())
}

/// Parses `args` (program name first) and runs the command. Returns the
/// process exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = write!(stderr, "{text}");
                EXIT_USAGE
            } else {
                let _ = write!(stdout, "{text}");
                EXIT_OK
            };
        }
    };
    let outcome = match &cli.command {
        Command::SimulateLinear(a) => simulate_linear(a, stdout),
        Command::SimulateQuantile(a) => simulate_quantile(a, stdout),
        Command::Release(a) => release(a, stdout),
    };
    match outcome {
        Ok(()) => EXIT_OK,
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(stderr, "error: {msg}");
            EXIT_USAGE
        }
        Err(Failure::Runtime(msg)) => {
            let _ = writeln!(stderr, "error: {msg}");
            EXIT_FAILURE
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn call(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run(std::iter::once("kng").chain(args.iter().copied()), &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn help_lists_flags() {
        let (code, out, _) = call(&["simulate-linear", "--help"]);
        assert_eq!(code, 0);
        for flag in ["--epsilon", "--n-grid", "--replicates", "--mcmc-steps", "--seed", "--out", "--jobs"] {
            assert!(out.contains(flag), "{flag} missing from help");
        }
    }

    #[test]
    fn usage_errors_exit_two() {
        assert_eq!(call(&["simulate-linear", "--replicates", "0"]).0, 2);
        assert_eq!(call(&["simulate-quantile", "--tau", "1.5"]).0, 2);
        assert_eq!(call(&["simulate-linear", "--bogus"]).0, 2);
        assert_eq!(call(&["simulate-linear", "--mechanisms", "laplace"]).0, 2);
        let (code, _, err) = call(&["simulate-quantile", "--mechanisms", "objective-perturbation"]);
        assert_eq!(code, 2);
        assert!(err.contains("strongly convex"));
    }

    #[test]
    fn pair_checks() {
        assert!(check_pair(ObjectiveArg::Quantile, MechanismArg::ObjectivePerturbation).is_err());
        assert!(check_pair(ObjectiveArg::Median, MechanismArg::Exponential).is_err());
        assert!(check_pair(ObjectiveArg::Linear, MechanismArg::KnormMean).is_err());
        assert!(check_pair(ObjectiveArg::Median, MechanismArg::Kng).is_ok());
    }
}
