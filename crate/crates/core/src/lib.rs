//! Differentially private estimation with the K-norm gradient mechanism.
//!
//! The crate releases sanitized estimates of convex estimation problems
//! (mean, linear regression, geometric median, quantile regression) with
//! four mechanisms that share one objective abstraction:
//!
//! - [`mechanisms::kng`]: samples `θ` with density proportional to
//!   `exp(-ε/(2Δ) · ‖∇ℓ_n(θ; D)‖)` on the feasible domain,
//! - [`mechanisms::exponential`]: the exponential mechanism on `ℓ_n` itself,
//! - [`mechanisms::knorm_mean`]: additive K-norm noise for the mean,
//! - [`mechanisms::objective_perturbation`]: minimizer of a randomly
//!   perturbed, regularized least-squares objective,
//!
//! plus an exact sampler for private quantiles of a real sample
//! ([`mechanisms::private_quantile`]). The [`simulation`] module reproduces
//! the error-versus-sample-size experiments for linear and quantile
//! regression, and [`cli`] wraps everything in a command-line front end.
//!
//! Runnable examples for each capability live in `examples/`.

pub mod cli;
pub mod error;
pub mod mechanisms;
pub mod norms;
pub mod objectives;
pub mod optimizer;
pub mod sampler;
pub mod simulation;

pub use error::{Error, Result};
pub use mechanisms::{MechanismConfig, PrivacyBudget, SanitizedEstimate};
pub use norms::{KNormNoiseParams, NormKind};
pub use objectives::{DataBounds, Dataset, FeasibleDomain, ObjectiveKind, ObjectiveSpec, SensitivityConstants};
pub use sampler::SamplerConfig;
