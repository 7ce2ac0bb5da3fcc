//! Monte-Carlo utility experiments: synthetic regression data, the linear and
//! quantile regression harnesses, and their CSV output.

mod data;
mod experiment;

pub use data::{benchmark_theta, generate_regression_data, generate_regression_data_with, ErrorModel, RegressionData};
pub use experiment::{
    derive_seed, run_linear_experiment, run_quantile_experiment, ExperimentConfig, ExperimentResult, ResultRow,
    SimMechanism, CSV_HEADER,
};
