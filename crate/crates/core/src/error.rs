use thiserror::Error;

/// Errors raised by objectives, mechanisms, solvers and the experiment harness.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("dataset is empty")]
    EmptyData,

    #[error("data row {row} violates declared bounds: {message}")]
    DataBound { row: usize, message: String },

    #[error("gradient is not defined at theta: it coincides with data point {index}")]
    NonDifferentiable { index: usize },

    #[error("unsupported operation: {0}")]
    Unsupported(String),

    #[error("sampler accepted no proposals in {steps} sweeps (acceptance rate {acceptance_rate})")]
    SamplingFailure { steps: usize, acceptance_rate: f64 },

    #[error("optimizer did not converge after {iterations} iterations (final gap {gap:e})")]
    OptimizationFailure { iterations: usize, gap: f64 },

    #[error("linear system is singular or rank deficient")]
    SingularSystem,

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}
