use nalgebra::DVector;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("non-finite {what} at x = {point:?}")]
    Evaluation { what: &'static str, point: Vec<f64> },

    #[error("point is not stationary: residual {residual:e} exceeds tolerance {tol:e}")]
    NotStationary { residual: f64, tol: f64 },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("step size {step:e} too large: objective increased for {streak} consecutive iterations")]
    StepTooLarge { step: f64, streak: usize },

    #[error("config error: {0}")]
    Config(String),

    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("csv error on {path}: {message}")]
    Csv { path: String, message: String },
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    pub(crate) fn non_finite(what: &'static str, x: &DVector<f64>) -> Self {
        Error::Evaluation {
            what,
            point: x.iter().copied().collect(),
        }
    }

    /// Stable machine-readable code, used by the experiment runner.
    pub fn code(&self) -> &'static str {
        match self {
            Error::InvalidInput(_) => "input.invalid",
            Error::Evaluation { .. } => "numeric.evaluation",
            Error::NotStationary { .. } => "numeric.not_stationary",
            Error::Unsupported(_) => "unsupported",
            Error::StepTooLarge { .. } => "numeric.step_too_large",
            Error::Config(_) => "config.parse",
            Error::Io { .. } => "config.io",
            Error::Csv { .. } => "config.csv",
        }
    }

    /// Process exit code: 2 config, 3 numerical failure, 4 unsupported.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) | Error::Io { .. } | Error::Csv { .. } | Error::InvalidInput(_) => 2,
            Error::Evaluation { .. } | Error::NotStationary { .. } | Error::StepTooLarge { .. } => 3,
            Error::Unsupported(_) => 4,
        }
    }
}
