//! Error taxonomy mapped to process exit codes: 2 for configuration
//! problems, 3 for I/O failures, 4 for numerical failures inside the
//! pipeline.

use std::fmt;
use std::path::PathBuf;

use crosstalk_core::experiment::ExperimentError;
use crosstalk_core::learning::FitError;
use crosstalk_core::oracle::OracleError;
use crosstalk_core::predict::PredictError;

#[derive(Debug)]
pub enum AppError {
    Config(String),
    Io { path: PathBuf, source: std::io::Error },
    Numerical(String),
}

impl AppError {
    pub fn exit_code(&self) -> i32 {
        match self {
            AppError::Config(_) => 2,
            AppError::Io { .. } => 3,
            AppError::Numerical(_) => 4,
        }
    }

    pub fn config(msg: impl Into<String>) -> Self {
        AppError::Config(msg.into())
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        AppError::Io { path: path.into(), source }
    }
}

impl fmt::Display for AppError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AppError::Config(msg) => write!(f, "configuration error: {msg}"),
            AppError::Io { path, source } => write!(f, "i/o error on {}: {source}", path.display()),
            AppError::Numerical(msg) => write!(f, "numerical failure: {msg}"),
        }
    }
}

impl From<ExperimentError> for AppError {
    fn from(e: ExperimentError) -> Self {
        AppError::Numerical(e.to_string())
    }
}

impl From<OracleError> for AppError {
    fn from(e: OracleError) -> Self {
        AppError::Numerical(e.to_string())
    }
}

impl From<FitError> for AppError {
    fn from(e: FitError) -> Self {
        AppError::Numerical(e.to_string())
    }
}

impl From<PredictError> for AppError {
    fn from(e: PredictError) -> Self {
        match e {
            // a missing pair fit means the inputs do not cover the request
            PredictError::MissingPairFit(..) => AppError::Config(e.to_string()),
            _ => AppError::Numerical(e.to_string()),
        }
    }
}

pub type AppResult<T> = Result<T, AppError>;
