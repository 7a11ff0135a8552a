use std::io;
use std::path::PathBuf;

use slowlight_core::Error as CoreError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] CoreError),
    #[error("cannot read config {path}: {source}")]
    ReadConfig { path: PathBuf, source: io::Error },
    #[error("I/O error on {path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("malformed table row {row}: {msg}")]
    Table { row: usize, msg: String },
    #[error("grids differ: numeric {numeric:?} vs analytic {analytic:?} nodes")]
    GridMismatch { numeric: (usize, usize), analytic: (usize, usize) },
    #[error("velocity fit on [{from}, {to}] needs at least 5 samples, got {got}")]
    InsufficientData { from: f64, to: f64, got: usize },
    #[error("unknown figure '{0}' (expected fig1, fig2 or fig3)")]
    UnknownFigure(String),
    #[error("unknown observable '{0}' (expected fields, rho22 or rho33)")]
    UnknownObservable(String),
    #[error("{0}")]
    Usage(String),
}

impl CliError {
    pub fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        CliError::Io { path: path.into(), source }
    }

    /// 1 for invalid input (config, flags), 2 for numerical or I/O failure.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(
                CoreError::Validation(_) | CoreError::Parse { .. } | CoreError::Grid(_) | CoreError::Resource { .. },
            )
            | CliError::ReadConfig { .. }
            | CliError::UnknownFigure(_)
            | CliError::UnknownObservable(_)
            | CliError::Usage(_) => 1,
            _ => 2,
        }
    }
}

pub type Result<T, E = CliError> = std::result::Result<T, E>;
