//! Scenario driver for `exprk-core`: the smooth convergence, Sod and
//! mixing-regime problems, the self-convergence study, CSV output and the
//! `exprk` command line.

pub mod cli;
pub mod config;
pub mod convergence;
pub mod run;
pub mod scenario;

use std::path::Path;

use exprk_core::Error as CoreError;
use thiserror::Error;

pub use cli::run_cli;
pub use config::{CollisionKind, PartialConfig, RunConfig, TableauSpec};
pub use convergence::{convergence_rate, Rate, RateTable, RhoHistory};
pub use scenario::{build_scenario, InitialData, Scenario, ScenarioName, ScenarioParams};

/// Worker-count override read by the CLI.
pub const THREADS_ENV: &str = "EXPRK_THREADS";

pub type HarnessResult<T> = std::result::Result<T, HarnessError>;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("configuration error: {0}")]
    Config(String),

    /// A solver error raised while setting up (bad grid, bad tableau...).
    #[error("{0}")]
    Core(CoreError),

    /// A solver error raised while time stepping.
    #[error("numerical failure: {0}")]
    Numerical(CoreError),

    #[error("I/O error on {path}: {message}")]
    Io { path: String, message: String },
}

impl HarnessError {
    pub(crate) fn io(path: &Path, e: std::io::Error) -> Self {
        Self::Io {
            path: path.display().to_string(),
            message: e.to_string(),
        }
    }

    /// 1 for configuration problems, 2 for failures during the run.
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Config(_) | Self::Core(_) | Self::Io { .. } => 1,
            Self::Numerical(_) => 2,
        }
    }
}

impl From<CoreError> for HarnessError {
    fn from(e: CoreError) -> Self {
        match e {
            CoreError::NonFinite { .. }
            | CoreError::NegativeDistribution { .. }
            | CoreError::StageNotFinite { .. }
            | CoreError::ExponentOverflow { .. }
            | CoreError::NegativeTemperature { .. }
            | CoreError::Vacuum { .. }
            | CoreError::Degenerate { .. }
            | CoreError::Diverged { .. } => Self::Numerical(e),
            other => Self::Core(other),
        }
    }
}
