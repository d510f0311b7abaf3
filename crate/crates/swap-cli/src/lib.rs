//! Experiment harness: configure instances, sweep `(s, j)` grids with paired
//! seeds across policies, and emit the result tables and plots.
//!
//! The `swap` binary is a thin wrapper over this library; everything it does
//! is callable (and tested) directly.

pub mod config;
pub mod describe;
pub mod experiment;
pub mod svg;

use thiserror::Error;

pub use config::{ExperimentConfig, Grid, InstanceSource, ObjectiveChoice, OracleChoice};
pub use describe::describe;
pub use experiment::{run_experiment, CellRow, ExperimentOutput, HardnessRow, PolicyAggregate};

/// Harness errors, split by exit code: configuration problems exit 2,
/// filesystem problems exit 3.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("config: {0}")]
    Config(String),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Io(_) => 3,
        }
    }
}

impl From<swap_core::Error> for CliError {
    fn from(err: swap_core::Error) -> Self {
        match err {
            swap_core::Error::Io(e) => CliError::Io(e),
            swap_core::Error::Csv(e) => {
                if e.is_io_error() {
                    match e.into_kind() {
                        csv::ErrorKind::Io(io) => CliError::Io(io),
                        other => CliError::Config(format!("csv: {other:?}")),
                    }
                } else {
                    CliError::Config(format!("{e}"))
                }
            }
            other => CliError::Config(format!("{other}")),
        }
    }
}

impl From<csv::Error> for CliError {
    fn from(err: csv::Error) -> Self {
        CliError::from(swap_core::Error::Csv(err))
    }
}

impl From<serde_json::Error> for CliError {
    fn from(err: serde_json::Error) -> Self {
        CliError::Config(format!("{err}"))
    }
}
