//! Studies behind the `periodic-loss` command: each command reads a
//! [`StudyConfig`], writes CSV/JSON files into an output directory and returns
//! its report.

pub mod commands;
mod config;
mod output;

pub use config::{
    InterArrivalChoice, MaintenanceChoice, Mode, NoiseChoice, ProfileChoice, StudyConfig,
};
pub use output::{write_csv, write_json, Report};

use std::path::PathBuf;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error(transparent)]
    Data(#[from] periodic_loss::Error),
    #[error("budget exceeded: {0}")]
    Budget(String),
    #[error("cannot write {path}: {source}")]
    Output {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Data(_) | CliError::Output { .. } => 3,
            CliError::Budget(_) => 4,
        }
    }
}
