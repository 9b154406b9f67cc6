use std::path::PathBuf;

use thiserror::Error;

/// Process exit codes; a stable contract for scripts and test harnesses.
pub mod exit {
    pub const SUCCESS: u8 = 0;
    pub const FAILURE: u8 = 1;
    pub const NOT_CONVERGED: u8 = 2;
    pub const CONFIG: u8 = 3;
    pub const UNSTABLE: u8 = 4;
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config field `{field}`: {reason}")]
    Field { field: String, reason: String },

    #[error("cannot read config {}: {source}", path.display())]
    ConfigRead {
        path: PathBuf,
        source: std::io::Error,
    },

    #[error("cannot read profile {}: {reason}", path.display())]
    Profile { path: PathBuf, reason: String },

    #[error(transparent)]
    Physics(#[from] frsne::Error),

    #[error("cannot write {}: {source}", path.display())]
    Write {
        path: PathBuf,
        source: std::io::Error,
    },

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl CliError {
    pub fn field(field: impl Into<String>, reason: impl Into<String>) -> Self {
        CliError::Field {
            field: field.into(),
            reason: reason.into(),
        }
    }

    pub fn exit_code(&self) -> u8 {
        use frsne::Error as E;
        match self {
            CliError::Field { .. } | CliError::ConfigRead { .. } | CliError::Profile { .. } => {
                exit::CONFIG
            }
            CliError::Physics(E::Unstable { .. }) => exit::UNSTABLE,
            CliError::Physics(
                E::InvalidGrid(_)
                | E::InvalidParameter { .. }
                | E::SeparationTooSmall { .. }
                | E::CoincidentBodies,
            ) => exit::CONFIG,
            _ => exit::FAILURE,
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
