use std::io;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error in `{field}`: {message}")]
    Config { field: String, message: String },

    #[error("computation failed: {0}")]
    Compute(#[from] opcalc::Error),

    #[error("output failed: {0}")]
    Io(#[from] io::Error),

    #[error("serialization failed: {0}")]
    Csv(#[from] csv::Error),

    #[error("serialization failed: {0}")]
    Json(#[from] serde_json::Error),
}

impl CliError {
    pub fn config(field: &str, message: impl Into<String>) -> Self {
        Self::Config {
            field: field.to_string(),
            message: message.into(),
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Config { .. } => 2,
            _ => 1,
        }
    }
}
