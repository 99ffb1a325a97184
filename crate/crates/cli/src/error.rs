// SPDX-License-Identifier: Apache-2.0

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    BadInput(String),
    #[error("identity violation: {0}")]
    Identity(String),
    #[error("oracle mismatch: {0}")]
    Mismatch(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::BadInput(_) => 2,
            CliError::Identity(_) => 3,
            CliError::Mismatch(_) => 4,
            CliError::Io(_) => 1,
        }
    }
}

impl From<classprime::Error> for CliError {
    fn from(e: classprime::Error) -> Self {
        match e {
            classprime::Error::IdentityMismatch { .. } => CliError::Identity(e.to_string()),
            other => CliError::BadInput(other.to_string()),
        }
    }
}
