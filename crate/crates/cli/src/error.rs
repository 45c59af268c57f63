use std::process::ExitCode;

use lambda_sphere::geometry::{ExportError, MeshError};
use lambda_sphere::verify::VerifyError;
use lambda_sphere::ShootError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error(transparent)]
    Shoot(#[from] ShootError),
    #[error(transparent)]
    Verify(#[from] VerifyError),
    #[error(transparent)]
    Mesh(#[from] MeshError),
    #[error(transparent)]
    Export(#[from] ExportError),
}

impl CliError {
    /// 3 for usage errors, 2 for numerical anomalies and anything that
    /// prevented the artifacts from being produced.
    pub fn exit_code(&self) -> ExitCode {
        match self {
            CliError::Usage(_) => ExitCode::from(3),
            _ => ExitCode::from(2),
        }
    }
}
