//! Command implementations and the HTTP service behind the `planwright` binary.

pub mod commands;
pub mod render;
pub mod service;

use std::path::Path;

use thiserror::Error;

use planwright_core::project::ProjectError;
use planwright_core::{Error as CoreError, ProjectFile};

/// Failures mapped onto process exit codes.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Validation(String),
    #[error("{0}")]
    Inconsistent(String),
    #[error("{0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => 1,
            CliError::Inconsistent(_) => 2,
            CliError::Io(_) => 3,
        }
    }

    pub fn io(path: &Path, e: std::io::Error) -> Self {
        CliError::Io(format!("{}: {e}", path.display()))
    }
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        match e {
            CoreError::Contradiction | CoreError::InconsistentStatus => CliError::Inconsistent(e.to_string()),
            other => CliError::Validation(other.to_string()),
        }
    }
}

impl From<ProjectError> for CliError {
    fn from(e: ProjectError) -> Self {
        CliError::Validation(e.to_string())
    }
}

pub fn read_file(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))
}

pub fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    std::fs::write(path, contents).map_err(|e| CliError::io(path, e))
}

pub fn load_project(path: &Path) -> Result<ProjectFile, CliError> {
    Ok(ProjectFile::parse(&read_file(path)?)?)
}
