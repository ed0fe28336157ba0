//! Command-line front end for `superlie-core`: single checks, subspace
//! computations, manifest runs and JSON reports.

pub mod args;
pub mod ids;
pub mod manifest;
pub mod report;
pub mod run;

use std::path::PathBuf;

use superlie_core::engine::EngineError;
use superlie_core::lang::IdentityFileError;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("cannot parse {what}: {message}")]
    Parse { what: String, message: String },
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    IdentityFile {
        path: String,
        #[source]
        source: IdentityFileError,
    },
    #[error("manifest line {line}: {message}")]
    Manifest { line: usize, message: String },
    #[error(transparent)]
    Engine(#[from] EngineError),
}

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
