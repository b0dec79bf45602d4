//! Scenario files, the figure catalog, CSV/SVG output and run summaries.

pub mod catalog;
pub mod config;
pub mod run;
pub mod svg;
pub mod table;

use thiserror::Error;

pub use catalog::{catalog, CatalogEntry, EntryKind};
pub use config::{parse_config, render_config, OutputKind, Scenario};
pub use run::{solve, write_solve, RunSummary, SnapshotReport, SolveOutcome};

#[derive(Debug, Error)]
pub enum IoError {
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("invalid scenario: {0}")]
    Validation(String),
    #[error(transparent)]
    Numerics(#[from] crate::Error),
    #[error("file error: {0}")]
    File(#[from] std::io::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl IoError {
    /// Process exit code: 2 for bad input, 3 for numerical failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            IoError::Parse { .. } | IoError::Validation(_) => 2,
            IoError::Numerics(e) if matches!(e, crate::Error::InvalidParameter(_)) => 2,
            _ => 3,
        }
    }

    /// Short machine-readable kind.
    pub fn kind(&self) -> &'static str {
        match self {
            IoError::Parse { .. } => "parse",
            IoError::Validation(_) => "validation",
            IoError::Numerics(_) => "numerical",
            IoError::File(_) => "file",
            IoError::Csv(_) => "csv",
            IoError::Json(_) => "json",
        }
    }
}
