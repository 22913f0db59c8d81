//! CLI error type and its mapping to process exit codes.

use std::process::ExitCode;

/// Errors surfaced by a CLI run.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// A library operation failed.
    #[error(transparent)]
    Core(#[from] qcomp::Error),
    /// An argument that clap cannot validate on its own is malformed.
    #[error("invalid argument: {0}")]
    Argument(String),
    /// An input file could not be read.
    #[error("cannot read {path}: {source}")]
    Read {
        path: String,
        #[source]
        source: std::io::Error,
    },
    /// An input file is not a valid state record.
    #[error("malformed state file {path}: {source}")]
    StateFile {
        path: String,
        #[source]
        source: serde_json::Error,
    },
    /// The report could not be written.
    #[error("cannot write report: {0}")]
    Write(#[from] std::io::Error),
    /// The report could not be encoded as CSV.
    #[error("cannot encode CSV: {0}")]
    Csv(#[from] csv::Error),
    /// The report could not be encoded as JSON.
    #[error("cannot encode JSON: {0}")]
    Json(#[from] serde_json::Error),
    /// Some checked relation was violated; the report has already been written.
    #[error("{violations} of {total} states violate the relation")]
    Violations { violations: usize, total: usize },
}

impl CliError {
    /// 1 = check failed or output error, 2 = bad input, 3 = capability, 4 = solver failure.
    pub fn exit_code(&self) -> ExitCode {
        let code = match self {
            Self::Core(qcomp::Error::Capability(_)) => 3,
            Self::Core(qcomp::Error::Solver(_)) => 4,
            Self::Core(_) | Self::Argument(_) | Self::Read { .. } | Self::StateFile { .. } => 2,
            Self::Write(_) | Self::Csv(_) | Self::Json(_) | Self::Violations { .. } => 1,
        };
        ExitCode::from(code)
    }
}
