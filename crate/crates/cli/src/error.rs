use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    /// The configuration could not be read, parsed or validated. `path` is
    /// the dotted field path of the offending entry.
    #[error("config error at {path}: {reason}")]
    Config { path: String, reason: String },

    #[error("{context}: {source}")]
    Numerical {
        context: String,
        #[source]
        source: paramres::Error,
    },

    #[error("i/o error on {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("selftest failed: {0} check(s) did not pass")]
    Selftest(usize),
}

impl CliError {
    pub fn config(path: impl Into<String>, reason: impl Into<String>) -> Self {
        CliError::Config {
            path: path.into(),
            reason: reason.into(),
        }
    }

    pub fn numerical(context: impl Into<String>, source: paramres::Error) -> Self {
        CliError::Numerical {
            context: context.into(),
            source,
        }
    }

    /// Process exit status: 2 for configuration problems, 3 for numerical
    /// failures, 1 for anything environmental.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config { .. } => 2,
            CliError::Numerical { source, .. } => match source {
                paramres::Error::InvalidProfile { .. } | paramres::Error::Usage(_) => 2,
                _ => 3,
            },
            CliError::Selftest(_) => 3,
            CliError::Io { .. } => 1,
        }
    }
}

pub type Result<T, E = CliError> = std::result::Result<T, E>;
