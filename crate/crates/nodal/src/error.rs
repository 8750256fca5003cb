use std::path::PathBuf;

use serde::Serialize;

/// Exit status for configuration errors.
pub const EXIT_CONFIG: i32 = 2;
/// Exit status when more than the allowed fraction of trials was degenerate.
pub const EXIT_DEGENERACY: i32 = 3;
/// Exit status for numerical, IO and verification failures.
pub const EXIT_FAILURE: i32 = 1;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),

    #[error(transparent)]
    Core(#[from] nodal_core::Error),

    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error("replayed artifact {0} differs from the recorded one")]
    Mismatch(String),
}

pub type Result<T, E = CliError> = std::result::Result<T, E>;

impl CliError {
    pub fn config(msg: impl Into<String>) -> Self {
        CliError::Config(msg.into())
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io { path: path.into(), source }
    }

    pub fn exit_code(&self) -> i32 {
        use nodal_core::Error as E;
        match self {
            CliError::Config(_) => EXIT_CONFIG,
            CliError::Core(E::InvalidParameter(_) | E::OutsideChart { .. }) => EXIT_CONFIG,
            CliError::Core(E::DegeneracyBudget { .. }) => EXIT_DEGENERACY,
            _ => EXIT_FAILURE,
        }
    }

    pub fn kind(&self) -> &'static str {
        use nodal_core::Error as E;
        match self {
            CliError::Config(_) => "config",
            CliError::Core(E::DegeneracyBudget { .. }) => "degeneracy_budget",
            CliError::Core(E::InvalidParameter(_) | E::OutsideChart { .. }) => "config",
            CliError::Core(_) => "numerical",
            CliError::Io { .. } => "io",
            CliError::Json(_) => "json",
            CliError::Csv(_) => "csv",
            CliError::Mismatch(_) => "mismatch",
        }
    }

    pub fn record(&self) -> ErrorRecord {
        ErrorRecord { error: self.kind(), message: self.to_string(), exit_code: self.exit_code() }
    }
}

/// The structured form written to stderr.
#[derive(Debug, Serialize)]
pub struct ErrorRecord {
    pub error: &'static str,
    pub message: String,
    pub exit_code: i32,
}

#[cfg(test)]
mod tests {
    use super::*;
    use nodal_core::Error as E;

    #[test]
    fn exit_codes_by_kind() {
        let cases = [
            (CliError::config("x"), 2, "config"),
            (CliError::Core(E::InvalidParameter("x".into())), 2, "config"),
            (CliError::Core(E::OutsideChart { radius: 4.0, limit: 3.0 }), 2, "config"),
            (CliError::Core(E::DegeneracyBudget { degenerate: 5, trials: 100 }), 3, "degeneracy_budget"),
            (CliError::Mismatch("a.csv".into()), 1, "mismatch"),
            (CliError::io("a", std::io::Error::other("x")), 1, "io"),
        ];
        for (err, code, kind) in cases {
            let rec = err.record();
            assert_eq!((rec.exit_code, rec.error), (code, kind), "{err}");
        }
    }
}
