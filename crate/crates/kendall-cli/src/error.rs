//! Error type of the command line tool, carrying the process exit code.

use kendall::KendallError;
use thiserror::Error;

/// Failures the tool can exit with. Usage problems (bad flags, unreadable
/// inputs) exit with code 2, numeric evaluation failures with code 1, and a
/// comparison whose report fails the statistical gate with code 3.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),

    #[error(transparent)]
    Numeric(#[from] KendallError),

    #[error("cannot write {path}: {source}")]
    Output { path: String, source: std::io::Error },

    #[error("comparison failed: max_z = {max_z:.3} exceeds the gate of 4")]
    StatisticalFail { max_z: f64 },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Numeric(_) | CliError::Output { .. } => 1,
            CliError::StatisticalFail { .. } => 3,
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;

#[cfg(test)]
mod tests {
    use super::CliError;
    use kendall::KendallError;

    #[test]
    fn exit_codes_match_the_documented_contract() {
        assert_eq!(CliError::Usage("bad flag".into()).exit_code(), 2);
        assert_eq!(
            CliError::Numeric(KendallError::Domain("t out of range".into())).exit_code(),
            1
        );
        let io = std::io::Error::new(std::io::ErrorKind::PermissionDenied, "denied");
        assert_eq!(CliError::Output { path: "x.csv".into(), source: io }.exit_code(), 1);
        assert_eq!(CliError::StatisticalFail { max_z: 5.2 }.exit_code(), 3);
    }

    #[test]
    fn statistical_failures_explain_the_gate() {
        let msg = CliError::StatisticalFail { max_z: 5.25 }.to_string();
        assert!(msg.contains("5.250"));
        assert!(msg.contains("gate of 4"));
    }
}
