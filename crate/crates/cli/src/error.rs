//! CLI error taxonomy mapped to process exit codes.

use timecrystal::Error as CoreError;

#[derive(Debug)]
pub enum CliError {
    /// Exit code 2: configuration or usage problems.
    Config(String),
    /// Exit code 3: the computation itself failed.
    Numerical(String),
    /// Exit code 4: bracketing or orbit search failed.
    Search(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numerical(_) => 3,
            CliError::Search(_) => 4,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            CliError::Config(m) | CliError::Numerical(m) | CliError::Search(m) => m,
        }
    }
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        match &e {
            CoreError::InvalidParameter(_) => CliError::Config(e.to_string()),
            CoreError::BracketFailure { .. } => CliError::Search(e.to_string()),
            _ => CliError::Numerical(e.to_string()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes_match_the_contract() {
        assert_eq!(CliError::Config("x".into()).exit_code(), 2);
        assert_eq!(CliError::Numerical("x".into()).exit_code(), 3);
        assert_eq!(CliError::Search("x".into()).exit_code(), 4);
    }

    #[test]
    fn core_errors_map_by_kind() {
        let e: CliError = CoreError::InvalidParameter("bad".into()).into();
        assert_eq!(e.exit_code(), 2);
        let e: CliError = CoreError::BracketFailure {
            lo: 0.0,
            hi: 1.0,
            defect_lo: 1.0,
            defect_hi: 2.0,
        }
        .into();
        assert_eq!(e.exit_code(), 4);
    }
}
