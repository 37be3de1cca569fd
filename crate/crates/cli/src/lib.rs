//! Library half of the `qgt` command line: file formats, literal parsing and
//! the subcommands, each of which produces a human table and a JSON object.

pub mod commands;
pub mod parse;

use serde_json::Value;

/// Failure of a subcommand, classified by exit code.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// Bad input: unreadable files, malformed literals, inconsistent data.
    #[error("{0}")]
    Validation(String),
    /// A computation the library is expected to get right did not.
    #[error("internal error: {0}")]
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Validation(_) => 2,
            CliError::Internal(_) => 1,
        }
    }
}

impl From<qgt::Error> for CliError {
    fn from(e: qgt::Error) -> Self {
        match e {
            qgt::Error::ValidationFailure(_) => CliError::Internal(e.to_string()),
            _ => CliError::Validation(e.to_string()),
        }
    }
}

/// Output of one subcommand.
#[derive(Debug, Clone)]
pub struct Report {
    pub human: String,
    pub json: Value,
    /// Exit status: nonzero when a built-in self-check failed.
    pub exit: u8,
}

/// Fixed-point with ten decimals, trailing zeros dropped. Every number in
/// a human table goes through here, and the JSON carries the full value.
pub fn num(x: f64) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    let s = format!("{x:.10}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" {
        "0".into()
    } else {
        s.into()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn number_format() {
        assert_eq!(num(0.125), "0.125");
        assert_eq!(num(0.12499999999999989), "0.125");
        assert_eq!(num(0.8535533905932737), "0.8535533906");
        assert_eq!(num(-1e-17), "0");
        assert_eq!(num(3.0), "3");
        assert_eq!(num(-2.5), "-2.5");
    }

    #[test]
    fn error_codes() {
        assert_eq!(CliError::from(qgt::Error::ZeroVector).exit_code(), 2);
        assert_eq!(CliError::from(qgt::Error::ValidationFailure("x".into())).exit_code(), 1);
    }
}
