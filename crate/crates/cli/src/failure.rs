use std::fmt;

use psdeq_core::Error;

pub const EXIT_OK: u8 = 0;
pub const EXIT_CHECK_FAILED: u8 = 1;
pub const EXIT_INPUT: u8 = 2;
pub const EXIT_PRECONDITION: u8 = 3;

/// A command error with its process exit code.
#[derive(Debug, Clone)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    pub fn input(message: impl Into<String>) -> Self {
        Failure {
            code: EXIT_INPUT,
            message: message.into(),
        }
    }

    pub fn precondition(message: impl Into<String>) -> Self {
        Failure {
            code: EXIT_PRECONDITION,
            message: message.into(),
        }
    }

    pub fn context(mut self, what: &str) -> Self {
        self.message = format!("{what}: {}", self.message);
        self
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::NonFinite
            | Error::InvalidDimension(_)
            | Error::DimMismatch { .. }
            | Error::DimTooLarge { .. }
            | Error::InvalidParams(_)
            | Error::DegenerateExponent { .. }
            | Error::RConditionInvalid { .. } => EXIT_INPUT,
            Error::ConvergenceFailure { .. }
            | Error::NegativePowerOfSingular { .. }
            | Error::FractionalPowerOfIndefinite { .. }
            | Error::NotPositiveDefinite { .. }
            | Error::BNotPsd { .. }
            | Error::SingularDenominator { .. }
            | Error::NumericallySingular { .. }
            | Error::NonPositiveEigenvalue { .. } => EXIT_PRECONDITION,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}
