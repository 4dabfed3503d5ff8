use fracint_core::Error;

/// Exit status for malformed or inconsistent input.
pub const EXIT_INPUT: u8 = 1;
/// Exit status for a violated precondition (e.g. `p ≥ n/α`).
pub const EXIT_PRECONDITION: u8 = 2;
/// Exit status for a failed assertion or stability check.
pub const EXIT_ASSERTION: u8 = 3;

/// A failure together with the exit status it maps to.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("{message}")]
pub struct CliError {
    pub code: u8,
    pub message: String,
}

impl CliError {
    pub fn input(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_INPUT,
            message: message.into(),
        }
    }

    pub fn precondition(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_PRECONDITION,
            message: message.into(),
        }
    }

    /// Prefixes the message with the flag or field that caused it.
    pub fn context(mut self, field: &str) -> Self {
        self.message = format!("{field}: {}", self.message);
        self
    }
}

pub fn exit_code(e: &Error) -> u8 {
    match e {
        Error::EmptySpace
        | Error::DimensionMismatch { .. }
        | Error::MetricViolation { .. }
        | Error::NonpositiveWeight { .. }
        | Error::LambdaNotMonotone { .. }
        | Error::NonFinite { .. }
        | Error::PointOutOfRange { .. } => EXIT_INPUT,
        Error::LambdaAtZero { .. }
        | Error::InvalidParameter { .. }
        | Error::FamilyTooLarge { .. }
        | Error::DegenerateBall
        | Error::KTooLarge { .. }
        | Error::ConfigInfeasible(_)
        | Error::ZeroRbmo { .. } => EXIT_PRECONDITION,
        Error::CoverGuaranteeFailed { .. } | Error::DominationDegenerate { .. } => EXIT_ASSERTION,
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        Self {
            code: exit_code(&e),
            message: e.to_string(),
        }
    }
}
