use std::fmt;

/// Exit status for usage, syntax and lookup errors.
pub const EXIT_USAGE: u8 = 2;
/// Exit status for failed analyses and numerical failures.
pub const EXIT_ANALYSIS: u8 = 1;

#[derive(Debug, Clone, PartialEq)]
pub struct CliError {
    pub code: u8,
    pub message: String,
}

impl CliError {
    pub fn usage(message: impl Into<String>) -> Self {
        Self { code: EXIT_USAGE, message: message.into() }
    }

    pub fn analysis(message: impl Into<String>) -> Self {
        Self { code: EXIT_ANALYSIS, message: message.into() }
    }

    pub fn context(mut self, what: &str) -> Self {
        self.message = format!("{what}: {}", self.message);
        self
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl std::error::Error for CliError {}

impl From<mono_sgt_core::Error> for CliError {
    fn from(e: mono_sgt_core::Error) -> Self {
        use mono_sgt_core::Error as E;
        let code = match e {
            E::Syntax { .. }
            | E::UnknownName { .. }
            | E::UnknownVariable { .. }
            | E::MalformedCone(_)
            | E::InvalidArgument(_)
            | E::DimensionMismatch { .. }
            | E::OutOfDomain { .. } => EXIT_USAGE,
            _ => EXIT_ANALYSIS,
        };
        Self { code, message: e.to_string() }
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        Self::analysis(format!("serialization failed: {e}"))
    }
}

pub type CliResult<T> = Result<T, CliError>;
