use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq)]
#[non_exhaustive]
pub enum Error {
    /// Vector length does not match the cone or system dimension.
    DimensionMismatch {
        expected: usize,
        found: usize,
    },
    /// Malformed configuration or expression text.
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    UnknownVariable {
        name: String,
        dim: usize,
    },
    MalformedCone(String),
    /// Division by zero while evaluating the quoted subexpression.
    DivisionByZero {
        expr: String,
    },
    NonFinite {
        what: String,
    },
    /// Step size fell below the representable minimum before reaching the end time.
    StepUnderflow {
        t: f64,
    },
    TooManySteps {
        t: f64,
        steps: usize,
    },
    /// Trajectory left the state domain by more than the absolute tolerance.
    InvarianceViolation {
        t: f64,
        coordinate: usize,
        value: f64,
    },
    UnsupportedDimension {
        dim: usize,
    },
    /// `f(·, u)` vanishes on a whole subinterval.
    DegenerateCharacteristic {
        input: f64,
        lo: f64,
        hi: f64,
    },
    /// Evaluation point outside the domain of a set-valued map.
    OutOfDomain {
        value: f64,
        lo: f64,
        hi: f64,
    },
    InvalidArgument(String),
    HypothesisViolation(String),
    UnknownName {
        name: String,
        available: Vec<String>,
    },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::DimensionMismatch { expected, found } => {
                write!(f, "dimension mismatch: expected {expected}, found {found}")
            }
            Error::Syntax { line, column, message } => {
                write!(f, "syntax error at {line}:{column}: {message}")
            }
            Error::UnknownVariable { name, dim } => {
                write!(f, "unknown variable `{name}` (system dimension {dim})")
            }
            Error::MalformedCone(s) => write!(f, "malformed cone string `{s}`"),
            Error::DivisionByZero { expr } => write!(f, "division by zero in `{expr}`"),
            Error::NonFinite { what } => write!(f, "non-finite value in {what}"),
            Error::StepUnderflow { t } => write!(f, "step size underflow at t = {t}"),
            Error::TooManySteps { t, steps } => {
                write!(f, "step limit {steps} reached at t = {t}")
            }
            Error::InvarianceViolation { t, coordinate, value } => {
                write!(f, "state left its domain at t = {t}: x{} = {value}", coordinate + 1)
            }
            Error::UnsupportedDimension { dim } => {
                write!(f, "operation requires a scalar state, system has dimension {dim}")
            }
            Error::DegenerateCharacteristic { input, lo, hi } => {
                write!(f, "f(., {input}) vanishes identically on [{lo}, {hi}]")
            }
            Error::OutOfDomain { value, lo, hi } => {
                write!(f, "value {value} outside map domain [{lo}, {hi}]")
            }
            Error::InvalidArgument(s) => write!(f, "invalid argument: {s}"),
            Error::HypothesisViolation(s) => write!(f, "hypothesis violated: {s}"),
            Error::UnknownName { name, available } => {
                write!(f, "unknown name `{name}`; available: {}", available.join(", "))
            }
        }
    }
}

impl core::error::Error for Error {}
