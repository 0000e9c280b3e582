use thiserror::Error;

use crate::exact::ExactRational;

/// Errors raised by the algebra, evaluation and catalog layers.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,

    #[error("pole encountered: {0}")]
    PoleEncountered(String),

    #[error("p2 is the zero polynomial; recursion undefined")]
    ZeroP2,

    #[error("degree mismatch in g2: numerator degree {num} vs denominator degree {den}")]
    DegreeMismatch { num: u32, den: u32 },

    #[error("convergence rate depends on free parameters: {0}")]
    ParameterDependentRate(String),

    #[error("non-linear factor without rational roots: {0}")]
    NonLinearFactor(String),

    #[error("unknown constant atom `{0}`")]
    UnknownAtom(String),

    #[error("reference value has insufficient scale for comparison")]
    InsufficientScale,

    #[error("parse error at line {line}, column {column}: {message}")]
    ParseError {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("validation error in `{id}`: {message}")]
    ValidationError { id: String, message: String },
}

impl Error {
    pub(crate) fn pole_at_value(what: &str, at: &ExactRational) -> Self {
        Error::PoleEncountered(format!("{what} at {at}"))
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
