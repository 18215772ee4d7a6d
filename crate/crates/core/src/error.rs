use thiserror::Error;

/// Errors raised by construction, enumeration and parsing routines.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("enumeration too large: {what} needs {required} items, limit is {limit}")]
    EnumerationTooLarge {
        what: &'static str,
        required: u128,
        limit: u128,
    },

    #[error("invalid vertex space: {0}")]
    InvalidSpace(String),

    #[error("invalid family parameters: {0}")]
    InvalidFamilyParameters(String),

    #[error("operands live on different vertex spaces ({left} vs {right} vertices)")]
    SpaceMismatch { left: usize, right: usize },

    #[error("certain-knowledge description is missing vertex {vertex}")]
    IncompleteDescription { vertex: usize },

    #[error("construction infeasible: {0}")]
    ConstructionInfeasible(String),

    #[error("{builder} did not finish within {rounds} rounds; retry with another seed or raise the round cap")]
    SeedRetry { builder: &'static str, rounds: usize },

    #[error("function set is missing the {0} endpoint")]
    MissingEndpoint(&'static str),

    #[error("step {from} -> {to} with label {label} is not a valid transition")]
    InvalidTransition {
        from: usize,
        to: usize,
        label: String,
    },

    #[error("construction produced size {size}, exceeding the bound {bound}")]
    BoundViolation { size: String, bound: String },

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("not applicable: {0}")]
    NotApplicable(String),

    #[error("invalid network: {0}")]
    InvalidNetwork(String),
}

impl Error {
    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: message.into(),
        }
    }

    /// True for errors caused by an exhausted resource limit rather than bad input.
    pub fn is_resource_limit(&self) -> bool {
        matches!(
            self,
            Error::EnumerationTooLarge { .. } | Error::SeedRetry { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
