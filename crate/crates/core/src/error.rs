use thiserror::Error;

/// Errors raised by the library. Variants map to two broad classes:
/// malformed input and violated mathematical preconditions.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid set: {0}")]
    InvalidSet(String),

    #[error("endpoint is not a dyadic rational: {0}")]
    NonDyadic(String),

    #[error("budget must be positive")]
    NonPositiveBudget,

    #[error("domain is not representable: {0}")]
    NonRepresentable(String),

    #[error("value set of cell {cell} is empty")]
    EmptyValueSet { cell: usize },

    #[error("cells do not tile the domain: {0}")]
    BadTiling(String),

    #[error("net radius {tau} exceeds the allowed slack {allowed}")]
    PrecisionUnattainable { tau: f64, allowed: f64 },

    #[error("no mesh point at level {level} passes both tests on cell {cell} ({region})")]
    MeshGuarantee {
        level: u32,
        cell: usize,
        region: String,
    },

    #[error("cover is not locally finite near {0}")]
    NotExtendable(String),

    #[error("invalid problem: {0}")]
    InvalidProblem(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// True for errors caused by malformed input rather than a failed
    /// mathematical precondition.
    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            Error::DimensionMismatch { .. }
                | Error::InvalidSet(_)
                | Error::NonDyadic(_)
                | Error::InvalidArgument(_)
                | Error::Parse(_)
                | Error::Json(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
