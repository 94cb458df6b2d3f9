use thiserror::Error;

use crate::lens::ShortnessViolation;
use crate::metric::MetricViolation;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("distance table has {found} entries, expected {expected} for {size} carrier elements")]
    DimensionMismatch {
        size: usize,
        expected: usize,
        found: usize,
    },

    #[error("metric axiom violated: {0}")]
    Metric(MetricViolation),

    #[error("function tables disagree: {0}")]
    DomainMismatch(String),

    #[error("boundary mismatch: expected {expected}, found {found}")]
    BoundaryMismatch { expected: String, found: String },

    #[error("lens map is not short: {0}")]
    NotShort(ShortnessViolation),

    #[error("utility space carries no declared order")]
    MissingOrder,

    #[error("element {0} is not a member of the carrier")]
    Membership(String),

    #[error("selection functions live over different objects")]
    ObjectMismatch,

    #[error("instance too large: {0}")]
    TooLarge(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("{0}")]
    Invalid(String),

    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },

    #[error("{path}: {message}")]
    Validation { path: String, message: String },
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::Invalid(msg.into())
    }
}
