use thiserror::Error;

/// Errors surfaced by the toolkit.
#[derive(Debug, Error)]
pub enum CtkError {
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),

    #[error("empty region not allowed: {0}")]
    EmptyRegion(&'static str),

    #[error("{what} exceeds configured cap ({got} > {cap})")]
    CapExceeded {
        what: String,
        got: u64,
        cap: u64,
    },

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("partitions do not cover the same boundary set")]
    BoundaryMismatch,

    #[error("not a contour of this configuration: {0}")]
    NotAContour(String),

    #[error("configuration is not constant on a labeling set ({0}); partition input is invalid")]
    LabelInconsistent(String),

    #[error("graph is not connected")]
    DisconnectedGraph,

    #[error("parameters outside the phase-transition regimes: {0}")]
    OutsideRegimes(String),

    #[error("erase postcondition violated: {0}")]
    ErasePostcondition(String),
}

pub type Result<T> = std::result::Result<T, CtkError>;

impl CtkError {
    pub fn cap(what: impl Into<String>, got: u64, cap: u64) -> Self {
        CtkError::CapExceeded {
            what: what.into(),
            got,
            cap,
        }
    }
}
