use thiserror::Error;

/// Errors shared by every module of the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// A size guard (grid points, enumerated eigenvalues, DFS work) was hit.
    /// `partial` carries a lower bound on the quantity being computed, when one exists.
    #[error("resource limit exceeded: {what} (limit {limit})")]
    ResourceLimit {
        what: String,
        limit: u64,
        partial: Option<u64>,
    },

    #[error("not applicable: {0}")]
    NotApplicable(String),

    #[error("evaluation overflow: {0}")]
    Overflow(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}
