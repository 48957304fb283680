use thiserror::Error;

/// Errors shared by all analysis modules.
#[derive(Debug, Error)]
pub enum Error {
    /// A requested value lies outside the sieved range.
    #[error("out of range: {0}")]
    OutOfRange(String),

    /// A size parameter exceeds the configured memory budget.
    #[error("resource limit exceeded: {0}")]
    Resource(String),

    /// Malformed or inconsistent arguments.
    #[error("invalid argument: {0}")]
    Argument(String),

    /// The input does not belong to the class the analysis assumes;
    /// carries a human-readable witness of the failure.
    #[error("classification failed: {0}")]
    Classification(String),

    /// The operation is not defined for this kind of input
    /// (e.g. an exact test on float-valued data).
    #[error("unsupported: {0}")]
    Unsupported(String),
}

pub type Result<T> = std::result::Result<T, Error>;
