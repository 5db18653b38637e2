use thiserror::Error;

/// Failure modes of the numerical routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{func}: argument outside the supported domain ({detail})")]
    Domain { func: &'static str, detail: String },

    #[error("{what} did not converge after {iterations} steps (estimate {estimate:e}, error {error:e})")]
    Convergence {
        what: &'static str,
        iterations: usize,
        estimate: f64,
        error: f64,
    },

    #[error("cutoff bracket search failed: {0}")]
    Bracket(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("order index {l} outside 1..={len}")]
    Index { l: u32, len: u32 },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(func: &'static str, detail: impl Into<String>) -> Error {
    Error::Domain {
        func,
        detail: detail.into(),
    }
}
