use thiserror::Error;

/// Errors raised by every fallible operation in the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the operation's domain.
    #[error("domain error: {0}")]
    Domain(String),

    /// Exact-integer table generation left the representable range.
    #[error("integer overflow computing {family} at (v={v}, col={col})")]
    Overflow {
        family: &'static str,
        v: usize,
        col: usize,
    },

    /// Brute-force enumeration would exceed its work budget.
    #[error("resource limit: {0}")]
    Resource(String),

    /// The statistic is zero or negative so no index estimate exists.
    #[error("undefined estimate: {0}")]
    UndefinedEstimate(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
