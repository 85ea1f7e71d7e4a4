use crate::labeling::NodeLabeling;

/// Errors reported by the library.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// A caller broke an operation's contract.
    #[error("usage error: {0}")]
    Usage(String),
    /// Malformed game text.
    #[error("format error: {0}")]
    Format(String),
    /// The lift budget ran out; the labeling reached so far is attached.
    #[error("lift budget of {budget} exhausted after {lifts} lifts")]
    BudgetExhausted {
        budget: u64,
        lifts: u64,
        partial: Box<NodeLabeling>,
    },
    /// An internal invariant failed. Always a bug.
    #[error("internal invariant violated: {0}")]
    Internal(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn usage<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Usage(msg.into()))
}
