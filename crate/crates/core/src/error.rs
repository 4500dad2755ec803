use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("graph has no edges or nodes")]
    EmptyGraph,

    #[error("empty feasible network: every node has price > intrinsic + coupon")]
    EmptyFeasibleNetwork,

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("instance too large for exact enumeration: {0}")]
    TooLarge(String),

    #[error("memory budget exceeded: need ~{needed} bytes, budget {budget} bytes")]
    MemoryBudget { needed: u64, budget: u64 },

    #[error("parameter solver failed: {0}")]
    Solver(String),

    #[error("bad cache file: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::Parameter(msg.into())
    }
}
