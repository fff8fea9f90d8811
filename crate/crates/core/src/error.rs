use thiserror::Error;

use crate::orbit::WeakOrder;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid weak order: {0}")]
    InvalidWeakOrder(String),

    #[error("resource bound exceeded: {what} (limit {limit})")]
    ResourceBound { what: &'static str, limit: usize },

    #[error("closure budget of {limit} orbits exceeded")]
    BudgetExceeded { limit: usize },

    #[error("arity mismatch: {0}")]
    ArityMismatch(String),

    #[error("layer depth mismatch: {0}")]
    DepthMismatch(String),

    #[error("operation {0} needs an alignment with a constant slot")]
    MissingConstantSlot(String),

    #[error("inconsistent alignment: {0}")]
    InconsistentAlignment(String),

    #[error("hypothesis violated: {0}")]
    Hypothesis(String),

    #[error("no fence: {0}")]
    NoFence(String),

    /// The relation has a member whose minimum is attained in exactly one
    /// component; callers use that member directly.
    #[error("found member with singleton M-set: {0}")]
    FoundSingleton(WeakOrder),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("slice postcondition failed: {0}")]
    SliceContract(String),

    #[error("unsupported clone: {0}")]
    UnsupportedClone(String),

    #[error("empty result: {0}")]
    EmptyResult(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Parse(_) | Error::Json(_) | Error::Io(_) | Error::InvalidWeakOrder(_) => 2,
            Error::BudgetExceeded { .. } | Error::ResourceBound { .. } => 4,
            _ => 3,
        }
    }
}
