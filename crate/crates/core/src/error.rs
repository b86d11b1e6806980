use thiserror::Error;

/// Errors raised while building or running the pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("arity mismatch: expected {expected}, found {found}")]
    ArityMismatch { expected: usize, found: usize },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("alphabet mismatch: {0}")]
    AlphabetMismatch(String),

    #[error("alphabets are not disjoint: letter `{0}` occurs in both")]
    NotDisjoint(String),

    /// A materialized word would exceed the configured number of runs.
    #[error("expansion cap of {cap} runs exceeded: {context}")]
    ExpansionCap { cap: usize, context: String },

    #[error("alphabet budget of {budget} letters exceeded: {needed} letters needed")]
    AlphabetBudget { needed: u128, budget: usize },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// True for the two resource limits (alphabet budget, expansion cap).
    pub fn is_budget(&self) -> bool {
        matches!(
            self,
            Error::ExpansionCap { .. } | Error::AlphabetBudget { .. }
        )
    }

    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
