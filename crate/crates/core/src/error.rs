use thiserror::Error;

use crate::rational::ParseRationalError;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("incompatible labels: {0}")]
    IncompatibleLabels(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("unsupported loss: {0}")]
    UnsupportedLoss(String),

    #[error("{what} budget exceeded: {needed} > {budget}")]
    BudgetExceeded { what: &'static str, needed: u128, budget: u128 },

    #[error("duplicate point at index {0}; deduplicate coordinates first")]
    DuplicatePoint(usize),

    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("not a multicolored clique: {0}")]
    NotAClique(String),

    #[error(transparent)]
    Parse(#[from] ParseRationalError),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub fn is_budget(&self) -> bool {
        matches!(self, Error::BudgetExceeded { .. })
    }
}
