use thiserror::Error;

use crate::model::Violation;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("matrix is not Hermitian positive definite")]
    NotPositiveDefinite,

    #[error("invalid configuration: {}", join(.0))]
    InvalidConfig(Vec<Violation>),

    #[error("pilot construction failed after {attempts} attempts: {reason}")]
    PilotConstruction { attempts: usize, reason: String },

    #[error("rank deficiency: {0}")]
    RankDeficient(String),

    #[error("pair-wise schedule needs at least 3 users, got {0}")]
    TooFewUsersForPairwise(usize),

    #[error("phase-2 budget {k2} is not divisible by the {sessions} pair-wise sessions")]
    NonDivisibleBudget { k2: usize, sessions: usize },

    #[error("degenerate grid: {0}")]
    DegenerateGrid(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("matrix text parse error: {0}")]
    MatrixParse(String),
}

fn join(violations: &[Violation]) -> String {
    violations
        .iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join("; ")
}
