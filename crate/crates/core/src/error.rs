use thiserror::Error;

use crate::game::GameError;
use crate::objective::ObjectiveError;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SolveError {
    #[error(transparent)]
    Game(#[from] GameError),
    #[error(transparent)]
    Objective(#[from] ObjectiveError),
    #[error("invalid solver configuration: {0}")]
    Config(String),
    #[error("value iteration did not converge within {0} iterations")]
    IterationLimit(u64),
    #[error("singular linear system (internal error)")]
    Singular,
    #[error("objective is not absorbing")]
    NotAbsorbing,
    #[error("expected a {expected} objective")]
    WrongKind { expected: &'static str },
    #[error("strategy has no choice for state `{state}` in stage {stage}")]
    MissingChoice { state: String, stage: String },
    #[error("invalid strategy: {0}")]
    BadStrategy(String),
    #[error("limits exceeded: {0}")]
    LimitExceeded(String),
}
