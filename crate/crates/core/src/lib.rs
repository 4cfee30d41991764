//! Two-player turn-based stochastic games with lexicographically ordered
//! reachability and safety objectives.
//!
//! The solver computes lex-values and finite-memory optimal strategies for
//! Max. Absorbing objectives are solved one objective at a time on games
//! restricted to locally optimal actions; general objectives are reduced to
//! absorbing ones through stages that remember which targets were visited.

pub mod casegen;
pub mod error;
pub mod game;
pub mod numeric;
pub mod objective;
pub mod oracle;
pub mod solve_lex;
pub mod solve_single;
pub mod trapped;

pub use error::SolveError;
pub use game::{
    make_absorbing, parse_game, restrict, serialize_game, serialize_model, sinks, swap_owners, ActionFilter, GameError,
    Model, Player, StateId, StochasticGame,
};
pub use numeric::{Mode, Numeric, Rational};
pub use objective::{
    lex_compare, LexObjective, LexVector, Objective, ObjectiveKind, QuantifiedLexObjective, QuantifiedObjective,
    StageKey,
};
pub use solve_lex::{
    decide, determinacy_check, evaluate_strategy, final_set, solve_absorbing, solve_lex, LexValueAssignment,
    SolveReport, StagedStrategy,
};
pub use solve_single::{
    almost_sure_reach_under, positive_states, solve_reach, solve_safe, MDStrategy, SolverConfig, ValueAssignment,
};
