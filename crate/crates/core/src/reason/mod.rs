//! Bounded finite-model search and cardinality analysis.

mod analyze;
mod encode;
mod search;
mod solver;

pub use analyze::{analyze_cardinalities, CardinalityFact, FactKind};
pub use search::{find_model, subsumption_counterexample, ReasoningVerdict, SearchBudget};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ReasonError {
    #[error("unknown {kind} `{name}`")]
    UnknownSymbol { kind: &'static str, name: String },
    #[error("invalid search budget: {0}")]
    Budget(String),
}
