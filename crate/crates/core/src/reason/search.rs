use std::time::{Duration, Instant};

use serde_json::json;

use super::encode::{Encoding, Goal};
use super::solver::SolveResult;
use super::{CardinalityFact, ReasonError};
use crate::kb::{is_model, ConceptExpr, Interpretation, KnowledgeBase};

/// Domain sizes to try and an optional wall-clock limit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchBudget {
    min_size: usize,
    max_size: usize,
    time_limit: Option<Duration>,
}

impl SearchBudget {
    pub const MAX_SIZE: usize = 64;

    pub fn new(min_size: usize, max_size: usize) -> Result<Self, ReasonError> {
        if min_size == 0 {
            return Err(ReasonError::Budget("minimum size must be positive".into()));
        }
        if min_size > max_size {
            return Err(ReasonError::Budget(format!("minimum size {min_size} exceeds maximum {max_size}")));
        }
        if max_size > Self::MAX_SIZE {
            return Err(ReasonError::Budget(format!("maximum size {max_size} exceeds {}", Self::MAX_SIZE)));
        }
        Ok(SearchBudget { min_size, max_size, time_limit: None })
    }

    /// Sizes `1..=max_size`.
    pub fn up_to(max_size: usize) -> Result<Self, ReasonError> {
        Self::new(1, max_size)
    }

    pub fn with_time_limit(mut self, limit: Duration) -> Self {
        self.time_limit = Some(limit);
        self
    }

    pub fn min_size(&self) -> usize {
        self.min_size
    }

    pub fn max_size(&self) -> usize {
        self.max_size
    }

    pub fn time_limit(&self) -> Option<Duration> {
        self.time_limit
    }
}

/// Outcome of a bounded search.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ReasoningVerdict {
    /// A finite model with the goal nonempty.
    WitnessFound(Interpretation),
    /// No model with the goal nonempty of any size up to the bound.
    NoModelUpTo(usize),
    /// The time limit hit; sizes up to the carried value were exhausted.
    TimedOut(usize),
}

impl ReasoningVerdict {
    pub fn witness(&self) -> Option<&Interpretation> {
        match self {
            ReasoningVerdict::WitnessFound(i) => Some(i),
            _ => None,
        }
    }

    pub fn is_witness(&self) -> bool {
        self.witness().is_some()
    }

    pub fn outcome_name(&self) -> &'static str {
        match self {
            ReasoningVerdict::WitnessFound(_) => "WitnessFound",
            ReasoningVerdict::NoModelUpTo(_) => "NoModelUpTo",
            ReasoningVerdict::TimedOut(_) => "TimedOut",
        }
    }

    pub fn bound(&self) -> usize {
        match self {
            ReasoningVerdict::WitnessFound(i) => i.size(),
            ReasoningVerdict::NoModelUpTo(n) | ReasoningVerdict::TimedOut(n) => *n,
        }
    }

    /// `{"outcome", "bound", "witness", "facts"}`.
    pub fn to_json(&self, facts: &[CardinalityFact]) -> serde_json::Value {
        json!({
            "outcome": self.outcome_name(),
            "bound": self.bound(),
            "witness": self.witness().map(|i| i.to_json()),
            "facts": facts,
        })
    }
}

fn check_symbols(kb: &KnowledgeBase, c: &ConceptExpr) -> Result<(), ReasonError> {
    if let Some(n) = c.concept_names().into_iter().find(|n| !kb.concepts().contains(n)) {
        return Err(ReasonError::UnknownSymbol { kind: "concept", name: n });
    }
    if let Some(n) = c.role_names().into_iter().find(|n| !kb.roles().contains(n)) {
        return Err(ReasonError::UnknownSymbol { kind: "role", name: n });
    }
    Ok(())
}

/// Looks for a finite model of `kb` in which `goal` is nonempty, trying sizes in ascending order.
pub fn find_model(kb: &KnowledgeBase, goal: &ConceptExpr, budget: SearchBudget) -> Result<ReasoningVerdict, ReasonError> {
    check_symbols(kb, goal)?;
    Ok(search(kb, &Goal::Concept(goal.clone()), budget))
}

/// Looks for a finite model with an instance of `c1` outside `c2`.
///
/// A witness refutes `c1 ⊑ c2` for finite and unrestricted models alike.
pub fn subsumption_counterexample(
    kb: &KnowledgeBase,
    c1: &ConceptExpr,
    c2: &ConceptExpr,
    budget: SearchBudget,
) -> Result<ReasoningVerdict, ReasonError> {
    check_symbols(kb, c1)?;
    check_symbols(kb, c2)?;
    let goal = Goal::And(vec![Goal::Concept(c1.clone()), Goal::negation(c2)]);
    Ok(search(kb, &goal, budget))
}

fn search(kb: &KnowledgeBase, goal: &Goal, budget: SearchBudget) -> ReasoningVerdict {
    let deadline = budget.time_limit.map(|t| Instant::now() + t);
    let mut completed = budget.min_size - 1;
    for n in budget.min_size..=budget.max_size {
        if deadline.is_some_and(|d| Instant::now() >= d) {
            return ReasoningVerdict::TimedOut(completed);
        }
        let mut enc = Encoding::new(kb, n);
        enc.require(goal);
        enc.solver.set_deadline(deadline);
        match enc.solver.solve() {
            SolveResult::Sat(model) => {
                let i = enc.decode(kb, &model);
                let report = is_model(kb, &i).expect("decoded witness covers the signature");
                assert!(report.holds(), "solver returned a non-model: {report:?}");
                assert!(goal.eval(&i)[0], "solver returned a witness outside the goal");
                return ReasoningVerdict::WitnessFound(i);
            }
            SolveResult::Unsat => completed = n,
            SolveResult::Unknown => return ReasoningVerdict::TimedOut(completed),
        }
    }
    ReasoningVerdict::NoModelUpTo(budget.max_size)
}
