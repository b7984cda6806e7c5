//! Knowledge bases: signature, inclusion assertions, the `.kb` text format and interpretations.

mod expr;
mod interp;
mod parse;

pub use expr::{ConceptExpr, RoleExpr};
pub use interp::{
    disjoint_union, evaluate_concept, is_model, Evaluator, Interpretation, InterpretationError, ModelReport,
    Violation,
};
pub use parse::{parse_concept, parse_kb, parse_kb_with, ParseOptions};

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::error::SyntaxError;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum KbError {
    #[error(transparent)]
    Syntax(#[from] SyntaxError),
    #[error("undeclared {kind} `{name}`")]
    Undeclared { kind: &'static str, name: String },
    #[error("`{0}` is declared both as a concept and as a role")]
    NameClash(String),
    #[error("invalid name `{0}`")]
    InvalidName(String),
}

/// `A ⊑ C` with atomic left-hand side.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct InclusionAssertion {
    pub lhs: String,
    pub rhs: ConceptExpr,
}

impl InclusionAssertion {
    pub fn new(lhs: impl Into<String>, rhs: ConceptExpr) -> Self {
        InclusionAssertion { lhs: lhs.into(), rhs }
    }
}

impl fmt::Display for InclusionAssertion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} <= {};", self.lhs, self.rhs)
    }
}

/// A signature of atomic concepts and roles plus a list of inclusion assertions.
///
/// Assertions sharing a left-hand side are stored separately and read as their conjunction.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct KnowledgeBase {
    concepts: BTreeSet<String>,
    roles: BTreeSet<String>,
    assertions: Vec<InclusionAssertion>,
}

pub(crate) fn valid_name(name: &str) -> bool {
    let mut chars = name.chars();
    chars.next().is_some_and(|c| c.is_ascii_alphabetic()) && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

impl KnowledgeBase {
    /// Builds a knowledge base, checking that every symbol used by an assertion is declared.
    pub fn new(
        concepts: impl IntoIterator<Item = String>,
        roles: impl IntoIterator<Item = String>,
        assertions: Vec<InclusionAssertion>,
    ) -> Result<Self, KbError> {
        let concepts: BTreeSet<String> = concepts.into_iter().collect();
        let roles: BTreeSet<String> = roles.into_iter().collect();
        if let Some(n) = concepts.iter().chain(&roles).find(|n| !valid_name(n)) {
            return Err(KbError::InvalidName(n.clone()));
        }
        if let Some(n) = concepts.intersection(&roles).next() {
            return Err(KbError::NameClash(n.clone()));
        }
        for a in &assertions {
            let used = std::iter::once(a.lhs.clone()).chain(a.rhs.concept_names());
            if let Some(n) = used.into_iter().find(|n| !concepts.contains(n)) {
                return Err(KbError::Undeclared { kind: "concept", name: n });
            }
            if let Some(n) = a.rhs.role_names().into_iter().find(|n| !roles.contains(n)) {
                return Err(KbError::Undeclared { kind: "role", name: n });
            }
        }
        Ok(KnowledgeBase { concepts, roles, assertions })
    }

    /// Like [`KnowledgeBase::new`] but adds every symbol used by the assertions to the signature.
    pub fn with_auto_signature(
        concepts: impl IntoIterator<Item = String>,
        roles: impl IntoIterator<Item = String>,
        assertions: Vec<InclusionAssertion>,
    ) -> Result<Self, KbError> {
        let mut cs: BTreeSet<String> = concepts.into_iter().collect();
        let mut rs: BTreeSet<String> = roles.into_iter().collect();
        for a in &assertions {
            cs.insert(a.lhs.clone());
            cs.extend(a.rhs.concept_names());
            rs.extend(a.rhs.role_names());
        }
        Self::new(cs, rs, assertions)
    }

    pub fn concepts(&self) -> &BTreeSet<String> {
        &self.concepts
    }

    pub fn roles(&self) -> &BTreeSet<String> {
        &self.roles
    }

    pub fn assertions(&self) -> &[InclusionAssertion] {
        &self.assertions
    }

    /// The conjunction of all right-hand sides for `lhs`, or `Top` when there is none.
    pub fn merged_rhs(&self, lhs: &str) -> ConceptExpr {
        let parts: Vec<ConceptExpr> =
            self.assertions.iter().filter(|a| a.lhs == lhs).map(|a| a.rhs.clone()).collect();
        ConceptExpr::and(parts)
    }

    /// One normalized right-hand side per left-hand side (same-lhs assertions collapsed).
    pub fn collapsed(&self) -> BTreeMap<String, ConceptExpr> {
        let mut out = BTreeMap::new();
        for lhs in self.assertions.iter().map(|a| &a.lhs).collect::<BTreeSet<_>>() {
            out.insert(lhs.clone(), self.merged_rhs(lhs).normalize());
        }
        out
    }

    /// The same knowledge base with collapsed, normalized assertions in left-hand-side order.
    pub fn collapsed_kb(&self) -> KnowledgeBase {
        let assertions = self.collapsed().into_iter().map(|(l, r)| InclusionAssertion::new(l, r)).collect();
        KnowledgeBase { concepts: self.concepts.clone(), roles: self.roles.clone(), assertions }
    }

    /// Same signature and the same collapsed assertions.
    pub fn equivalent_to(&self, other: &KnowledgeBase) -> bool {
        self.concepts == other.concepts && self.roles == other.roles && self.collapsed() == other.collapsed()
    }

    /// Drops the assertions rejected by `keep`.
    pub fn filter_assertions(&self, mut keep: impl FnMut(&InclusionAssertion) -> bool) -> KnowledgeBase {
        KnowledgeBase {
            concepts: self.concepts.clone(),
            roles: self.roles.clone(),
            assertions: self.assertions.iter().filter(|a| keep(a)).cloned().collect(),
        }
    }

    /// Returns a copy extended with extra symbols and assertions.
    pub fn extended(
        &self,
        concepts: impl IntoIterator<Item = String>,
        assertions: impl IntoIterator<Item = InclusionAssertion>,
    ) -> Result<KnowledgeBase, KbError> {
        let mut cs = self.concepts.clone();
        cs.extend(concepts);
        let mut all = self.assertions.clone();
        all.extend(assertions);
        KnowledgeBase::new(cs, self.roles.clone(), all)
    }

    /// Human-facing rendering in mathematical notation.
    pub fn pretty(&self) -> String {
        let mut s = String::new();
        for a in &self.assertions {
            s.push_str(&format!("{} ⊑ {}\n", a.lhs, a.rhs.pretty()));
        }
        s
    }
}

impl fmt::Display for KnowledgeBase {
    /// Canonical `.kb` text: sorted declarations, then assertions in stored order.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.concepts {
            writeln!(f, "concept {c};")?;
        }
        for r in &self.roles {
            writeln!(f, "role {r};")?;
        }
        if !self.assertions.is_empty() {
            writeln!(f)?;
        }
        for a in &self.assertions {
            writeln!(f, "{a}")?;
        }
        Ok(())
    }
}
