//! Entity-Relationship schemas, database states, and their translation φ into a description
//! logic KB whose finite models correspond to legal states.

mod mapping;
mod parse;
mod state;
mod translate;

pub use mapping::{
    alpha_er, beta_er, beta_er_with_names, is_relation_descriptive, make_relation_descriptive, BetaResult,
    ConflictSet, ErElement, ErEmbedding,
};
pub use parse::parse_er;
pub use state::{check_legal, BasicValue, DatabaseState, LabeledTuple, LegalityReport, StateViolation};
pub use translate::{translate_phi, translate_phi_with};

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::error::SyntaxError;
use crate::kb::{ConceptExpr, InterpretationError};
use crate::reason::{self, analyze_cardinalities, CardinalityFact, FactKind, ReasonError, ReasoningVerdict, SearchBudget};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ErError {
    #[error(transparent)]
    Syntax(#[from] SyntaxError),
    #[error("{kind} `{name}` is declared more than once")]
    Duplicate { kind: &'static str, name: String },
    #[error("undeclared {kind} `{name}`")]
    Undeclared { kind: &'static str, name: String },
    #[error("`{0}` is used for two different kinds of symbol")]
    NameClash(String),
    #[error("role `{0}` is used by more than one relationship")]
    RoleReused(String),
    #[error("relationship `{0}` has no roles")]
    NoRoles(String),
    #[error("cardinality for `{entity}` in {relationship}.{role}: {reason}")]
    BadCardinality { entity: String, relationship: String, role: String, reason: String },
    #[error("invalid name `{0}`")]
    InvalidName(String),
    #[error("invalid database state: {0}")]
    InvalidState(String),
    #[error("not a model of the translated schema: {0}")]
    NotAModel(String),
    #[error("the witness concept is empty")]
    EmptyWitness,
    #[error("relationship `{0}` is unary; conflicting tuples cannot be separated by exchanging fillers")]
    UnaryConflict(String),
    #[error("repair of `{relationship}` needs 2^{conflicts} copies of {size} individuals")]
    BlowUp { relationship: String, conflicts: usize, size: usize },
    #[error(transparent)]
    Reason(#[from] ReasonError),
    #[error(transparent)]
    Interpretation(#[from] InterpretationError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Entity {
    pub name: String,
    /// Direct super-entities.
    pub isa: Vec<String>,
    /// `(attribute, domain)` pairs.
    pub attrs: Vec<(String, String)>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Relationship {
    pub name: String,
    /// `(role, primary entity)` pairs in declaration order.
    pub roles: Vec<(String, String)>,
}

/// `(min, max)` with `None` for an unbounded maximum.
pub type Card = (u32, Option<u32>);

/// An ER schema. Build it with [`ErSchema::new`] or [`parse_er`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ErSchema {
    entities: BTreeMap<String, Entity>,
    relationships: BTreeMap<String, Relationship>,
    cards: BTreeMap<(String, String, String), Card>,
}

impl ErSchema {
    pub fn new(
        entities: Vec<Entity>,
        relationships: Vec<Relationship>,
        cards: Vec<((String, String, String), Card)>,
    ) -> Result<Self, ErError> {
        let mut ents = BTreeMap::new();
        for e in entities {
            if ents.contains_key(&e.name) {
                return Err(ErError::Duplicate { kind: "entity", name: e.name });
            }
            ents.insert(e.name.clone(), e);
        }
        let mut rels = BTreeMap::new();
        for r in relationships {
            if rels.contains_key(&r.name) {
                return Err(ErError::Duplicate { kind: "relationship", name: r.name });
            }
            rels.insert(r.name.clone(), r);
        }
        let mut s = ErSchema { entities: ents, relationships: rels, cards: BTreeMap::new() };
        s.validate_symbols()?;
        for ((e, r, u), card) in cards {
            s.check_card(&e, &r, &u, card)?;
            if s.cards.insert((e.clone(), r.clone(), u.clone()), card).is_some() {
                return Err(ErError::Duplicate { kind: "cardinality", name: format!("{e} in {r}.{u}") });
            }
        }
        Ok(s)
    }

    fn validate_symbols(&self) -> Result<(), ErError> {
        let mut kinds: BTreeMap<String, &str> = BTreeMap::new();
        let mut claim = |name: &str, kind: &'static str| -> Result<(), ErError> {
            if !crate::kb::valid_name(name) {
                return Err(ErError::InvalidName(name.to_string()));
            }
            match kinds.insert(name.to_string(), kind) {
                Some(k) if k != kind => Err(ErError::NameClash(name.to_string())),
                _ => Ok(()),
            }
        };
        for e in self.entities.values() {
            claim(&e.name, "entity")?;
        }
        for r in self.relationships.values() {
            claim(&r.name, "relationship")?;
        }
        let mut role_owner: BTreeMap<&str, &str> = BTreeMap::new();
        for r in self.relationships.values() {
            if r.roles.is_empty() {
                return Err(ErError::NoRoles(r.name.clone()));
            }
            for (u, e) in &r.roles {
                if role_owner.insert(u, &r.name).is_some() {
                    return Err(ErError::RoleReused(u.clone()));
                }
                claim(u, "role")?;
                if !self.entities.contains_key(e) {
                    return Err(ErError::Undeclared { kind: "entity", name: e.clone() });
                }
            }
        }
        for e in self.entities.values() {
            if let Some(sup) = e.isa.iter().find(|s| !self.entities.contains_key(*s)) {
                return Err(ErError::Undeclared { kind: "entity", name: sup.clone() });
            }
            let mut seen = BTreeSet::new();
            for (a, d) in &e.attrs {
                if !seen.insert(a) {
                    return Err(ErError::Duplicate { kind: "attribute", name: format!("{}.{a}", e.name) });
                }
                claim(a, "attribute")?;
                claim(d, "domain")?;
            }
        }
        Ok(())
    }

    fn check_card(&self, e: &str, r: &str, u: &str, (min, max): Card) -> Result<(), ErError> {
        let bad = |reason: String| ErError::BadCardinality {
            entity: e.to_string(),
            relationship: r.to_string(),
            role: u.to_string(),
            reason,
        };
        if !self.entities.contains_key(e) {
            return Err(ErError::Undeclared { kind: "entity", name: e.to_string() });
        }
        let rel = self.relationships.get(r).ok_or_else(|| ErError::Undeclared { kind: "relationship", name: r.to_string() })?;
        let Some((_, primary)) = rel.roles.iter().find(|(role, _)| role == u) else {
            return Err(bad(format!("`{u}` is not a role of `{r}`")));
        };
        if !self.sub_entities(primary).contains(e) {
            return Err(bad(format!("`{e}` is not a sub-entity of the primary entity `{primary}`")));
        }
        if max.is_some_and(|n| min > n) {
            return Err(bad(format!("minimum {min} exceeds maximum {}", max.unwrap())));
        }
        Ok(())
    }

    pub fn entities(&self) -> &BTreeMap<String, Entity> {
        &self.entities
    }

    pub fn relationships(&self) -> &BTreeMap<String, Relationship> {
        &self.relationships
    }

    /// Explicitly declared cardinalities.
    pub fn cards(&self) -> &BTreeMap<(String, String, String), Card> {
        &self.cards
    }

    /// `card(E, R, U)` with the defaults `(0, ∞)`.
    pub fn card(&self, e: &str, r: &str, u: &str) -> Card {
        self.cards.get(&(e.to_string(), r.to_string(), u.to_string())).copied().unwrap_or((0, None))
    }

    /// All attribute symbols.
    pub fn attributes(&self) -> BTreeSet<String> {
        self.entities.values().flat_map(|e| e.attrs.iter().map(|(a, _)| a.clone())).collect()
    }

    /// All domain symbols.
    pub fn domains(&self) -> BTreeSet<String> {
        self.entities.values().flat_map(|e| e.attrs.iter().map(|(_, d)| d.clone())).collect()
    }

    /// All role symbols.
    pub fn roles(&self) -> BTreeSet<String> {
        self.relationships.values().flat_map(|r| r.roles.iter().map(|(u, _)| u.clone())).collect()
    }

    /// Entities `E` with `E ≼* target` (reflexive-transitive ISA).
    pub fn sub_entities(&self, target: &str) -> BTreeSet<String> {
        let mut out = BTreeSet::from([target.to_string()]);
        loop {
            let before = out.len();
            for e in self.entities.values() {
                if e.isa.iter().any(|s| out.contains(s)) {
                    out.insert(e.name.clone());
                }
            }
            if out.len() == before {
                return out;
            }
        }
    }

    fn require_entity(&self, e: &str) -> Result<(), ErError> {
        if self.entities.contains_key(e) {
            Ok(())
        } else {
            Err(ErError::Undeclared { kind: "entity", name: e.to_string() })
        }
    }
}

impl fmt::Display for ErSchema {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for e in self.entities.values() {
            write!(f, "entity {}", e.name)?;
            if !e.isa.is_empty() {
                write!(f, " isa {}", e.isa.join(", "))?;
            }
            if !e.attrs.is_empty() {
                let attrs: Vec<String> = e.attrs.iter().map(|(a, d)| format!("{a}:{d}")).collect();
                write!(f, " attrs {}", attrs.join(", "))?;
            }
            writeln!(f, ";")?;
        }
        for r in self.relationships.values() {
            let roles: Vec<String> = r.roles.iter().map(|(u, e)| format!("{u}:{e}")).collect();
            writeln!(f, "relationship {} ({});", r.name, roles.join(", "))?;
        }
        for ((e, r, u), (min, max)) in &self.cards {
            let max = max.map_or("*".to_string(), |n| n.to_string());
            writeln!(f, "card {e} in {r}.{u} {min}..{max};")?;
        }
        Ok(())
    }
}

/// Entity satisfiability result; a witness comes with a legal database state.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ErSatisfiability {
    pub verdict: ReasoningVerdict,
    pub certificate: Option<DatabaseState>,
}

/// Inheritance evidence: a sound finite-model proof, a refuting legal state, or neither.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ErInheritance {
    pub proof: Option<CardinalityFact>,
    pub verdict: Option<ReasoningVerdict>,
    pub certificate: Option<DatabaseState>,
}

fn certify(s: &ErSchema, verdict: &ReasoningVerdict, goal: &ConceptExpr) -> Result<Option<DatabaseState>, ErError> {
    let Some(w) = verdict.witness() else { return Ok(None) };
    let repaired = make_relation_descriptive(s, w, goal)?;
    let state = beta_er(s, &repaired)?.state;
    let report = check_legal(s, &state)?;
    assert!(report.holds(), "state built from a model is not legal: {report:?}");
    Ok(Some(state))
}

/// Searches for a legal database state populating `entity`.
pub fn er_entity_satisfiable(s: &ErSchema, entity: &str, budget: SearchBudget) -> Result<ErSatisfiability, ErError> {
    s.require_entity(entity)?;
    let goal = ConceptExpr::atom(entity);
    let verdict = reason::find_model(&translate_phi(s), &goal, budget)?;
    let certificate = certify(s, &verdict, &goal)?;
    Ok(ErSatisfiability { verdict, certificate })
}

/// Decides whether every instance of `sub` is an instance of `sup` in finite legal states,
/// as far as the analyzer and bounded search can tell.
pub fn er_inherits(s: &ErSchema, sub: &str, sup: &str, budget: SearchBudget) -> Result<ErInheritance, ErError> {
    s.require_entity(sub)?;
    s.require_entity(sup)?;
    let kb = translate_phi(s);
    let proof = analyze_cardinalities(&kb).into_iter().find(|f| match &f.kind {
        FactKind::Subset { sub: a, sup: b } | FactKind::FiniteSubsumption { sub: a, sup: b } => a == sub && b == sup,
        FactKind::FiniteInconsistent { concept } => concept == sub,
        FactKind::Inequality { .. } => false,
    });
    if proof.is_some() || sub == sup {
        return Ok(ErInheritance { proof, verdict: None, certificate: None });
    }
    let (c1, c2) = (ConceptExpr::atom(sub), ConceptExpr::atom(sup));
    let verdict = reason::subsumption_counterexample(&kb, &c1, &c2, budget)?;
    let goal = ConceptExpr::And(vec![c1, ConceptExpr::not(sup)]);
    let certificate = certify(s, &verdict, &goal)?;
    Ok(ErInheritance { proof: None, verdict: Some(verdict), certificate })
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) const FIG4: &str = "
        entity Course;
        entity AdvCourse isa Course;
        entity Teacher;
        entity Student;
        entity GradStudent isa Student attrs degree:String;
        relationship TEACHING (Tof:Course, Tby:Teacher);
        relationship ENROLLING (Ein:Course, Eof:Student);
        card Course in TEACHING.Tof 1..1;
        card Course in ENROLLING.Ein 2..30;
        card AdvCourse in ENROLLING.Ein 0..20;
        card Student in ENROLLING.Eof 4..6;";

    #[test]
    fn sub_entities_are_reflexive_transitive() {
        let s = parse_er("entity A; entity B isa A; entity C isa B; entity D;").unwrap();
        assert_eq!(s.sub_entities("A"), BTreeSet::from(["A".into(), "B".into(), "C".into()]));
    }

    #[test]
    fn teacher_satisfiable_at_size_one() {
        let s = parse_er(FIG4).unwrap();
        let r = er_entity_satisfiable(&s, "Teacher", SearchBudget::up_to(3).unwrap()).unwrap();
        assert_eq!(r.verdict.bound(), 1);
        let cert = r.certificate.unwrap();
        assert_eq!(cert.entities["Teacher"].len(), 1);
    }

    #[test]
    fn course_does_not_inherit_from_advcourse() {
        let s = parse_er(FIG4).unwrap();
        let r = er_inherits(&s, "Course", "AdvCourse", SearchBudget::up_to(8).unwrap()).unwrap();
        assert!(r.proof.is_none());
        let v = r.verdict.unwrap();
        assert!(v.is_witness());
        let cert = r.certificate.unwrap();
        assert!(cert.entities["Course"].iter().any(|c| !cert.entities["AdvCourse"].contains(c)));
    }

    #[test]
    fn explicit_isa_is_proved() {
        let s = parse_er(FIG4).unwrap();
        let r = er_inherits(&s, "AdvCourse", "Course", SearchBudget::up_to(2).unwrap()).unwrap();
        assert!(r.proof.is_some());
    }
}
