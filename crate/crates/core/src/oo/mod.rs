//! Object-oriented schemas with complex values, their instances, and the translation ψ into a
//! description logic KB.

mod instance;
mod model;
mod parse;
mod translate;

pub use instance::{check_legal_instance, type_member, InstanceViolation, OoInstance, OoLegalityReport, Value};
pub use model::{alpha_oo, beta_oo, beta_oo_with_names, find_bad_cycles, unfold, BadCycle, OoBeta, OoEmbedding};
pub use parse::{parse_oo, parse_type};
pub use translate::{psi_type, reasoning_kb, translate_psi};

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::error::SyntaxError;
use crate::kb::InterpretationError;
use crate::reason::{self, ReasonError, ReasoningVerdict, SearchBudget};

pub const ABSTRACT_CLASS: &str = "AbstractClass";
pub const REC_TYPE: &str = "RecType";
pub const SET_TYPE: &str = "SetType";
pub const VALUE: &str = "value";
pub const MEMBER: &str = "member";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OoError {
    #[error(transparent)]
    Syntax(#[from] SyntaxError),
    #[error("class `{0}` is declared more than once")]
    DuplicateClass(String),
    #[error("attribute `{0}` appears twice in one record")]
    DuplicateLabel(String),
    #[error("`{0}` is reserved")]
    Reserved(String),
    #[error("`{0}` is used both as a class and as an attribute")]
    NameClash(String),
    #[error("invalid name `{0}`")]
    InvalidName(String),
    #[error("unknown {kind} `{name}`")]
    Unknown { kind: &'static str, name: String },
    #[error("invalid instance: {0}")]
    InvalidInstance(String),
    #[error("unfolding would exceed {0} individuals")]
    BlowUp(usize),
    #[error(transparent)]
    Reason(#[from] ReasonError),
    #[error(transparent)]
    Interpretation(#[from] InterpretationError),
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum TypeExpr {
    Class(String),
    /// Two or more alternatives.
    Union(Vec<TypeExpr>),
    SetOf(Box<TypeExpr>),
    /// One or more fields with distinct labels.
    Record(Vec<(String, TypeExpr)>),
}

impl TypeExpr {
    /// Nesting depth of set and record constructors.
    pub fn depth(&self) -> usize {
        match self {
            TypeExpr::Class(_) => 0,
            TypeExpr::Union(ts) => ts.iter().map(TypeExpr::depth).max().unwrap_or(0),
            TypeExpr::SetOf(t) => 1 + t.depth(),
            TypeExpr::Record(fs) => 1 + fs.iter().map(|(_, t)| t.depth()).max().unwrap_or(0),
        }
    }

    pub fn class_names(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect(&mut out, &mut BTreeSet::new());
        out
    }

    pub fn attribute_names(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect(&mut BTreeSet::new(), &mut out);
        out
    }

    fn collect(&self, classes: &mut BTreeSet<String>, attrs: &mut BTreeSet<String>) {
        match self {
            TypeExpr::Class(c) => {
                classes.insert(c.clone());
            }
            TypeExpr::Union(ts) => ts.iter().for_each(|t| t.collect(classes, attrs)),
            TypeExpr::SetOf(t) => t.collect(classes, attrs),
            TypeExpr::Record(fs) => {
                for (a, t) in fs {
                    attrs.insert(a.clone());
                    t.collect(classes, attrs);
                }
            }
        }
    }
}

impl fmt::Display for TypeExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TypeExpr::Class(c) => write!(f, "{c}"),
            TypeExpr::Union(ts) => {
                let parts: Vec<String> = ts.iter().map(|t| t.to_string()).collect();
                write!(f, "Union {} End", parts.join(", "))
            }
            TypeExpr::SetOf(t) => write!(f, "Set-of {t}"),
            TypeExpr::Record(fs) => {
                let parts: Vec<String> = fs.iter().map(|(a, t)| format!("{a}: {t}")).collect();
                write!(f, "Record {} End", parts.join(", "))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassDecl {
    pub name: String,
    pub supers: Vec<String>,
    pub ty: TypeExpr,
}

impl fmt::Display for ClassDecl {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Class {}", self.name)?;
        if !self.supers.is_empty() {
            write!(f, " is-a {}", self.supers.join(", "))?;
        }
        write!(f, " type-is {}", self.ty)
    }
}

/// An object-oriented schema. Classes referenced but never declared are kept as opaque
/// classes with no declaration.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OoSchema {
    decls: Vec<ClassDecl>,
    classes: BTreeSet<String>,
    attributes: BTreeSet<String>,
}

const RESERVED_CLASSES: [&str; 3] = [ABSTRACT_CLASS, REC_TYPE, SET_TYPE];
const RESERVED_ATTRS: [&str; 2] = [VALUE, MEMBER];

impl OoSchema {
    pub fn new(decls: Vec<ClassDecl>) -> Result<Self, OoError> {
        let mut classes = BTreeSet::new();
        let mut attributes = BTreeSet::new();
        let mut declared = BTreeSet::new();
        for d in &decls {
            if !declared.insert(d.name.clone()) {
                return Err(OoError::DuplicateClass(d.name.clone()));
            }
            classes.insert(d.name.clone());
            classes.extend(d.supers.iter().cloned());
            classes.extend(d.ty.class_names());
            attributes.extend(d.ty.attribute_names());
            check_labels(&d.ty)?;
        }
        for c in &classes {
            if !crate::kb::valid_name(c) {
                return Err(OoError::InvalidName(c.clone()));
            }
            if RESERVED_CLASSES.contains(&c.as_str()) || RESERVED_ATTRS.contains(&c.as_str()) {
                return Err(OoError::Reserved(c.clone()));
            }
        }
        for a in &attributes {
            if !crate::kb::valid_name(a) {
                return Err(OoError::InvalidName(a.clone()));
            }
            if RESERVED_ATTRS.contains(&a.as_str()) || RESERVED_CLASSES.contains(&a.as_str()) {
                return Err(OoError::Reserved(a.clone()));
            }
            if classes.contains(a) {
                return Err(OoError::NameClash(a.clone()));
            }
        }
        Ok(OoSchema { decls, classes, attributes })
    }

    /// Declarations in source order.
    pub fn decls(&self) -> &[ClassDecl] {
        &self.decls
    }

    pub fn decl(&self, class: &str) -> Option<&ClassDecl> {
        self.decls.iter().find(|d| d.name == class)
    }

    /// Declared and opaque classes.
    pub fn classes(&self) -> &BTreeSet<String> {
        &self.classes
    }

    pub fn attributes(&self) -> &BTreeSet<String> {
        &self.attributes
    }

    pub fn opaque_classes(&self) -> BTreeSet<String> {
        self.classes.iter().filter(|c| self.decl(c).is_none()).cloned().collect()
    }

    /// Maximum depth over declared types; 0 for a schema without declarations.
    pub fn depth(&self) -> usize {
        self.decls.iter().map(|d| d.ty.depth()).max().unwrap_or(0)
    }

    fn check_type(&self, t: &TypeExpr) -> Result<(), OoError> {
        if let Some(c) = t.class_names().into_iter().find(|c| !self.classes.contains(c)) {
            return Err(OoError::Unknown { kind: "class", name: c });
        }
        if let Some(a) = t.attribute_names().into_iter().find(|a| !self.attributes.contains(a)) {
            return Err(OoError::Unknown { kind: "attribute", name: a });
        }
        check_labels(t)
    }
}

fn check_labels(t: &TypeExpr) -> Result<(), OoError> {
    match t {
        TypeExpr::Class(_) => Ok(()),
        TypeExpr::Union(ts) => ts.iter().try_for_each(check_labels),
        TypeExpr::SetOf(t) => check_labels(t),
        TypeExpr::Record(fs) => {
            let mut seen = BTreeSet::new();
            for (a, t) in fs {
                if !seen.insert(a) {
                    return Err(OoError::DuplicateLabel(a.clone()));
                }
                check_labels(t)?;
            }
            Ok(())
        }
    }
}

impl fmt::Display for OoSchema {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for d in &self.decls {
            writeln!(f, "{d}")?;
        }
        Ok(())
    }
}

/// Bounded-search verdict with a legal instance read off any witness.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OoVerdict {
    pub verdict: ReasoningVerdict,
    pub certificate: Option<OoInstance>,
}

fn certify(s: &OoSchema, verdict: ReasoningVerdict) -> OoVerdict {
    let certificate = verdict.witness().map(|w| {
        let b = beta_oo(s, w).expect("witness covers the schema signature");
        debug_assert!(check_legal_instance(s, &b.instance).unwrap().holds());
        b.instance
    });
    OoVerdict { verdict, certificate }
}

/// Searches for a legal instance in which `t` has an active value.
pub fn oo_type_consistent(s: &OoSchema, t: &TypeExpr, budget: SearchBudget) -> Result<OoVerdict, OoError> {
    s.check_type(t)?;
    let verdict = reason::find_model(&reasoning_kb(s), &psi_type(t), budget)?;
    Ok(certify(s, verdict))
}

/// Searches for a legal instance with a value of `t` outside `t2`.
pub fn oo_subtype(s: &OoSchema, t: &TypeExpr, t2: &TypeExpr, budget: SearchBudget) -> Result<OoVerdict, OoError> {
    s.check_type(t)?;
    s.check_type(t2)?;
    let verdict = reason::subsumption_counterexample(&reasoning_kb(s), &psi_type(t), &psi_type(t2), budget)?;
    Ok(certify(s, verdict))
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;

    pub const FIG7: &str = "
        Class Teacher type-is Union Professor, GradStudent End
        Class GradStudent is-a Student type-is Record degree: String End
        Class Course type-is Record enrolls: Set-of Student, taughtby: Teacher End";

    pub const EX56: &str = "Class C type-is Record a1: Record a2: Record a3: C End End End";

    #[test]
    fn depths() {
        assert_eq!(parse_oo(FIG7).unwrap().depth(), 2);
        assert_eq!(parse_oo(EX56).unwrap().depth(), 3);
        assert_eq!(parse_oo("Class C type-is C").unwrap().depth(), 0);
    }

    #[test]
    fn opaque_classes_are_collected() {
        let s = parse_oo(FIG7).unwrap();
        assert_eq!(s.decls().len(), 3);
        let opaque: Vec<String> = s.opaque_classes().into_iter().collect();
        assert_eq!(opaque, ["Professor", "String", "Student"]);
    }

    #[test]
    fn reserved_and_clashing_names() {
        assert!(matches!(parse_oo("Class RecType type-is C"), Err(OoError::Reserved(_))));
        assert!(matches!(parse_oo("Class C type-is Record value: C End"), Err(OoError::Reserved(_))));
        assert!(matches!(parse_oo("Class C type-is Record C: D End"), Err(OoError::NameClash(_))));
    }

    #[test]
    fn gradstudent_is_a_subtype_of_student() {
        let s = parse_oo(FIG7).unwrap();
        let (g, st) = (TypeExpr::Class("GradStudent".into()), TypeExpr::Class("Student".into()));
        let v = oo_subtype(&s, &g, &st, SearchBudget::up_to(4).unwrap()).unwrap();
        assert_eq!(v.verdict, ReasoningVerdict::NoModelUpTo(4));
    }

    #[test]
    fn course_is_consistent_with_certificate() {
        let s = parse_oo(FIG7).unwrap();
        let v = oo_type_consistent(&s, &TypeExpr::Class("Course".into()), SearchBudget::up_to(8).unwrap()).unwrap();
        assert!(v.verdict.is_witness());
        let j = v.certificate.unwrap();
        assert!(!j.class("Course").is_empty());
        assert!(check_legal_instance(&s, &j).unwrap().holds());
    }

    #[test]
    fn union_is_not_a_subtype_of_one_branch() {
        let s = parse_oo(FIG7).unwrap();
        let t = parse_type("Union Professor, GradStudent End", &s).unwrap();
        let v = oo_subtype(&s, &t, &TypeExpr::Class("Professor".into()), SearchBudget::up_to(4).unwrap()).unwrap();
        let j = v.certificate.unwrap();
        assert!(j.class("GradStudent").iter().any(|o| !j.class("Professor").contains(o)));
    }
}
