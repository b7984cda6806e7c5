//! KEE-style frame knowledge bases and their translation θ into a description logic KB.
//!
//! Frames are read assertionally: `Frame: F in KB K E` means every instance of `F` satisfies `E`.

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::error::SyntaxError;
use crate::kb::{valid_name, ConceptExpr, InclusionAssertion, KnowledgeBase, RoleExpr};
use crate::lex::{Cursor, LexMode, Tok};
use crate::reason::{self, ReasonError, ReasoningVerdict, SearchBudget};

const RESERVED: &[&str] = &[
    "Frame",
    "in",
    "KB",
    "SuperClasses",
    "MemberSlot",
    "ValueClass",
    "Cardinality.Min",
    "Cardinality.Max",
    "UNION",
    "INTERSECTION",
    "NOT",
];

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FrameError {
    #[error(transparent)]
    Syntax(#[from] SyntaxError),
    #[error("frame `{0}` is defined more than once")]
    DuplicateFrame(String),
    #[error("reference to undeclared frame `{0}`")]
    UndeclaredFrame(String),
    #[error("unknown slot `{0}`")]
    UnknownSlot(String),
    #[error("frame `{frame}` belongs to KB `{found}`, expected `{expected}`")]
    KbMismatch { frame: String, expected: String, found: String },
    #[error("slot `{slot}` is specified twice in frame `{frame}`")]
    DuplicateSlot { frame: String, slot: String },
    #[error("slot `{slot}` of frame `{frame}` has cardinality bounds that are not positive or not ordered")]
    BadCardinality { frame: String, slot: String },
    #[error("`{0}` is used both as a frame and as a slot")]
    NameClash(String),
    #[error("invalid name `{0}`")]
    InvalidName(String),
    #[error(transparent)]
    Reason(#[from] ReasonError),
}

/// `H ::= F | (INTERSECTION H H) | (UNION H H) | (NOT H)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SlotConstraint {
    Frame(String),
    Intersection(Box<SlotConstraint>, Box<SlotConstraint>),
    Union(Box<SlotConstraint>, Box<SlotConstraint>),
    Not(Box<SlotConstraint>),
}

impl SlotConstraint {
    fn frame_names(&self, out: &mut BTreeSet<String>) {
        match self {
            SlotConstraint::Frame(f) => {
                out.insert(f.clone());
            }
            SlotConstraint::Intersection(a, b) | SlotConstraint::Union(a, b) => {
                a.frame_names(out);
                b.frame_names(out);
            }
            SlotConstraint::Not(h) => h.frame_names(out),
        }
    }

    /// θ(H); negation is pushed inward so only atoms are negated.
    pub fn theta(&self) -> ConceptExpr {
        match self {
            SlotConstraint::Frame(f) => ConceptExpr::atom(f),
            SlotConstraint::Intersection(a, b) => ConceptExpr::And(vec![a.theta(), b.theta()]),
            SlotConstraint::Union(a, b) => ConceptExpr::Or(vec![a.theta(), b.theta()]),
            SlotConstraint::Not(h) => h.theta().negate().expect("slot constraints stay within ⊓, ⊔ and ¬"),
        }
    }
}

impl fmt::Display for SlotConstraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SlotConstraint::Frame(n) => f.write_str(n),
            SlotConstraint::Intersection(a, b) => write!(f, "(INTERSECTION {a} {b})"),
            SlotConstraint::Union(a, b) => write!(f, "(UNION {a} {b})"),
            SlotConstraint::Not(h) => write!(f, "(NOT {h})"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SlotSpec {
    pub slot: String,
    pub value_class: SlotConstraint,
    pub min: Option<u32>,
    pub max: Option<u32>,
}

/// The body of a frame definition.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct FrameExpr {
    pub supers: Vec<String>,
    pub slots: Vec<SlotSpec>,
}

impl FrameExpr {
    pub fn is_empty(&self) -> bool {
        self.supers.is_empty() && self.slots.is_empty()
    }

    /// θ(E): super-frame atoms, then per slot `∀S.H`, `∃≥m S`, `∃≤n S` (absent bounds dropped).
    pub fn theta(&self) -> ConceptExpr {
        let mut parts: Vec<ConceptExpr> = self.supers.iter().map(ConceptExpr::atom).collect();
        for s in &self.slots {
            let role = RoleExpr::atomic(&s.slot);
            parts.push(ConceptExpr::forall(role.clone(), s.value_class.theta()));
            if let Some(m) = s.min {
                parts.push(ConceptExpr::at_least(m, role.clone()));
            }
            if let Some(n) = s.max {
                parts.push(ConceptExpr::at_most(n, role));
            }
        }
        ConceptExpr::and(parts)
    }

    fn write_body(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if !self.supers.is_empty() {
            writeln!(f, "  SuperClasses: {}", self.supers.join(", "))?;
        }
        for s in &self.slots {
            writeln!(f, "  MemberSlot: {}", s.slot)?;
            writeln!(f, "    ValueClass: {}", s.value_class)?;
            if let Some(m) = s.min {
                writeln!(f, "    Cardinality.Min: {m}")?;
            }
            if let Some(n) = s.max {
                writeln!(f, "    Cardinality.Max: {n}")?;
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FrameDefinition {
    pub name: String,
    pub body: FrameExpr,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FrameKB {
    pub kb_name: String,
    pub frames: Vec<FrameDefinition>,
    /// Defined frames plus names used only as value classes.
    pub frame_names: BTreeSet<String>,
    pub slot_names: BTreeSet<String>,
}

impl FrameKB {
    /// Checks the structural conditions and computes the name sets.
    pub fn new(kb_name: impl Into<String>, frames: Vec<FrameDefinition>) -> Result<Self, FrameError> {
        let kb_name = kb_name.into();
        let mut defined = BTreeSet::new();
        for fr in &frames {
            if !valid_name(&fr.name) {
                return Err(FrameError::InvalidName(fr.name.clone()));
            }
            if !defined.insert(fr.name.clone()) {
                return Err(FrameError::DuplicateFrame(fr.name.clone()));
            }
        }
        let mut frame_names = defined.clone();
        let mut slot_names = BTreeSet::new();
        for fr in &frames {
            if let Some(s) = fr.body.supers.iter().find(|s| !defined.contains(*s)) {
                return Err(FrameError::UndeclaredFrame(s.clone()));
            }
            let mut seen = BTreeSet::new();
            for s in &fr.body.slots {
                if !valid_name(&s.slot) {
                    return Err(FrameError::InvalidName(s.slot.clone()));
                }
                let ordered = s.min.zip(s.max).is_none_or(|(m, n)| m <= n);
                if s.min == Some(0) || s.max == Some(0) || !ordered {
                    return Err(FrameError::BadCardinality { frame: fr.name.clone(), slot: s.slot.clone() });
                }
                if !seen.insert(&s.slot) {
                    return Err(FrameError::DuplicateSlot { frame: fr.name.clone(), slot: s.slot.clone() });
                }
                slot_names.insert(s.slot.clone());
                s.value_class.frame_names(&mut frame_names);
            }
        }
        if let Some(n) = frame_names.iter().find(|n| !valid_name(n)) {
            return Err(FrameError::InvalidName(n.clone()));
        }
        if let Some(n) = frame_names.intersection(&slot_names).next() {
            return Err(FrameError::NameClash(n.clone()));
        }
        Ok(FrameKB { kb_name, frames, frame_names, slot_names })
    }

    pub fn frame(&self, name: &str) -> Option<&FrameDefinition> {
        self.frames.iter().find(|f| f.name == name)
    }

    fn check_expr(&self, e: &FrameExpr) -> Result<(), FrameError> {
        let mut names: BTreeSet<String> = e.supers.iter().cloned().collect();
        for s in &e.slots {
            if !self.slot_names.contains(&s.slot) {
                return Err(FrameError::UnknownSlot(s.slot.clone()));
            }
            s.value_class.frame_names(&mut names);
        }
        match names.into_iter().find(|n| !self.frame_names.contains(n)) {
            Some(n) => Err(FrameError::UndeclaredFrame(n)),
            None => Ok(()),
        }
    }
}

impl fmt::Display for FrameKB {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, fr) in self.frames.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            writeln!(f, "Frame: {} in KB {}", fr.name, self.kb_name)?;
            fr.body.write_body(f)?;
        }
        Ok(())
    }
}

fn mode() -> LexMode {
    LexMode { dotted: true, hyphenated: false }
}

fn constraint(cur: &mut Cursor) -> Result<SlotConstraint, FrameError> {
    if !cur.eat_punct("(") {
        return Ok(SlotConstraint::Frame(cur.expect_ident("frame name or `(`", RESERVED)?));
    }
    let h = if cur.eat_keyword("UNION") {
        SlotConstraint::Union(Box::new(constraint(cur)?), Box::new(constraint(cur)?))
    } else if cur.eat_keyword("INTERSECTION") {
        SlotConstraint::Intersection(Box::new(constraint(cur)?), Box::new(constraint(cur)?))
    } else if cur.eat_keyword("NOT") {
        SlotConstraint::Not(Box::new(constraint(cur)?))
    } else {
        return Err(cur.error("expected UNION, INTERSECTION or NOT").into());
    };
    cur.expect_punct(")")?;
    Ok(h)
}

fn cardinality(cur: &mut Cursor) -> Result<u32, FrameError> {
    cur.expect_punct(":")?;
    let pos = cur.position();
    let n = cur.expect_num("cardinality")?;
    if n == 0 {
        return Err(SyntaxError::new(pos.0, pos.1, "cardinalities are positive integers").into());
    }
    u32::try_from(n).map_err(|_| SyntaxError::new(pos.0, pos.1, "cardinality too large").into())
}

fn body(cur: &mut Cursor) -> Result<FrameExpr, FrameError> {
    let mut e = FrameExpr::default();
    if cur.eat_keyword("SuperClasses") {
        cur.expect_punct(":")?;
        loop {
            e.supers.push(cur.expect_ident("frame name", RESERVED)?);
            if !cur.eat_punct(",") {
                break;
            }
        }
    }
    while cur.eat_keyword("MemberSlot") {
        cur.expect_punct(":")?;
        let slot = cur.expect_ident("slot name", RESERVED)?;
        if !cur.eat_keyword("ValueClass") {
            return Err(cur.error("expected `ValueClass`").into());
        }
        cur.expect_punct(":")?;
        let value_class = constraint(cur)?;
        let min = if cur.eat_keyword("Cardinality.Min") { Some(cardinality(cur)?) } else { None };
        let max_pos = cur.position();
        let max = if cur.eat_keyword("Cardinality.Max") { Some(cardinality(cur)?) } else { None };
        if let (Some(m), Some(n)) = (min, max) {
            if m > n {
                return Err(
                    SyntaxError::new(max_pos.0, max_pos.1, format!("minimum {m} exceeds maximum {n}")).into()
                );
            }
        }
        e.slots.push(SlotSpec { slot, value_class, min, max });
    }
    Ok(e)
}

/// Parses `.frm` text.
pub fn parse_frames(text: &str) -> Result<FrameKB, FrameError> {
    let mut cur = Cursor::new(text, mode())?;
    let mut frames = Vec::new();
    let mut kb_name: Option<String> = None;
    while !cur.at_end() {
        if !cur.eat_keyword("Frame") {
            return Err(cur.error("expected `Frame`").into());
        }
        cur.expect_punct(":")?;
        let name = cur.expect_ident("frame name", RESERVED)?;
        if !cur.eat_keyword("in") || !cur.eat_keyword("KB") {
            return Err(cur.error("expected `in KB`").into());
        }
        let kb = cur.expect_ident("knowledge base name", RESERVED)?;
        match &kb_name {
            Some(k) if *k != kb => {
                return Err(FrameError::KbMismatch { frame: name, expected: k.clone(), found: kb });
            }
            _ => kb_name = Some(kb),
        }
        let body = body(&mut cur)?;
        frames.push(FrameDefinition { name, body });
    }
    let Some(kb_name) = kb_name else {
        return Err(cur.error("no frame definitions").into());
    };
    FrameKB::new(kb_name, frames)
}

/// Parses a frame expression (the part after `Frame: F in KB K`) against `f`'s names.
pub fn parse_frame_expr(text: &str, f: &FrameKB) -> Result<FrameExpr, FrameError> {
    let mut cur = Cursor::new(text, mode())?;
    let e = body(&mut cur)?;
    if !cur.at_end() {
        let msg = match cur.peek() {
            Some(Tok::Ident(s)) => format!("unexpected `{s}`"),
            _ => "unexpected input".to_string(),
        };
        return Err(cur.error(msg).into());
    }
    f.check_expr(&e)?;
    Ok(e)
}

/// θ(F): one concept per frame name, one role per slot, one assertion per nonempty frame body.
pub fn translate_theta(f: &FrameKB) -> KnowledgeBase {
    let assertions = f
        .frames
        .iter()
        .filter(|fr| !fr.body.is_empty())
        .map(|fr| InclusionAssertion::new(&fr.name, fr.body.theta()))
        .collect();
    KnowledgeBase::new(f.frame_names.iter().cloned(), f.slot_names.iter().cloned(), assertions)
        .expect("frame KB names were validated")
}

fn known_frame(f: &FrameKB, frame: &str) -> Result<(), FrameError> {
    if f.frame_names.contains(frame) {
        Ok(())
    } else {
        Err(FrameError::UndeclaredFrame(frame.to_string()))
    }
}

/// Searches for a finite model of θ(F) with an instance of `frame`.
///
/// θ never uses inverse roles, so a witness also settles unrestricted consistency.
pub fn frame_consistent(f: &FrameKB, frame: &str, budget: SearchBudget) -> Result<ReasoningVerdict, FrameError> {
    known_frame(f, frame)?;
    Ok(reason::find_model(&translate_theta(f), &ConceptExpr::atom(frame), budget)?)
}

/// Searches for an instance of `frame` that does not satisfy `e`; a witness refutes "e is more general".
pub fn frame_more_general(
    f: &FrameKB,
    frame: &str,
    e: &FrameExpr,
    budget: SearchBudget,
) -> Result<ReasoningVerdict, FrameError> {
    known_frame(f, frame)?;
    f.check_expr(e)?;
    Ok(reason::subsumption_counterexample(&translate_theta(f), &ConceptExpr::atom(frame), &e.theta(), budget)?)
}
