use std::collections::BTreeSet;

use super::{ConceptExpr, InclusionAssertion, KbError, KnowledgeBase, RoleExpr};
use crate::lex::{Cursor, LexMode};

const RESERVED: &[&str] = &[
    "concept", "role", "NOT", "AND", "OR", "ALL", "ATLEAST", "ATMOST", "EXACTLY", "SOME", "TOP", "BOTTOM", "INV",
];

#[derive(Debug, Clone, Copy, Default)]
pub struct ParseOptions {
    /// Add symbols that are used without a declaration instead of rejecting them.
    pub auto_declare: bool,
}

/// Parses `.kb` text; every symbol must be declared.
pub fn parse_kb(text: &str) -> Result<KnowledgeBase, KbError> {
    parse_kb_with(text, ParseOptions::default())
}

pub fn parse_kb_with(text: &str, opts: ParseOptions) -> Result<KnowledgeBase, KbError> {
    let mut cur = Cursor::new(text, LexMode::default())?;
    let mut concepts = BTreeSet::new();
    let mut roles = BTreeSet::new();
    let mut assertions = Vec::new();

    while !cur.at_end() {
        let target = if cur.eat_keyword("concept") {
            Some((&mut concepts, "concept name"))
        } else if cur.eat_keyword("role") {
            Some((&mut roles, "role name"))
        } else {
            None
        };
        if let Some((set, what)) = target {
            loop {
                set.insert(cur.expect_ident(what, RESERVED)?);
                if !cur.eat_punct(",") {
                    break;
                }
            }
            cur.expect_punct(";")?;
            continue;
        }
        let lhs = cur.expect_ident("declaration or assertion", RESERVED)?;
        cur.expect_punct("<=")?;
        let rhs = expr(&mut cur)?;
        cur.expect_punct(";")?;
        assertions.push(InclusionAssertion::new(lhs, rhs));
    }

    if opts.auto_declare {
        KnowledgeBase::with_auto_signature(concepts, roles, assertions)
    } else {
        KnowledgeBase::new(concepts, roles, assertions)
    }
}

/// Parses a standalone concept expression over the signature of `kb`.
pub fn parse_concept(text: &str, kb: &KnowledgeBase) -> Result<ConceptExpr, KbError> {
    let mut cur = Cursor::new(text, LexMode::default())?;
    let e = expr(&mut cur)?;
    if !cur.at_end() {
        return Err(cur.error("unexpected input after expression").into());
    }
    if let Some(n) = e.concept_names().into_iter().find(|n| !kb.concepts().contains(n)) {
        return Err(KbError::Undeclared { kind: "concept", name: n });
    }
    if let Some(n) = e.role_names().into_iter().find(|n| !kb.roles().contains(n)) {
        return Err(KbError::Undeclared { kind: "role", name: n });
    }
    Ok(e)
}

fn expr(cur: &mut Cursor) -> Result<ConceptExpr, KbError> {
    let mut parts = vec![term(cur)?];
    while cur.eat_keyword("OR") {
        parts.push(term(cur)?);
    }
    Ok(ConceptExpr::or(parts))
}

fn term(cur: &mut Cursor) -> Result<ConceptExpr, KbError> {
    let mut parts = vec![factor(cur)?];
    while cur.eat_keyword("AND") {
        parts.push(factor(cur)?);
    }
    Ok(ConceptExpr::and(parts))
}

fn number(cur: &mut Cursor) -> Result<u32, KbError> {
    let n = cur.expect_num("number")?;
    u32::try_from(n).map_err(|_| cur.error("number too large").into())
}

fn role(cur: &mut Cursor) -> Result<RoleExpr, KbError> {
    if cur.eat_punct("(") {
        let r = role(cur)?;
        cur.expect_punct(")")?;
        return Ok(r);
    }
    if cur.eat_keyword("INV") {
        return Ok(RoleExpr::inverse_of(cur.expect_ident("role name", RESERVED)?));
    }
    Ok(RoleExpr::atomic(cur.expect_ident("role", RESERVED)?))
}

fn factor(cur: &mut Cursor) -> Result<ConceptExpr, KbError> {
    if cur.eat_punct("(") {
        let e = expr(cur)?;
        cur.expect_punct(")")?;
        return Ok(e);
    }
    if cur.eat_keyword("TOP") {
        return Ok(ConceptExpr::Top);
    }
    if cur.eat_keyword("BOTTOM") {
        return Ok(ConceptExpr::Bottom);
    }
    if cur.eat_keyword("NOT") {
        return Ok(ConceptExpr::not(cur.expect_ident("concept name after NOT", RESERVED)?));
    }
    if cur.eat_keyword("ALL") {
        let r = role(cur)?;
        cur.expect_punct(".")?;
        return Ok(ConceptExpr::forall(r, factor(cur)?));
    }
    if cur.eat_keyword("SOME") {
        return Ok(ConceptExpr::some(role(cur)?));
    }
    if cur.eat_keyword("ATLEAST") {
        let n = number(cur)?;
        return Ok(ConceptExpr::AtLeast(n, role(cur)?));
    }
    if cur.eat_keyword("ATMOST") {
        let n = number(cur)?;
        return Ok(ConceptExpr::at_most(n, role(cur)?));
    }
    if cur.eat_keyword("EXACTLY") {
        let n = number(cur)?;
        return Ok(ConceptExpr::exactly(n, role(cur)?));
    }
    Ok(ConceptExpr::atom(cur.expect_ident("concept expression", RESERVED)?))
}
