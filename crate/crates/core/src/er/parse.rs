use super::{Card, Entity, ErError, ErSchema, Relationship};
use crate::error::SyntaxError;
use crate::lex::{Cursor, LexMode, Tok};

const RESERVED: &[&str] = &["entity", "isa", "attrs", "relationship", "card", "in"];

fn name(cur: &mut Cursor, what: &str) -> Result<String, SyntaxError> {
    cur.expect_ident(what, RESERVED)
}

fn bound(cur: &mut Cursor, what: &str) -> Result<u32, SyntaxError> {
    let n = cur.expect_num(what)?;
    u32::try_from(n).map_err(|_| cur.error(format!("{what} {n} is too large")))
}

/// Parses `.ers` text:
///
/// ```text
/// entity GradStudent isa Student attrs degree:String;
/// relationship ENROLLING (Ein:Course, Eof:Student);
/// card Course in ENROLLING.Ein 2..30;     # `*` for an unbounded maximum
/// ```
pub fn parse_er(text: &str) -> Result<ErSchema, ErError> {
    let mut cur = Cursor::new(text, LexMode::default())?;
    let mut entities = Vec::new();
    let mut relationships = Vec::new();
    let mut cards: Vec<((String, String, String), Card)> = Vec::new();

    while !cur.at_end() {
        if cur.eat_keyword("entity") {
            let ename = name(&mut cur, "entity name")?;
            let mut isa = Vec::new();
            let mut attrs = Vec::new();
            if cur.eat_keyword("isa") {
                loop {
                    isa.push(name(&mut cur, "entity name")?);
                    if !cur.eat_punct(",") {
                        break;
                    }
                }
            }
            if cur.eat_keyword("attrs") {
                loop {
                    let a = name(&mut cur, "attribute name")?;
                    cur.expect_punct(":")?;
                    let d = name(&mut cur, "domain name")?;
                    attrs.push((a, d));
                    if !cur.eat_punct(",") {
                        break;
                    }
                }
            }
            cur.expect_punct(";")?;
            entities.push(Entity { name: ename, isa, attrs });
        } else if cur.eat_keyword("relationship") {
            let rname = name(&mut cur, "relationship name")?;
            cur.expect_punct("(")?;
            let mut roles = Vec::new();
            loop {
                let u = name(&mut cur, "role name")?;
                cur.expect_punct(":")?;
                let e = name(&mut cur, "entity name")?;
                roles.push((u, e));
                if !cur.eat_punct(",") {
                    break;
                }
            }
            cur.expect_punct(")")?;
            cur.expect_punct(";")?;
            relationships.push(Relationship { name: rname, roles });
        } else if cur.eat_keyword("card") {
            let e = name(&mut cur, "entity name")?;
            cur.expect_keyword("in")?;
            let r = name(&mut cur, "relationship name")?;
            cur.expect_punct(".")?;
            let u = name(&mut cur, "role name")?;
            let min = bound(&mut cur, "minimum")?;
            cur.expect_punct("..")?;
            let max = if cur.eat_punct("*") { None } else { Some(bound(&mut cur, "maximum")?) };
            cur.expect_punct(";")?;
            cards.push(((e, r, u), (min, max)));
        } else {
            let found = cur.peek().map(Tok::to_string).unwrap_or_default();
            return Err(cur.error(format!("expected `entity`, `relationship` or `card`, found {found}")).into());
        }
    }
    ErSchema::new(entities, relationships, cards)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_and_renders_back() {
        let s = parse_er(
            "entity B isa A attrs x:Int, y:Str; entity A;
             relationship R (u:A, v:B); card B in R.u 1..*; card A in R.u 0..3;",
        )
        .unwrap();
        assert_eq!(s.card("B", "R", "u"), (1, None));
        assert_eq!(s.card("A", "R", "v"), (0, None));
        assert_eq!(parse_er(&s.to_string()).unwrap(), s);
    }

    #[test]
    fn rejects_bad_schemas() {
        let cases = [
            ("entity A; entity A;", "declared more than once"),
            ("entity A isa B;", "undeclared entity"),
            ("entity A; relationship R (u:A); relationship S (u:A);", "more than one relationship"),
            ("entity A; entity B; relationship R (u:A); card B in R.u 1..2;", "not a sub-entity"),
            ("entity A; relationship R (u:A); card A in R.u 3..2;", "exceeds"),
            ("entity A; relationship R (u:A); card A in R.w 1..2;", "not a role"),
            ("entity A attrs A:D;", "two different kinds"),
            ("entity A; relationship R (u:A); card A in R.u 1..2; card A in R.u 1..3;", "more than once"),
        ];
        for (src, needle) in cases {
            let err = parse_er(src).unwrap_err().to_string();
            assert!(err.contains(needle), "{src}: {err}");
        }
    }

    #[test]
    fn syntax_errors_have_positions() {
        match parse_er("entity A;\nrelationship R u:A;") {
            Err(ErError::Syntax(e)) => assert_eq!((e.line, e.col), (2, 16)),
            other => panic!("{other:?}"),
        }
    }
}
