use super::{ClassDecl, OoError, OoSchema, TypeExpr};
use crate::error::SyntaxError;
use crate::lex::{Cursor, LexMode, Tok};

const RESERVED: &[&str] = &["Class", "is-a", "type-is", "Union", "Set-of", "Record", "End"];

fn mode() -> LexMode {
    LexMode { dotted: false, hyphenated: true }
}

fn name(cur: &mut Cursor, what: &str) -> Result<String, SyntaxError> {
    cur.expect_ident(what, RESERVED)
}

fn type_expr(cur: &mut Cursor) -> Result<TypeExpr, SyntaxError> {
    if cur.eat_keyword("Union") {
        let mut ts = vec![type_expr(cur)?];
        while cur.eat_punct(",") {
            ts.push(type_expr(cur)?);
        }
        cur.expect_keyword("End")?;
        Ok(if ts.len() == 1 { ts.pop().unwrap() } else { TypeExpr::Union(ts) })
    } else if cur.eat_keyword("Set-of") {
        Ok(TypeExpr::SetOf(Box::new(type_expr(cur)?)))
    } else if cur.eat_keyword("Record") {
        if cur.is_keyword("End") {
            return Err(cur.error("a record type needs at least one field"));
        }
        let mut fields = Vec::new();
        loop {
            let a = name(cur, "attribute name")?;
            cur.expect_punct(":")?;
            fields.push((a, type_expr(cur)?));
            if !cur.eat_punct(",") {
                break;
            }
        }
        cur.expect_keyword("End")?;
        Ok(TypeExpr::Record(fields))
    } else {
        Ok(TypeExpr::Class(name(cur, "type expression")?))
    }
}

/// Parses `.oos` text, a sequence of `Class C [is-a C1, ...] type-is T` declarations.
pub fn parse_oo(text: &str) -> Result<OoSchema, OoError> {
    let mut cur = Cursor::new(text, mode())?;
    let mut decls = Vec::new();
    while !cur.at_end() {
        if !cur.eat_keyword("Class") {
            let found = cur.peek().map(Tok::to_string).unwrap_or_default();
            return Err(cur.error(format!("expected `Class`, found {found}")).into());
        }
        let cname = name(&mut cur, "class name")?;
        let mut supers = Vec::new();
        if cur.eat_keyword("is-a") {
            loop {
                supers.push(name(&mut cur, "class name")?);
                if !cur.eat_punct(",") {
                    break;
                }
            }
        }
        cur.expect_keyword("type-is")?;
        let ty = type_expr(&mut cur)?;
        cur.eat_punct(";");
        decls.push(ClassDecl { name: cname, supers, ty });
    }
    OoSchema::new(decls)
}

/// Parses a standalone type expression over the names of `s`.
pub fn parse_type(text: &str, s: &OoSchema) -> Result<TypeExpr, OoError> {
    let mut cur = Cursor::new(text, mode())?;
    let t = type_expr(&mut cur)?;
    if !cur.at_end() {
        return Err(cur.error("unexpected input after the type expression").into());
    }
    s.check_type(&t)?;
    Ok(t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oo::tests::{EX56, FIG7};

    #[test]
    fn figure_shapes() {
        let s = parse_oo(FIG7).unwrap();
        let course = s.decl("Course").unwrap();
        assert_eq!(
            course.ty.to_string(),
            "Record enrolls: Set-of Student, taughtby: Teacher End"
        );
        assert_eq!(s.decl("GradStudent").unwrap().supers, ["Student"]);
        let s = parse_oo(EX56).unwrap();
        assert_eq!(s.decls()[0].ty.to_string(), "Record a1: Record a2: Record a3: C End End End");
        assert_eq!(parse_oo(&s.to_string()).unwrap(), s);
    }

    #[test]
    fn unary_union_collapses() {
        let s = parse_oo("Class C type-is Union D End").unwrap();
        assert_eq!(s.decls()[0].ty, TypeExpr::Class("D".into()));
    }

    #[test]
    fn self_reference_is_accepted() {
        let s = parse_oo("Class C type-is C").unwrap();
        assert!(s.opaque_classes().is_empty());
    }

    #[test]
    fn errors() {
        assert!(matches!(parse_oo("Class C type-is Record End"), Err(OoError::Syntax(_))));
        assert!(matches!(parse_oo("Class C type-is Union End"), Err(OoError::Syntax(_))));
        assert!(matches!(parse_oo("Class C type-is D Class C type-is E"), Err(OoError::DuplicateClass(_))));
        assert!(matches!(parse_oo("Class C type-is Record a: D, a: E End"), Err(OoError::DuplicateLabel(_))));
        assert!(matches!(parse_oo("Class C is-a type-is D"), Err(OoError::Syntax(_))));
    }

    #[test]
    fn standalone_types_check_names() {
        let s = parse_oo(FIG7).unwrap();
        assert!(parse_type("Set-of Student", &s).is_ok());
        assert!(matches!(parse_type("Set-of Nobody", &s), Err(OoError::Unknown { .. })));
        assert!(matches!(parse_type("Record age: Student End", &s), Err(OoError::Unknown { .. })));
    }
}
