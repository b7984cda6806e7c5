use std::collections::BTreeSet;

use super::{OoSchema, TypeExpr, ABSTRACT_CLASS, MEMBER, REC_TYPE, SET_TYPE, VALUE};
use crate::kb::{ConceptExpr, InclusionAssertion, KnowledgeBase, RoleExpr};

/// ψ(T).
pub fn psi_type(t: &TypeExpr) -> ConceptExpr {
    match t {
        TypeExpr::Class(c) => ConceptExpr::atom(c),
        TypeExpr::Union(ts) => ConceptExpr::Or(ts.iter().map(psi_type).collect()),
        TypeExpr::SetOf(t) => ConceptExpr::And(vec![
            ConceptExpr::atom(SET_TYPE),
            ConceptExpr::forall(RoleExpr::atomic(MEMBER), psi_type(t)),
        ]),
        TypeExpr::Record(fs) => {
            let mut parts = vec![ConceptExpr::atom(REC_TYPE)];
            for (a, t) in fs {
                let a = RoleExpr::atomic(a);
                parts.push(ConceptExpr::forall(a.clone(), psi_type(t)));
                parts.push(ConceptExpr::exactly(1, a));
            }
            ConceptExpr::And(parts)
        }
    }
}

fn fixed_assertions() -> Vec<InclusionAssertion> {
    let value = RoleExpr::atomic(VALUE);
    let no_value = ConceptExpr::forall(value.clone(), ConceptExpr::Bottom);
    vec![
        InclusionAssertion::new(ABSTRACT_CLASS, ConceptExpr::exactly(1, value)),
        InclusionAssertion::new(REC_TYPE, no_value.clone()),
        InclusionAssertion::new(SET_TYPE, ConceptExpr::And(vec![no_value, ConceptExpr::not(REC_TYPE)])),
    ]
}

fn signature(s: &OoSchema) -> (BTreeSet<String>, BTreeSet<String>) {
    let concepts = [ABSTRACT_CLASS, REC_TYPE, SET_TYPE].into_iter().map(String::from).chain(s.classes().iter().cloned());
    let roles = [VALUE, MEMBER].into_iter().map(String::from).chain(s.attributes().iter().cloned());
    (concepts.collect(), roles.collect())
}

/// ψ(S): the three fixed assertions, then one per declaration. Opaque classes get none.
pub fn translate_psi(s: &OoSchema) -> KnowledgeBase {
    let mut out = fixed_assertions();
    for d in s.decls() {
        let mut parts = vec![ConceptExpr::atom(ABSTRACT_CLASS)];
        parts.extend(d.supers.iter().map(ConceptExpr::atom));
        parts.push(ConceptExpr::forall(RoleExpr::atomic(VALUE), psi_type(&d.ty)));
        out.push(InclusionAssertion::new(&d.name, ConceptExpr::And(parts)));
    }
    let (concepts, roles) = signature(s);
    KnowledgeBase::new(concepts, roles, out).expect("translation of a parsed schema is well-formed")
}

/// ψ(S) plus `C ⊑ AbstractClass` for each opaque class, so that every class instance of a
/// model is an object identifier, as in any database instance.
pub fn reasoning_kb(s: &OoSchema) -> KnowledgeBase {
    let extra = s.opaque_classes().into_iter().map(|c| InclusionAssertion::new(c, ConceptExpr::atom(ABSTRACT_CLASS)));
    translate_psi(s).extended([], extra).expect("same signature")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kb::parse_kb;
    use crate::oo::parse_oo;
    use crate::oo::tests::{EX56, FIG7};

    #[test]
    fn example_translation() {
        let kb = translate_psi(&parse_oo(EX56).unwrap());
        let expected = parse_kb(
            "concept AbstractClass, RecType, SetType, C; role value, member, a1, a2, a3;
             AbstractClass <= EXACTLY 1 value;
             RecType <= ALL value.BOTTOM;
             SetType <= ALL value.BOTTOM AND NOT RecType;
             C <= AbstractClass AND ALL value.(RecType AND EXACTLY 1 a1 AND ALL a1.(RecType AND EXACTLY 1 a2
                  AND ALL a2.(RecType AND EXACTLY 1 a3 AND ALL a3.C)));",
        )
        .unwrap();
        assert!(kb.equivalent_to(&expected), "{kb}");
    }

    #[test]
    fn only_opaque_class() {
        let s = parse_oo("Class C type-is D").unwrap();
        let kb = translate_psi(&s);
        assert_eq!(kb.assertions().len(), 4);
        let s = crate::oo::OoSchema::new(vec![]).unwrap();
        assert_eq!(translate_psi(&s).assertions().len(), 3);
    }

    #[test]
    fn structural_restrictions() {
        let kb = reasoning_kb(&parse_oo(FIG7).unwrap());
        for a in kb.assertions() {
            assert!(a.rhs.role_uses().iter().all(|r| !r.inverted));
            a.rhs.walk(&mut |c| match c {
                ConceptExpr::AtLeast(n, _) | ConceptExpr::AtMost(n, _) => assert_eq!(*n, 1),
                _ => {}
            });
        }
    }
}
