use std::collections::BTreeSet;

use super::ErSchema;
use crate::kb::{ConceptExpr, InclusionAssertion, KnowledgeBase, RoleExpr};

/// The full translation φ, disjointness assertions included.
pub fn translate_phi(s: &ErSchema) -> KnowledgeBase {
    translate_phi_with(s, true)
}

/// φ, optionally without the pairwise disjointness of relationships and domains from
/// every other class symbol (the form usually shown to readers).
pub fn translate_phi_with(s: &ErSchema, disjointness: bool) -> KnowledgeBase {
    let mut out: Vec<InclusionAssertion> = Vec::new();
    let exactly_one = |p: &RoleExpr| vec![ConceptExpr::at_most(1, p.clone()), ConceptExpr::at_least(1, p.clone())];

    for e in s.entities.values() {
        for sup in &e.isa {
            out.push(InclusionAssertion::new(&e.name, ConceptExpr::atom(sup)));
        }
    }
    for e in s.entities.values() {
        if e.attrs.is_empty() {
            continue;
        }
        let mut parts: Vec<ConceptExpr> =
            e.attrs.iter().map(|(a, d)| ConceptExpr::forall(RoleExpr::atomic(a), ConceptExpr::atom(d))).collect();
        for (a, _) in &e.attrs {
            parts.extend(exactly_one(&RoleExpr::atomic(a)));
        }
        out.push(InclusionAssertion::new(&e.name, ConceptExpr::And(parts)));
    }
    for r in s.relationships.values() {
        let mut parts = Vec::new();
        for (u, e) in &r.roles {
            let u = RoleExpr::atomic(u);
            parts.push(ConceptExpr::forall(u.clone(), ConceptExpr::atom(e)));
            parts.extend(exactly_one(&u));
        }
        out.push(InclusionAssertion::new(&r.name, ConceptExpr::And(parts)));
    }
    for r in s.relationships.values() {
        for (u, e) in &r.roles {
            out.push(InclusionAssertion::new(e, ConceptExpr::forall(RoleExpr::inverse_of(u), ConceptExpr::atom(&r.name))));
        }
    }
    for r in s.relationships.values() {
        for (u, primary) in &r.roles {
            for e in s.sub_entities(primary) {
                let (min, max) = s.card(&e, &r.name, u);
                if min != 0 {
                    out.push(InclusionAssertion::new(&e, ConceptExpr::at_least(min, RoleExpr::inverse_of(u))));
                }
                if let Some(n) = max {
                    out.push(InclusionAssertion::new(&e, ConceptExpr::at_most(n, RoleExpr::inverse_of(u))));
                }
            }
        }
    }

    let domains = s.domains();
    let entities: BTreeSet<String> = s.entities.keys().cloned().collect();
    let rels: BTreeSet<String> = s.relationships.keys().cloned().collect();
    if disjointness {
        let x1: BTreeSet<&String> = rels.iter().chain(&domains).collect();
        let x2: BTreeSet<&String> = entities.iter().chain(&rels).chain(&domains).collect();
        for a in &x1 {
            for b in &x2 {
                if a != b {
                    out.push(InclusionAssertion::new(*a, ConceptExpr::not(*b)));
                }
            }
        }
    }

    let concepts: BTreeSet<String> = entities.into_iter().chain(rels).chain(domains).collect();
    let roles: BTreeSet<String> = s.attributes().into_iter().chain(s.roles()).collect();
    KnowledgeBase::new(concepts, roles, out).expect("translation of a validated schema is well-formed")
}
