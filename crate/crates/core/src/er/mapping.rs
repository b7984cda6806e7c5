//! Moving between database states and interpretations of the translated schema.

use std::collections::{BTreeMap, BTreeSet};

use super::state::{BasicValue, DatabaseState, LabeledTuple};
use super::{translate_phi, ErError, ErSchema};
use crate::kb::{evaluate_concept, is_model, ConceptExpr, Interpretation, RoleExpr};

/// What an individual of an embedded state stands for.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum ErElement {
    Individual(String),
    Value(BasicValue),
    Tuple { relationship: String, tuple: LabeledTuple },
}

/// `α(B)` together with the meaning of each individual.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ErEmbedding {
    pub interpretation: Interpretation,
    pub elements: Vec<ErElement>,
}

/// Builds the interpretation of `φ(S)` corresponding to a database state.
///
/// Individuals come first (sorted), then the active basic values, then one individual per
/// relationship tuple.
pub fn alpha_er(s: &ErSchema, b: &DatabaseState) -> Result<ErEmbedding, ErError> {
    b.validate(s)?;
    let mut elements: Vec<ErElement> = b.domain.iter().cloned().map(ErElement::Individual).collect();
    let ind: BTreeMap<&String, usize> = b.domain.iter().enumerate().map(|(k, x)| (x, k)).collect();
    let values = b.active_values();
    let val: BTreeMap<&BasicValue, usize> = values.iter().enumerate().map(|(k, v)| (v, elements.len() + k)).collect();
    elements.extend(values.iter().cloned().map(ErElement::Value));
    let tuples_start = elements.len();
    for (r, ts) in &b.rels {
        for t in ts {
            elements.push(ErElement::Tuple { relationship: r.clone(), tuple: t.clone() });
        }
    }

    let kb = translate_phi(s);
    let mut i = Interpretation::for_kb(&kb, elements.len());
    for (e, xs) in &b.entities {
        xs.iter().for_each(|x| i.insert_concept(e, ind[x]));
    }
    for (k, v) in values.iter().enumerate() {
        i.insert_concept(&v.domain, tuples_start - values.len() + k);
    }
    for (a, pairs) in &b.attrs {
        pairs.iter().for_each(|(x, v)| i.insert_role(a, ind[x], val[v]));
    }
    for (k, e) in elements.iter().enumerate().skip(tuples_start) {
        let ErElement::Tuple { relationship, tuple } = e else { unreachable!() };
        i.insert_concept(relationship, k);
        tuple.iter().for_each(|(u, x)| i.insert_role(u, k, ind[x]));
    }
    Ok(ErEmbedding { interpretation: i, elements })
}

/// Individuals of one relationship that agree on every role filler.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConflictSet {
    pub relationship: String,
    pub members: Vec<usize>,
}

fn profile(rel_roles: &[(String, String)], i: &Interpretation, d: usize) -> Vec<Vec<usize>> {
    rel_roles.iter().map(|(u, _)| i.successors(&RoleExpr::atomic(u), d)).collect()
}

/// Conflict sets: groups of two or more instances of a relationship with identical fillers for
/// all its roles. The interpretation is relation descriptive when there are none.
pub fn is_relation_descriptive(s: &ErSchema, i: &Interpretation) -> Vec<ConflictSet> {
    let mut out = Vec::new();
    for r in s.relationships.values() {
        let mut groups: BTreeMap<Vec<Vec<usize>>, Vec<usize>> = BTreeMap::new();
        for d in i.members(&r.name) {
            groups.entry(profile(&r.roles, i, d)).or_default().push(d);
        }
        for (_, members) in groups {
            if members.len() > 1 {
                out.push(ConflictSet { relationship: r.name.clone(), members });
            }
        }
    }
    out
}

/// Largest interpretation the repair will build.
const MAX_REPAIRED_SIZE: usize = 1 << 20;

/// Turns a finite model of `φ(S)` with `witness` nonempty into a relation-descriptive one with
/// the same property.
///
/// For each relationship with conflicts, `2^c` copies of the model are taken (`c` = number of
/// non-representative conflicting instances) and the last role's fillers of paired copies of
/// each conflicting instance are exchanged.
pub fn make_relation_descriptive(
    s: &ErSchema,
    i: &Interpretation,
    witness: &ConceptExpr,
) -> Result<Interpretation, ErError> {
    let kb = translate_phi(s);
    let report = is_model(&kb, i)?;
    if let Some(v) = report.violations.first() {
        return Err(ErError::NotAModel(format!("individual {} violates {}", v.witness, v.assertion)));
    }
    if evaluate_concept(witness, i)?.is_empty() {
        return Err(ErError::EmptyWitness);
    }

    let mut cur = i.clone();
    for r in s.relationships.values() {
        let conflicts: Vec<usize> = is_relation_descriptive(s, &cur)
            .into_iter()
            .filter(|c| c.relationship == r.name)
            .flat_map(|c| c.members.into_iter().skip(1))
            .collect();
        if conflicts.is_empty() {
            continue;
        }
        if r.roles.len() == 1 {
            return Err(ErError::UnaryConflict(r.name.clone()));
        }
        let n = cur.size();
        let c = conflicts.len();
        if c >= usize::BITS as usize || n.checked_mul(1 << c).is_none_or(|total| total > MAX_REPAIRED_SIZE) {
            return Err(ErError::BlowUp { relationship: r.name.clone(), conflicts: c, size: n });
        }
        let copies = 1usize << c;
        let mut next = Interpretation::new(n * copies);
        for (name, ext) in cur.concepts() {
            next.ensure_concept(name);
            for z in 0..copies {
                ext.iter().for_each(|&d| next.insert_concept(name, z * n + d));
            }
        }
        let last = &r.roles.last().expect("relationships have roles").0;
        for (name, ext) in cur.roles() {
            next.ensure_role(name);
            if name == last {
                continue;
            }
            for z in 0..copies {
                ext.iter().for_each(|&(d, e)| next.insert_role(name, z * n + d, z * n + e));
            }
        }
        // last role: copy, then swap fillers between copies z and z without bit j
        let mut filler: BTreeMap<(usize, usize), usize> = BTreeMap::new();
        let edges = cur.role(last).cloned().unwrap_or_default();
        for z in 0..copies {
            for &(d, e) in &edges {
                filler.insert((z, d), z * n + e);
            }
        }
        for (j, &d) in conflicts.iter().enumerate() {
            for z in (0..copies).filter(|z| z & (1 << j) != 0) {
                let z2 = z & !(1 << j);
                let a = filler[&(z, d)];
                let b = filler[&(z2, d)];
                filler.insert((z, d), b);
                filler.insert((z2, d), a);
            }
        }
        for ((z, d), e) in filler {
            next.insert_role(last, z * n + d, e);
        }
        cur = next;
    }

    debug_assert!(is_model(&kb, &cur)?.holds());
    debug_assert!(is_relation_descriptive(s, &cur).is_empty());
    Ok(cur)
}

/// A database state read off an interpretation, with notes on anything that had to be guessed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BetaResult {
    pub state: DatabaseState,
    pub warnings: Vec<String>,
}

/// `β(I)` with individuals named `d0`, `d1`, ...
pub fn beta_er(s: &ErSchema, i: &Interpretation) -> Result<BetaResult, ErError> {
    let names: Vec<String> = (0..i.size()).map(|d| format!("d{d}")).collect();
    beta_er_with_names(s, i, &names)
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Kind<'a> {
    Individual,
    Value(&'a str),
    Tuple(&'a str),
}

/// `β(I)` naming individual `d` by `names[d]`. The basic value standing for `d` in domain `D`
/// is `D#d`.
///
/// On models of `φ(S)` the result is determined up to the naming. Elsewhere each individual is
/// classified by the first of entity, relationship, domain it belongs to, multiple fillers
/// resolve to the least index, and every such choice is reported as a warning.
pub fn beta_er_with_names(s: &ErSchema, i: &Interpretation, names: &[String]) -> Result<BetaResult, ErError> {
    assert_eq!(names.len(), i.size(), "one name per individual");
    let kb = translate_phi(s);
    i.covers(&kb)?;
    let mut warnings = Vec::new();
    if !is_model(&kb, i)?.holds() {
        warnings.push("the interpretation is not a model of the translated schema".to_string());
    }
    let domains = s.domains();

    let kinds: Vec<Kind> = (0..i.size())
        .map(|d| {
            let in_entity = s.entities.keys().any(|e| i.members(e).contains(&d));
            let rel = s.relationships.keys().find(|r| i.members(r).contains(&d));
            let dom = domains.iter().find(|x| i.members(x).contains(&d));
            if in_entity && (rel.is_some() || dom.is_some()) {
                warnings.push(format!("individual {d} is both an entity instance and a tuple or value"));
            }
            match (in_entity, rel, dom) {
                (true, _, _) => Kind::Individual,
                (false, Some(r), _) => Kind::Tuple(r),
                (false, None, Some(x)) => Kind::Value(x),
                _ => Kind::Individual,
            }
        })
        .collect();

    let mut b = DatabaseState::default();
    for (d, k) in kinds.iter().enumerate() {
        if *k == Kind::Individual {
            b.domain.insert(names[d].clone());
        }
    }
    for e in s.entities.keys() {
        let members = i.members(e).into_iter().filter(|&d| kinds[d] == Kind::Individual).map(|d| names[d].clone());
        b.entities.insert(e.clone(), members.collect());
    }
    for a in s.attributes() {
        let mut pairs = BTreeSet::new();
        for &(d, e) in i.role(&a).into_iter().flatten() {
            match (&kinds[d], &kinds[e]) {
                (Kind::Individual, Kind::Value(x)) => {
                    pairs.insert((names[d].clone(), BasicValue::new(*x, e as u64)));
                }
                _ => warnings.push(format!("dropped `{a}` pair ({d}, {e}) that does not link an individual to a value")),
            }
        }
        b.attrs.insert(a, pairs);
    }
    for r in s.relationships.values() {
        let mut tuples = BTreeSet::new();
        for d in i.members(&r.name) {
            if kinds[d] != Kind::Tuple(&r.name) {
                continue;
            }
            let mut t = LabeledTuple::new();
            for (u, _) in &r.roles {
                let succ = i.successors(&RoleExpr::atomic(u), d);
                if succ.len() > 1 {
                    warnings.push(format!("{} instance {d} has {} `{u}` fillers; using the first", r.name, succ.len()));
                }
                match succ.first() {
                    Some(&e) if kinds[e] == Kind::Individual => {
                        t.insert(u.clone(), names[e].clone());
                    }
                    _ => {
                        warnings.push(format!("{} instance {d} has no individual `{u}` filler", r.name));
                        break;
                    }
                }
            }
            if t.len() == r.roles.len() && !tuples.insert(t) {
                warnings.push(format!("{} instance {d} duplicates another tuple", r.name));
            }
        }
        b.rels.insert(r.name.clone(), tuples);
    }
    Ok(BetaResult { state: b, warnings })
}
