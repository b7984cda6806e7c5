//! Interpretations of ψ(S) as graphs: bad cycles, unfolding, and the instance mappings.

use std::collections::{BTreeMap, BTreeSet};

use petgraph::algo::tarjan_scc;
use petgraph::graphmap::DiGraphMap;

use super::instance::{OoInstance, Value};
use super::{translate_psi, OoError, OoSchema, ABSTRACT_CLASS, MEMBER, REC_TYPE, SET_TYPE, VALUE};
use crate::kb::{is_model, Interpretation, RoleExpr};

/// A strongly connected group of set/record individuals linked by non-`value` roles.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BadCycle {
    pub individuals: Vec<usize>,
    /// `(from, role, to)` edges inside the group.
    pub edges: Vec<(usize, String, usize)>,
}

/// Set and record individuals that are not object identifiers.
fn structural(i: &Interpretation) -> BTreeSet<usize> {
    let abs = i.members(ABSTRACT_CLASS);
    i.members(REC_TYPE).union(&i.members(SET_TYPE)).filter(|d| !abs.contains(d)).copied().collect()
}

fn structural_edges<'a>(i: &'a Interpretation, nodes: &'a BTreeSet<usize>) -> impl Iterator<Item = (usize, &'a str, usize)> {
    i.roles()
        .iter()
        .filter(|(r, _)| r.as_str() != VALUE)
        .flat_map(|(r, ext)| ext.iter().map(move |&(d, e)| (d, r.as_str(), e)))
        .filter(move |(d, _, e)| nodes.contains(d) && nodes.contains(e))
}

/// Bad cycles of `i`: cycles through set and record individuals only, avoiding `value`.
pub fn find_bad_cycles(i: &Interpretation) -> Vec<BadCycle> {
    let nodes = structural(i);
    let mut g: DiGraphMap<usize, ()> = DiGraphMap::new();
    nodes.iter().for_each(|&d| {
        g.add_node(d);
    });
    for (d, _, e) in structural_edges(i, &nodes) {
        g.add_edge(d, e, ());
    }
    let mut out: Vec<BadCycle> = tarjan_scc(&g)
        .into_iter()
        .filter(|scc| scc.len() > 1 || g.contains_edge(scc[0], scc[0]))
        .map(|mut scc| {
            scc.sort_unstable();
            let members: BTreeSet<usize> = scc.iter().copied().collect();
            let edges = structural_edges(i, &members).map(|(d, r, e)| (d, r.to_string(), e)).collect();
            BadCycle { individuals: scc, edges }
        })
        .collect();
    out.sort_by(|a, b| a.individuals.cmp(&b.individuals));
    out
}

/// Largest interpretation `unfold` will build.
const MAX_UNFOLDED_SIZE: usize = 1 << 20;

struct Unfolder<'a> {
    out: Interpretation,
    bad: BTreeSet<usize>,
    labels: Vec<Vec<&'a str>>,
    succ: Vec<Vec<(&'a str, usize)>>,
    m: usize,
}

impl Unfolder<'_> {
    /// Fresh copy of `e` at tree depth `depth`, with its subtree.
    fn expand(&mut self, e: usize, depth: usize) -> Result<usize, OoError> {
        if self.out.size() >= MAX_UNFOLDED_SIZE {
            return Err(OoError::BlowUp(MAX_UNFOLDED_SIZE));
        }
        let c = self.out.grow(1);
        for &name in &self.labels[e] {
            self.out.insert_concept(name, c);
        }
        self.link(e, c, depth)?;
        Ok(c)
    }

    /// Gives `to` the outgoing edges of `from`, expanding edges into bad nodes below `depth`.
    fn link(&mut self, from: usize, to: usize, depth: usize) -> Result<(), OoError> {
        for k in 0..self.succ[from].len() {
            let (r, f) = self.succ[from][k];
            if r != VALUE && self.bad.contains(&f) {
                if depth < self.m {
                    let child = self.expand(f, depth + 1)?;
                    self.out.insert_role(r, to, child);
                }
            } else {
                self.out.insert_role(r, to, f);
            }
        }
        Ok(())
    }
}

/// The m-unfolded version of `i`: every individual on a bad cycle becomes the root of a tree
/// of depth `m` made of fresh copies of the set and record individuals it reaches. Object
/// identifiers and everything off the bad cycles keep their indices; copies are appended.
pub fn unfold(s: &OoSchema, i: &Interpretation, m: usize) -> Result<Interpretation, OoError> {
    i.covers(&translate_psi(s))?;
    let bad: BTreeSet<usize> = find_bad_cycles(i).into_iter().flat_map(|c| c.individuals).collect();
    if bad.is_empty() {
        return Ok(i.clone());
    }
    let n = i.size();
    let mut labels: Vec<Vec<&str>> = vec![Vec::new(); n];
    for (c, ext) in i.concepts() {
        ext.iter().for_each(|&d| labels[d].push(c.as_str()));
    }
    let mut succ: Vec<Vec<(&str, usize)>> = vec![Vec::new(); n];
    for (r, ext) in i.roles() {
        ext.iter().for_each(|&(d, e)| succ[d].push((r.as_str(), e)));
    }

    let mut out = Interpretation::new(n);
    for (c, ext) in i.concepts() {
        out.ensure_concept(c);
        ext.iter().for_each(|&d| out.insert_concept(c, d));
    }
    for r in i.roles().keys() {
        out.ensure_role(r);
    }
    let mut u = Unfolder { out, bad, labels, succ, m };
    for d in 0..n {
        if u.bad.contains(&d) {
            u.link(d, d, 0)?;
        } else {
            for k in 0..u.succ[d].len() {
                let (r, e) = u.succ[d][k];
                u.out.insert_role(r, d, e);
            }
        }
    }
    Ok(u.out)
}

/// `α(J)` with the active value standing for each individual.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OoEmbedding {
    pub interpretation: Interpretation,
    pub values: Vec<Value>,
}

/// One individual per active value: object identifiers first, then the other values in order.
pub fn alpha_oo(s: &OoSchema, j: &OoInstance) -> Result<OoEmbedding, OoError> {
    j.validate(s)?;
    let mut values: Vec<Value> = j.oids.iter().cloned().map(Value::Oid).collect();
    values.extend(j.active_values().into_iter().filter(|v| !matches!(v, Value::Oid(_))));
    let index: BTreeMap<&Value, usize> = values.iter().enumerate().map(|(k, v)| (v, k)).collect();
    let oid_index = |o: &String| index[&Value::Oid(o.clone())];

    let mut i = Interpretation::for_kb(&translate_psi(s), values.len());
    for (c, members) in &j.pi {
        members.iter().for_each(|o| i.insert_concept(c, oid_index(o)));
    }
    for (d, v) in values.iter().enumerate() {
        match v {
            Value::Oid(_) => i.insert_concept(ABSTRACT_CLASS, d),
            Value::Rec(fs) => {
                i.insert_concept(REC_TYPE, d);
                fs.iter().for_each(|(a, w)| i.insert_role(a, d, index[w]));
            }
            Value::Set(vs) => {
                i.insert_concept(SET_TYPE, d);
                vs.iter().for_each(|w| i.insert_role(MEMBER, d, index[w]));
            }
        }
    }
    for (o, v) in &j.rho {
        i.insert_role(VALUE, oid_index(o), index[v]);
    }
    Ok(OoEmbedding { interpretation: i, values })
}

/// An instance read off an interpretation, with notes on every forced choice.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OoBeta {
    pub instance: OoInstance,
    pub warnings: Vec<String>,
}

/// `β(I)` with object identifiers named `o0`, `o1`, ... by individual index.
pub fn beta_oo(s: &OoSchema, i: &Interpretation) -> Result<OoBeta, OoError> {
    let names: Vec<String> = (0..i.size()).map(|d| format!("o{d}")).collect();
    beta_oo_with_names(s, i, &names)
}

/// `β(I)`: unfolds `i` at the schema depth, then folds set and record individuals bottom-up
/// into values. `names[d]` names the object identifier for `AbstractClass` individual `d`.
///
/// Individuals that are neither identifiers nor sets nor records fold to the empty set. Where
/// `i` is not a model, the least-indexed filler is used for `value` and attributes and class
/// members that are not identifiers are dropped; each such choice is reported.
pub fn beta_oo_with_names(s: &OoSchema, i: &Interpretation, names: &[String]) -> Result<OoBeta, OoError> {
    assert_eq!(names.len(), i.size(), "one name per individual");
    let mut warnings = Vec::new();
    if !is_model(&translate_psi(s), i)?.holds() {
        warnings.push("the interpretation is not a model of the translated schema".to_string());
    }
    let u = unfold(s, i, s.depth())?;
    let abs = u.members(ABSTRACT_CLASS);
    let rec = u.members(REC_TYPE);
    let set = u.members(SET_TYPE);

    let mut memo: Vec<Option<Value>> = vec![None; u.size()];
    fn fold(
        d: usize,
        u: &Interpretation,
        s: &OoSchema,
        sets: (&BTreeSet<usize>, &BTreeSet<usize>, &BTreeSet<usize>),
        names: &[String],
        memo: &mut Vec<Option<Value>>,
        warnings: &mut Vec<String>,
    ) -> Value {
        if let Some(v) = &memo[d] {
            return v.clone();
        }
        let (abs, rec, set) = sets;
        let v = if abs.contains(&d) {
            Value::Oid(names[d].clone())
        } else if rec.contains(&d) {
            let mut fields = BTreeMap::new();
            for a in s.attributes() {
                let succ = u.successors(&RoleExpr::atomic(a), d);
                if succ.len() > 1 {
                    warnings.push(format!("record individual {d} has {} `{a}` fillers; using the first", succ.len()));
                }
                if let Some(&e) = succ.first() {
                    fields.insert(a.clone(), fold(e, u, s, sets, names, memo, warnings));
                }
            }
            Value::Rec(fields)
        } else if set.contains(&d) {
            let succ = u.successors(&RoleExpr::atomic(MEMBER), d);
            Value::Set(succ.into_iter().map(|e| fold(e, u, s, sets, names, memo, warnings)).collect())
        } else {
            Value::Set(BTreeSet::new())
        };
        memo[d] = Some(v.clone());
        v
    }

    let mut j = OoInstance::default();
    for &d in &abs {
        j.oids.insert(names[d].clone());
        let succ = u.successors(&RoleExpr::atomic(VALUE), d);
        if succ.len() != 1 {
            warnings.push(format!("object individual {d} has {} values", succ.len()));
        }
        let v = match succ.first() {
            Some(&e) => fold(e, &u, s, (&abs, &rec, &set), names, &mut memo, &mut warnings),
            None => Value::Set(BTreeSet::new()),
        };
        j.rho.insert(names[d].clone(), v);
    }
    for c in s.classes() {
        let members = u.members(c);
        let (oids, others): (Vec<usize>, Vec<usize>) = members.into_iter().partition(|d| abs.contains(d));
        if !others.is_empty() {
            warnings.push(format!("dropped non-object members {others:?} of class `{c}`"));
        }
        j.pi.insert(c.clone(), oids.into_iter().map(|d| names[d].clone()).collect());
    }
    Ok(OoBeta { instance: j, warnings })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kb::evaluate_concept;
    use crate::oo::instance::tests::fig7_instance;
    use crate::oo::tests::{EX56, FIG7};
    use crate::oo::{check_legal_instance, parse_oo, psi_type};

    /// Domain o1, o2, v1..v5 as indices 0..7.
    pub fn figure9() -> (OoSchema, Interpretation) {
        let s = parse_oo(EX56).unwrap();
        let mut i = Interpretation::for_kb(&translate_psi(&s), 7);
        let (o1, o2, v1, v2, v3, v4, v5) = (0, 1, 2, 3, 4, 5, 6);
        for o in [o1, o2] {
            i.insert_concept("C", o);
            i.insert_concept(ABSTRACT_CLASS, o);
        }
        for v in [v1, v2, v3, v4, v5] {
            i.insert_concept(REC_TYPE, v);
        }
        i.insert_role(VALUE, o1, v1);
        i.insert_role(VALUE, o2, v3);
        i.insert_role("a1", v1, v2);
        i.insert_role("a1", v3, v4);
        i.insert_role("a2", v2, v1);
        i.insert_role("a2", v4, v5);
        i.insert_role("a3", v1, o2);
        i.insert_role("a3", v5, o2);
        (s, i)
    }

    #[test]
    fn figure9_is_a_model_with_one_bad_cycle() {
        let (s, i) = figure9();
        assert!(is_model(&translate_psi(&s), &i).unwrap().holds());
        let cycles = find_bad_cycles(&i);
        assert_eq!(cycles.len(), 1);
        assert_eq!(cycles[0].individuals, vec![2, 3]);
        assert_eq!(cycles[0].edges.len(), 2);
    }

    #[test]
    fn unfolding_figure9() {
        let (s, i) = figure9();
        let u = unfold(&s, &i, 3).unwrap();
        assert!(find_bad_cycles(&u).is_empty());
        assert_eq!(u.members(ABSTRACT_CLASS), i.members(ABSTRACT_CLASS));
        // both v1 and v2 root a chain of three copies
        assert_eq!(u.size(), 13);
        assert!(u.role("a3").unwrap().iter().all(|&(_, e)| e == 1));
        assert!(is_model(&translate_psi(&s), &u).unwrap().holds());
        let t = psi_type(&s.decls()[0].ty);
        assert!(evaluate_concept(&t, &u).unwrap().contains(&2));

        let u0 = unfold(&s, &i, 0).unwrap();
        assert_eq!(u0.size(), 7);
        assert!(find_bad_cycles(&u0).is_empty());
    }

    #[test]
    fn beta_of_figure9_is_legal() {
        let (s, i) = figure9();
        let b = beta_oo(&s, &i).unwrap();
        assert!(b.warnings.is_empty(), "{:?}", b.warnings);
        assert!(check_legal_instance(&s, &b.instance).unwrap().holds());
        // o1 and o2 of the figure are individuals 0 and 1
        assert_eq!(b.instance.rho["o0"].to_string(), "[a1: [a2: [a1: [], a3: o1]], a3: o1]");
        assert_eq!(b.instance.rho["o1"].to_string(), "[a1: [a2: [a3: o1]]]");
    }

    #[test]
    fn alpha_beta_round_trip() {
        let s = parse_oo(FIG7).unwrap();
        let j = fig7_instance();
        let emb = alpha_oo(&s, &j).unwrap();
        assert!(is_model(&translate_psi(&s), &emb.interpretation).unwrap().holds());
        assert!(find_bad_cycles(&emb.interpretation).is_empty());
        let names: Vec<String> = emb.values.iter().map(|v| v.to_string()).collect();
        let back = beta_oo_with_names(&s, &emb.interpretation, &names).unwrap();
        assert!(back.warnings.is_empty());
        assert_eq!(back.instance.oids, j.oids);
        assert_eq!(back.instance.rho, j.rho);
        for c in s.classes() {
            assert_eq!(back.instance.class(c), j.class(c));
        }
    }

    #[test]
    fn alpha_of_illegal_instance_is_not_a_model() {
        let s = parse_oo(FIG7).unwrap();
        let mut j = fig7_instance();
        j.rho.insert("s2".into(), Value::Rec(BTreeMap::new()));
        let emb = alpha_oo(&s, &j).unwrap();
        let report = is_model(&translate_psi(&s), &emb.interpretation).unwrap();
        assert!(report.violations.iter().any(|v| v.lhs == "GradStudent"));
        let set = emb.values.iter().position(|v| matches!(v, Value::Set(x) if x.len() == 2)).unwrap();
        assert_eq!(emb.interpretation.successors(&RoleExpr::atomic(MEMBER), set).len(), 2);
    }
}
