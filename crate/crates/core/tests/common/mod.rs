//! Generators and independent oracles shared by the integration suites.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};
use std::path::PathBuf;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use unikb::er::{
    alpha_er, beta_er_with_names, check_legal, is_relation_descriptive, parse_er, translate_phi, BasicValue,
    DatabaseState, ErElement, ErSchema,
};
use unikb::kb::{is_model, ConceptExpr, InclusionAssertion, Interpretation, KnowledgeBase, RoleExpr};
use unikb::oo::{check_legal_instance, parse_oo, OoInstance, OoSchema, Value};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn figure(name: &str) -> String {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../figures").join(name);
    std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

pub fn fig4() -> ErSchema {
    parse_er(&figure("fig4.ers")).unwrap()
}

pub fn fig7() -> OoSchema {
    parse_oo(&figure("fig7.oos")).unwrap()
}

// ---------------------------------------------------------------- random knowledge bases

pub fn names(prefix: &str, n: usize) -> Vec<String> {
    (0..n).map(|k| format!("{prefix}{k}")).collect()
}

fn random_role(r: &mut impl Rng, roles: &[String]) -> RoleExpr {
    let name = roles.choose(r).unwrap().clone();
    RoleExpr { name, inverted: r.gen_bool(0.4) }
}

/// A concept of nesting depth at most `depth` over the given symbols. Roles may be empty.
pub fn random_concept(r: &mut impl Rng, concepts: &[String], roles: &[String], depth: usize) -> ConceptExpr {
    let mut kinds = vec![0, 1, 2, 3, 4];
    if !roles.is_empty() {
        kinds.extend([5, 6]);
    }
    if depth > 1 {
        kinds.extend([8, 9]);
        if !roles.is_empty() {
            kinds.push(7);
        }
    }
    match *kinds.choose(r).unwrap() {
        0 => ConceptExpr::Top,
        1 => ConceptExpr::Bottom,
        2 | 3 => ConceptExpr::atom(concepts.choose(r).unwrap()),
        4 => ConceptExpr::not(concepts.choose(r).unwrap()),
        5 => ConceptExpr::AtLeast(r.gen_range(1..=2), random_role(r, roles)),
        6 => ConceptExpr::AtMost(r.gen_range(0..=2), random_role(r, roles)),
        7 => ConceptExpr::forall(random_role(r, roles), random_concept(r, concepts, roles, depth - 1)),
        8 => ConceptExpr::And((0..2).map(|_| random_concept(r, concepts, roles, depth - 1)).collect()),
        _ => ConceptExpr::Or((0..2).map(|_| random_concept(r, concepts, roles, depth - 1)).collect()),
    }
}

pub fn random_kb(r: &mut impl Rng, n_concepts: usize, n_roles: usize, max_assertions: usize, depth: usize) -> KnowledgeBase {
    let concepts = names("A", n_concepts);
    let roles = names("p", n_roles);
    let count = r.gen_range(0..=max_assertions);
    let assertions = (0..count)
        .map(|_| InclusionAssertion::new(concepts.choose(r).unwrap(), random_concept(r, &concepts, &roles, depth)))
        .collect();
    KnowledgeBase::new(concepts, roles, assertions).unwrap()
}

/// Knowledge bases built from the shapes the cardinality analyzer looks for, with some noise.
pub fn random_cardinality_kb(r: &mut impl Rng) -> KnowledgeBase {
    let concepts = names("A", r.gen_range(2..=3));
    let roles = names("p", r.gen_range(1..=2));
    let mut assertions = Vec::new();
    for _ in 0..r.gen_range(1..=4) {
        let a = concepts.choose(r).unwrap();
        let b = concepts.choose(r).unwrap();
        let role = random_role(r, &roles);
        let rhs = match r.gen_range(0..6) {
            0 => ConceptExpr::atom(b),
            1 => ConceptExpr::And(vec![
                ConceptExpr::AtLeast(r.gen_range(1..=2), role.clone()),
                ConceptExpr::forall(role, ConceptExpr::atom(b)),
            ]),
            2 => ConceptExpr::And(vec![
                ConceptExpr::AtMost(r.gen_range(1..=2), role.clone()),
                ConceptExpr::forall(role, ConceptExpr::atom(b)),
            ]),
            3 => ConceptExpr::AtMost(r.gen_range(0..=2), role),
            4 => {
                // a participation pair: every A has m r-fillers in B, every B at most n r-predecessors
                assertions.push(InclusionAssertion::new(b, ConceptExpr::AtMost(r.gen_range(1..=2), role.inverse())));
                ConceptExpr::And(vec![
                    ConceptExpr::AtLeast(r.gen_range(1..=2), role.clone()),
                    ConceptExpr::forall(role, ConceptExpr::atom(b)),
                ])
            }
            _ => random_concept(r, &concepts, &roles, 2),
        };
        assertions.push(InclusionAssertion::new(a, rhs));
    }
    KnowledgeBase::new(concepts, roles, assertions).unwrap()
}

pub fn random_interpretation(r: &mut impl Rng, kb: &KnowledgeBase, size: usize) -> Interpretation {
    let mut i = Interpretation::for_kb(kb, size);
    for c in kb.concepts() {
        for d in 0..size {
            if r.gen_bool(0.5) {
                i.insert_concept(c, d);
            }
        }
    }
    let density = 1.0 / (size.max(1) as f64);
    for p in kb.roles() {
        for d in 0..size {
            for e in 0..size {
                if r.gen_bool(density) {
                    i.insert_role(p, d, e);
                }
            }
        }
    }
    i
}

// ---------------------------------------------------------------- independent semantics

/// A bare interpretation for the oracle: extensions as bit vectors.
pub struct Raw {
    pub n: usize,
    pub concepts: BTreeMap<String, Vec<bool>>,
    pub roles: BTreeMap<String, Vec<Vec<bool>>>,
}

impl Raw {
    fn successors(&self, role: &RoleExpr, d: usize) -> Vec<usize> {
        let m = &self.roles[&role.name];
        (0..self.n).filter(|&e| if role.inverted { m[e][d] } else { m[d][e] }).collect()
    }

    /// Membership of `d` in `c`, read directly off the table of set-theoretic semantics.
    pub fn holds(&self, c: &ConceptExpr, d: usize) -> bool {
        match c {
            ConceptExpr::Top => true,
            ConceptExpr::Bottom => false,
            ConceptExpr::Atomic(a) => self.concepts[a][d],
            ConceptExpr::NegAtomic(a) => !self.concepts[a][d],
            ConceptExpr::And(cs) => cs.iter().all(|c| self.holds(c, d)),
            ConceptExpr::Or(cs) => cs.iter().any(|c| self.holds(c, d)),
            ConceptExpr::Forall(r, c) => self.successors(r, d).into_iter().all(|e| self.holds(c, e)),
            ConceptExpr::AtLeast(k, r) => self.successors(r, d).len() >= *k as usize,
            ConceptExpr::AtMost(k, r) => self.successors(r, d).len() <= *k as usize,
        }
    }

    pub fn is_model(&self, kb: &KnowledgeBase) -> bool {
        kb.assertions().iter().all(|a| (0..self.n).all(|d| !self.concepts[&a.lhs][d] || self.holds(&a.rhs, d)))
    }

    pub fn from_interpretation(i: &Interpretation, kb: &KnowledgeBase) -> Raw {
        let n = i.size();
        let concepts = kb
            .concepts()
            .iter()
            .map(|c| (c.clone(), (0..n).map(|d| i.members(c).contains(&d)).collect()))
            .collect();
        let roles = kb
            .roles()
            .iter()
            .map(|p| {
                let ext = i.role(p).cloned().unwrap_or_default();
                (p.clone(), (0..n).map(|d| (0..n).map(|e| ext.contains(&(d, e))).collect()).collect())
            })
            .collect();
        Raw { n, concepts, roles }
    }
}

/// Every interpretation of the signature of `kb` over a domain of `n` individuals.
pub fn all_interpretations(kb: &KnowledgeBase, n: usize) -> impl Iterator<Item = Raw> + '_ {
    let cs: Vec<String> = kb.concepts().iter().cloned().collect();
    let ps: Vec<String> = kb.roles().iter().cloned().collect();
    let bits = cs.len() * n + ps.len() * n * n;
    assert!(bits <= 20, "enumeration too large");
    (0u32..(1 << bits)).map(move |mask| {
        let bit = |k: usize| mask & (1 << k) != 0;
        let mut k = 0;
        let mut concepts = BTreeMap::new();
        for c in &cs {
            concepts.insert(c.clone(), (0..n).map(|d| bit(k + d)).collect());
            k += n;
        }
        let mut roles = BTreeMap::new();
        for p in &ps {
            let m: Vec<Vec<bool>> = (0..n).map(|d| (0..n).map(|e| bit(k + d * n + e)).collect()).collect();
            roles.insert(p.clone(), m);
            k += n * n;
        }
        Raw { n, concepts, roles }
    })
}

/// Smallest size in `1..=max` with a model of `kb` in which `goal` is nonempty.
pub fn brute_force_model(kb: &KnowledgeBase, goal: &ConceptExpr, max: usize) -> Option<usize> {
    (1..=max).find(|&n| all_interpretations(kb, n).any(|i| i.is_model(kb) && (0..n).any(|d| i.holds(goal, d))))
}

// ---------------------------------------------------------------- ER states

fn value(k: u64) -> BasicValue {
    BasicValue::new("String", k)
}

/// A random legal state of the university ER schema in `fig4.ers`.
///
/// Courses `c*`, students `s*`, teachers `t*`; every student takes 4 to 6 distinct courses,
/// every course gets at least 2 students and exactly one teacher.
pub fn random_fig4_state(r: &mut impl Rng) -> DatabaseState {
    let s = fig4();
    loop {
        let n_courses = r.gen_range(4..=7);
        let n_students = r.gen_range(1..=7);
        let n_teachers = r.gen_range(1..=3);
        let courses = names("c", n_courses);
        let students = names("s", n_students);
        let teachers = names("t", n_teachers);

        let mut enrolled: BTreeSet<(usize, usize)> = BTreeSet::new();
        for st in 0..n_students {
            let k = r.gen_range(4..=6.min(n_courses));
            let mut cs: Vec<usize> = (0..n_courses).collect();
            cs.shuffle(r);
            cs.into_iter().take(k).for_each(|c| {
                enrolled.insert((c, st));
            });
        }
        let load = |enrolled: &BTreeSet<(usize, usize)>, st: usize| enrolled.iter().filter(|(_, s)| *s == st).count();
        for c in 0..n_courses {
            while enrolled.iter().filter(|(c2, _)| *c2 == c).count() < 2 {
                let free: Vec<usize> =
                    (0..n_students).filter(|&st| !enrolled.contains(&(c, st)) && load(&enrolled, st) < 6).collect();
                let Some(&st) = free.choose(r) else { break };
                enrolled.insert((c, st));
            }
        }

        let mut b = DatabaseState::default();
        b.domain.extend(courses.iter().chain(&students).chain(&teachers).cloned());
        b.entities.insert("Course".into(), courses.iter().cloned().collect());
        b.entities.insert("AdvCourse".into(), courses.iter().filter(|_| r.gen_bool(0.3)).cloned().collect());
        b.entities.insert("Student".into(), students.iter().cloned().collect());
        b.entities.insert("Teacher".into(), teachers.iter().cloned().collect());
        let grads: BTreeSet<String> = students.iter().filter(|_| r.gen_bool(0.4)).cloned().collect();
        let degrees = grads.iter().map(|g| (g.clone(), value(r.gen_range(0..3)))).collect();
        b.attrs.insert("degree".into(), degrees);
        b.entities.insert("GradStudent".into(), grads);
        b.rels.insert(
            "TEACHING".into(),
            courses
                .iter()
                .map(|c| BTreeMap::from([("Tof".into(), c.clone()), ("Tby".into(), teachers.choose(r).unwrap().clone())]))
                .collect(),
        );
        b.rels.insert(
            "ENROLLING".into(),
            enrolled
                .iter()
                .map(|&(c, st)| BTreeMap::from([("Ein".into(), courses[c].clone()), ("Eof".into(), students[st].clone())]))
                .collect(),
        );
        if check_legal(&s, &b).unwrap().holds() {
            return b;
        }
    }
}

/// Adds `copies` individuals that duplicate existing ENROLLING tuple individuals of a model of
/// the Figure 4 translation, keeping every cardinality bound satisfied.
pub fn add_enrolling_conflicts(r: &mut impl Rng, i: &Interpretation, copies: usize) -> Option<Interpretation> {
    let mut out = i.clone();
    for _ in 0..copies {
        let count = |role: &str, target: usize, out: &Interpretation| {
            out.role(role).unwrap().iter().filter(|&&(_, e)| e == target).count()
        };
        let candidates: Vec<usize> = out
            .members("ENROLLING")
            .into_iter()
            .filter(|&t| {
                let c = out.successors(&RoleExpr::atomic("Ein"), t)[0];
                let st = out.successors(&RoleExpr::atomic("Eof"), t)[0];
                let cap = if out.members("AdvCourse").contains(&c) { 20 } else { 30 };
                count("Ein", c, &out) < cap && count("Eof", st, &out) < 6
            })
            .collect();
        let &t = candidates.choose(r)?;
        let c = out.successors(&RoleExpr::atomic("Ein"), t)[0];
        let st = out.successors(&RoleExpr::atomic("Eof"), t)[0];
        let x = out.grow(1);
        out.insert_concept("ENROLLING", x);
        out.insert_role("Ein", x, c);
        out.insert_role("Eof", x, st);
    }
    Some(out)
}

/// `β(α(B))` with the original individual names, compared with `B`.
pub fn round_trip_preserves(s: &ErSchema, b: &DatabaseState) -> Result<(), String> {
    let emb = alpha_er(s, b).map_err(|e| e.to_string())?;
    if !is_model(&translate_phi(s), &emb.interpretation).unwrap().holds() {
        return Err("α(B) is not a model".into());
    }
    if !is_relation_descriptive(s, &emb.interpretation).is_empty() {
        return Err("α(B) has conflicts".into());
    }
    let names: Vec<String> = emb
        .elements
        .iter()
        .enumerate()
        .map(|(k, e)| match e {
            ErElement::Individual(x) => x.clone(),
            _ => format!("x{k}"),
        })
        .collect();
    let back = beta_er_with_names(s, &emb.interpretation, &names).map_err(|e| e.to_string())?.state;
    for e in s.entities().keys() {
        if b.entity(e) != back.entity(e) {
            return Err(format!("entity {e} changed"));
        }
    }
    for a in s.attributes() {
        if b.attr(&a).len() != back.attr(&a).len() {
            return Err(format!("attribute {a} changed size"));
        }
    }
    for r in s.relationships().keys() {
        if b.rel(r).len() != back.rel(r).len() {
            return Err(format!("relationship {r} changed size"));
        }
    }
    Ok(())
}

// ---------------------------------------------------------------- OO instances

fn oid(o: &str) -> Value {
    Value::Oid(o.into())
}

/// A random legal instance of the schema in `fig7.oos`.
///
/// Teachers are professors whose value is some professor or graduate student; courses enroll
/// any subset of the students.
pub fn random_fig7_instance(r: &mut impl Rng) -> OoInstance {
    let s = fig7();
    let mut j = OoInstance::default();
    let add = |j: &mut OoInstance, o: &str, classes: &[&str], v: Value| {
        j.oids.insert(o.into());
        for c in classes {
            j.pi.entry(c.to_string()).or_default().insert(o.into());
        }
        j.rho.insert(o.into(), v);
    };
    let strings = names("str", r.gen_range(1..=2));
    for o in &strings {
        add(&mut j, o, &["String"], Value::Set(BTreeSet::new()));
    }
    let students = names("s", r.gen_range(0..=4));
    let mut grads = Vec::new();
    for o in &students {
        if r.gen_bool(0.5) {
            let mut rec = BTreeMap::from([("degree".to_string(), oid(strings.choose(r).unwrap()))]);
            if r.gen_bool(0.3) {
                // open records may carry extra fields
                rec.insert("enrolls".into(), Value::Set(BTreeSet::new()));
            }
            add(&mut j, o, &["Student", "GradStudent"], Value::Rec(rec));
            grads.push(o.clone());
        } else {
            add(&mut j, o, &["Student"], Value::Set(BTreeSet::from([oid(o)])));
        }
    }
    let profs = names("p", r.gen_range(0..=3));
    let teachers: Vec<String> = profs.iter().filter(|_| r.gen_bool(0.6)).cloned().collect();
    for o in &profs {
        if teachers.contains(o) {
            let pool = if grads.is_empty() || r.gen_bool(0.5) { &profs } else { &grads };
            add(&mut j, o, &["Professor", "Teacher"], oid(pool.choose(r).unwrap()));
        } else {
            add(&mut j, o, &["Professor"], Value::Rec(BTreeMap::new()));
        }
    }
    if !teachers.is_empty() {
        for (k, o) in names("c", r.gen_range(0..=3)).iter().enumerate() {
            let pupils: BTreeSet<Value> = students.iter().filter(|_| r.gen_bool(0.5)).map(|s| oid(s)).collect();
            let rec = BTreeMap::from([
                ("enrolls".to_string(), Value::Set(pupils)),
                ("taughtby".to_string(), oid(&teachers[k % teachers.len()])),
            ]);
            add(&mut j, o, &["Course"], Value::Rec(rec));
        }
    }
    assert!(check_legal_instance(&s, &j).unwrap().holds(), "generator produced an illegal instance: {j:?}");
    j
}
