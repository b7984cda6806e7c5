//! Propositional encoding of "a model of K of size n whose individual 0 satisfies the goal".

use std::collections::{BTreeMap, HashMap};

use super::solver::{Lit, Solver, FALSE, TRUE};
use crate::kb::{ConceptExpr, Interpretation, KnowledgeBase, RoleExpr};

/// Search goals: concept expressions closed under full negation.
///
/// The extra `Exists` form is `∃R.G`, needed for the complement of `∀R.C`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum Goal {
    Concept(ConceptExpr),
    And(Vec<Goal>),
    Or(Vec<Goal>),
    Exists(RoleExpr, Box<Goal>),
}

impl Goal {
    /// The complement of `c`.
    pub fn negation(c: &ConceptExpr) -> Goal {
        if let Some(n) = c.negate() {
            return Goal::Concept(n);
        }
        match c {
            ConceptExpr::And(cs) => Goal::Or(cs.iter().map(Goal::negation).collect()),
            ConceptExpr::Or(cs) => Goal::And(cs.iter().map(Goal::negation).collect()),
            ConceptExpr::Forall(r, body) => Goal::Exists(r.clone(), Box::new(Goal::negation(body))),
            _ => unreachable!("every other form has an expressible complement"),
        }
    }

    /// Membership vector over `i`.
    pub fn eval(&self, i: &Interpretation) -> Vec<bool> {
        match self {
            Goal::Concept(c) => crate::kb::Evaluator::new(i).eval_mask(c).expect("goal symbols were checked"),
            Goal::And(gs) => gs.iter().map(|g| g.eval(i)).fold(vec![true; i.size()], |a, b| {
                a.iter().zip(b).map(|(x, y)| *x && y).collect()
            }),
            Goal::Or(gs) => gs.iter().map(|g| g.eval(i)).fold(vec![false; i.size()], |a, b| {
                a.iter().zip(b).map(|(x, y)| *x || y).collect()
            }),
            Goal::Exists(r, g) => {
                let inner = g.eval(i);
                (0..i.size()).map(|d| i.successors(r, d).iter().any(|&e| inner[e])).collect()
            }
        }
    }
}

pub(crate) struct Encoding {
    pub solver: Solver,
    size: usize,
    concept_vars: BTreeMap<String, u32>,
    role_vars: BTreeMap<String, u32>,
    memo: HashMap<(ConceptExpr, usize), Lit>,
}

impl Encoding {
    pub fn new(kb: &KnowledgeBase, size: usize) -> Self {
        let mut solver = Solver::new();
        let mut concept_vars = BTreeMap::new();
        let mut role_vars = BTreeMap::new();
        for c in kb.concepts() {
            let base = solver.num_vars() as u32;
            for _ in 0..size {
                solver.new_var();
            }
            concept_vars.insert(c.clone(), base);
        }
        for r in kb.roles() {
            let base = solver.num_vars() as u32;
            for _ in 0..size * size {
                solver.new_var();
            }
            role_vars.insert(r.clone(), base);
        }
        let mut enc = Encoding { solver, size, concept_vars, role_vars, memo: HashMap::new() };
        for a in kb.assertions() {
            for d in 0..size {
                let g = enc.concept(&a.lhs, d);
                enc.imply(g, &a.rhs, d);
            }
        }
        enc
    }

    /// Requires the goal at individual 0.
    pub fn require(&mut self, goal: &Goal) {
        self.imply_goal(TRUE, goal, 0);
    }

    fn concept(&self, name: &str, d: usize) -> Lit {
        Lit::pos(self.concept_vars[name] + d as u32)
    }

    fn edge(&self, r: &RoleExpr, d: usize, e: usize) -> Lit {
        let (a, b) = if r.inverted { (e, d) } else { (d, e) };
        Lit::pos(self.role_vars[&r.name] + (a * self.size + b) as u32)
    }

    fn row(&self, r: &RoleExpr, d: usize) -> Vec<Lit> {
        (0..self.size).map(|e| self.edge(r, d, e)).collect()
    }

    /// A literal true only if `c` holds at `d`.
    fn lit(&mut self, c: &ConceptExpr, d: usize) -> Lit {
        match c {
            ConceptExpr::Top => TRUE,
            ConceptExpr::Bottom => FALSE,
            ConceptExpr::Atomic(a) => self.concept(a, d),
            ConceptExpr::NegAtomic(a) => !self.concept(a, d),
            _ => {
                if let Some(&l) = self.memo.get(&(c.clone(), d)) {
                    return l;
                }
                let l = Lit::pos(self.solver.new_var());
                self.memo.insert((c.clone(), d), l);
                self.imply(l, c, d);
                l
            }
        }
    }

    /// Adds constraints forcing `c` at `d` whenever `g` is true.
    fn imply(&mut self, g: Lit, c: &ConceptExpr, d: usize) {
        match c {
            ConceptExpr::Top => {}
            ConceptExpr::And(cs) => cs.iter().for_each(|c| self.imply(g, c, d)),
            ConceptExpr::Or(cs) => {
                let mut clause = vec![!g];
                for c in cs {
                    clause.push(self.lit(c, d));
                }
                self.solver.add_clause(&clause);
            }
            ConceptExpr::Forall(r, body) => {
                for e in 0..self.size {
                    let target = self.lit(body, e);
                    let edge = self.edge(r, d, e);
                    self.solver.add_clause(&[!g, !edge, target]);
                }
            }
            ConceptExpr::AtLeast(k, r) => {
                let row = self.row(r, d);
                self.solver.add_at_least(g, row, *k);
            }
            ConceptExpr::AtMost(k, r) => {
                let row = self.row(r, d);
                self.solver.add_at_most(g, row, *k);
            }
            ConceptExpr::Bottom | ConceptExpr::Atomic(_) | ConceptExpr::NegAtomic(_) => {
                let l = self.lit(c, d);
                self.solver.add_clause(&[!g, l]);
            }
        }
    }

    fn goal_lit(&mut self, goal: &Goal, d: usize) -> Lit {
        if let Goal::Concept(c) = goal {
            return self.lit(c, d);
        }
        let l = Lit::pos(self.solver.new_var());
        self.imply_goal(l, goal, d);
        l
    }

    fn imply_goal(&mut self, g: Lit, goal: &Goal, d: usize) {
        match goal {
            Goal::Concept(c) => self.imply(g, c, d),
            Goal::And(gs) => gs.iter().for_each(|x| self.imply_goal(g, x, d)),
            Goal::Or(gs) => {
                let mut clause = vec![!g];
                for x in gs {
                    clause.push(self.goal_lit(x, d));
                }
                self.solver.add_clause(&clause);
            }
            Goal::Exists(r, inner) => {
                let mut clause = vec![!g];
                for e in 0..self.size {
                    let y = Lit::pos(self.solver.new_var());
                    let edge = self.edge(r, d, e);
                    self.solver.add_clause(&[!y, edge]);
                    self.imply_goal(y, inner, e);
                    clause.push(y);
                }
                self.solver.add_clause(&clause);
            }
        }
    }

    pub fn decode(&self, kb: &KnowledgeBase, model: &[bool]) -> Interpretation {
        let mut i = Interpretation::for_kb(kb, self.size);
        for (c, &base) in &self.concept_vars {
            for d in 0..self.size {
                if model[(base as usize) + d] {
                    i.insert_concept(c, d);
                }
            }
        }
        for (r, &base) in &self.role_vars {
            for a in 0..self.size {
                for b in 0..self.size {
                    if model[base as usize + a * self.size + b] {
                        i.insert_role(r, a, b);
                    }
                }
            }
        }
        i
    }
}
