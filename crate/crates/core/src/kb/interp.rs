use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{ConceptExpr, KnowledgeBase, RoleExpr};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum InterpretationError {
    #[error("individual {index} of `{symbol}` is outside the domain of size {size}")]
    OutOfDomain { symbol: String, index: usize, size: usize },
    #[error("unknown {kind} `{name}`")]
    UnknownSymbol { kind: &'static str, name: String },
    #[error("signature mismatch: {0}")]
    SignatureMismatch(String),
}

/// A finite interpretation over individuals `0..size`.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(try_from = "RawInterpretation", into = "RawInterpretation")]
pub struct Interpretation {
    size: usize,
    concepts: BTreeMap<String, BTreeSet<usize>>,
    roles: BTreeMap<String, BTreeSet<(usize, usize)>>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawInterpretation {
    domain: usize,
    #[serde(default)]
    concepts: BTreeMap<String, BTreeSet<usize>>,
    #[serde(default)]
    roles: BTreeMap<String, BTreeSet<(usize, usize)>>,
}

impl TryFrom<RawInterpretation> for Interpretation {
    type Error = InterpretationError;

    fn try_from(raw: RawInterpretation) -> Result<Self, Self::Error> {
        Interpretation::from_parts(raw.domain, raw.concepts, raw.roles)
    }
}

impl From<Interpretation> for RawInterpretation {
    fn from(i: Interpretation) -> Self {
        RawInterpretation { domain: i.size, concepts: i.concepts, roles: i.roles }
    }
}

impl Interpretation {
    /// An interpretation with no symbols.
    pub fn new(size: usize) -> Self {
        Interpretation { size, ..Default::default() }
    }

    /// Empty extensions for every symbol of `kb`.
    pub fn for_kb(kb: &KnowledgeBase, size: usize) -> Self {
        let mut i = Interpretation::new(size);
        for c in kb.concepts() {
            i.ensure_concept(c);
        }
        for r in kb.roles() {
            i.ensure_role(r);
        }
        i
    }

    pub fn from_parts(
        size: usize,
        concepts: BTreeMap<String, BTreeSet<usize>>,
        roles: BTreeMap<String, BTreeSet<(usize, usize)>>,
    ) -> Result<Self, InterpretationError> {
        for (name, ext) in &concepts {
            if let Some(&index) = ext.iter().find(|&&d| d >= size) {
                return Err(InterpretationError::OutOfDomain { symbol: name.clone(), index, size });
            }
        }
        for (name, ext) in &roles {
            if let Some(&(a, b)) = ext.iter().find(|&&(a, b)| a >= size || b >= size) {
                let index = if a >= size { a } else { b };
                return Err(InterpretationError::OutOfDomain { symbol: name.clone(), index, size });
            }
        }
        Ok(Interpretation { size, concepts, roles })
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn concepts(&self) -> &BTreeMap<String, BTreeSet<usize>> {
        &self.concepts
    }

    pub fn roles(&self) -> &BTreeMap<String, BTreeSet<(usize, usize)>> {
        &self.roles
    }

    pub fn concept(&self, name: &str) -> Option<&BTreeSet<usize>> {
        self.concepts.get(name)
    }

    pub fn role(&self, name: &str) -> Option<&BTreeSet<(usize, usize)>> {
        self.roles.get(name)
    }

    /// Extension of a concept, empty when the symbol is absent.
    pub fn members(&self, name: &str) -> BTreeSet<usize> {
        self.concepts.get(name).cloned().unwrap_or_default()
    }

    pub fn ensure_concept(&mut self, name: &str) {
        self.concepts.entry(name.to_string()).or_default();
    }

    pub fn ensure_role(&mut self, name: &str) {
        self.roles.entry(name.to_string()).or_default();
    }

    /// Adds `d` to the extension of `name`.
    ///
    /// Panics if `d` is outside the domain.
    pub fn insert_concept(&mut self, name: &str, d: usize) {
        assert!(d < self.size, "individual {d} outside domain of size {}", self.size);
        self.concepts.entry(name.to_string()).or_default().insert(d);
    }

    /// Adds `(d, e)` to the extension of `name`.
    ///
    /// Panics if either end is outside the domain.
    pub fn insert_role(&mut self, name: &str, d: usize, e: usize) {
        assert!(d < self.size && e < self.size, "edge ({d},{e}) outside domain of size {}", self.size);
        self.roles.entry(name.to_string()).or_default().insert((d, e));
    }

    /// Adds fresh individuals and returns the index of the first.
    pub fn grow(&mut self, by: usize) -> usize {
        let first = self.size;
        self.size += by;
        first
    }

    /// Drops every symbol not in `kb`'s signature and adds empty entries for missing ones.
    pub fn restricted_to(&self, kb: &KnowledgeBase) -> Interpretation {
        let mut out = Interpretation::for_kb(kb, self.size);
        for (c, ext) in &self.concepts {
            if kb.concepts().contains(c) {
                out.concepts.insert(c.clone(), ext.clone());
            }
        }
        for (r, ext) in &self.roles {
            if kb.roles().contains(r) {
                out.roles.insert(r.clone(), ext.clone());
            }
        }
        out
    }

    /// Checks that every symbol of `kb` has an entry.
    pub fn covers(&self, kb: &KnowledgeBase) -> Result<(), InterpretationError> {
        if let Some(c) = kb.concepts().iter().find(|c| !self.concepts.contains_key(*c)) {
            return Err(InterpretationError::SignatureMismatch(format!("no extension for concept `{c}`")));
        }
        if let Some(r) = kb.roles().iter().find(|r| !self.roles.contains_key(*r)) {
            return Err(InterpretationError::SignatureMismatch(format!("no extension for role `{r}`")));
        }
        Ok(())
    }

    /// Successors of `d` along `role` (predecessors for an inverse role).
    pub fn successors(&self, role: &RoleExpr, d: usize) -> Vec<usize> {
        let Some(ext) = self.roles.get(&role.name) else { return Vec::new() };
        if role.inverted {
            ext.iter().filter(|&&(_, b)| b == d).map(|&(a, _)| a).collect()
        } else {
            ext.range((d, 0)..(d + 1, 0)).map(|&(_, b)| b).collect()
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("interpretations always serialize")
    }
}

/// Evaluates concept expressions over one interpretation, caching role adjacency.
pub struct Evaluator<'a> {
    interp: &'a Interpretation,
    succ: BTreeMap<&'a str, Vec<Vec<usize>>>,
    pred: BTreeMap<&'a str, Vec<Vec<usize>>>,
}

impl<'a> Evaluator<'a> {
    pub fn new(interp: &'a Interpretation) -> Self {
        let n = interp.size;
        let mut succ = BTreeMap::new();
        let mut pred = BTreeMap::new();
        for (name, ext) in &interp.roles {
            let mut s = vec![Vec::new(); n];
            let mut p = vec![Vec::new(); n];
            for &(a, b) in ext {
                s[a].push(b);
                p[b].push(a);
            }
            succ.insert(name.as_str(), s);
            pred.insert(name.as_str(), p);
        }
        Evaluator { interp, succ, pred }
    }

    pub fn interpretation(&self) -> &Interpretation {
        self.interp
    }

    fn adjacency(&self, r: &RoleExpr) -> Result<&[Vec<usize>], InterpretationError> {
        let table = if r.inverted { &self.pred } else { &self.succ };
        table
            .get(r.name.as_str())
            .map(|v| v.as_slice())
            .ok_or_else(|| InterpretationError::UnknownSymbol { kind: "role", name: r.name.clone() })
    }

    /// Membership vector of `c` indexed by individual.
    pub fn eval_mask(&self, c: &ConceptExpr) -> Result<Vec<bool>, InterpretationError> {
        let n = self.interp.size;
        Ok(match c {
            ConceptExpr::Top => vec![true; n],
            ConceptExpr::Bottom => vec![false; n],
            ConceptExpr::Atomic(a) | ConceptExpr::NegAtomic(a) => {
                let ext = self
                    .interp
                    .concepts
                    .get(a)
                    .ok_or_else(|| InterpretationError::UnknownSymbol { kind: "concept", name: a.clone() })?;
                let neg = matches!(c, ConceptExpr::NegAtomic(_));
                (0..n).map(|d| ext.contains(&d) != neg).collect()
            }
            ConceptExpr::And(cs) => {
                let mut acc = vec![true; n];
                for c in cs {
                    for (x, y) in acc.iter_mut().zip(self.eval_mask(c)?) {
                        *x &= y;
                    }
                }
                acc
            }
            ConceptExpr::Or(cs) => {
                let mut acc = vec![false; n];
                for c in cs {
                    for (x, y) in acc.iter_mut().zip(self.eval_mask(c)?) {
                        *x |= y;
                    }
                }
                acc
            }
            ConceptExpr::Forall(r, body) => {
                let adj = self.adjacency(r)?;
                let inner = self.eval_mask(body)?;
                adj.iter().map(|succ| succ.iter().all(|&e| inner[e])).collect()
            }
            ConceptExpr::AtLeast(k, r) => {
                self.adjacency(r)?.iter().map(|succ| succ.len() >= *k as usize).collect()
            }
            ConceptExpr::AtMost(k, r) => self.adjacency(r)?.iter().map(|succ| succ.len() <= *k as usize).collect(),
        })
    }

    pub fn eval(&self, c: &ConceptExpr) -> Result<BTreeSet<usize>, InterpretationError> {
        let mask = self.eval_mask(c)?;
        Ok(mask.iter().enumerate().filter(|(_, &m)| m).map(|(d, _)| d).collect())
    }
}

/// `C^I` computed by the set-theoretic semantics.
pub fn evaluate_concept(c: &ConceptExpr, i: &Interpretation) -> Result<BTreeSet<usize>, InterpretationError> {
    Evaluator::new(i).eval(c)
}

/// One violated assertion with its smallest offending individual.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub assertion: usize,
    pub lhs: String,
    pub rhs: String,
    pub witness: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize)]
pub struct ModelReport {
    pub violations: Vec<Violation>,
}

impl ModelReport {
    pub fn holds(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks every assertion `A ⊑ C` of `kb` against `i`.
pub fn is_model(kb: &KnowledgeBase, i: &Interpretation) -> Result<ModelReport, InterpretationError> {
    i.covers(kb)?;
    let ev = Evaluator::new(i);
    let mut report = ModelReport::default();
    for (idx, a) in kb.assertions().iter().enumerate() {
        let lhs = ev.eval_mask(&ConceptExpr::Atomic(a.lhs.clone()))?;
        let rhs = ev.eval_mask(&a.rhs)?;
        if let Some(d) = (0..i.size).find(|&d| lhs[d] && !rhs[d]) {
            report.violations.push(Violation {
                assertion: idx,
                lhs: a.lhs.clone(),
                rhs: a.rhs.to_string(),
                witness: d,
            });
        }
    }
    Ok(report)
}

/// Places `i2` after `i1`, shifting its individuals by `i1.size()`.
pub fn disjoint_union(i1: &Interpretation, i2: &Interpretation) -> Result<Interpretation, InterpretationError> {
    if !i1.concepts.keys().eq(i2.concepts.keys()) || !i1.roles.keys().eq(i2.roles.keys()) {
        return Err(InterpretationError::SignatureMismatch("operands have different symbols".into()));
    }
    let k = i1.size;
    let mut out = i1.clone();
    out.size += i2.size;
    for (c, ext) in &i2.concepts {
        out.concepts.get_mut(c).unwrap().extend(ext.iter().map(|d| d + k));
    }
    for (r, ext) in &i2.roles {
        out.roles.get_mut(r).unwrap().extend(ext.iter().map(|(a, b)| (a + k, b + k)));
    }
    Ok(out)
}
