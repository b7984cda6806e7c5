//! Sound cardinality reasoning over raw assertions.
//!
//! Every fact holds in all finite models. The rules are deliberately local: subset facts from
//! atomic conjuncts, ratio bounds from a universal restriction paired with number restrictions
//! on both ends of a role, and chaining of those bounds.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::kb::{ConceptExpr, KnowledgeBase, RoleExpr};

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(tag = "kind")]
pub enum FactKind {
    /// `m·#A ≤ n·#B` in every finite model.
    Inequality { m: u64, a: String, n: u64, b: String },
    /// `A ⊑ B` in every model.
    Subset { sub: String, sup: String },
    /// `A ⊑ B` in every finite model.
    FiniteSubsumption { sub: String, sup: String },
    /// `A` is empty in every finite model.
    FiniteInconsistent { concept: String },
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct CardinalityFact {
    #[serde(flatten)]
    pub kind: FactKind,
    /// Indices into the knowledge base's assertion list.
    pub derivation: Vec<usize>,
}

impl CardinalityFact {
    pub fn describe(&self) -> String {
        match &self.kind {
            FactKind::Inequality { m, a, n, b } => format!("{m}·#{a} ≤ {n}·#{b}"),
            FactKind::Subset { sub, sup } => format!("{sub} ⊑ {sup}"),
            FactKind::FiniteSubsumption { sub, sup } => format!("{sub} ⊑ {sup} (finite models)"),
            FactKind::FiniteInconsistent { concept } => format!("{concept} ≡ ⊥ (finite models)"),
        }
    }
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// A bound `#A ≤ (n/m)·#B`, stored reduced.
#[derive(Debug, Clone)]
struct Ratio {
    m: u64,
    n: u64,
    why: BTreeSet<usize>,
}

impl Ratio {
    fn new(m: u64, n: u64, why: BTreeSet<usize>) -> Ratio {
        let g = gcd(m, n);
        Ratio { m: m / g, n: n / g, why }
    }

    /// Strictly tighter, i.e. `n/m < other.n/other.m`.
    fn tighter_than(&self, other: &Ratio) -> bool {
        (self.n as u128) * (other.m as u128) < (other.n as u128) * (self.m as u128)
    }

    fn chain(&self, next: &Ratio) -> Option<Ratio> {
        let m = self.m.checked_mul(next.m)?;
        let n = self.n.checked_mul(next.n)?;
        Some(Ratio::new(m, n, self.why.union(&next.why).copied().collect()))
    }
}

/// Top-level conjuncts of every left-hand side's merged assertion, each with its source index.
fn conjuncts_by_lhs(kb: &KnowledgeBase) -> BTreeMap<&str, Vec<(&ConceptExpr, usize)>> {
    let mut out: BTreeMap<&str, Vec<(&ConceptExpr, usize)>> = BTreeMap::new();
    for (idx, a) in kb.assertions().iter().enumerate() {
        let entry = out.entry(a.lhs.as_str()).or_default();
        entry.extend(a.rhs.conjuncts().into_iter().map(|c| (c, idx)));
    }
    out
}

fn insert_tightest(map: &mut BTreeMap<(String, String), Ratio>, a: &str, b: &str, r: Ratio) -> bool {
    let key = (a.to_string(), b.to_string());
    match map.get(&key) {
        Some(old) if !r.tighter_than(old) => false,
        _ => {
            map.insert(key, r);
            true
        }
    }
}

/// Derives finite-model cardinality facts; absence of a fact proves nothing.
pub fn analyze_cardinalities(kb: &KnowledgeBase) -> Vec<CardinalityFact> {
    let conj = conjuncts_by_lhs(kb);

    let mut subset: BTreeMap<(String, String), BTreeSet<usize>> = BTreeMap::new();
    for (a, cs) in &conj {
        for (c, idx) in cs {
            if let ConceptExpr::Atomic(b) = c {
                if b != a {
                    subset.entry((a.to_string(), b.clone())).or_default().insert(*idx);
                }
            }
        }
    }
    // transitive closure, keeping the first derivation found
    loop {
        let mut added = Vec::new();
        for ((a, b), w1) in &subset {
            for ((b2, c), w2) in subset.range((b.clone(), String::new())..) {
                if b2 != b {
                    break;
                }
                if a != c && !subset.contains_key(&(a.clone(), c.clone())) {
                    added.push(((a.clone(), c.clone()), w1.union(w2).copied().collect::<BTreeSet<_>>()));
                }
            }
        }
        if added.is_empty() {
            break;
        }
        for (k, w) in added {
            subset.entry(k).or_insert(w);
        }
    }

    let mut ineq: BTreeMap<(String, String), Ratio> = BTreeMap::new();
    for ((a, b), why) in &subset {
        insert_tightest(&mut ineq, a, b, Ratio::new(1, 1, why.clone()));
    }

    let at_most = |concept: &str, role: &RoleExpr| -> Option<(u32, usize)> {
        conj.get(concept)?
            .iter()
            .filter_map(|(c, idx)| match c {
                ConceptExpr::AtMost(n, r) if r == role && *n >= 1 => Some((*n, *idx)),
                _ => None,
            })
            .min()
    };
    for (a, cs) in &conj {
        for (c1, i1) in cs {
            let ConceptExpr::AtLeast(m, r) = c1 else { continue };
            for (c2, i2) in cs {
                let ConceptExpr::Forall(r2, body) = c2 else { continue };
                let ConceptExpr::Atomic(b) = body.as_ref() else { continue };
                if r2 != r {
                    continue;
                }
                if let Some((n, i3)) = at_most(b, &r.inverse()) {
                    let why = BTreeSet::from([*i1, *i2, i3]);
                    insert_tightest(&mut ineq, a, b, Ratio::new(*m as u64, n as u64, why));
                }
            }
        }
    }

    let rounds = kb.concepts().len();
    for _ in 0..rounds {
        let mut changed = false;
        let snapshot: Vec<((String, String), Ratio)> = ineq.iter().map(|(k, v)| (k.clone(), v.clone())).collect();
        for ((a, b), r1) in &snapshot {
            for ((b2, c), r2) in &snapshot {
                if b2 != b {
                    continue;
                }
                if let Some(r) = r1.chain(r2) {
                    changed |= insert_tightest(&mut ineq, a, c, r);
                }
            }
        }
        if !changed {
            break;
        }
    }

    let mut facts = BTreeSet::new();
    for ((a, b), why) in &subset {
        facts.insert(CardinalityFact {
            kind: FactKind::Subset { sub: a.clone(), sup: b.clone() },
            derivation: why.iter().copied().collect(),
        });
    }
    for ((a, b), r) in &ineq {
        if a == b && r.m <= r.n {
            continue;
        }
        facts.insert(CardinalityFact {
            kind: FactKind::Inequality { m: r.m, a: a.clone(), n: r.n, b: b.clone() },
            derivation: r.why.iter().copied().collect(),
        });
        if a == b && r.n < r.m {
            facts.insert(CardinalityFact {
                kind: FactKind::FiniteInconsistent { concept: a.clone() },
                derivation: r.why.iter().copied().collect(),
            });
        }
        // m·#B ≤ n·#A with n ≤ m and A ⊆ B forces A = B
        if r.n <= r.m {
            if let Some(sub_why) = subset.get(&(b.clone(), a.clone())) {
                facts.insert(CardinalityFact {
                    kind: FactKind::FiniteSubsumption { sub: a.clone(), sup: b.clone() },
                    derivation: r.why.union(sub_why).copied().collect(),
                });
            }
        }
    }
    facts.into_iter().collect()
}
