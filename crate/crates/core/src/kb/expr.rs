use std::collections::BTreeSet;
use std::fmt;

/// An atomic role or its inverse. Inverses never nest.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RoleExpr {
    pub name: String,
    pub inverted: bool,
}

impl RoleExpr {
    pub fn atomic(name: impl Into<String>) -> Self {
        RoleExpr { name: name.into(), inverted: false }
    }

    pub fn inverse_of(name: impl Into<String>) -> Self {
        RoleExpr { name: name.into(), inverted: true }
    }

    /// `P` becomes `P⁻` and `P⁻` becomes `P`.
    pub fn inverse(&self) -> Self {
        RoleExpr { name: self.name.clone(), inverted: !self.inverted }
    }
}

impl fmt::Display for RoleExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.inverted {
            write!(f, "INV {}", self.name)
        } else {
            f.write_str(&self.name)
        }
    }
}

/// Concept expressions of the description language.
///
/// Negation is restricted to atomic concepts. `Top` and `Bottom` are kept as leaves;
/// [`ConceptExpr::desugar`] rewrites them into the pure atomic form when needed.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ConceptExpr {
    Top,
    Bottom,
    Atomic(String),
    NegAtomic(String),
    And(Vec<ConceptExpr>),
    Or(Vec<ConceptExpr>),
    Forall(RoleExpr, Box<ConceptExpr>),
    AtLeast(u32, RoleExpr),
    AtMost(u32, RoleExpr),
}

impl ConceptExpr {
    pub fn atom(name: impl Into<String>) -> Self {
        ConceptExpr::Atomic(name.into())
    }

    pub fn not(name: impl Into<String>) -> Self {
        ConceptExpr::NegAtomic(name.into())
    }

    /// Conjunction; a single operand is returned as is and an empty one is `Top`.
    pub fn and(mut parts: Vec<ConceptExpr>) -> Self {
        match parts.len() {
            0 => ConceptExpr::Top,
            1 => parts.pop().unwrap(),
            _ => ConceptExpr::And(parts),
        }
    }

    /// Disjunction; a single operand is returned as is and an empty one is `Bottom`.
    pub fn or(mut parts: Vec<ConceptExpr>) -> Self {
        match parts.len() {
            0 => ConceptExpr::Bottom,
            1 => parts.pop().unwrap(),
            _ => ConceptExpr::Or(parts),
        }
    }

    pub fn forall(role: RoleExpr, filler: ConceptExpr) -> Self {
        ConceptExpr::Forall(role, Box::new(filler))
    }

    /// `∃≥n R`; `∃≥0 R` is normalized to `Top`.
    pub fn at_least(n: u32, role: RoleExpr) -> Self {
        if n == 0 {
            ConceptExpr::Top
        } else {
            ConceptExpr::AtLeast(n, role)
        }
    }

    pub fn at_most(n: u32, role: RoleExpr) -> Self {
        ConceptExpr::AtMost(n, role)
    }

    /// `∃=n R`, i.e. `∃≤n R ⊓ ∃≥n R`.
    pub fn exactly(n: u32, role: RoleExpr) -> Self {
        if n == 0 {
            return ConceptExpr::AtMost(0, role);
        }
        ConceptExpr::And(vec![ConceptExpr::AtMost(n, role.clone()), ConceptExpr::AtLeast(n, role)])
    }

    /// `∃R`, i.e. `∃≥1 R`.
    pub fn some(role: RoleExpr) -> Self {
        ConceptExpr::AtLeast(1, role)
    }

    /// Pre-order traversal.
    pub fn walk<'a>(&'a self, f: &mut impl FnMut(&'a ConceptExpr)) {
        f(self);
        match self {
            ConceptExpr::And(cs) | ConceptExpr::Or(cs) => cs.iter().for_each(|c| c.walk(f)),
            ConceptExpr::Forall(_, c) => c.walk(f),
            _ => {}
        }
    }

    pub fn concept_names(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.walk(&mut |c| {
            if let ConceptExpr::Atomic(a) | ConceptExpr::NegAtomic(a) = c {
                out.insert(a.clone());
            }
        });
        out
    }

    pub fn role_names(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.walk(&mut |c| match c {
            ConceptExpr::Forall(r, _) | ConceptExpr::AtLeast(_, r) | ConceptExpr::AtMost(_, r) => {
                out.insert(r.name.clone());
            }
            _ => {}
        });
        out
    }

    /// All role expressions used, in traversal order.
    pub fn role_uses(&self) -> Vec<&RoleExpr> {
        let mut out = Vec::new();
        self.walk(&mut |c| match c {
            ConceptExpr::Forall(r, _) | ConceptExpr::AtLeast(_, r) | ConceptExpr::AtMost(_, r) => out.push(r),
            _ => {}
        });
        out
    }

    /// Operands of the top-level conjunction, with nested conjunctions flattened.
    pub fn conjuncts(&self) -> Vec<&ConceptExpr> {
        let mut out = Vec::new();
        fn go<'a>(c: &'a ConceptExpr, out: &mut Vec<&'a ConceptExpr>) {
            match c {
                ConceptExpr::And(cs) => cs.iter().for_each(|c| go(c, out)),
                ConceptExpr::Top => {}
                other => out.push(other),
            }
        }
        go(self, &mut out);
        out
    }

    /// Canonical form: nested conjunctions and disjunctions flattened, operands deduplicated and
    /// sorted by their rendering, `∃≥0 R` replaced by `Top`, `Top` dropped from conjunctions and
    /// `Bottom` from disjunctions.
    pub fn normalize(&self) -> ConceptExpr {
        match self {
            ConceptExpr::And(cs) => {
                let mut parts = Vec::new();
                for c in cs {
                    match c.normalize() {
                        ConceptExpr::And(inner) => parts.extend(inner),
                        ConceptExpr::Top => {}
                        other => parts.push(other),
                    }
                }
                ConceptExpr::and(sort_dedup(parts))
            }
            ConceptExpr::Or(cs) => {
                let mut parts = Vec::new();
                for c in cs {
                    match c.normalize() {
                        ConceptExpr::Or(inner) => parts.extend(inner),
                        ConceptExpr::Bottom => {}
                        other => parts.push(other),
                    }
                }
                ConceptExpr::or(sort_dedup(parts))
            }
            ConceptExpr::Forall(r, c) => ConceptExpr::forall(r.clone(), c.normalize()),
            ConceptExpr::AtLeast(0, _) => ConceptExpr::Top,
            other => other.clone(),
        }
    }

    /// The complement, if it can be written in the language (negation pushed to atoms).
    ///
    /// `∀R.C` has no complement here except for `∀R.⊥ ≡ ∃≤0 R`.
    pub fn negate(&self) -> Option<ConceptExpr> {
        Some(match self {
            ConceptExpr::Top => ConceptExpr::Bottom,
            ConceptExpr::Bottom => ConceptExpr::Top,
            ConceptExpr::Atomic(a) => ConceptExpr::NegAtomic(a.clone()),
            ConceptExpr::NegAtomic(a) => ConceptExpr::Atomic(a.clone()),
            ConceptExpr::And(cs) => ConceptExpr::Or(cs.iter().map(|c| c.negate()).collect::<Option<_>>()?),
            ConceptExpr::Or(cs) => ConceptExpr::And(cs.iter().map(|c| c.negate()).collect::<Option<_>>()?),
            ConceptExpr::AtLeast(0, _) => ConceptExpr::Bottom,
            ConceptExpr::AtLeast(n, r) => ConceptExpr::AtMost(n - 1, r.clone()),
            ConceptExpr::AtMost(n, r) => ConceptExpr::AtLeast(n.checked_add(1)?, r.clone()),
            ConceptExpr::Forall(r, c) if **c == ConceptExpr::Bottom => ConceptExpr::AtLeast(1, r.clone()),
            ConceptExpr::Forall(..) => return None,
        })
    }

    /// Rewrites `Top` as `A ⊔ ¬A` and `Bottom` as `A ⊓ ¬A` for the given atomic concept.
    pub fn desugar(&self, atom: &str) -> ConceptExpr {
        match self {
            ConceptExpr::Top => ConceptExpr::Or(vec![ConceptExpr::atom(atom), ConceptExpr::not(atom)]),
            ConceptExpr::Bottom => ConceptExpr::And(vec![ConceptExpr::atom(atom), ConceptExpr::not(atom)]),
            ConceptExpr::And(cs) => ConceptExpr::And(cs.iter().map(|c| c.desugar(atom)).collect()),
            ConceptExpr::Or(cs) => ConceptExpr::Or(cs.iter().map(|c| c.desugar(atom)).collect()),
            ConceptExpr::Forall(r, c) => ConceptExpr::forall(r.clone(), c.desugar(atom)),
            other => other.clone(),
        }
    }

    /// Nesting depth: leaves and number restrictions count 1.
    pub fn depth(&self) -> usize {
        match self {
            ConceptExpr::And(cs) | ConceptExpr::Or(cs) => 1 + cs.iter().map(|c| c.depth()).max().unwrap_or(0),
            ConceptExpr::Forall(_, c) => 1 + c.depth(),
            _ => 1,
        }
    }

    /// Mathematical notation (⊓, ⊔, ∀, ∃≥, ⁻) for human-facing reports.
    pub fn pretty(&self) -> String {
        let mut s = String::new();
        self.write_pretty(&mut s, false);
        s
    }

    fn write_pretty(&self, out: &mut String, nested: bool) {
        let role = |r: &RoleExpr| if r.inverted { format!("{}⁻", r.name) } else { r.name.clone() };
        match self {
            ConceptExpr::Top => out.push('⊤'),
            ConceptExpr::Bottom => out.push('⊥'),
            ConceptExpr::Atomic(a) => out.push_str(a),
            ConceptExpr::NegAtomic(a) => {
                out.push('¬');
                out.push_str(a);
            }
            ConceptExpr::And(cs) | ConceptExpr::Or(cs) => {
                let sep = if matches!(self, ConceptExpr::And(_)) { " ⊓ " } else { " ⊔ " };
                if nested {
                    out.push('(');
                }
                for (i, c) in cs.iter().enumerate() {
                    if i > 0 {
                        out.push_str(sep);
                    }
                    c.write_pretty(out, true);
                }
                if nested {
                    out.push(')');
                }
            }
            ConceptExpr::Forall(r, c) => {
                out.push_str(&format!("∀{}.", role(r)));
                c.write_pretty(out, true);
            }
            ConceptExpr::AtLeast(n, r) => out.push_str(&format!("∃≥{n} {}", role(r))),
            ConceptExpr::AtMost(n, r) => out.push_str(&format!("∃≤{n} {}", role(r))),
        }
    }
}

fn sort_dedup(parts: Vec<ConceptExpr>) -> Vec<ConceptExpr> {
    let mut keyed: Vec<(String, ConceptExpr)> = parts.into_iter().map(|c| (c.to_string(), c)).collect();
    keyed.sort_by(|a, b| a.0.cmp(&b.0));
    keyed.dedup_by(|a, b| a.0 == b.0);
    keyed.into_iter().map(|(_, c)| c).collect()
}

impl fmt::Display for ConceptExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConceptExpr::Top => f.write_str("TOP"),
            ConceptExpr::Bottom => f.write_str("BOTTOM"),
            ConceptExpr::Atomic(a) => f.write_str(a),
            ConceptExpr::NegAtomic(a) => write!(f, "NOT {a}"),
            ConceptExpr::And(cs) => {
                for (i, c) in cs.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" AND ")?;
                    }
                    match c {
                        ConceptExpr::And(_) | ConceptExpr::Or(_) => write!(f, "({c})")?,
                        _ => write!(f, "{c}")?,
                    }
                }
                Ok(())
            }
            ConceptExpr::Or(cs) => {
                for (i, c) in cs.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" OR ")?;
                    }
                    match c {
                        ConceptExpr::Or(_) => write!(f, "({c})")?,
                        _ => write!(f, "{c}")?,
                    }
                }
                Ok(())
            }
            ConceptExpr::Forall(r, c) => match **c {
                ConceptExpr::And(_) | ConceptExpr::Or(_) => write!(f, "ALL {r}.({c})"),
                _ => write!(f, "ALL {r}.{c}"),
            },
            ConceptExpr::AtLeast(n, r) => write!(f, "ATLEAST {n} {r}"),
            ConceptExpr::AtMost(n, r) => write!(f, "ATMOST {n} {r}"),
        }
    }
}
