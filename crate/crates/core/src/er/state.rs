use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{ErError, ErSchema};

/// Element `D#k` of the countable basic domain `D`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct BasicValue {
    pub domain: String,
    pub index: u64,
}

impl BasicValue {
    pub fn new(domain: impl Into<String>, index: u64) -> Self {
        BasicValue { domain: domain.into(), index }
    }
}

impl fmt::Display for BasicValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}#{}", self.domain, self.index)
    }
}

impl FromStr for BasicValue {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let (d, k) = s.rsplit_once('#').ok_or_else(|| format!("`{s}` is not of the form D#k"))?;
        let index = k.parse().map_err(|_| format!("`{s}` has a non-numeric index"))?;
        if d.is_empty() {
            return Err(format!("`{s}` has no domain"));
        }
        Ok(BasicValue::new(d, index))
    }
}

impl TryFrom<String> for BasicValue {
    type Error = String;

    fn try_from(s: String) -> Result<Self, String> {
        s.parse()
    }
}

impl From<BasicValue> for String {
    fn from(v: BasicValue) -> String {
        v.to_string()
    }
}

/// A tuple labeled by role names.
pub type LabeledTuple = BTreeMap<String, String>;

/// A database state: individuals, entity and attribute extensions, relationship tuples.
///
/// JSON form: `{"domain": [..], "entities": {E: [..]}, "attrs": {A: [[ind, "D#k"], ..]},
/// "rels": {R: [{U: ind, ..}, ..]}}`. Missing keys mean empty extensions.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DatabaseState {
    pub domain: BTreeSet<String>,
    #[serde(default)]
    pub entities: BTreeMap<String, BTreeSet<String>>,
    #[serde(default)]
    pub attrs: BTreeMap<String, BTreeSet<(String, BasicValue)>>,
    #[serde(default)]
    pub rels: BTreeMap<String, BTreeSet<LabeledTuple>>,
}

impl DatabaseState {
    pub fn entity(&self, e: &str) -> &BTreeSet<String> {
        static EMPTY: BTreeSet<String> = BTreeSet::new();
        self.entities.get(e).unwrap_or(&EMPTY)
    }

    pub fn attr(&self, a: &str) -> &BTreeSet<(String, BasicValue)> {
        static EMPTY: BTreeSet<(String, BasicValue)> = BTreeSet::new();
        self.attrs.get(a).unwrap_or(&EMPTY)
    }

    pub fn rel(&self, r: &str) -> &BTreeSet<LabeledTuple> {
        static EMPTY: BTreeSet<LabeledTuple> = BTreeSet::new();
        self.rels.get(r).unwrap_or(&EMPTY)
    }

    /// Basic values occurring in attribute extensions.
    pub fn active_values(&self) -> BTreeSet<BasicValue> {
        self.attrs.values().flatten().map(|(_, v)| v.clone()).collect()
    }

    /// Checks that every symbol belongs to `s` and every referenced individual to the domain.
    pub fn validate(&self, s: &ErSchema) -> Result<(), ErError> {
        let bad = |m: String| Err(ErError::InvalidState(m));
        let in_domain = |x: &String, ctx: &str| -> Result<(), ErError> {
            if self.domain.contains(x) {
                Ok(())
            } else {
                Err(ErError::InvalidState(format!("`{x}` in {ctx} is not in the domain")))
            }
        };
        for (e, members) in &self.entities {
            if !s.entities.contains_key(e) {
                return bad(format!("unknown entity `{e}`"));
            }
            members.iter().try_for_each(|x| in_domain(x, e))?;
        }
        let attributes = s.attributes();
        let domains = s.domains();
        for (a, pairs) in &self.attrs {
            if !attributes.contains(a) {
                return bad(format!("unknown attribute `{a}`"));
            }
            for (x, v) in pairs {
                in_domain(x, a)?;
                if !domains.contains(&v.domain) {
                    return bad(format!("value `{v}` of `{a}` belongs to no schema domain"));
                }
            }
        }
        for (r, tuples) in &self.rels {
            let Some(rel) = s.relationships.get(r) else { return bad(format!("unknown relationship `{r}`")) };
            let labels: BTreeSet<&String> = rel.roles.iter().map(|(u, _)| u).collect();
            for t in tuples {
                if t.keys().collect::<BTreeSet<_>>() != labels {
                    return bad(format!("tuple {t:?} of `{r}` is not labeled by exactly its roles"));
                }
                t.values().try_for_each(|x| in_domain(x, r))?;
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StateViolation {
    /// 0 for an empty domain, otherwise the number of the violated legality condition (1 to 4).
    pub condition: u8,
    pub message: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct LegalityReport {
    pub violations: Vec<StateViolation>,
}

impl LegalityReport {
    pub fn holds(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks the four legality conditions: ISA inclusion, single-valued typed attributes,
/// typed relationship components, and cardinality bounds.
pub fn check_legal(s: &ErSchema, b: &DatabaseState) -> Result<LegalityReport, ErError> {
    b.validate(s)?;
    let mut v = Vec::new();
    let mut flag = |condition: u8, message: String| v.push(StateViolation { condition, message });
    if b.domain.is_empty() {
        flag(0, "the domain is empty".into());
    }

    for e in s.entities.values() {
        for sup in &e.isa {
            for x in b.entity(&e.name).difference(b.entity(sup)) {
                flag(1, format!("`{x}` is a {} but not a {sup}", e.name));
            }
        }
    }

    for e in s.entities.values() {
        for x in b.entity(&e.name) {
            for (a, d) in &e.attrs {
                let vals: Vec<&BasicValue> = b.attr(a).iter().filter(|(y, _)| y == x).map(|(_, v)| v).collect();
                match vals.as_slice() {
                    [v] if &v.domain == d => {}
                    [v] => flag(2, format!("`{a}` of {} `{x}` is `{v}`, outside {d}", e.name)),
                    _ => flag(2, format!("{} `{x}` has {} values for `{a}`", e.name, vals.len())),
                }
            }
        }
    }

    for r in s.relationships.values() {
        for t in b.rel(&r.name) {
            for (u, e) in &r.roles {
                if !b.entity(e).contains(&t[u]) {
                    flag(3, format!("`{}` fills {}.{u} but is not a {e}", t[u], r.name));
                }
            }
        }
    }

    for r in s.relationships.values() {
        for (u, primary) in &r.roles {
            for e in s.sub_entities(primary) {
                let (min, max) = s.card(&e, &r.name, u);
                if min == 0 && max.is_none() {
                    continue;
                }
                for x in b.entity(&e) {
                    let n = b.rel(&r.name).iter().filter(|t| &t[u] == x).count() as u64;
                    if n < min as u64 || max.is_some_and(|m| n > m as u64) {
                        let hi = max.map_or("*".to_string(), |m| m.to_string());
                        flag(4, format!("{e} `{x}` fills {}.{u} {n} times, outside {min}..{hi}", r.name));
                    }
                }
            }
        }
    }
    Ok(LegalityReport { violations: v })
}
