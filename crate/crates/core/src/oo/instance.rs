use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use super::{OoError, OoSchema, TypeExpr};

/// A complex value: an object identifier, a finite set, or a record. Non-identifier values are
/// compared structurally.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Value {
    Oid(String),
    Set(BTreeSet<Value>),
    Rec(BTreeMap<String, Value>),
}

impl Value {
    /// This value and every value nested in it.
    pub fn subvalues(&self, out: &mut BTreeSet<Value>) {
        if !out.insert(self.clone()) {
            return;
        }
        match self {
            Value::Oid(_) => {}
            Value::Set(vs) => vs.iter().for_each(|v| v.subvalues(out)),
            Value::Rec(fs) => fs.values().for_each(|v| v.subvalues(out)),
        }
    }

    fn check(&self, oids: &BTreeSet<String>, attrs: &BTreeSet<String>) -> Result<(), OoError> {
        match self {
            Value::Oid(o) if oids.contains(o) => Ok(()),
            Value::Oid(o) => Err(OoError::InvalidInstance(format!("value refers to unknown object `{o}`"))),
            Value::Set(vs) => vs.iter().try_for_each(|v| v.check(oids, attrs)),
            Value::Rec(fs) => fs.iter().try_for_each(|(a, v)| {
                if attrs.contains(a) {
                    v.check(oids, attrs)
                } else {
                    Err(OoError::InvalidInstance(format!("record label `{a}` is not a schema attribute")))
                }
            }),
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Oid(o) => write!(f, "{o}"),
            Value::Set(vs) => {
                let parts: Vec<String> = vs.iter().map(|v| v.to_string()).collect();
                write!(f, "{{{}}}", parts.join(", "))
            }
            Value::Rec(fs) => {
                let parts: Vec<String> = fs.iter().map(|(a, v)| format!("{a}: {v}")).collect();
                write!(f, "[{}]", parts.join(", "))
            }
        }
    }
}

/// A database instance: object identifiers, class extensions π and the value assignment ρ.
///
/// JSON form: `{"oids": [..], "pi": {C: [..]}, "rho": {o: value}}` with values tagged
/// `oid`, `set` or `rec`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OoInstance {
    pub oids: BTreeSet<String>,
    #[serde(default)]
    pub pi: BTreeMap<String, BTreeSet<String>>,
    #[serde(default)]
    pub rho: BTreeMap<String, Value>,
}

impl OoInstance {
    pub fn class(&self, c: &str) -> &BTreeSet<String> {
        static EMPTY: BTreeSet<String> = BTreeSet::new();
        self.pi.get(c).unwrap_or(&EMPTY)
    }

    /// Object identifiers plus every value assigned by ρ or nested in one.
    pub fn active_values(&self) -> BTreeSet<Value> {
        let mut out: BTreeSet<Value> = self.oids.iter().cloned().map(Value::Oid).collect();
        self.rho.values().for_each(|v| v.subvalues(&mut out));
        out
    }

    /// Checks that the instance is well formed over the symbols of `s`, with ρ total.
    pub fn validate(&self, s: &OoSchema) -> Result<(), OoError> {
        for (c, members) in &self.pi {
            if !s.classes().contains(c) {
                return Err(OoError::Unknown { kind: "class", name: c.clone() });
            }
            if let Some(o) = members.iter().find(|o| !self.oids.contains(*o)) {
                return Err(OoError::InvalidInstance(format!("`{o}` in class `{c}` is not an object")));
            }
        }
        for o in &self.oids {
            if !self.rho.contains_key(o) {
                return Err(OoError::InvalidInstance(format!("object `{o}` has no value")));
            }
        }
        for (o, v) in &self.rho {
            if !self.oids.contains(o) {
                return Err(OoError::InvalidInstance(format!("value assigned to unknown object `{o}`")));
            }
            v.check(&self.oids, s.attributes())?;
        }
        Ok(())
    }
}

/// `v ∈ T^J`, with open records and possibly empty sets.
pub fn type_member(t: &TypeExpr, v: &Value, j: &OoInstance) -> bool {
    match (t, v) {
        (TypeExpr::Class(c), Value::Oid(o)) => j.class(c).contains(o),
        (TypeExpr::Class(_), _) => false,
        (TypeExpr::Union(ts), _) => ts.iter().any(|t| type_member(t, v, j)),
        (TypeExpr::SetOf(t), Value::Set(vs)) => vs.iter().all(|v| type_member(t, v, j)),
        (TypeExpr::Record(fs), Value::Rec(vals)) => {
            fs.iter().all(|(a, t)| vals.get(a).is_some_and(|v| type_member(t, v, j)))
        }
        (TypeExpr::SetOf(_) | TypeExpr::Record(_), _) => false,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct InstanceViolation {
    pub class: String,
    pub object: String,
    pub message: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct OoLegalityReport {
    pub violations: Vec<InstanceViolation>,
}

impl OoLegalityReport {
    pub fn holds(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks every declaration: instances belong to each superclass and their values to the
/// declared type.
pub fn check_legal_instance(s: &OoSchema, j: &OoInstance) -> Result<OoLegalityReport, OoError> {
    j.validate(s)?;
    let mut violations = Vec::new();
    for d in s.decls() {
        for o in j.class(&d.name) {
            for sup in &d.supers {
                if !j.class(sup).contains(o) {
                    violations.push(InstanceViolation {
                        class: d.name.clone(),
                        object: o.clone(),
                        message: format!("not an instance of superclass `{sup}`"),
                    });
                }
            }
            let v = &j.rho[o];
            if !type_member(&d.ty, v, j) {
                violations.push(InstanceViolation {
                    class: d.name.clone(),
                    object: o.clone(),
                    message: format!("value {v} is not of type {}", d.ty),
                });
            }
        }
    }
    Ok(OoLegalityReport { violations })
}
