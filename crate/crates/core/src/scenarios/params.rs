use std::collections::BTreeMap;

use serde_json::Value;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParamKind {
    Int,
    Real,
    Bool,
    Text,
}

impl ParamKind {
    pub fn name(self) -> &'static str {
        match self {
            ParamKind::Int => "int",
            ParamKind::Real => "real",
            ParamKind::Bool => "bool",
            ParamKind::Text => "text",
        }
    }

    pub fn is_numeric(self) -> bool {
        matches!(self, ParamKind::Int | ParamKind::Real)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ParamValue {
    Int(i64),
    Real(f64),
    Bool(bool),
    Text(String),
}

impl ParamValue {
    /// Raw text as given on a command line; typed later against the schema.
    pub fn raw(s: &str) -> Self {
        ParamValue::Text(s.to_string())
    }

    /// From a JSON config value.
    pub fn from_json(v: &Value) -> Option<Self> {
        match v {
            Value::Bool(b) => Some(ParamValue::Bool(*b)),
            Value::Number(n) => n.as_i64().map(ParamValue::Int).or_else(|| n.as_f64().map(ParamValue::Real)),
            Value::String(s) => Some(ParamValue::Text(s.clone())),
            _ => None,
        }
    }

    fn coerce(&self, key: &str, kind: ParamKind) -> Result<Self> {
        let bad = |what: &str| Error::param(key, format!("expected {}, got {what}", kind.name()));
        Ok(match (kind, self) {
            (ParamKind::Int, ParamValue::Int(i)) => ParamValue::Int(*i),
            (ParamKind::Int, ParamValue::Real(r)) if r.fract() == 0.0 && r.abs() < 9e15 => ParamValue::Int(*r as i64),
            (ParamKind::Int, ParamValue::Text(s)) => ParamValue::Int(s.trim().parse().map_err(|_| bad(s))?),
            (ParamKind::Real, ParamValue::Int(i)) => ParamValue::Real(*i as f64),
            (ParamKind::Real, ParamValue::Real(r)) => ParamValue::Real(*r),
            (ParamKind::Real, ParamValue::Text(s)) => {
                let r: f64 = s.trim().parse().map_err(|_| bad(s))?;
                if !r.is_finite() {
                    return Err(bad(s));
                }
                ParamValue::Real(r)
            }
            (ParamKind::Bool, ParamValue::Bool(b)) => ParamValue::Bool(*b),
            (ParamKind::Bool, ParamValue::Text(s)) => match s.trim() {
                "true" | "1" | "yes" => ParamValue::Bool(true),
                "false" | "0" | "no" => ParamValue::Bool(false),
                _ => return Err(bad(s)),
            },
            (ParamKind::Text, ParamValue::Text(s)) => ParamValue::Text(s.clone()),
            (_, other) => return Err(bad(&other.to_string())),
        })
    }

    pub fn to_json(&self) -> Value {
        match self {
            ParamValue::Int(i) => Value::from(*i),
            ParamValue::Real(r) => Value::from(*r),
            ParamValue::Bool(b) => Value::from(*b),
            ParamValue::Text(s) => Value::from(s.clone()),
        }
    }
}

impl std::fmt::Display for ParamValue {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ParamValue::Int(i) => write!(f, "{i}"),
            ParamValue::Real(r) => write!(f, "{r}"),
            ParamValue::Bool(b) => write!(f, "{b}"),
            ParamValue::Text(s) => write!(f, "{s}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ParamSpec {
    pub name: &'static str,
    pub kind: ParamKind,
    pub default: ParamValue,
    pub help: &'static str,
}

impl ParamSpec {
    pub fn int(name: &'static str, default: i64, help: &'static str) -> Self {
        Self { name, kind: ParamKind::Int, default: ParamValue::Int(default), help }
    }

    pub fn real(name: &'static str, default: f64, help: &'static str) -> Self {
        Self { name, kind: ParamKind::Real, default: ParamValue::Real(default), help }
    }

    pub fn boolean(name: &'static str, default: bool, help: &'static str) -> Self {
        Self { name, kind: ParamKind::Bool, default: ParamValue::Bool(default), help }
    }

    pub fn text(name: &'static str, default: &str, help: &'static str) -> Self {
        Self { name, kind: ParamKind::Text, default: ParamValue::Text(default.to_string()), help }
    }
}

/// Resolved, type-checked parameters.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Params {
    values: BTreeMap<String, ParamValue>,
}

impl Params {
    pub fn resolve(schema: &[ParamSpec], overrides: &BTreeMap<String, ParamValue>) -> Result<Self> {
        for key in overrides.keys() {
            if !schema.iter().any(|s| s.name == key) {
                return Err(Error::param(key, "unknown parameter"));
            }
        }
        let mut values = BTreeMap::new();
        for spec in schema {
            let v = match overrides.get(spec.name) {
                Some(v) => v.coerce(spec.name, spec.kind)?,
                None => spec.default.clone(),
            };
            values.insert(spec.name.to_string(), v);
        }
        Ok(Self { values })
    }

    pub fn get(&self, key: &str) -> Option<&ParamValue> {
        self.values.get(key)
    }

    pub fn real(&self, key: &str) -> f64 {
        match self.values.get(key) {
            Some(ParamValue::Real(r)) => *r,
            Some(ParamValue::Int(i)) => *i as f64,
            _ => panic!("parameter `{key}` is not numeric in the schema"),
        }
    }

    pub fn int(&self, key: &str) -> i64 {
        match self.values.get(key) {
            Some(ParamValue::Int(i)) => *i,
            _ => panic!("parameter `{key}` is not an integer in the schema"),
        }
    }

    /// Integer parameter constrained to `min..=max`.
    pub fn count(&self, key: &str, min: usize, max: usize) -> Result<usize> {
        let v = self.int(key);
        if v < min as i64 || v > max as i64 {
            return Err(Error::param(key, format!("must lie in {min}..={max}, got {v}")));
        }
        Ok(v as usize)
    }

    /// Real parameter that must be strictly positive.
    pub fn positive(&self, key: &str) -> Result<f64> {
        let v = self.real(key);
        if !(v > 0.0) {
            return Err(Error::param(key, format!("must be positive, got {v}")));
        }
        Ok(v)
    }

    pub fn flag(&self, key: &str) -> bool {
        match self.values.get(key) {
            Some(ParamValue::Bool(b)) => *b,
            _ => panic!("parameter `{key}` is not boolean in the schema"),
        }
    }

    pub fn text(&self, key: &str) -> &str {
        match self.values.get(key) {
            Some(ParamValue::Text(s)) => s,
            _ => panic!("parameter `{key}` is not text in the schema"),
        }
    }

    pub fn to_json(&self) -> Value {
        Value::Object(self.values.iter().map(|(k, v)| (k.clone(), v.to_json())).collect())
    }
}

/// Parses a spin direction: `x`, `y`, `z`, `-x`, ..., `xi` (the x-y
/// bisector) or three comma-separated components.
pub fn direction(key: &str, s: &str) -> Result<[f64; 3]> {
    let s = s.trim();
    let (neg, base) = match s.strip_prefix('-') {
        Some(rest) if !rest.contains(',') => (true, rest),
        _ => (false, s),
    };
    let d = match base {
        "x" => [1.0, 0.0, 0.0],
        "y" => [0.0, 1.0, 0.0],
        "z" => [0.0, 0.0, 1.0],
        "xi" => [std::f64::consts::FRAC_1_SQRT_2, std::f64::consts::FRAC_1_SQRT_2, 0.0],
        _ => {
            let parts: Vec<f64> = s.split(',').map(|p| p.trim().parse::<f64>()).collect::<std::result::Result<_, _>>().map_err(|_| Error::param(key, format!("cannot parse direction `{s}`")))?;
            if parts.len() != 3 || parts.iter().all(|x| *x == 0.0) || parts.iter().any(|x| !x.is_finite()) {
                return Err(Error::param(key, format!("direction `{s}` needs three finite components, not all zero")));
            }
            return Ok([parts[0], parts[1], parts[2]]);
        }
    };
    Ok(if neg { d.map(|x| -x) } else { d })
}
