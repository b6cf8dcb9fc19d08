//! JSON configuration files for environments, jump-vector laws and
//! branching-walk step laws.
//!
//! Colours are 1-based in files and messages and 0-based in the core.

use colortree_core::brw::{BrwSpec, StepLaw};
use colortree_core::dist::DistSpec;
use colortree_core::env::EnvSpec;
use colortree_core::rwre::{JumpLaw, RwreSpec};
use serde::de::DeserializeOwned;
use serde_json::{Map, Value};

/// A configuration problem, with the offending field in the message.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("{0}")]
pub struct ParseError(pub String);

type Result<T> = std::result::Result<T, ParseError>;

fn err<T>(msg: impl Into<String>) -> Result<T> {
    Err(ParseError(msg.into()))
}

fn object(text: &str) -> Result<Map<String, Value>> {
    match serde_json::from_str::<Value>(text) {
        Ok(Value::Object(m)) => Ok(m),
        Ok(_) => err("top level must be a JSON object"),
        Err(e) => err(format!("invalid JSON: {e}")),
    }
}

fn reject_unknown(m: &Map<String, Value>, allowed: &[&str]) -> Result<()> {
    match m.keys().find(|k| !allowed.contains(&k.as_str())) {
        Some(k) => err(format!("unknown field `{k}`")),
        None => Ok(()),
    }
}

fn get_b(m: &Map<String, Value>) -> Result<usize> {
    let b = match m.get("b") {
        None => return err("missing field `b`"),
        Some(v) => v.as_u64().ok_or_else(|| ParseError(format!("field `b`: expected a positive integer, found {v}")))?,
    };
    if b < 2 {
        return err(format!("field `b`: must be at least 2, found {b}"));
    }
    Ok(b as usize)
}

/// Optional 1-based colour field, returned 0-based.
fn get_color(m: &Map<String, Value>, field: &str, b: usize) -> Result<usize> {
    match m.get(field) {
        None => Ok(0),
        Some(v) => match v.as_u64() {
            Some(c) if (1..=b as u64).contains(&c) => Ok(c as usize - 1),
            _ => err(format!("field `{field}`: expected an integer in 1..={b}, found {v}")),
        },
    }
}

/// A `b × b` array of objects; `what` names an element in messages.
fn matrix<T: DeserializeOwned>(m: &Map<String, Value>, field: &str, what: &str, b: usize) -> Result<Vec<Vec<T>>> {
    let rows = match m.get(field) {
        None => return err(format!("missing field `{field}`")),
        Some(Value::Array(rows)) => rows,
        Some(v) => return err(format!("field `{field}`: expected an array of rows, found {v}")),
    };
    if rows.len() > b {
        return err(format!("field `{field}`: expected {b} rows, found {}", rows.len()));
    }
    let mut out = Vec::with_capacity(b);
    for i in 0..b {
        let row = match rows.get(i) {
            None | Some(Value::Null) => return err(format!("missing {what} ({},1)", i + 1)),
            Some(Value::Array(row)) => row,
            Some(v) => return err(format!("field `{field}` row {}: expected an array, found {v}", i + 1)),
        };
        if row.len() > b {
            return err(format!("field `{field}` row {}: expected {b} entries, found {}", i + 1, row.len()));
        }
        let mut parsed = Vec::with_capacity(b);
        for j in 0..b {
            match row.get(j) {
                None | Some(Value::Null) => return err(format!("missing {what} ({},{})", i + 1, j + 1)),
                Some(v) => parsed.push(
                    serde_json::from_value(v.clone()).map_err(|e| ParseError(format!("{what} ({},{}): {e}", i + 1, j + 1)))?,
                ),
            }
        }
        out.push(parsed);
    }
    Ok(out)
}

/// Parses an environment file.
///
/// ```json
/// {"b": 2, "root_color": 1, "sibling_mode": "independent",
///  "entries": [[{"kind": "point_mass", "value": 0.5}, ...], ...]}
/// ```
///
/// With `"sibling_mode": "rwre_joint"` the labels come from a `rwre` object
/// (see [`parse_rwre_value`]) and `entries` must be absent.
pub fn parse_env(text: &str) -> Result<EnvSpec> {
    let m = object(text)?;
    reject_unknown(&m, &["b", "root_color", "sibling_mode", "entries", "rwre"])?;
    let b = get_b(&m)?;
    let root = get_color(&m, "root_color", b)?;
    let mode = match m.get("sibling_mode") {
        None => "independent",
        Some(Value::String(s)) => s.as_str(),
        Some(v) => return err(format!("field `sibling_mode`: expected a string, found {v}")),
    };
    match mode {
        "independent" => {
            if m.contains_key("rwre") {
                return err("field `rwre`: only allowed with sibling_mode \"rwre_joint\"");
            }
            let entries: Vec<Vec<DistSpec>> = matrix(&m, "entries", "entry", b)?;
            for (i, row) in entries.iter().enumerate() {
                for (j, d) in row.iter().enumerate() {
                    d.validate().map_err(|e| ParseError(format!("entry ({},{}): {e}", i + 1, j + 1)))?;
                }
            }
            EnvSpec::with_mode(entries, colortree_core::env::SiblingMode::Independent, root).map_err(|e| ParseError(e.to_string()))
        }
        "rwre_joint" => {
            if m.contains_key("entries") {
                return err("field `entries`: not allowed with sibling_mode \"rwre_joint\"; the labels are derived from `rwre`");
            }
            let Some(rwre) = m.get("rwre") else {
                return err("missing field `rwre` (required by sibling_mode \"rwre_joint\")");
            };
            let spec = parse_rwre_value(rwre, Some(b), root)?;
            Ok(spec.induced_env())
        }
        other => err(format!("field `sibling_mode`: expected \"independent\" or \"rwre_joint\", found \"{other}\"")),
    }
}

/// Jump-vector laws: `{"laws": [{"kind": "fixed", "p": [..]}, {"kind": "uniform_split", "h": 0.5}]}`,
/// one per colour, with components ordered (down, child 1, …, child b).
pub fn parse_rwre_value(v: &Value, b: Option<usize>, root: usize) -> Result<RwreSpec> {
    let Value::Object(m) = v else {
        return err(format!("field `rwre`: expected an object, found {v}"));
    };
    reject_unknown(m, &["laws", "root_color"])?;
    let laws = match m.get("laws") {
        Some(Value::Array(laws)) => laws,
        Some(v) => return err(format!("field `laws`: expected an array, found {v}")),
        None => return err("missing field `laws`"),
    };
    if let Some(b) = b {
        if laws.len() != b {
            return err(format!("field `laws`: expected {b} laws (one per colour), found {}", laws.len()));
        }
    }
    let laws = laws
        .iter()
        .enumerate()
        .map(|(i, l)| serde_json::from_value::<JumpLaw>(l.clone()).map_err(|e| ParseError(format!("law {}: {e}", i + 1))))
        .collect::<Result<Vec<_>>>()?;
    let root = if m.contains_key("root_color") { get_color(m, "root_color", laws.len())? } else { root };
    RwreSpec::new(laws, root).map_err(|e| ParseError(format!("field `laws`: {e}")))
}

/// A standalone jump-vector file (the `rwre` object of an environment file).
pub fn parse_rwre(text: &str) -> Result<RwreSpec> {
    let v: Value = serde_json::from_str(text).map_err(|e| ParseError(format!("invalid JSON: {e}")))?;
    parse_rwre_value(&v, None, 0)
}

/// Branching-walk step laws:
///
/// ```json
/// {"b": 2, "start_type": 1, "steps": [[{"kind": "normal", "mu": 0, "sigma": 1}, ...], ...]}
/// ```
pub fn parse_brw(text: &str) -> Result<BrwSpec> {
    let m = object(text)?;
    reject_unknown(&m, &["b", "start_type", "steps"])?;
    let b = get_b(&m)?;
    let start = get_color(&m, "start_type", b)?;
    let steps: Vec<Vec<StepLaw>> = matrix(&m, "steps", "step", b)?;
    for (i, row) in steps.iter().enumerate() {
        for (j, law) in row.iter().enumerate() {
            law.validate().map_err(|e| ParseError(format!("step ({},{}): {e}", i + 1, j + 1)))?;
        }
    }
    BrwSpec::new(steps, start).map_err(|e| ParseError(e.to_string()))
}

/// Environment as JSON in the file format, for manifests.
pub fn env_to_value(env: &EnvSpec) -> Value {
    match env.sibling_mode() {
        colortree_core::env::SiblingMode::Independent => serde_json::json!({
            "b": env.b(),
            "root_color": env.root_color() + 1,
            "sibling_mode": "independent",
            "entries": env.entries(),
        }),
        colortree_core::env::SiblingMode::RwreJoint(spec) => serde_json::json!({
            "b": env.b(),
            "root_color": env.root_color() + 1,
            "sibling_mode": "rwre_joint",
            "rwre": rwre_to_value(spec),
        }),
    }
}

pub fn rwre_to_value(spec: &RwreSpec) -> Value {
    serde_json::json!({ "laws": spec.laws(), "root_color": spec.root_color() + 1 })
}

pub fn brw_to_value(spec: &BrwSpec) -> Value {
    serde_json::json!({ "b": spec.b(), "start_type": spec.start_type() + 1, "steps": spec.steps() })
}
