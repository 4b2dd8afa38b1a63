//! The instance file format.
//!
//! A JSON document:
//!
//! ```text
//! {
//!   "format_version": 1,
//!   "p": 2,
//!   "groups": [[0,1],[2,3]],
//!   "K": 2,
//!   "costs": [
//!     [1,3,2,0],
//!     [2,0,1,4]
//!   ]
//! }
//! ```
//!
//! with optional `"names"` (one string per tool) and free-form `"metadata"`.
//! [`write_instance`] emits this canonical layout, one cost row per line.

use serde_json::{Map, Value};

use crate::error::{Error, Result};
use crate::generators::LabelCoverInstance;
use crate::instance::{validate, Instance};

pub const FORMAT_VERSION: u64 = 1;

#[derive(Debug, Clone, PartialEq)]
pub struct InstanceFile {
    pub instance: Instance,
    pub metadata: Option<Map<String, Value>>,
}

pub fn parse_instance(text: &str) -> Result<Instance> {
    parse_instance_file(text).map(|f| f.instance)
}

pub fn parse_instance_file(text: &str) -> Result<InstanceFile> {
    let doc: Value = serde_json::from_str(text).map_err(|e| {
        Error::Parse(vec![format!(
            "line {} column {}: {}",
            e.line(),
            e.column(),
            e
        )])
    })?;
    let Value::Object(obj) = doc else {
        return Err(Error::Parse(vec!["document is not an object".into()]));
    };
    let mut errors = Vec::new();

    for key in obj.keys() {
        if !matches!(
            key.as_str(),
            "format_version" | "p" | "groups" | "K" | "costs" | "names" | "metadata"
        ) {
            errors.push(format!("{key}: unknown field"));
        }
    }
    if let Some(v) = obj.get("format_version") {
        if v.as_u64() != Some(FORMAT_VERSION) {
            errors.push(format!("format_version: unsupported version {v}"));
        }
    }

    let groups = match obj.get("groups") {
        None => {
            errors.push("groups: missing".into());
            Vec::new()
        }
        Some(v) => index_lists(v, &mut errors),
    };
    let costs = match obj.get("costs") {
        None => {
            errors.push("costs: missing".into());
            Vec::new()
        }
        Some(v) => cost_rows(v, &mut errors),
    };
    match obj.get("p").map(Value::as_u64) {
        None => errors.push("p: missing".into()),
        Some(None) => errors.push("p: not a nonnegative integer".into()),
        Some(Some(p)) if p as usize != groups.len() => {
            errors.push(format!("p: declares {p} groups but {} are listed", groups.len()))
        }
        _ => {}
    }
    match obj.get("K").map(Value::as_u64) {
        None => errors.push("K: missing".into()),
        Some(None) => errors.push("K: not a nonnegative integer".into()),
        Some(Some(k)) if k as usize != costs.len() => {
            errors.push(format!("K: declares {k} scenarios but {} cost rows are listed", costs.len()))
        }
        _ => {}
    }
    let names = match obj.get("names") {
        None => None,
        Some(Value::Array(items)) => {
            let names: Vec<String> = items
                .iter()
                .enumerate()
                .filter_map(|(i, v)| match v.as_str() {
                    Some(s) => Some(s.to_string()),
                    None => {
                        errors.push(format!("names[{i}]: not a string"));
                        None
                    }
                })
                .collect();
            Some(names)
        }
        Some(_) => {
            errors.push("names: not an array".into());
            None
        }
    };
    let metadata = match obj.get("metadata") {
        None => None,
        Some(Value::Object(m)) => Some(m.clone()),
        Some(_) => {
            errors.push("metadata: not an object".into());
            None
        }
    };

    if !errors.is_empty() {
        return Err(Error::Parse(errors));
    }
    let violations = validate(&groups, &costs);
    if !violations.is_empty() {
        return Err(Error::Parse(
            violations
                .iter()
                .map(|v| {
                    let field = match v {
                        crate::instance::Violation::RaggedCosts { row, .. } => format!("costs[{row}]"),
                        crate::instance::Violation::NoScenarios => "costs".into(),
                        _ => "groups".into(),
                    };
                    format!("{field}: {v}")
                })
                .collect(),
        ));
    }
    let mut instance = Instance::new(groups, costs)?;
    if let Some(names) = names {
        instance = instance
            .with_names(names)
            .map_err(|e| Error::Parse(vec![format!("names: {e}")]))?;
    }
    Ok(InstanceFile { instance, metadata })
}

fn index_lists(v: &Value, errors: &mut Vec<String>) -> Vec<Vec<usize>> {
    let Value::Array(groups) = v else {
        errors.push("groups: not an array".into());
        return Vec::new();
    };
    groups
        .iter()
        .enumerate()
        .map(|(i, g)| match g {
            Value::Array(items) => items
                .iter()
                .enumerate()
                .filter_map(|(j, t)| match t.as_u64() {
                    Some(t) => Some(t as usize),
                    None => {
                        errors.push(format!("groups[{i}][{j}]: {t} is not a tool index"));
                        None
                    }
                })
                .collect(),
            _ => {
                errors.push(format!("groups[{i}]: not an array"));
                Vec::new()
            }
        })
        .collect()
}

fn cost_rows(v: &Value, errors: &mut Vec<String>) -> Vec<Vec<u64>> {
    let Value::Array(rows) = v else {
        errors.push("costs: not an array".into());
        return Vec::new();
    };
    rows.iter()
        .enumerate()
        .map(|(k, row)| match row {
            Value::Array(items) => items
                .iter()
                .enumerate()
                .map(|(j, c)| match c {
                    Value::Number(num) => {
                        if let Some(u) = num.as_u64() {
                            u
                        } else {
                            let what = if num.as_i64().is_some_and(|i| i < 0)
                                || num.as_f64().is_some_and(|f| f < 0.0)
                            {
                                "negative cost"
                            } else if num.as_f64().is_some_and(|f| f.fract() != 0.0) {
                                "fractional cost"
                            } else {
                                "cost out of range"
                            };
                            errors.push(format!("costs[{k}][{j}]: {what} {num}"));
                            0
                        }
                    }
                    other => {
                        errors.push(format!("costs[{k}][{j}]: {other} is not a number"));
                        0
                    }
                })
                .collect(),
            _ => {
                errors.push(format!("costs[{k}]: not an array"));
                Vec::new()
            }
        })
        .collect()
}

pub fn write_instance(instance: &Instance) -> String {
    write_instance_file(&InstanceFile {
        instance: instance.clone(),
        metadata: None,
    })
}

pub fn write_instance_file(file: &InstanceFile) -> String {
    let inst = &file.instance;
    let mut out = String::from("{\n");
    out.push_str(&format!("  \"format_version\": {FORMAT_VERSION},\n"));
    out.push_str(&format!("  \"p\": {},\n", inst.num_groups()));
    out.push_str(&format!("  \"groups\": {},\n", json(inst.groups())));
    out.push_str(&format!("  \"K\": {},\n", inst.num_scenarios()));
    out.push_str("  \"costs\": [\n");
    let rows: Vec<String> = inst
        .costs()
        .iter()
        .map(|row| format!("    {}", json(row)))
        .collect();
    out.push_str(&rows.join(",\n"));
    out.push_str("\n  ]");
    if let Some(names) = inst.names() {
        out.push_str(&format!(",\n  \"names\": {}", json(names)));
    }
    if let Some(meta) = &file.metadata {
        out.push_str(&format!(",\n  \"metadata\": {}", json(meta)));
    }
    out.push_str("\n}\n");
    out
}

fn json<T: serde::Serialize + ?Sized>(v: &T) -> String {
    serde_json::to_string(v).expect("serializable")
}

pub fn parse_label_cover(text: &str) -> Result<LabelCoverInstance> {
    let lc: LabelCoverInstance = serde_json::from_str(text).map_err(|e| {
        Error::Parse(vec![format!("line {} column {}: {}", e.line(), e.column(), e)])
    })?;
    lc.check()?;
    Ok(lc)
}
