//! Run reports and their JSON/CSV encodings.
//!
//! Non-finite floats are written as `null` in JSON and as `inf`, `-inf`
//! or `NaN` in CSV.

use std::fmt::Write as _;

use serde::Serialize;
use serde_json::Value;

use crate::config::ScenarioConfig;
use crate::run::{Outcome, Verdict};

#[derive(Debug, Clone, Serialize)]
pub struct Provenance {
    pub tool: &'static str,
    pub version: &'static str,
    pub seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_time_s: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub scenario: ScenarioConfig,
    pub outputs: Value,
    pub verdicts: Vec<Verdict>,
    pub passed: bool,
    pub provenance: Provenance,
}

impl RunReport {
    pub fn new(
        scenario: ScenarioConfig,
        outcome: Outcome,
        seed: u64,
        wall_time_s: Option<f64>,
    ) -> Self {
        Self {
            scenario,
            passed: outcome.verdicts.iter().all(|v| v.pass),
            outputs: outcome.outputs,
            verdicts: outcome.verdicts,
            provenance: Provenance {
                tool: env!("CARGO_PKG_NAME"),
                version: env!("CARGO_PKG_VERSION"),
                seed,
                wall_time_s,
            },
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    /// One `record,label,key,value` row per leaf. `label` is the dotted path
    /// to the enclosing object or array.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("record,label,key,value\n");
        let scenario = serde_json::to_value(&self.scenario).expect("scenario serializes");
        flatten(&mut out, "scenario", "", &scenario);
        flatten(&mut out, "output", "", &self.outputs);
        for v in &self.verdicts {
            row(
                &mut out,
                "verdict",
                "",
                &v.name,
                if v.pass { "pass" } else { "fail" },
            );
        }
        row(
            &mut out,
            "verdict",
            "",
            "passed",
            if self.passed { "pass" } else { "fail" },
        );
        let prov = serde_json::to_value(&self.provenance).expect("provenance serializes");
        flatten(&mut out, "provenance", "", &prov);
        out
    }
}

fn join(label: &str, key: &str) -> String {
    if label.is_empty() {
        key.to_string()
    } else {
        format!("{label}.{key}")
    }
}

fn flatten(out: &mut String, record: &str, label: &str, value: &Value) {
    match value {
        Value::Object(map) => {
            for (k, v) in map {
                leaf_or_descend(out, record, label, k, v);
            }
        }
        Value::Array(items) => {
            for (i, v) in items.iter().enumerate() {
                leaf_or_descend(out, record, label, &i.to_string(), v);
            }
        }
        other => row(out, record, label, "value", &scalar(other)),
    }
}

fn leaf_or_descend(out: &mut String, record: &str, label: &str, key: &str, v: &Value) {
    match v {
        Value::Object(_) | Value::Array(_) => flatten(out, record, &join(label, key), v),
        other => row(out, record, label, key, &scalar(other)),
    }
}

fn scalar(v: &Value) -> String {
    match v {
        Value::Null => "null".into(),
        Value::Bool(b) => b.to_string(),
        Value::Number(n) => match (n.as_i64(), n.as_u64()) {
            (Some(i), _) => i.to_string(),
            (_, Some(u)) => u.to_string(),
            _ => format!("{:.16e}", n.as_f64().unwrap_or(f64::NAN)),
        },
        Value::String(s) => s.clone(),
        _ => unreachable!(),
    }
}

fn quote(field: &str) -> String {
    if field.contains([',', '"', '\n']) {
        format!("\"{}\"", field.replace('"', "\"\""))
    } else {
        field.to_string()
    }
}

fn row(out: &mut String, record: &str, label: &str, key: &str, value: &str) {
    let _ = writeln!(
        out,
        "{},{},{},{}",
        record,
        quote(label),
        quote(key),
        quote(value)
    );
}
