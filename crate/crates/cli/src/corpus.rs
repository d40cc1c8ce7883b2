//! Fixture corpus: JSON files pairing a state with expected reports.
//!
//! A fixture looks like
//!
//! ```json
//! {
//!   "name": "GHZ",
//!   "state": "|000> + |111>",
//!   "expect": { "analyze": { "class": "c_balanced", "z": [1, 1] } }
//! }
//! ```
//!
//! `state` is an expression or a state JSON object, and `flip_terms`
//! optionally names a column subset for a flip-outcome section. The state is
//! normalized unless `"normalize": false`. Every key under `expect` must match
//! the computed document; objects match on the keys given, arrays
//! element-wise, and numbers within [`NUMERIC_TOL`].

use std::fmt::Write as _;
use std::path::Path;

use balancelab::balance;
use balancelab::classify;
use balancelab::spinflip;
use balancelab::statekit::{self, parse_state, State, StateJson};
use balancelab::topo;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

pub const NUMERIC_TOL: f64 = 1e-9;

#[derive(Debug, thiserror::Error)]
pub enum CorpusError {
    #[error("corpus directory {0} not found")]
    Missing(String),
    #[error("cannot read corpus directory {path}: {message}")]
    Io { path: String, message: String },
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct Fixture {
    name: String,
    state: Value,
    #[serde(default = "yes")]
    normalize: bool,
    #[serde(default)]
    flip_terms: Option<Vec<usize>>,
    expect: Value,
}

fn yes() -> bool {
    true
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FixtureResult {
    pub file: String,
    pub name: Option<String>,
    pub pass: bool,
    pub mismatches: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusSummary {
    pub total: usize,
    pub passed: usize,
    pub results: Vec<FixtureResult>,
}

impl CorpusSummary {
    pub fn table(&self) -> String {
        let mut out = String::new();
        for r in &self.results {
            let mark = if r.pass { "PASS" } else { "FAIL" };
            let _ = writeln!(out, "{mark} {} ({})", r.file, r.name.as_deref().unwrap_or("?"));
            for m in &r.mismatches {
                let _ = writeln!(out, "     {m}");
            }
        }
        let _ = writeln!(out, "{}/{} fixtures passed", self.passed, self.total);
        out
    }
}

/// Runs every `*.json` file in `dir`, in file-name order.
pub fn run_fixture_corpus(dir: &Path) -> Result<CorpusSummary, CorpusError> {
    if !dir.is_dir() {
        return Err(CorpusError::Missing(dir.display().to_string()));
    }
    let io = |e: std::io::Error| CorpusError::Io {
        path: dir.display().to_string(),
        message: e.to_string(),
    };
    let mut files: Vec<_> = std::fs::read_dir(dir)
        .map_err(io)?
        .collect::<Result<Vec<_>, _>>()
        .map_err(io)?
        .into_iter()
        .map(|e| e.path())
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    files.sort();
    let results: Vec<FixtureResult> = files
        .iter()
        .map(|p| {
            let file = p
                .file_name()
                .map_or_else(String::new, |n| n.to_string_lossy().into_owned());
            run_file(p, file)
        })
        .collect();
    Ok(CorpusSummary {
        total: results.len(),
        passed: results.iter().filter(|r| r.pass).count(),
        results,
    })
}

fn run_file(path: &Path, file: String) -> FixtureResult {
    let broken = |name: Option<String>, msg: String| FixtureResult {
        file: file.clone(),
        name,
        pass: false,
        mismatches: vec![msg],
    };
    let text = match std::fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) => return broken(None, format!("unreadable: {e}")),
    };
    let fx: Fixture = match serde_json::from_str(&text) {
        Ok(f) => f,
        Err(e) => return broken(None, format!("invalid fixture: {e}")),
    };
    let actual = match describe(&fx) {
        Ok(v) => v,
        Err(e) => return broken(Some(fx.name), format!("evaluation failed: {e}")),
    };
    let mut mismatches = Vec::new();
    if !fx.expect.is_object() {
        mismatches.push("expect must be an object".to_string());
    }
    compare(&fx.expect, &actual, "expect", &mut mismatches);
    FixtureResult {
        file,
        name: Some(fx.name),
        pass: mismatches.is_empty(),
        mismatches,
    }
}

fn load_state(v: &Value) -> balancelab::Result<State> {
    match v {
        Value::String(expr) => Ok(parse_state(expr)?),
        other => {
            let j: StateJson =
                serde_json::from_value(other.clone()).map_err(|e| balancelab::Error::Json(e.to_string()))?;
            State::try_from(j)
        }
    }
}

/// The document fixtures are matched against.
fn describe(fx: &Fixture) -> balancelab::Result<Value> {
    let raw = load_state(&fx.state)?;
    let s = if fx.normalize { statekit::normalize(&raw)? } else { raw };
    let report = balance::balance_report(&s)?;
    let structure = classify::classify_structure(&s)?;
    let mut doc = json!({
        "analyze": report,
        "structure": structure,
        "invariants": crate::invariant_values(&s).map_err(|e| balancelab::Error::Precondition(e.to_string()))?,
        "phases": {
            "predicted": report.z.as_ref().filter(|z| report.irreducible && z.sum() != 0).map(topo::predicted_phase_set),
            "loops": topo::z_rotation_loops(&s, 12)?,
        },
    });
    if s.qubits() == 3 {
        let t = classify::classify3(&s)?;
        doc["classify3"] = json!({
            "bits": t.bits.iter().map(|&b| b as u8).collect::<Vec<_>>(),
            "label": t.label,
        });
    }
    if let Some(terms) = &fx.flip_terms {
        let z = report
            .z
            .clone()
            .filter(|_| report.irreducible)
            .ok_or_else(|| balancelab::Error::Precondition("flip_terms needs an irreducible state".into()))?;
        let a = balance::a_matrix_of(&s)?;
        doc["flip"] = serde_json::to_value(spinflip::flip_outcome(&a, &z, terms)?).expect("serializable");
    }
    Ok(doc)
}

fn compare(expected: &Value, actual: &Value, path: &str, out: &mut Vec<String>) {
    match (expected, actual) {
        (Value::Object(e), Value::Object(a)) => {
            for (k, ev) in e {
                let p = format!("{path}.{k}");
                match a.get(k) {
                    Some(av) => compare(ev, av, &p, out),
                    None => out.push(format!("{p}: missing")),
                }
            }
        }
        (Value::Array(e), Value::Array(a)) => {
            if e.len() != a.len() {
                out.push(format!("{path}: expected {} items, found {}", e.len(), a.len()));
                return;
            }
            for (i, (ev, av)) in e.iter().zip(a).enumerate() {
                compare(ev, av, &format!("{path}[{i}]"), out);
            }
        }
        (Value::Number(e), Value::Number(a)) => {
            let (e, a) = (e.as_f64().unwrap_or(f64::NAN), a.as_f64().unwrap_or(f64::NAN));
            if (e - a).abs() > NUMERIC_TOL || e.is_nan() || a.is_nan() {
                out.push(format!("{path}: expected {e}, found {a}"));
            }
        }
        (e, a) if e == a => {}
        (e, a) => out.push(format!("{path}: expected {e}, found {a}")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn partial_objects_match() {
        let mut out = Vec::new();
        compare(
            &json!({"a": 1, "b": [1.0, 2]}),
            &json!({"a": 1.0000000001, "b": [1, 2], "c": 3}),
            "x",
            &mut out,
        );
        assert!(out.is_empty(), "{out:?}");
        compare(&json!({"a": [1]}), &json!({"a": [1, 2]}), "x", &mut out);
        compare(&json!({"d": null}), &json!({}), "x", &mut out);
        assert_eq!(out.len(), 2);
    }
}
