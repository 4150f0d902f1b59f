//! Model files (JSON, schema v1) and verdict output.
//!
//! A model document:
//!
//! ```json
//! {
//!   "version": 1,
//!   "name": "example",
//!   "states": ["0", "1"],
//!   "events": ["a", "u"],
//!   "observations": ["o1"],
//!   "initial": ["0"],
//!   "transitions": [["0", "a", "1"], ["1", "u", "0"]],
//!   "mask": [["a", "o1"], ["u", "eps"]],
//!   "fault_events": ["u"],
//!   "secret_states": ["1"]
//! }
//! ```
//!
//! `observations` is optional (symbols are then taken from the mask in event
//! order); `name`, `fault_events` and `secret_states` are optional. `"eps"`
//! marks an unobservable event and cannot be an observation symbol.
//! Serialization is canonical: object keys sorted, arrays in declaration
//! order, transitions sorted by source then event declaration index.

use std::collections::{BTreeSet, HashSet};

use serde_json::{json, Map, Value};

use crate::des::{EventId, Fsa, ModelError, EPSILON_TOKEN};
use crate::hyper::{Mode, Truth, Verdict, WitnessKind};

pub const MODEL_VERSION: u64 = 1;
pub const VERDICT_VERSION: u64 = 1;

#[derive(Debug, thiserror::Error, Clone, PartialEq, Eq)]
pub enum IoError {
    #[error("invalid JSON at line {line}, column {column}: {msg}")]
    Json { line: usize, column: usize, msg: String },
    #[error("{path}: {msg}")]
    SchemaError { path: String, msg: String },
    #[error("{path}: duplicate transition from `{state}` on `{event}`")]
    DuplicateTransition { path: String, state: String, event: String },
    #[error("{path}: unknown identifier `{id}`")]
    UnknownId { path: String, id: String },
    #[error("{path}: `eps` is reserved and cannot be declared as an observation")]
    ReservedSymbol { path: String },
    #[error("{path}: {source}")]
    Model { path: String, source: ModelError },
}

fn schema(path: impl Into<String>, msg: impl Into<String>) -> IoError {
    IoError::SchemaError { path: path.into(), msg: msg.into() }
}

fn str_at<'a>(v: &'a Value, path: &str) -> Result<&'a str, IoError> {
    v.as_str().ok_or_else(|| schema(path, "expected a string"))
}

fn array_at<'a>(v: &'a Value, path: &str) -> Result<&'a Vec<Value>, IoError> {
    v.as_array().ok_or_else(|| schema(path, "expected an array"))
}

/// A list of distinct identifier strings.
fn id_list(doc: &Map<String, Value>, key: &str) -> Result<Option<Vec<String>>, IoError> {
    let Some(v) = doc.get(key) else { return Ok(None) };
    let path = format!("$.{key}");
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for (i, item) in array_at(v, &path)?.iter().enumerate() {
        let p = format!("{path}[{i}]");
        let s = str_at(item, &p)?;
        if !seen.insert(s) {
            return Err(schema(p, format!("duplicate identifier `{s}`")));
        }
        out.push(s.to_string());
    }
    Ok(Some(out))
}

fn known(ids: &[String], id: &str, path: String) -> Result<(), IoError> {
    if ids.iter().any(|x| x == id) {
        Ok(())
    } else {
        Err(IoError::UnknownId { path, id: id.to_string() })
    }
}

/// Parses a model document. Structural problems are reported with a JSON
/// path; semantic checks (liveness, unobservable cycles) are left to
/// [`validate_fsa`](crate::des::validate_fsa).
pub fn parse_model(text: &str) -> Result<Fsa, IoError> {
    let v: Value = serde_json::from_str(text)
        .map_err(|e| IoError::Json { line: e.line(), column: e.column(), msg: e.to_string() })?;
    let doc = v.as_object().ok_or_else(|| schema("$", "expected an object"))?;
    const KEYS: [&str; 11] = [
        "schema",
        "version",
        "name",
        "states",
        "events",
        "observations",
        "initial",
        "transitions",
        "mask",
        "fault_events",
        "secret_states",
    ];
    if let Some(k) = doc.keys().find(|k| !KEYS.contains(&k.as_str())) {
        return Err(schema(format!("$.{k}"), "unknown field"));
    }
    match doc.get("version") {
        Some(Value::Number(n)) if n.as_u64() == Some(MODEL_VERSION) => {}
        Some(_) => return Err(schema("$.version", format!("unsupported version (expected {MODEL_VERSION})"))),
        None => return Err(schema("$.version", "missing field")),
    }
    if let Some(s) = doc.get("schema") {
        if str_at(s, "$.schema")? != "hyperdes-model" {
            return Err(schema("$.schema", "expected \"hyperdes-model\""));
        }
    }
    let required = |key: &str| -> Result<Vec<String>, IoError> {
        id_list(doc, key)?.ok_or_else(|| schema(format!("$.{key}"), "missing field"))
    };
    let states = required("states")?;
    let events = required("events")?;
    let initial = required("initial")?;
    let observations = id_list(doc, "observations")?;
    if let Some(obs) = &observations {
        if let Some(i) = obs.iter().position(|o| o == EPSILON_TOKEN) {
            return Err(IoError::ReservedSymbol { path: format!("$.observations[{i}]") });
        }
    }
    for (i, x) in initial.iter().enumerate() {
        known(&states, x, format!("$.initial[{i}]"))?;
    }

    let mut b = Fsa::builder().states(states.clone()).events(events.clone()).initial(initial);
    if let Some(name) = doc.get("name") {
        b = b.name(str_at(name, "$.name")?);
    }
    if let Some(obs) = &observations {
        b = b.observations(obs.clone());
    }

    let transitions = array_at(doc.get("transitions").ok_or_else(|| schema("$.transitions", "missing field"))?, "$.transitions")?;
    let mut keys = HashSet::new();
    for (i, t) in transitions.iter().enumerate() {
        let p = format!("$.transitions[{i}]");
        let t = array_at(t, &p)?;
        if t.len() != 3 {
            return Err(schema(p, "expected [source, event, target]"));
        }
        let src = str_at(&t[0], &format!("{p}[0]"))?;
        let ev = str_at(&t[1], &format!("{p}[1]"))?;
        let dst = str_at(&t[2], &format!("{p}[2]"))?;
        known(&states, src, format!("{p}[0]"))?;
        known(&events, ev, format!("{p}[1]"))?;
        known(&states, dst, format!("{p}[2]"))?;
        if !keys.insert((src, ev)) {
            return Err(IoError::DuplicateTransition { path: p, state: src.into(), event: ev.into() });
        }
        b = b.transition(src, ev, dst);
    }

    let mask = array_at(doc.get("mask").ok_or_else(|| schema("$.mask", "missing field"))?, "$.mask")?;
    let mut masked = HashSet::new();
    for (i, m) in mask.iter().enumerate() {
        let p = format!("$.mask[{i}]");
        let m = array_at(m, &p)?;
        if m.len() != 2 {
            return Err(schema(p, "expected [event, observation]"));
        }
        let ev = str_at(&m[0], &format!("{p}[0]"))?;
        let o = str_at(&m[1], &format!("{p}[1]"))?;
        known(&events, ev, format!("{p}[0]"))?;
        if !masked.insert(ev) {
            return Err(schema(p, format!("event `{ev}` masked twice")));
        }
        if o != EPSILON_TOKEN {
            if let Some(obs) = &observations {
                known(obs, o, format!("{p}[1]"))?;
            }
        }
        b = b.mask(ev, (o != EPSILON_TOKEN).then_some(o));
    }
    if let Some(ev) = events.iter().find(|e| !masked.contains(e.as_str())) {
        return Err(schema("$.mask", format!("event `{ev}` has no mask entry")));
    }

    if let Some(faults) = id_list(doc, "fault_events")? {
        for (i, e) in faults.iter().enumerate() {
            known(&events, e, format!("$.fault_events[{i}]"))?;
        }
        b = b.fault_events(faults);
    }
    if let Some(secret) = id_list(doc, "secret_states")? {
        for (i, x) in secret.iter().enumerate() {
            known(&states, x, format!("$.secret_states[{i}]"))?;
        }
        b = b.secret_states(secret);
    }
    b.build().map_err(|source| {
        let path = match &source {
            ModelError::UnusedObservation(_) => "$.observations",
            ModelError::NoStates => "$.states",
            ModelError::NoInitialStates => "$.initial",
            _ => "$",
        };
        IoError::Model { path: path.into(), source }
    })
}

/// Canonical JSON value of a model.
pub fn model_value(fsa: &Fsa) -> Value {
    let mut doc = Map::new();
    doc.insert("version".into(), json!(MODEL_VERSION));
    if let Some(name) = fsa.name() {
        doc.insert("name".into(), json!(name));
    }
    doc.insert("states".into(), json!(fsa.state_names()));
    doc.insert("events".into(), json!(fsa.event_names()));
    doc.insert("observations".into(), json!(fsa.obs_names()));
    let initial: Vec<&str> = fsa.initial_states().iter().map(|&x| fsa.state_name(x)).collect();
    doc.insert("initial".into(), json!(initial));
    let transitions: Vec<Value> = fsa
        .transitions()
        .map(|(x, e, y)| json!([fsa.state_name(x), fsa.event_name(e), fsa.state_name(y)]))
        .collect();
    doc.insert("transitions".into(), Value::Array(transitions));
    let mask: Vec<Value> = fsa
        .event_ids()
        .map(|e| json!([fsa.event_name(e), fsa.mask(e).map_or(EPSILON_TOKEN, |o| fsa.obs_name(o))]))
        .collect();
    doc.insert("mask".into(), Value::Array(mask));
    if let Some(f) = fsa.fault_events() {
        let f: BTreeSet<EventId> = f.clone();
        doc.insert("fault_events".into(), json!(f.iter().map(|&e| fsa.event_name(e)).collect::<Vec<_>>()));
    }
    if let Some(s) = fsa.secret_states() {
        doc.insert("secret_states".into(), json!(s.iter().map(|&x| fsa.state_name(x)).collect::<Vec<_>>()));
    }
    Value::Object(doc)
}

/// Canonical, pretty-printed model document.
pub fn serialize_model(fsa: &Fsa) -> String {
    let mut s = serde_json::to_string_pretty(&model_value(fsa)).expect("JSON values serialize");
    s.push('\n');
    s
}

/// JSON value of a verdict.
pub fn verdict_value(v: &Verdict) -> Value {
    let (mode, bound) = match v.mode {
        Mode::Exact => ("exact", Value::Null),
        Mode::Bounded(n) => ("bounded", json!(n)),
    };
    let witness = v.witness.as_ref().map_or(Value::Null, |w| {
        let lassos = std::iter::once(&w.pi1).chain(w.pi2.as_ref());
        let traces: Vec<Value> = lassos
            .zip(&w.rendered)
            .enumerate()
            .map(|(i, (l, r))| {
                json!({
                    "var": if i == 0 { "p1" } else { "p2" },
                    "stem": l.stem,
                    "cycle": l.cycle,
                    "stem_nodes": r.stem,
                    "cycle_nodes": r.cycle,
                    "stem_labels": r.stem_labels,
                    "cycle_labels": r.cycle_labels,
                })
            })
            .collect();
        json!({
            "kind": match w.kind {
                WitnessKind::Refutation => "refutation",
                WitnessKind::Confirmation => "confirmation",
            },
            "traces": traces,
        })
    });
    let evidence = v.evidence.as_ref().map_or(Value::Null, |e| {
        json!({
            "observations": e.observations,
            "continuation": e.continuation,
            "estimate": e.estimate,
            "string": e.string,
            "prefix_estimates": e.prefix_estimates,
            "note": e.note,
        })
    });
    json!({
        "schema": "hyperdes-verdict",
        "version": VERDICT_VERSION,
        "property": v.property.map(|p| p.name()),
        "holds": v.holds.as_bool(),
        "status": match v.holds {
            Truth::True => "holds",
            Truth::False => "violated",
            Truth::Inconclusive => "inconclusive",
        },
        "mode": mode,
        "bound": bound,
        "engine": v.engine.name(),
        "certified": v.certified,
        "formula": v.formula,
        "witness": witness,
        "evidence": evidence,
        "elapsed_ms": v.elapsed.as_secs_f64() * 1000.0,
    })
}

pub fn serialize_verdict(v: &Verdict) -> String {
    serde_json::to_string_pretty(&verdict_value(v)).expect("JSON values serialize")
}
