#![allow(dead_code)]

use hyperdes::des::{validate_fsa, Fsa, ObsId, StateSet, ValidatedFsa};
use hyperdes::io::parse_model;

pub fn fixture_text(name: &str) -> String {
    let path = format!("{}/fixtures/{name}.json", env!("CARGO_MANIFEST_DIR"));
    std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{path}: {e}"))
}

pub fn fixture(name: &str) -> ValidatedFsa {
    validate_fsa(parse_model(&fixture_text(name)).unwrap()).unwrap()
}

pub fn states(fsa: &ValidatedFsa, names: &[&str]) -> StateSet {
    fsa.states_from_names(names).unwrap()
}

pub fn obs(fsa: &ValidatedFsa, names: &[&str]) -> Vec<ObsId> {
    fsa.obs_sequence(names).unwrap()
}

pub fn names(fsa: &ValidatedFsa, s: &StateSet) -> Vec<String> {
    s.iter().map(|&x| fsa.state_name(x).to_string()).collect()
}

/// One state `x` with an observable self-loop `s/o`.
pub fn trivial() -> ValidatedFsa {
    let fsa = Fsa::builder()
        .states(["x"])
        .events(["s"])
        .transition("x", "s", "x")
        .initial(["x"])
        .mask("s", Some("o"))
        .build()
        .unwrap();
    validate_fsa(fsa).unwrap()
}

/// Every observation sequence over the model's alphabet up to length `n`.
pub fn all_sequences(fsa: &ValidatedFsa, n: usize) -> Vec<Vec<ObsId>> {
    let mut out = vec![Vec::new()];
    let mut frontier = vec![Vec::new()];
    for _ in 0..n {
        let mut next = Vec::new();
        for s in &frontier {
            for o in fsa.obs_ids() {
                let mut t: Vec<ObsId> = s.clone();
                t.push(o);
                next.push(t);
            }
        }
        out.extend(next.iter().cloned());
        frontier = next;
    }
    out
}

/// A fixture with its JSON document edited before parsing.
pub fn fixture_edit(name: &str, edit: impl FnOnce(&mut serde_json::Value)) -> Result<ValidatedFsa, String> {
    let mut doc: serde_json::Value = serde_json::from_str(&fixture_text(name)).unwrap();
    edit(&mut doc);
    let fsa = parse_model(&doc.to_string()).map_err(|e| e.to_string())?;
    validate_fsa(fsa).map_err(|e| e.to_string())
}

/// Removes the transition `[src, ev, dst]` from a model document.
pub fn remove_transition(doc: &mut serde_json::Value, t: [&str; 3]) {
    let ts = doc["transitions"].as_array_mut().unwrap();
    let before = ts.len();
    ts.retain(|v| v != &serde_json::json!(t));
    assert_eq!(ts.len() + 1, before, "transition {t:?} not found");
}

pub fn add_transition(doc: &mut serde_json::Value, t: [&str; 3]) {
    doc["transitions"].as_array_mut().unwrap().push(serde_json::json!(t));
}
