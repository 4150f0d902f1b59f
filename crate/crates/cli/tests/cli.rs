use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn fixture(name: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "..", "core", "fixtures", &format!("{name}.json")].iter().collect();
    p.to_string_lossy().into_owned()
}

fn hyperdes(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hyperdes")).args(args).output().expect("binary runs")
}

fn json_out(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("stdout is not JSON ({e}): {}", String::from_utf8_lossy(&o.stdout)))
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

#[test]
fn diagnosability_holds_on_g_diag() {
    let o = hyperdes(&["verify", "--model", &fixture("g_diag"), "--property", "diagnosability"]);
    assert_eq!(code(&o), 0);
    let v = json_out(&o);
    assert_eq!(v["exit_code"], 0);
    assert_eq!(v["results"][0]["status"], "holds");
    assert_eq!(v["results"][0]["hyper"]["holds"], true);
}

#[test]
fn predictability_violation_with_witness() {
    let o = hyperdes(&[
        "verify",
        "--model",
        &fixture("g_diag"),
        "--property",
        "predictability",
        "--emit-witness",
        "--check-witness",
    ]);
    assert_eq!(code(&o), 1);
    let v = json_out(&o);
    let r = &v["results"][0];
    assert_eq!(r["status"], "violated");
    let traces = r["hyper"]["witness"]["traces"].as_array().unwrap();
    assert_eq!(traces.len(), 2);
    assert_eq!(traces[0]["stem_labels"], serde_json::json!(["{0}", "{1,o1}"]));
    assert_eq!(traces[1]["cycle_labels"], serde_json::json!(["{5,o3}"]));

    // Without --emit-witness the witness is omitted.
    let o = hyperdes(&["verify", "--model", &fixture("g_diag"), "--property", "predictability"]);
    assert!(json_out(&o)["results"][0]["hyper"]["witness"].is_null());
}

#[test]
fn opacity_group_on_g_opa() {
    let o = hyperdes(&["verify", "--model", &fixture("g_opa"), "--all-opacity", "--engine", "both"]);
    assert_eq!(code(&o), 1);
    let v = json_out(&o);
    let status: Vec<(String, String)> = v["results"]
        .as_array()
        .unwrap()
        .iter()
        .map(|r| (r["property"].as_str().unwrap().to_string(), r["status"].as_str().unwrap().to_string()))
        .collect();
    assert_eq!(status.len(), 3);
    for (p, s) in &status {
        let expected = if p == "infinite-step-opacity" { "violated" } else { "holds" };
        assert_eq!(s, expected, "{p}");
    }
}

#[test]
fn group_flags_skip_inapplicable_properties() {
    let o = hyperdes(&["verify", "--model", &fixture("g_det"), "--all"]);
    assert_eq!(code(&o), 1);
    assert_eq!(json_out(&o)["results"].as_array().unwrap().len(), 4);
    assert!(String::from_utf8_lossy(&o.stderr).contains("skipping"));
}

#[test]
fn inapplicable_explicit_property_is_an_error() {
    let o = hyperdes(&["verify", "--model", &fixture("g_det"), "--property", "diagnosability"]);
    assert_eq!(code(&o), 2);
    assert!(json_out(&o)["error"]["message"].is_string());
}

#[test]
fn custom_formula() {
    let o = hyperdes(&[
        "verify",
        "--model",
        &fixture("g_det"),
        "--formula",
        "forall p1. exists p2. G (x:0@p1 -> x:0@p2)",
    ]);
    assert_eq!(code(&o), 0);
    let r = &json_out(&o)["results"][0];
    assert_eq!(r["alternation_depth"], 1);
    assert_eq!(r["status"], "holds");
}

#[test]
fn inspect_observer_and_structures() {
    let o = hyperdes(&["inspect", "--model", &fixture("g_det"), "--what", "observer"]);
    assert_eq!(code(&o), 0);
    let v = json_out(&o);
    assert_eq!(v["num_nodes"], 5);
    assert_eq!(v["num_edges"], 8);

    let v = json_out(&hyperdes(&["inspect", "--model", &fixture("g_diag"), "--what", "kripke"]));
    assert_eq!(v["num_nodes"], 8);
    assert_eq!(v["modified"], false);
    let v = json_out(&hyperdes(&["inspect", "--model", &fixture("g_diag"), "--what", "modified-kripke"]));
    assert_eq!(v["num_nodes"], 16);
    assert_eq!(v["modified"], true);
}

#[test]
fn inspect_estimates() {
    let g = fixture("g_det");
    let v = json_out(&hyperdes(&["inspect", "--model", &g, "--what", "estimates", "--obs", ""]));
    assert_eq!(v["observations"], serde_json::json!([]));
    let v = json_out(&hyperdes(&["inspect", "--model", &g, "--what", "estimates", "--obs", "o1", "--delay", "o2,o3"]));
    assert_eq!(v["delayed"], serde_json::json!(["1", "4"]));

    let o = hyperdes(&["inspect", "--model", &g, "--what", "estimates", "--obs", "zz"]);
    assert_eq!(code(&o), 2);
    assert!(json_out(&o)["error"].is_object());
}

#[test]
fn export_to_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("k.dot");
    let o = hyperdes(&[
        "export",
        "--model",
        &fixture("g_diag"),
        "--format",
        "dot-kripke",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0);
    assert!(o.stdout.is_empty());
    let dot = std::fs::read_to_string(&out).unwrap();
    assert!(dot.starts_with("digraph"));

    // The canonical model export parses back to the same verdicts.
    let model = dir.path().join("m.json");
    let o = hyperdes(&["export", "--model", &fixture("g_diag"), "--format", "model", "--out", model.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let o = hyperdes(&["verify", "--model", model.to_str().unwrap(), "--property", "diagnosability"]);
    assert_eq!(code(&o), 0);
}

#[test]
fn missing_model_file() {
    let o = hyperdes(&["verify", "--model", "/nonexistent/m.json", "--all"]);
    assert_eq!(code(&o), 2);
    assert_eq!(json_out(&o)["error"]["kind"], "io");
}

#[test]
fn small_fuzz_run_is_deterministic() {
    let run = || json_out(&hyperdes(&["fuzz", "--seed", "3", "--count", "20", "--max-states", "4"]));
    let (a, b) = (run(), run());
    assert_eq!(a, b);
}
