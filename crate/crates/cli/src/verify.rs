use std::path::PathBuf;

use clap::ValueEnum;
use hyperdes::formula::parse_formula;
use hyperdes::hyper::{self, replay_witness, Truth, Verdict, VerifyOptions, WeakRoute, DEFAULT_BOUND};
use hyperdes::io::verdict_value;
use hyperdes::kripke::{build_kripke, build_modified_kripke};
use hyperdes::oracle::{self, revalidate_evidence, revalidate_weak_witness, OracleConfig, Policy};
use hyperdes::des::ValidatedFsa;
use hyperdes::Property;
use serde_json::{json, Value};

use crate::{emit_json, load_model, CliError, EXIT_ERROR, EXIT_HOLDS, EXIT_INCONCLUSIVE, EXIT_VIOLATED};

#[derive(clap::Args, Debug)]
pub struct VerifyArgs {
    #[arg(long)]
    model: PathBuf,
    /// Property to check (kebab-case); repeatable.
    #[arg(long = "property", value_parser = parse_property)]
    properties: Vec<Property>,
    /// All nine properties, skipping those whose annotations are missing.
    #[arg(long)]
    all: bool,
    #[arg(long)]
    all_fault: bool,
    #[arg(long)]
    all_detectability: bool,
    #[arg(long)]
    all_opacity: bool,
    /// A custom HyperLTL formula instead of a named property.
    #[arg(long, conflicts_with_all = ["properties", "all", "all_fault", "all_detectability", "all_opacity"])]
    formula: Option<String>,
    /// Structure a custom formula is checked on.
    #[arg(long, value_enum, default_value_t = StructureArg::Plain, requires = "formula")]
    structure: StructureArg,
    #[arg(long, value_enum, default_value_t = EngineArg::Hyper)]
    engine: EngineArg,
    /// Lasso bound for ∃∀ formulas.
    #[arg(long, env = "HYPERDES_BOUND", default_value_t = DEFAULT_BOUND)]
    bound: usize,
    #[arg(long, value_enum, default_value_t = WeakRouteArg::Observer)]
    weak_route: WeakRouteArg,
    /// Oracle: longest observation sequence explored (default |X|²+1).
    #[arg(long)]
    max_obs_len: Option<usize>,
    /// Oracle: longest continuation explored (default |X|²+1).
    #[arg(long)]
    max_delay: Option<usize>,
    /// Oracle: report verdicts no bound argument backs instead of
    /// inconclusive.
    #[arg(long)]
    heuristic: bool,
    /// Include witnesses in the output.
    #[arg(long)]
    emit_witness: bool,
    /// Re-check every witness and piece of evidence independently.
    #[arg(long)]
    check_witness: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum EngineArg {
    Hyper,
    Oracle,
    Both,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum WeakRouteArg {
    Observer,
    Bounded,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum StructureArg {
    Plain,
    Modified,
}

fn parse_property(s: &str) -> Result<Property, String> {
    s.parse().map_err(|e: hyperdes::UnknownProperty| {
        let names: Vec<&str> = Property::ALL.iter().map(|p| p.name()).collect();
        format!("{e}; expected one of {}", names.join(", "))
    })
}

fn applicable(fsa: &ValidatedFsa, p: Property) -> bool {
    !(p.needs_faults() && fsa.fault_events().is_none() || p.needs_secrets() && fsa.secret_states().is_none())
}

/// Selected properties in selection order, without repeats. Properties
/// named explicitly must be applicable; group flags skip inapplicable ones
/// with a warning.
fn selection(args: &VerifyArgs, fsa: &ValidatedFsa) -> Result<Vec<Property>, CliError> {
    let mut out: Vec<Property> = Vec::new();
    for &p in &args.properties {
        if !applicable(fsa, p) {
            let what = if p.needs_faults() { "fault_events" } else { "secret_states" };
            return Err(CliError::new("model", format!("{p} needs the `{what}` annotation, which the model lacks")));
        }
        if !out.contains(&p) {
            out.push(p);
        }
    }
    let groups: [(bool, &[Property]); 4] = [
        (args.all, &Property::ALL),
        (args.all_fault, &Property::FAULT),
        (args.all_detectability, &Property::DETECTABILITY),
        (args.all_opacity, &Property::OPACITY),
    ];
    for (on, group) in groups {
        if !on {
            continue;
        }
        for &p in group {
            if out.contains(&p) {
                continue;
            }
            if applicable(fsa, p) {
                out.push(p);
            } else {
                eprintln!("warning: skipping {p}: annotation missing from the model");
            }
        }
    }
    if out.is_empty() {
        return Err(CliError::new("usage", "no applicable property selected (use --property, --all* or --formula)"));
    }
    Ok(out)
}

/// Outcome of one selected item.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Status {
    Holds,
    Violated,
    Inconclusive,
    Disagreement,
    CheckFailed,
}

impl Status {
    fn name(self) -> &'static str {
        match self {
            Status::Holds => "holds",
            Status::Violated => "violated",
            Status::Inconclusive => "inconclusive",
            Status::Disagreement => "disagreement",
            Status::CheckFailed => "witness-check-failed",
        }
    }

    fn of(t: Truth) -> Status {
        match t {
            Truth::True => Status::Holds,
            Truth::False => Status::Violated,
            Truth::Inconclusive => Status::Inconclusive,
        }
    }
}

fn verdict_json(v: &Verdict, emit_witness: bool) -> Value {
    let mut j = verdict_value(v);
    if !emit_witness {
        j["witness"] = Value::Null;
    }
    j
}

fn exit_code(statuses: &[Status]) -> u8 {
    if statuses.iter().any(|s| matches!(s, Status::Disagreement | Status::CheckFailed)) {
        EXIT_ERROR
    } else if statuses.contains(&Status::Violated) {
        EXIT_VIOLATED
    } else if statuses.contains(&Status::Inconclusive) {
        EXIT_INCONCLUSIVE
    } else {
        EXIT_HOLDS
    }
}

/// Independent re-check of a hyper verdict's witness. `None` when there is
/// nothing to check.
fn check_hyper(fsa: &ValidatedFsa, p: Property, v: &Verdict) -> Result<Option<bool>, CliError> {
    if p == Property::WeakDetectability && v.witness.is_some() && v.holds.is_true() {
        return Ok(Some(revalidate_weak_witness(fsa, v)));
    }
    let Some(w) = &v.witness else { return Ok(None) };
    let inst = hyper::instance(fsa, p)?;
    let ok = replay_witness(&inst.formula, w, &inst.structure).map_err(hyperdes::Error::from)?;
    Ok(Some(ok))
}

fn check_oracle(fsa: &ValidatedFsa, p: Property, v: &Verdict) -> Result<Option<bool>, CliError> {
    if !v.holds.is_false() {
        return Ok(None);
    }
    match &v.evidence {
        Some(e) => Ok(Some(revalidate_evidence(fsa, p, e)?)),
        None => Ok(None),
    }
}

fn run_property(args: &VerifyArgs, fsa: &ValidatedFsa, p: Property) -> Result<(Status, Value), CliError> {
    let opts = VerifyOptions {
        weak_route: match args.weak_route {
            WeakRouteArg::Observer => WeakRoute::Observer,
            WeakRouteArg::Bounded => WeakRoute::Bounded(args.bound),
        },
    };
    let cfg = OracleConfig {
        max_obs_len: args.max_obs_len,
        max_delay: args.max_delay,
        policy: if args.heuristic { Policy::Heuristic } else { Policy::Strict },
    };
    let hyper = match args.engine {
        EngineArg::Hyper | EngineArg::Both => Some(hyper::verify(fsa, p, &opts)?),
        EngineArg::Oracle => None,
    };
    let orac = match args.engine {
        EngineArg::Oracle | EngineArg::Both => Some(oracle::oracle_check(fsa, p, &cfg)?),
        EngineArg::Hyper => None,
    };
    let mut status = match (&hyper, &orac) {
        (Some(h), Some(o)) => {
            let conclusive = |v: &Verdict| !v.holds.is_inconclusive() && v.certified;
            if conclusive(h) && conclusive(o) && h.holds != o.holds {
                Status::Disagreement
            } else if conclusive(h) || !conclusive(o) {
                Status::of(h.holds)
            } else {
                Status::of(o.holds)
            }
        }
        (Some(v), None) | (None, Some(v)) => Status::of(v.holds),
        (None, None) => unreachable!("at least one engine runs"),
    };
    let mut out = json!({ "property": p.name() });
    if args.check_witness {
        let h = hyper.as_ref().map(|v| check_hyper(fsa, p, v)).transpose()?.flatten();
        let o = orac.as_ref().map(|v| check_oracle(fsa, p, v)).transpose()?.flatten();
        out["witness_check"] = json!({ "hyper": h, "oracle": o });
        if h == Some(false) || o == Some(false) {
            status = Status::CheckFailed;
        }
    }
    if let Some(h) = &hyper {
        out["hyper"] = verdict_json(h, args.emit_witness);
    }
    if let Some(o) = &orac {
        out["oracle"] = verdict_json(o, args.emit_witness);
    }
    out["status"] = json!(status.name());
    Ok((status, out))
}

fn run_formula(args: &VerifyArgs, fsa: &ValidatedFsa, text: &str) -> Result<(Status, Value), CliError> {
    if args.engine != EngineArg::Hyper {
        return Err(CliError::new("usage", "custom formulas are checked by the hyper engine only"));
    }
    let f = parse_formula(text).map_err(|e| CliError::new("formula", e.to_string()))?;
    let start = std::time::Instant::now();
    let plain = build_kripke(fsa);
    let k = match args.structure {
        StructureArg::Plain => plain,
        StructureArg::Modified => build_modified_kripke(&plain).map_err(hyperdes::Error::from)?,
    };
    let mut v = hyper::check_formula(&k, &f, args.bound).map_err(hyperdes::Error::from)?;
    v.formula = Some(f.to_string());
    v.elapsed = start.elapsed();
    let mut status = Status::of(v.holds);
    let mut out = json!({ "formula": f.to_string(), "alternation_depth": f.alternation_depth() });
    if args.check_witness {
        let ok = match &v.witness {
            Some(w) => Some(replay_witness(&f, w, &k).map_err(hyperdes::Error::from)?),
            None => None,
        };
        out["witness_check"] = json!({ "hyper": ok });
        if ok == Some(false) {
            status = Status::CheckFailed;
        }
    }
    out["hyper"] = verdict_json(&v, args.emit_witness);
    out["status"] = json!(status.name());
    Ok((status, out))
}

pub fn run(args: &VerifyArgs) -> Result<u8, CliError> {
    let fsa = load_model(&args.model)?;
    let mut statuses = Vec::new();
    let mut results = Vec::new();
    if let Some(text) = &args.formula {
        let (s, v) = run_formula(args, &fsa, text)?;
        statuses.push(s);
        results.push(v);
    } else {
        for p in selection(args, &fsa)? {
            let (s, v) = run_property(args, &fsa, p)?;
            eprintln!("{p}: {}", s.name());
            statuses.push(s);
            results.push(v);
        }
    }
    let code = exit_code(&statuses);
    let doc = json!({
        "model": fsa.fsa().name(),
        "results": results,
        "exit_code": code,
    });
    emit_json(args.out.as_deref(), &doc)?;
    Ok(code)
}
