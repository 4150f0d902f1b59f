use std::path::PathBuf;

use clap::ValueEnum;
use hyperdes::des::{ObsId, StateSet, ValidatedFsa};
use hyperdes::kripke::{build_kripke, build_modified_kripke, export_dot, KripkeStructure};
use serde_json::{json, Value};

use crate::{emit_json, load_model, CliError, EXIT_HOLDS};

#[derive(clap::Args, Debug)]
pub struct InspectArgs {
    #[arg(long)]
    model: PathBuf,
    #[arg(long, value_enum)]
    what: What,
    /// Comma-separated observation sequence α (for `estimates`); "" is the
    /// empty sequence.
    #[arg(long, default_value = "")]
    obs: String,
    /// Comma-separated continuation β: also report the delayed estimate of
    /// the instant after α given αβ.
    #[arg(long)]
    delay: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum What {
    Kripke,
    ModifiedKripke,
    Observer,
    Estimates,
}

fn kripke_json(k: &KripkeStructure) -> Value {
    let nodes: Vec<Value> = (0..k.num_nodes())
        .map(|i| {
            json!({
                "id": i,
                "name": k.node_name(i),
                "label": k.label_text(i),
                "initial": k.is_initial(i),
            })
        })
        .collect();
    let edges: Vec<Value> = k.edges().map(|(a, b)| json!([a, b])).collect();
    json!({
        "modified": k.is_modified(),
        "num_nodes": k.num_nodes(),
        "num_edges": k.num_edges(),
        "initial": k.initial_nodes(),
        "nodes": nodes,
        "edges": edges,
        "dot": export_dot(k),
    })
}

fn state_names(fsa: &ValidatedFsa, s: &StateSet) -> Vec<String> {
    s.iter().map(|&x| fsa.state_name(x).to_string()).collect()
}

fn obs_seq(fsa: &ValidatedFsa, text: &str) -> Result<Vec<ObsId>, CliError> {
    let names: Vec<&str> = text.split(',').map(str::trim).filter(|s| !s.is_empty()).collect();
    fsa.obs_sequence(&names).map_err(|e| CliError::new("usage", e.to_string()))
}

pub fn run(args: &InspectArgs) -> Result<u8, CliError> {
    let fsa = load_model(&args.model)?;
    let body = match args.what {
        What::Kripke => kripke_json(&build_kripke(&fsa)),
        What::ModifiedKripke => {
            kripke_json(&build_modified_kripke(&build_kripke(&fsa)).map_err(hyperdes::Error::from)?)
        }
        What::Observer => {
            let obs = fsa.build_observer();
            let nodes: Vec<Value> = obs
                .nodes
                .iter()
                .enumerate()
                .map(|(i, n)| json!({ "id": i, "estimate": state_names(&fsa, n) }))
                .collect();
            let edges: Vec<Value> = obs
                .edges
                .iter()
                .map(|(&(a, o), &b)| json!({ "from": a, "obs": fsa.obs_name(o), "to": b }))
                .collect();
            json!({
                "num_nodes": obs.nodes.len(),
                "num_edges": obs.num_edges(),
                "nodes": nodes,
                "edges": edges,
                "dot": obs.export_dot(&fsa),
            })
        }
        What::Estimates => {
            let alpha = obs_seq(&fsa, &args.obs)?;
            let names = |s: &[ObsId]| -> Vec<&str> { s.iter().map(|&o| fsa.obs_name(o)).collect() };
            let mut v = json!({
                "observations": names(&alpha),
                "initial": state_names(&fsa, &fsa.initial_state_estimate(&alpha)),
                "current": state_names(&fsa, &fsa.current_state_estimate(&alpha)),
            });
            if let Some(d) = &args.delay {
                let beta = obs_seq(&fsa, d)?;
                v["continuation"] = json!(names(&beta));
                v["delayed"] = json!(state_names(&fsa, &fsa.delayed_state_estimate(&alpha, &beta)));
            }
            v
        }
    };
    emit_json(args.out.as_deref(), &body)?;
    Ok(EXIT_HOLDS)
}
