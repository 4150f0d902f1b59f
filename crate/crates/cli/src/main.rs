//! `hyperdes` — verify observational properties of discrete-event systems.
//!
//! stdout carries JSON only; diagnostics and summaries go to stderr.

mod inspect;
mod verify;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use hyperdes::des::{validate_fsa, ValidatedFsa};
use hyperdes::oracle::{differential_fuzz, FuzzConfig};
use hyperdes::{io, kripke};
use serde_json::{json, Value};

/// Exit codes.
pub const EXIT_HOLDS: u8 = 0;
pub const EXIT_VIOLATED: u8 = 1;
pub const EXIT_ERROR: u8 = 2;
pub const EXIT_INCONCLUSIVE: u8 = 3;

#[derive(Parser, Debug)]
#[command(name = "hyperdes", version, about = "HyperLTL-based verification of partially-observed discrete-event systems")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Decide one or more properties of a model.
    Verify(verify::VerifyArgs),
    /// Dump a derived structure (Kripke structure, observer, estimates) as JSON.
    Inspect(inspect::InspectArgs),
    /// Write a DOT rendering or the canonical model.
    Export(ExportArgs),
    /// Differential fuzzing of the model checker against the oracle.
    Fuzz(FuzzArgs),
}

#[derive(clap::Args, Debug)]
struct ExportArgs {
    #[arg(long)]
    model: PathBuf,
    #[arg(long, value_enum)]
    format: ExportFormat,
    /// Destination file; stdout if omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum ExportFormat {
    DotKripke,
    DotModifiedKripke,
    DotObserver,
    /// Canonical model JSON.
    Model,
}

#[derive(clap::Args, Debug)]
struct FuzzArgs {
    #[arg(long)]
    seed: u64,
    #[arg(long)]
    count: usize,
    #[arg(long, default_value_t = 5)]
    max_states: usize,
    #[arg(long, default_value_t = 4)]
    max_events: usize,
    #[arg(long, default_value_t = 3)]
    max_obs: usize,
    /// Lasso bound for the bounded weak-detectability cross-check.
    #[arg(long, default_value_t = 6)]
    bound: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

/// A failure reported as exit 2.
#[derive(Debug)]
pub struct CliError {
    pub kind: &'static str,
    pub message: String,
}

impl CliError {
    pub fn new(kind: &'static str, message: impl Into<String>) -> Self {
        CliError { kind, message: message.into() }
    }
}

impl From<hyperdes::Error> for CliError {
    fn from(e: hyperdes::Error) -> Self {
        CliError::new("error", e.to_string())
    }
}

pub fn load_model(path: &Path) -> Result<ValidatedFsa, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::new("io", format!("cannot read {}: {e}", path.display())))?;
    let fsa = io::parse_model(&text).map_err(|e| CliError::new("model", e.to_string()))?;
    validate_fsa(fsa).map_err(|e| CliError::new("model", e.to_string()))
}

/// Writes `text` to `out`, or to stdout.
pub fn emit(out: Option<&Path>, text: &str) -> Result<(), CliError> {
    match out {
        Some(p) => std::fs::write(p, text).map_err(|e| CliError::new("io", format!("cannot write {}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

pub fn emit_json(out: Option<&Path>, v: &Value) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(v).expect("JSON values serialize");
    text.push('\n');
    emit(out, &text)
}

fn export(args: &ExportArgs) -> Result<u8, CliError> {
    let fsa = load_model(&args.model)?;
    let text = match args.format {
        ExportFormat::DotKripke => kripke::export_dot(&kripke::build_kripke(&fsa)),
        ExportFormat::DotModifiedKripke => {
            let k = kripke::build_modified_kripke(&kripke::build_kripke(&fsa)).map_err(hyperdes::Error::from)?;
            kripke::export_dot(&k)
        }
        ExportFormat::DotObserver => fsa.build_observer().export_dot(&fsa),
        ExportFormat::Model => io::serialize_model(fsa.fsa()),
    };
    emit(args.out.as_deref(), &text)?;
    Ok(EXIT_HOLDS)
}

fn fuzz(args: &FuzzArgs) -> Result<u8, CliError> {
    let cfg = FuzzConfig {
        seed: args.seed,
        count: args.count,
        max_states: args.max_states,
        max_events: args.max_events,
        max_obs: args.max_obs,
        bound: args.bound,
    };
    let start = std::time::Instant::now();
    let report = differential_fuzz(&cfg);
    eprintln!(
        "fuzzed {} instances in {:.1}s: {} certified disagreement(s), {} witness failure(s)",
        cfg.count,
        start.elapsed().as_secs_f64(),
        report.disagreements.len(),
        report.witness_failures + report.weak_witness_failures,
    );
    emit_json(args.out.as_deref(), &report.to_json())?;
    Ok(if report.is_clean() { EXIT_HOLDS } else { EXIT_VIOLATED })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Verify(a) => verify::run(a),
        Command::Inspect(a) => inspect::run(a),
        Command::Export(a) => export(a),
        Command::Fuzz(a) => fuzz(a),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {}", e.message);
            println!("{}", json!({ "error": { "kind": e.kind, "message": e.message } }));
            ExitCode::from(EXIT_ERROR)
        }
    }
}
