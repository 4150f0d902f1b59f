//! Differential fuzzing of the model checkers against the oracle.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::{json, Value};

use super::{oracle_check, pumping_bound, revalidate_evidence, revalidate_weak_witness, OracleConfig, Policy};
use crate::des::{validate_fsa, Fsa, ValidatedFsa};
use crate::hyper::{self, check_exists_forall_bounded, replay_witness, Truth, Verdict, VerifyOptions};
use crate::Property;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FuzzConfig {
    pub seed: u64,
    pub count: usize,
    pub max_states: usize,
    pub max_events: usize,
    pub max_obs: usize,
    /// Lasso bound for the bounded `∃∀` weak-detectability cross-check.
    pub bound: usize,
}

impl Default for FuzzConfig {
    fn default() -> Self {
        FuzzConfig { seed: 1, count: 100, max_states: 6, max_events: 4, max_obs: 3, bound: 6 }
    }
}

/// A random automaton satisfying liveness and free of unobservable cycles,
/// with one fault event and a random secret set.
///
/// Each (state, event) pair gets a transition with probability
/// `min(1, 1.5/|Σ|)`, so about `1.5·|X|` edges are expected; at most a third
/// of the events are unobservable. Invalid draws are rejected and redrawn.
pub fn random_fsa(rng: &mut impl Rng, max_states: usize, max_events: usize, max_obs: usize) -> ValidatedFsa {
    loop {
        if let Some(fsa) = draw(rng, max_states.max(1), max_events.max(1), max_obs.max(1)) {
            return fsa;
        }
    }
}

fn draw(rng: &mut impl Rng, max_states: usize, max_events: usize, max_obs: usize) -> Option<ValidatedFsa> {
    let n = rng.gen_range(1..=max_states);
    let e = rng.gen_range(1..=max_events);
    let m = rng.gen_range(1..=max_obs);
    let states: Vec<String> = (0..n).map(|i| i.to_string()).collect();
    let events: Vec<String> = (0..e).map(|i| ((b'a' + i as u8) as char).to_string()).collect();
    let unobs = rng.gen_range(0..=e / 3);
    let mut order: Vec<usize> = (0..e).collect();
    order.shuffle(rng);
    let mut mask = vec![None; e];
    for &i in &order[unobs..] {
        mask[i] = Some(format!("o{}", rng.gen_range(1..=m)));
    }
    let p = (1.5 / e as f64).min(1.0);
    let mut b = Fsa::builder().name("random").states(states.clone()).events(events.clone());
    for x in &states {
        for ev in &events {
            if rng.gen_bool(p) {
                b = b.transition(x.as_str(), ev.as_str(), states.choose(rng).unwrap().as_str());
            }
        }
    }
    let init_count = rng.gen_range(1..=2.min(n));
    let initial: Vec<String> = states.choose_multiple(rng, init_count).cloned().collect();
    b = b.initial(initial);
    for (ev, o) in events.iter().zip(&mask) {
        b = b.mask(ev.as_str(), o.as_deref());
    }
    let fault = if unobs > 0 { order[rng.gen_range(0..unobs)] } else { rng.gen_range(0..e) };
    b = b.fault_events([events[fault].clone()]);
    let secret: Vec<String> = states.iter().filter(|_| rng.gen_bool(0.5)).cloned().collect();
    b = b.secret_states(secret);
    validate_fsa(b.build().ok()?).ok()
}

/// Per-property tallies.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PropertyStats {
    /// Certified oracle verdict equal to the exact verdict.
    pub agree: usize,
    /// Certified oracle verdict different from the exact verdict.
    pub disagree: usize,
    /// Oracle inconclusive under the strict policy.
    pub inconclusive: usize,
    /// Among inconclusive: the uncertified oracle answer matched anyway.
    pub uncertified_agree: usize,
    pub uncertified_mismatch: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FuzzDisagreement {
    pub instance: usize,
    pub property: Property,
    pub hyper: Truth,
    pub oracle: Truth,
    /// The oracle verdict was certified.
    pub certified: bool,
    pub model: Value,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct FuzzReport {
    pub config: Option<FuzzConfig>,
    pub stats: BTreeMap<Property, PropertyStats>,
    pub disagreements: Vec<FuzzDisagreement>,
    /// Uncertified mismatches (not failures), kept for inspection.
    pub uncertified_mismatches: Vec<FuzzDisagreement>,
    pub witnesses_checked: usize,
    pub witness_failures: usize,
    /// `instance:property` for each failed replay or revalidation.
    pub failure_cases: Vec<String>,
    pub weak_witnesses_checked: usize,
    pub weak_witness_failures: usize,
    pub evidence_checked: usize,
    pub evidence_failures: usize,
    /// Bounded `∃∀` said weakly detectable where the exact check said not.
    pub weak_bounded_true_exact_false: usize,
    pub weak_bounded_true_exact_false_models: Vec<Value>,
    /// The bounded check, when true, agreed with the exact check.
    pub weak_bounded_true_agree: usize,
    pub diag_bound_checked: usize,
    pub diag_bound_failures: usize,
    pub errors: Vec<String>,
}

impl FuzzReport {
    /// No certified disagreement, no failed witness, evidence or bound check.
    pub fn is_clean(&self) -> bool {
        self.disagreements.is_empty()
            && self.witness_failures == 0
            && self.weak_witness_failures == 0
            && self.evidence_failures == 0
            && self.diag_bound_failures == 0
            && self.errors.is_empty()
    }

    pub fn to_json(&self) -> Value {
        let cfg = self.config.clone().unwrap_or_default();
        let entry = |d: &FuzzDisagreement| {
            json!({
                "instance": d.instance,
                "property": d.property.name(),
                "hyper": d.hyper.to_string(),
                "oracle": d.oracle.to_string(),
                "certified": d.certified,
                "model": d.model,
            })
        };
        let stats: serde_json::Map<String, Value> = self
            .stats
            .iter()
            .map(|(p, s)| {
                (
                    p.name().to_string(),
                    json!({
                        "agree": s.agree,
                        "disagree": s.disagree,
                        "inconclusive": s.inconclusive,
                        "uncertified_agree": s.uncertified_agree,
                        "uncertified_mismatch": s.uncertified_mismatch,
                    }),
                )
            })
            .collect();
        json!({
            "schema": "hyperdes-fuzz-report",
            "version": 1,
            "config": {
                "seed": cfg.seed,
                "count": cfg.count,
                "max_states": cfg.max_states,
                "max_events": cfg.max_events,
                "max_obs": cfg.max_obs,
                "bound": cfg.bound,
            },
            "properties": stats,
            "disagreements": self.disagreements.iter().map(entry).collect::<Vec<_>>(),
            "uncertified_mismatches": self.uncertified_mismatches.iter().map(entry).collect::<Vec<_>>(),
            "witness_replay": {"checked": self.witnesses_checked, "failed": self.witness_failures},
            "failure_cases": self.failure_cases,
            "weak_witness_revalidation": {"checked": self.weak_witnesses_checked, "failed": self.weak_witness_failures},
            "evidence_revalidation": {"checked": self.evidence_checked, "failed": self.evidence_failures},
            "weak_bounded": {
                "true_agree": self.weak_bounded_true_agree,
                "true_but_exact_false": self.weak_bounded_true_exact_false,
                "models": self.weak_bounded_true_exact_false_models,
            },
            "diagnosability_bound": {"checked": self.diag_bound_checked, "failed": self.diag_bound_failures},
            "errors": self.errors,
            "clean": self.is_clean(),
        })
    }

    fn merge(&mut self, other: FuzzReport) {
        for (p, s) in other.stats {
            let e = self.stats.entry(p).or_default();
            e.agree += s.agree;
            e.disagree += s.disagree;
            e.inconclusive += s.inconclusive;
            e.uncertified_agree += s.uncertified_agree;
            e.uncertified_mismatch += s.uncertified_mismatch;
        }
        self.disagreements.extend(other.disagreements);
        self.uncertified_mismatches.extend(other.uncertified_mismatches);
        self.witnesses_checked += other.witnesses_checked;
        self.witness_failures += other.witness_failures;
        self.failure_cases.extend(other.failure_cases);
        self.weak_witnesses_checked += other.weak_witnesses_checked;
        self.weak_witness_failures += other.weak_witness_failures;
        self.evidence_checked += other.evidence_checked;
        self.evidence_failures += other.evidence_failures;
        self.weak_bounded_true_exact_false += other.weak_bounded_true_exact_false;
        self.weak_bounded_true_exact_false_models.extend(other.weak_bounded_true_exact_false_models);
        self.weak_bounded_true_agree += other.weak_bounded_true_agree;
        self.diag_bound_checked += other.diag_bound_checked;
        self.diag_bound_failures += other.diag_bound_failures;
        self.errors.extend(other.errors);
    }
}

/// The random automaton for instance `i` of a run seeded with `seed`.
pub fn fuzz_instance(cfg: &FuzzConfig, i: usize) -> ValidatedFsa {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(i as u64);
    random_fsa(&mut rng, cfg.max_states, cfg.max_events, cfg.max_obs)
}

/// Generates `cfg.count` automata and compares, for all nine properties,
/// the exact model-checking verdict with the oracle. Instances run in
/// parallel; results are merged in instance order, so the report is a
/// function of the configuration alone.
pub fn differential_fuzz(cfg: &FuzzConfig) -> FuzzReport {
    let parts: Vec<FuzzReport> = (0..cfg.count).into_par_iter().map(|i| run_instance(cfg, i)).collect();
    let mut report = FuzzReport { config: Some(cfg.clone()), ..FuzzReport::default() };
    for p in Property::ALL {
        report.stats.insert(p, PropertyStats::default());
    }
    for part in parts {
        report.merge(part);
    }
    report
}

fn run_instance(cfg: &FuzzConfig, i: usize) -> FuzzReport {
    let fsa = fuzz_instance(cfg, i);
    let mut r = FuzzReport::default();
    let model = crate::io::model_value(&fsa);
    let heuristic = OracleConfig { policy: Policy::Heuristic, ..OracleConfig::default() };
    for p in Property::ALL {
        let stats = r.stats.entry(p).or_default();
        let hv = match hyper::verify(&fsa, p, &VerifyOptions::default()) {
            Ok(v) => v,
            Err(e) => {
                r.errors.push(format!("instance {i}, {p}: model checker failed: {e}"));
                continue;
            }
        };
        let ov = match oracle_check(&fsa, p, &heuristic) {
            Ok(v) => v,
            Err(e) => {
                r.errors.push(format!("instance {i}, {p}: oracle failed: {e}"));
                continue;
            }
        };
        let record = |certified| FuzzDisagreement {
            instance: i,
            property: p,
            hyper: hv.holds,
            oracle: ov.holds,
            certified,
            model: model.clone(),
        };
        if ov.certified {
            if ov.holds == hv.holds {
                stats.agree += 1;
            } else {
                stats.disagree += 1;
                r.disagreements.push(record(true));
            }
        } else {
            stats.inconclusive += 1;
            if ov.holds == hv.holds {
                stats.uncertified_agree += 1;
            } else {
                stats.uncertified_mismatch += 1;
                r.uncertified_mismatches.push(record(false));
            }
        }

        let before = r.witness_failures + r.weak_witness_failures + r.evidence_failures;
        if let Err(e) = check_witnesses(&fsa, p, &hv, &ov, &mut r) {
            r.errors.push(format!("instance {i}, {p}: {e}"));
        }
        if r.witness_failures + r.weak_witness_failures + r.evidence_failures > before {
            r.failure_cases.push(format!("{i}:{p}"));
        }
    }

    // Bounded ∃∀ route for weak detectability.
    match hyper::instance(&fsa, Property::WeakDetectability)
        .map_err(|e| e.to_string())
        .and_then(|inst| check_exists_forall_bounded(&inst.structure, &inst.formula, cfg.bound).map_err(|e| e.to_string()))
    {
        Ok(bv) if bv.holds.is_true() => {
            if crate::oracle::weak_detectability_exact(&fsa).holds.is_true() {
                r.weak_bounded_true_agree += 1;
            } else {
                r.weak_bounded_true_exact_false += 1;
                r.weak_bounded_true_exact_false_models.push(model.clone());
            }
        }
        Ok(_) => {}
        Err(e) => r.errors.push(format!("instance {i}: bounded weak check failed: {e}")),
    }

    // Bound spot-check: a diagnosability violation shows up within |X|²+1
    // observations of delay.
    if let Ok(v) = hyper::verify(&fsa, Property::Diagnosability, &VerifyOptions::default()) {
        if v.holds.is_false() {
            r.diag_bound_checked += 1;
            let cfg = OracleConfig {
                max_delay: Some(pumping_bound(fsa.num_states())),
                policy: Policy::Heuristic,
                ..OracleConfig::default()
            };
            match oracle_check(&fsa, Property::Diagnosability, &cfg) {
                Ok(o) if o.holds.is_false() => {}
                _ => r.diag_bound_failures += 1,
            }
        }
    }
    r
}

fn check_witnesses(
    fsa: &ValidatedFsa,
    p: Property,
    hv: &Verdict,
    ov: &Verdict,
    r: &mut FuzzReport,
) -> Result<(), crate::Error> {
    // A negative weak-detectability verdict is a universal claim about the
    // observer and has no lasso witness; the definitional check covers it.
    if hv.holds.is_false() && p != Property::WeakDetectability {
        let inst = hyper::instance(fsa, p)?;
        r.witnesses_checked += 1;
        let ok = match &hv.witness {
            Some(w) => replay_witness(&inst.formula, w, &inst.structure)?,
            None => false,
        };
        if !ok {
            r.witness_failures += 1;
        }
    }
    if p == Property::WeakDetectability && hv.holds.is_true() {
        r.weak_witnesses_checked += 1;
        let inst = hyper::instance(fsa, p)?;
        let replayed = match &hv.witness {
            Some(w) => replay_witness(&inst.formula, w, &inst.structure)?,
            None => false,
        };
        if !(replayed && revalidate_weak_witness(fsa, hv)) {
            r.weak_witness_failures += 1;
        }
    }
    if ov.holds.is_false() && ov.certified && p != Property::WeakDetectability {
        if let Some(ev) = &ov.evidence {
            r.evidence_checked += 1;
            if !revalidate_evidence(fsa, p, ev)? {
                r.evidence_failures += 1;
            }
        }
    }
    if p == Property::Predictability && ov.holds.is_false() {
        if let Some(ev) = &ov.evidence {
            r.evidence_checked += 1;
            if !revalidate_evidence(fsa, p, ev)? {
                r.evidence_failures += 1;
            }
        }
    }
    Ok(())
}
