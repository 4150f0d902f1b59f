//! Definition-level checking from state estimates.
//!
//! Every property is decided by exploring observation sequences breadth
//! first and tracking just enough knowledge — a current estimate, a relation
//! of anchor/current states, fault delays — to evaluate its definition.
//! Knowledge values are deduplicated, so once no new value appears the
//! exploration is exhaustive ("saturated"). Otherwise a verdict is
//! *certified* only when a pumping argument covers the explored depth: with
//! `n` states, a pair of indistinguishable runs surviving `n²+1` steps
//! repeats a state pair and can be extended forever.
//!
//! Uncertified verdicts become inconclusive under [`Policy::Strict`].

pub mod fuzz;
mod weak;

use std::collections::{BTreeMap, BTreeSet};

pub use fuzz::{differential_fuzz, random_fsa, FuzzConfig, FuzzDisagreement, FuzzReport, PropertyStats};
pub use weak::{revalidate_weak_witness, weak_detectability_exact};

use crate::des::{FaultPartition, ObsId, StatePairs, StateId, StateSet, ValidatedFsa};
use crate::formula::FormulaError;
use crate::hyper::{EngineError, EngineId, Evidence, Mode, Truth, Verdict};
use crate::{Error, Property};

/// What to do with verdicts no bound argument backs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Policy {
    /// Report them as inconclusive.
    #[default]
    Strict,
    /// Report them as found, flagged uncertified.
    Heuristic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct OracleConfig {
    /// Longest observation sequence explored; `None` is `|X|²+1`.
    pub max_obs_len: Option<usize>,
    /// Longest continuation (fault delay, delayed-estimate horizon);
    /// `None` is `|X|²+1`.
    pub max_delay: Option<usize>,
    pub policy: Policy,
}

/// `|X|²+1`.
pub fn pumping_bound(num_states: usize) -> usize {
    num_states * num_states + 1
}

/// Level-set iterations allowed when looking for periodicity.
const LEVEL_CAP: usize = 1024;

struct Bounds {
    len: usize,
    delay: usize,
    pump: usize,
}

impl OracleConfig {
    fn bounds(&self, fsa: &ValidatedFsa) -> Result<Bounds, EngineError> {
        let pump = pumping_bound(fsa.num_states());
        let len = self.max_obs_len.unwrap_or(pump);
        let delay = self.max_delay.unwrap_or(pump);
        if len == 0 || delay == 0 {
            return Err(EngineError::ZeroBound);
        }
        Ok(Bounds { len, delay, pump })
    }
}

/// Result of one definition-level check.
struct Outcome {
    holds: bool,
    certified: bool,
    evidence: Option<Evidence>,
}

impl Outcome {
    fn holds(certified: bool) -> Self {
        Outcome { holds: true, certified, evidence: None }
    }

    fn violated(certified: bool, evidence: Evidence) -> Self {
        Outcome { holds: false, certified, evidence: Some(evidence) }
    }
}

/// Checks `property` on `fsa` against its definition.
pub fn oracle_check(fsa: &ValidatedFsa, property: Property, cfg: &OracleConfig) -> Result<Verdict, Error> {
    let start = std::time::Instant::now();
    if property.needs_secrets() && fsa.secret_states().is_none() {
        return Err(FormulaError::MissingAnnotation("secret states").into());
    }
    let (outcome, len) = if property.needs_faults() {
        let (model, part) = fsa.refine_fault_partition()?;
        let b = cfg.bounds(&model)?;
        let o = match property {
            Property::Diagnosability => diagnosability(&model, &part, &b),
            _ => predictability(&model, &part, &b),
        };
        (o, b.len)
    } else {
        let b = cfg.bounds(fsa)?;
        let o = match property {
            Property::IDetectability => i_detectability(fsa, &b),
            Property::StrongDetectability => strong_detectability(fsa, &b),
            Property::WeakDetectability => weak::weak_detectability_definitional(fsa),
            Property::DelayedDetectability => delayed_detectability(fsa, &b),
            Property::InitialStateOpacity => initial_state_opacity(fsa, &b),
            Property::CurrentStateOpacity => current_state_opacity(fsa, &b),
            Property::InfiniteStepOpacity => infinite_step_opacity(fsa, &b),
            Property::Diagnosability | Property::Predictability => unreachable!(),
        };
        (o, b.len)
    };
    let holds = if outcome.certified || cfg.policy == Policy::Heuristic {
        Truth::from_bool(outcome.holds)
    } else {
        Truth::Inconclusive
    };
    let mut v = Verdict::new(holds, Mode::Bounded(len), EngineId::Oracle);
    v.certified = outcome.certified;
    v.evidence = outcome.evidence;
    v.property = Some(property);
    v.elapsed = start.elapsed();
    Ok(v)
}

// ---------------------------------------------------------------------------
// Exploration

struct Explored<K> {
    hit: Option<(Vec<ObsId>, K)>,
    saturated: bool,
}

/// A search node: knowledge, parent link (index, observation), depth.
type SearchNode<K> = (K, Option<(usize, ObsId)>, usize);

/// Breadth-first search over the knowledge reachable from `init` by
/// observation sequences of length at most `max_depth`, stopping at the first
/// value satisfying `bad`. `step` returns `None` when the extended sequence
/// leaves the observed language.
fn explore<K: Ord + Clone>(
    fsa: &ValidatedFsa,
    init: K,
    max_depth: usize,
    step: impl Fn(&K, ObsId) -> Option<K>,
    bad: impl Fn(&K) -> bool,
) -> Explored<K> {
    if bad(&init) {
        return Explored { hit: Some((Vec::new(), init)), saturated: false };
    }
    let mut nodes: Vec<SearchNode<K>> = vec![(init.clone(), None, 0)];
    let mut seen: BTreeSet<K> = BTreeSet::from([init]);
    let mut saturated = true;
    let mut i = 0;
    while i < nodes.len() {
        let depth = nodes[i].2;
        for o in fsa.obs_ids() {
            let Some(next) = step(&nodes[i].0, o) else { continue };
            if seen.contains(&next) {
                continue;
            }
            if depth == max_depth {
                saturated = false;
                continue;
            }
            seen.insert(next.clone());
            nodes.push((next.clone(), Some((i, o)), depth + 1));
            if bad(&next) {
                let mut path = Vec::new();
                let mut cur = nodes.len() - 1;
                while let Some((p, o)) = nodes[cur].1 {
                    path.push(o);
                    cur = p;
                }
                path.reverse();
                return Explored { hit: Some((path, next)), saturated: false };
            }
        }
        i += 1;
    }
    Explored { hit: None, saturated }
}

/// Distinct knowledge values reachable at each exact depth, with the first
/// observation sequence (in breadth-first order) producing each.
struct Levels<K: Ord> {
    current: BTreeMap<K, Vec<ObsId>>,
}

impl<K: Ord + Clone> Levels<K> {
    fn new(init: K) -> Self {
        Levels { current: BTreeMap::from([(init, Vec::new())]) }
    }

    fn advance(&mut self, fsa: &ValidatedFsa, step: impl Fn(&K, ObsId) -> Option<K>) {
        let mut next: BTreeMap<K, Vec<ObsId>> = BTreeMap::new();
        // Representatives are chosen lexicographically-least.
        let mut reps: Vec<(&K, &Vec<ObsId>)> = self.current.iter().collect();
        reps.sort_by(|a, b| a.1.cmp(b.1));
        for (k, alpha) in reps {
            for o in fsa.obs_ids() {
                if let Some(n) = step(k, o) {
                    next.entry(n).or_insert_with(|| {
                        let mut a = alpha.clone();
                        a.push(o);
                        a
                    });
                }
            }
        }
        self.current = next;
    }

    fn keys(&self) -> BTreeSet<K> {
        self.current.keys().cloned().collect()
    }
}

fn names(fsa: &ValidatedFsa, set: &StateSet) -> Vec<String> {
    set.iter().map(|&x| fsa.state_name(x).to_string()).collect()
}

fn obs_names(fsa: &ValidatedFsa, alpha: &[ObsId]) -> Vec<String> {
    alpha.iter().map(|&o| fsa.obs_name(o).to_string()).collect()
}

fn proj1(rel: &StatePairs) -> StateSet {
    rel.iter().map(|p| p.0).collect()
}

fn nonempty<T: Ord>(s: BTreeSet<T>) -> Option<BTreeSet<T>> {
    (!s.is_empty()).then_some(s)
}

fn initial_pairs(fsa: &ValidatedFsa) -> StatePairs {
    let mut rel = StatePairs::new();
    for &x0 in fsa.initial_states() {
        for x in fsa.unobservable_reach(&StateSet::from([x0])) {
            rel.insert((x0, x));
        }
    }
    rel
}

// ---------------------------------------------------------------------------
// Fault properties (on the refined automaton)

/// Current estimate split into normal states and fault states with the
/// largest number of observations seen since the fault (capped).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
struct FaultKnowledge {
    normal: StateSet,
    faulty: BTreeMap<StateId, usize>,
}

fn diagnosability(fsa: &ValidatedFsa, part: &FaultPartition, b: &Bounds) -> Outcome {
    let cap = b.delay;
    let mut init = FaultKnowledge { normal: StateSet::new(), faulty: BTreeMap::new() };
    for x in fsa.initial_estimate() {
        if part.is_fault(x) {
            init.faulty.insert(x, 0);
        } else {
            init.normal.insert(x);
        }
    }
    let step = |k: &FaultKnowledge, o: ObsId| {
        let mut next = FaultKnowledge { normal: StateSet::new(), faulty: BTreeMap::new() };
        let sources = k.normal.iter().map(|&x| (x, None)).chain(k.faulty.iter().map(|(&x, &d)| (x, Some(d))));
        for (x, delay) in sources {
            for y in fsa.observable_step(&StateSet::from([x]), o) {
                if part.is_fault(y) {
                    let d = delay.map_or(0, |d| (d + 1).min(cap));
                    let e = next.faulty.entry(y).or_insert(d);
                    *e = (*e).max(d);
                } else {
                    next.normal.insert(y);
                }
            }
        }
        (!next.normal.is_empty() || !next.faulty.is_empty()).then_some(next)
    };
    let bad = |k: &FaultKnowledge| !k.normal.is_empty() && k.faulty.values().any(|&d| d >= cap);
    let ex = explore(fsa, init, b.len + b.delay, step, bad);
    match ex.hit {
        Some((alpha, k)) => {
            let mut est = k.normal.clone();
            est.extend(k.faulty.keys());
            Outcome::violated(
                b.delay >= b.pump,
                Evidence {
                    observations: obs_names(fsa, &alpha),
                    estimate: names(fsa, &est),
                    note: format!("a fault has gone undetected for {cap} observations alongside a normal state"),
                    ..Evidence::default()
                },
            )
        }
        None => Outcome::holds(ex.saturated || (b.len >= b.pump && b.delay >= b.pump)),
    }
}

/// Current estimate and whether some prefix estimate (including this one)
/// had all its normal states inside the indicator set.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
struct AlarmKnowledge {
    estimate: StateSet,
    alarmed: bool,
}

fn predictability(fsa: &ValidatedFsa, part: &FaultPartition, b: &Bounds) -> Outcome {
    let boundary = fsa.boundary_states(part);
    let indicator = fsa.indicator_states(part);
    let alarm = |c: &StateSet| c.iter().filter(|x| !part.is_fault(**x)).all(|x| indicator.contains(x));
    let init = fsa.initial_estimate();
    let init = AlarmKnowledge { alarmed: alarm(&init), estimate: init };
    let step = |k: &AlarmKnowledge, o: ObsId| {
        let c = nonempty(fsa.step_closed(&k.estimate, o))?;
        Some(AlarmKnowledge { alarmed: k.alarmed || alarm(&c), estimate: c })
    };
    let bad = |k: &AlarmKnowledge| !k.alarmed && k.estimate.iter().any(|x| boundary.contains(x));
    let ex = explore(fsa, init, b.len, step, bad);
    // No length bound backs either answer, so the verdict is never
    // certified; the ∀∀ check is authoritative for this property.
    match ex.hit {
        Some((alpha, k)) => {
            let x = *k.estimate.iter().find(|x| boundary.contains(x)).unwrap();
            let s = fsa.string_for(&alpha, x).map(|s| s.iter().map(|&e| fsa.event_name(e).to_string()).collect());
            let prefix_estimates =
                (0..=alpha.len()).map(|i| names(fsa, &fsa.current_state_estimate(&alpha[..i]))).collect();
            Outcome::violated(
                false,
                Evidence {
                    observations: obs_names(fsa, &alpha),
                    estimate: names(fsa, &k.estimate),
                    string: s,
                    prefix_estimates,
                    note: format!(
                        "boundary state {} reached before any estimate's normal part lay within the indicator states {}",
                        fsa.state_name(x),
                        fsa.fmt_states(&indicator)
                    ),
                    ..Evidence::default()
                },
            )
        }
        None => Outcome::holds(false),
    }
}

/// Re-derives predictability evidence from scratch: the string must be
/// normal, end in a boundary state and be observed as the evidence's
/// sequence, and no prefix estimate may have its normal part inside the
/// indicator set.
pub fn revalidate_predictability(fsa: &ValidatedFsa, evidence: &Evidence) -> Result<bool, Error> {
    let (model, part) = fsa.refine_fault_partition()?;
    let alpha = model.obs_sequence(&evidence.observations)?;
    let Some(s) = &evidence.string else { return Ok(false) };
    let s = s.iter().map(|e| model.event_id(e)).collect::<Result<Vec<_>, _>>()?;
    let boundary = model.boundary_states(&part);
    let indicator = model.indicator_states(&part);
    let faults = model.fault_events().cloned().unwrap_or_default();
    if s.iter().any(|e| faults.contains(e)) || model.project(&s) != alpha {
        return Ok(false);
    }
    let Some(ends) = model.run_string(&s) else { return Ok(false) };
    if !ends.iter().any(|x| boundary.contains(x)) {
        return Ok(false);
    }
    for i in 0..=alpha.len() {
        let c = model.current_state_estimate(&alpha[..i]);
        if evidence.prefix_estimates.get(i) != Some(&names(&model, &c)) {
            return Ok(false);
        }
        if c.iter().filter(|x| !part.is_fault(**x)).all(|x| indicator.contains(x)) {
            return Ok(false);
        }
    }
    Ok(true)
}

// ---------------------------------------------------------------------------
// Detectability

fn i_detectability(fsa: &ValidatedFsa, b: &Bounds) -> Outcome {
    let mut levels = Levels::new(initial_pairs(fsa));
    let mut history: Vec<BTreeSet<StatePairs>> = Vec::new();
    for depth in 0..=b.len {
        let violating = levels.current.iter().find(|(r, _)| proj1(r).len() >= 2);
        let Some((r, alpha)) = violating else {
            // Initial-state estimates only shrink along an observation, so
            // a level without ambiguity settles the property.
            return Outcome::holds(true);
        };
        let keys = levels.keys();
        let periodic = history.contains(&keys);
        if depth >= b.pump || periodic || depth == b.len {
            let evidence = Evidence {
                observations: obs_names(fsa, alpha),
                estimate: names(fsa, &proj1(r)),
                note: format!("initial state still ambiguous after {depth} observations"),
                ..Evidence::default()
            };
            return Outcome::violated(depth >= b.pump || periodic, evidence);
        }
        history.push(keys);
        levels.advance(fsa, |r, o| nonempty(fsa.advance_pairs(r, o)));
    }
    unreachable!("loop returns by depth == max_obs_len")
}

fn strong_detectability(fsa: &ValidatedFsa, b: &Bounds) -> Outcome {
    let cap = b.len.max(LEVEL_CAP);
    let mut levels = Levels::new(fsa.initial_estimate());
    let mut history: Vec<BTreeMap<StateSet, Vec<ObsId>>> = Vec::new();
    for _ in 0..=cap {
        if let Some(first) = history.iter().position(|h| h.keys().eq(levels.current.keys())) {
            // Levels are periodic from `first` on: the property holds iff
            // every estimate in the period is a singleton.
            let bad = history[first..].iter().flat_map(|h| h.iter()).find(|(c, _)| c.len() != 1);
            return match bad {
                None => Outcome::holds(true),
                Some((c, alpha)) => Outcome::violated(
                    true,
                    Evidence {
                        observations: obs_names(fsa, alpha),
                        estimate: names(fsa, c),
                        note: format!(
                            "ambiguous estimates recur in every window past {first} observations (period {})",
                            history.len() - first
                        ),
                        ..Evidence::default()
                    },
                ),
            };
        }
        history.push(levels.current.clone());
        levels.advance(fsa, |c, o| nonempty(fsa.step_closed(c, o)));
    }
    let last = history.last().unwrap();
    match last.iter().find(|(c, _)| c.len() != 1) {
        None => Outcome::holds(false),
        Some((c, alpha)) => Outcome::violated(
            false,
            Evidence {
                observations: obs_names(fsa, alpha),
                estimate: names(fsa, c),
                note: "level sets did not become periodic within the exploration cap".into(),
                ..Evidence::default()
            },
        ),
    }
}

/// Reachable current-state estimates (breadth first), each with its first
/// observation sequence; `saturated` is false if the depth cap cut it short.
fn estimates(fsa: &ValidatedFsa, max_depth: usize) -> (Vec<(StateSet, Vec<ObsId>)>, bool) {
    let mut out: Vec<(StateSet, Vec<ObsId>)> = vec![(fsa.initial_estimate(), Vec::new())];
    let mut seen: BTreeSet<StateSet> = BTreeSet::from([out[0].0.clone()]);
    let mut saturated = true;
    let mut i = 0;
    while i < out.len() {
        for o in fsa.obs_ids() {
            let Some(c) = nonempty(fsa.step_closed(&out[i].0, o)) else { continue };
            if seen.contains(&c) {
                continue;
            }
            if out[i].1.len() == max_depth {
                saturated = false;
                continue;
            }
            seen.insert(c.clone());
            let mut alpha = out[i].1.clone();
            alpha.push(o);
            out.push((c, alpha));
        }
        i += 1;
    }
    (out, saturated)
}

fn delayed_detectability(fsa: &ValidatedFsa, b: &Bounds) -> Outcome {
    let (anchors, saturated) = estimates(fsa, b.len);
    for (c, alpha) in &anchors {
        if c.len() < 2 {
            continue;
        }
        let mut levels = Levels::new(fsa.anchor_pairs(c));
        let mut history: Vec<BTreeSet<StatePairs>> = Vec::new();
        for depth in 0..=b.delay {
            let Some((r, beta)) = levels.current.iter().find(|(r, _)| proj1(r).len() >= 2) else { break };
            let keys = levels.keys();
            let periodic = history.contains(&keys);
            if depth == b.delay || periodic {
                return Outcome::violated(
                    depth >= b.pump || periodic,
                    Evidence {
                        observations: obs_names(fsa, alpha),
                        continuation: Some(obs_names(fsa, beta)),
                        estimate: names(fsa, &proj1(r)),
                        note: format!("state at instant {} still ambiguous after {depth} more observations", alpha.len()),
                        ..Evidence::default()
                    },
                );
            }
            history.push(keys);
            levels.advance(fsa, |r, o| nonempty(fsa.advance_pairs(r, o)));
        }
    }
    Outcome::holds(saturated || (b.len >= b.pump && b.delay >= b.pump))
}

// ---------------------------------------------------------------------------
// Opacity

fn secret(fsa: &ValidatedFsa) -> &StateSet {
    fsa.secret_states().expect("checked by oracle_check")
}

fn initial_state_opacity(fsa: &ValidatedFsa, b: &Bounds) -> Outcome {
    let s = secret(fsa);
    let ex = explore(
        fsa,
        initial_pairs(fsa),
        b.len,
        |r, o| nonempty(fsa.advance_pairs(r, o)),
        |r| proj1(r).is_subset(s),
    );
    match ex.hit {
        Some((alpha, r)) => Outcome::violated(
            true,
            Evidence {
                observations: obs_names(fsa, &alpha),
                estimate: names(fsa, &proj1(&r)),
                note: "initial-state estimate lies within the secret states".into(),
                ..Evidence::default()
            },
        ),
        None => Outcome::holds(ex.saturated),
    }
}

fn current_state_opacity(fsa: &ValidatedFsa, b: &Bounds) -> Outcome {
    let s = secret(fsa);
    let ex = explore(fsa, fsa.initial_estimate(), b.len, |c, o| nonempty(fsa.step_closed(c, o)), |c| c.is_subset(s));
    match ex.hit {
        Some((alpha, c)) => Outcome::violated(
            true,
            Evidence {
                observations: obs_names(fsa, &alpha),
                estimate: names(fsa, &c),
                note: "current-state estimate lies within the secret states".into(),
                ..Evidence::default()
            },
        ),
        None => Outcome::holds(ex.saturated),
    }
}

fn infinite_step_opacity(fsa: &ValidatedFsa, b: &Bounds) -> Outcome {
    let s = secret(fsa);
    let (anchors, mut saturated) = estimates(fsa, b.len);
    for (c, alpha) in &anchors {
        let ex = explore(
            fsa,
            fsa.anchor_pairs(c),
            b.delay,
            |r, o| nonempty(fsa.advance_pairs(r, o)),
            |r| proj1(r).is_subset(s),
        );
        if let Some((beta, r)) = ex.hit {
            return Outcome::violated(
                true,
                Evidence {
                    observations: obs_names(fsa, alpha),
                    continuation: Some(obs_names(fsa, &beta)),
                    estimate: names(fsa, &proj1(&r)),
                    note: format!("delayed estimate of instant {} lies within the secret states", alpha.len()),
                    ..Evidence::default()
                },
            );
        }
        saturated &= ex.saturated;
    }
    Outcome::holds(saturated)
}

/// Re-derives the estimate recorded in violation evidence with the plain
/// estimate functions (no knowledge tracking) and checks that it shows the
/// violation claimed. Properties whose violation is not witnessed by a single
/// finite estimate return `Ok(true)` when the estimate matches.
pub fn revalidate_evidence(fsa: &ValidatedFsa, property: Property, evidence: &Evidence) -> Result<bool, Error> {
    if property == Property::Predictability {
        return revalidate_predictability(fsa, evidence);
    }
    let model = if property.needs_faults() { fsa.refine_fault_partition()?.0 } else { fsa.clone() };
    let alpha = model.obs_sequence(&evidence.observations)?;
    let beta = evidence.continuation.as_deref().map(|b| model.obs_sequence(b)).transpose()?;
    let est = match (property, &beta) {
        (Property::IDetectability | Property::InitialStateOpacity, _) => model.initial_state_estimate(&alpha),
        (_, Some(beta)) => model.delayed_state_estimate(&alpha, beta),
        (_, None) => model.current_state_estimate(&alpha),
    };
    if est.is_empty() || names(&model, &est) != evidence.estimate {
        return Ok(false);
    }
    let s = model.secret_states();
    Ok(match property {
        Property::IDetectability
        | Property::StrongDetectability
        | Property::DelayedDetectability
        | Property::Diagnosability => est.len() >= 2,
        Property::InitialStateOpacity | Property::CurrentStateOpacity | Property::InfiniteStepOpacity => {
            s.is_some_and(|s| est.is_subset(s))
        }
        Property::WeakDetectability | Property::Predictability => true,
    })
}
