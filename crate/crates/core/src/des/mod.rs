//! Partially-observed finite-state automata.
//!
//! An [`Fsa`] is the raw model `G = (X, Σ, δ, X0)` together with its
//! observation mask and optional fault/secret annotations. [`validate_fsa`]
//! checks liveness and the absence of unobservable cycles and returns a
//! [`ValidatedFsa`], which is what every analysis consumes.

mod estimate;
mod fault;
mod observer;

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::ops::Deref;

pub use estimate::StatePairs;
pub use fault::FaultPartition;
pub use observer::Observer;

/// The mask token reserved for unobservable events.
pub const EPSILON_TOKEN: &str = "eps";

macro_rules! id_type {
    ($(#[$doc:meta])* $name:ident) => {
        $(#[$doc])*
        #[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
        pub struct $name(pub u32);

        impl $name {
            #[inline]
            pub fn index(self) -> usize {
                self.0 as usize
            }
        }
    };
}

id_type!(
    /// Interned state identifier; ordered by declaration.
    StateId
);
id_type!(
    /// Interned event identifier; ordered by declaration.
    EventId
);
id_type!(
    /// Interned observation symbol; ordered by declaration.
    ObsId
);

/// Ordered set of states. All iteration follows declaration order.
pub type StateSet = BTreeSet<StateId>;

/// A state estimate (initial, current or delayed).
pub type EstimateSet = StateSet;

#[derive(Debug, thiserror::Error, Clone, PartialEq, Eq)]
pub enum ModelError {
    #[error("reference to undeclared {kind} `{id}`")]
    DanglingReference { kind: &'static str, id: String },
    #[error("duplicate {kind} identifier `{id}`")]
    DuplicateId { kind: &'static str, id: String },
    #[error("transition ({state}, {event}) has more than one target")]
    DuplicateTransition { state: String, event: String },
    #[error("event `{0}` has no mask entry")]
    MaskNotTotal(String),
    #[error("event `{0}` has more than one mask entry")]
    DuplicateMask(String),
    #[error("`{EPSILON_TOKEN}` is reserved for unobservable events and cannot be declared as an observation")]
    ReservedSymbol,
    #[error("observation `{0}` is declared but no event is masked to it")]
    UnusedObservation(String),
    #[error("the model has no states")]
    NoStates,
    #[error("the model has no initial states")]
    NoInitialStates,
    #[error("state `{0}` has no outgoing transition")]
    NotLive(String),
    #[error("unobservable cycle {}", .0.join(" -> "))]
    UnobservableCycle(Vec<String>),
    #[error("no fault events declared")]
    NoFaultEvents,
    #[error("unknown observation `{0}`")]
    UnknownObservation(String),
    #[error("unknown state `{0}`")]
    UnknownState(String),
    #[error("unknown event `{0}`")]
    UnknownEvent(String),
    #[error("event sequence is not in the language of the automaton from the given state")]
    StringNotInLanguage,
}

/// A partially-observed finite-state automaton.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Fsa {
    name: Option<String>,
    states: Vec<String>,
    events: Vec<String>,
    observations: Vec<String>,
    transitions: BTreeMap<(StateId, EventId), StateId>,
    initial: StateSet,
    mask: Vec<Option<ObsId>>,
    fault_events: Option<BTreeSet<EventId>>,
    secret_states: Option<StateSet>,
}

impl Fsa {
    pub fn builder() -> FsaBuilder {
        FsaBuilder::default()
    }

    pub fn name(&self) -> Option<&str> {
        self.name.as_deref()
    }

    pub fn num_states(&self) -> usize {
        self.states.len()
    }

    pub fn num_events(&self) -> usize {
        self.events.len()
    }

    pub fn num_observations(&self) -> usize {
        self.observations.len()
    }

    pub fn state_ids(&self) -> impl Iterator<Item = StateId> + '_ {
        (0..self.states.len() as u32).map(StateId)
    }

    pub fn event_ids(&self) -> impl Iterator<Item = EventId> + '_ {
        (0..self.events.len() as u32).map(EventId)
    }

    pub fn obs_ids(&self) -> impl Iterator<Item = ObsId> + '_ {
        (0..self.observations.len() as u32).map(ObsId)
    }

    pub fn state_name(&self, x: StateId) -> &str {
        &self.states[x.index()]
    }

    pub fn event_name(&self, e: EventId) -> &str {
        &self.events[e.index()]
    }

    pub fn obs_name(&self, o: ObsId) -> &str {
        &self.observations[o.index()]
    }

    pub fn state_names(&self) -> &[String] {
        &self.states
    }

    pub fn event_names(&self) -> &[String] {
        &self.events
    }

    pub fn obs_names(&self) -> &[String] {
        &self.observations
    }

    pub fn state_id(&self, name: &str) -> Result<StateId, ModelError> {
        lookup(&self.states, name)
            .map(StateId)
            .ok_or_else(|| ModelError::UnknownState(name.to_string()))
    }

    pub fn event_id(&self, name: &str) -> Result<EventId, ModelError> {
        lookup(&self.events, name)
            .map(EventId)
            .ok_or_else(|| ModelError::UnknownEvent(name.to_string()))
    }

    pub fn obs_id(&self, name: &str) -> Result<ObsId, ModelError> {
        lookup(&self.observations, name)
            .map(ObsId)
            .ok_or_else(|| ModelError::UnknownObservation(name.to_string()))
    }

    /// Resolves a sequence of observation names.
    pub fn obs_sequence<S: AsRef<str>>(&self, names: &[S]) -> Result<Vec<ObsId>, ModelError> {
        names.iter().map(|n| self.obs_id(n.as_ref())).collect()
    }

    pub fn states_from_names<S: AsRef<str>>(&self, names: &[S]) -> Result<StateSet, ModelError> {
        names.iter().map(|n| self.state_id(n.as_ref())).collect()
    }

    pub fn transitions(&self) -> impl Iterator<Item = (StateId, EventId, StateId)> + '_ {
        self.transitions.iter().map(|(&(x, e), &y)| (x, e, y))
    }

    pub fn delta(&self, x: StateId, e: EventId) -> Option<StateId> {
        self.transitions.get(&(x, e)).copied()
    }

    pub fn initial_states(&self) -> &StateSet {
        &self.initial
    }

    /// `M(e)`; `None` means ε.
    pub fn mask(&self, e: EventId) -> Option<ObsId> {
        self.mask[e.index()]
    }

    pub fn is_observable(&self, e: EventId) -> bool {
        self.mask[e.index()].is_some()
    }

    pub fn fault_events(&self) -> Option<&BTreeSet<EventId>> {
        self.fault_events.as_ref()
    }

    pub fn secret_states(&self) -> Option<&StateSet> {
        self.secret_states.as_ref()
    }

    /// Renders a state set as `{a,b}` using declared names.
    pub fn fmt_states(&self, set: &StateSet) -> String {
        let names: Vec<&str> = set.iter().map(|&x| self.state_name(x)).collect();
        format!("{{{}}}", names.join(","))
    }

    pub fn with_secret_states(mut self, secret: Option<StateSet>) -> Self {
        self.secret_states = secret;
        self
    }

    pub fn with_fault_events(mut self, faults: Option<BTreeSet<EventId>>) -> Self {
        self.fault_events = faults;
        self
    }
}

fn lookup(names: &[String], name: &str) -> Option<u32> {
    names.iter().position(|n| n == name).map(|i| i as u32)
}

/// Name-based construction of an [`Fsa`].
///
/// Observation symbols are interned in the order given by
/// [`FsaBuilder::observations`], or else by first appearance in the mask
/// (taken in event-declaration order).
#[derive(Debug, Default, Clone)]
pub struct FsaBuilder {
    name: Option<String>,
    states: Vec<String>,
    events: Vec<String>,
    observations: Option<Vec<String>>,
    transitions: Vec<(String, String, String)>,
    initial: Vec<String>,
    mask: Vec<(String, Option<String>)>,
    fault_events: Option<Vec<String>>,
    secret_states: Option<Vec<String>>,
}

impl FsaBuilder {
    pub fn name(mut self, name: impl Into<String>) -> Self {
        self.name = Some(name.into());
        self
    }

    pub fn states<I, S>(mut self, states: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        self.states.extend(states.into_iter().map(Into::into));
        self
    }

    pub fn events<I, S>(mut self, events: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        self.events.extend(events.into_iter().map(Into::into));
        self
    }

    pub fn observations<I, S>(mut self, obs: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        self.observations = Some(obs.into_iter().map(Into::into).collect());
        self
    }

    pub fn transition(
        mut self,
        source: impl Into<String>,
        event: impl Into<String>,
        target: impl Into<String>,
    ) -> Self {
        self.transitions
            .push((source.into(), event.into(), target.into()));
        self
    }

    pub fn initial<I, S>(mut self, states: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        self.initial.extend(states.into_iter().map(Into::into));
        self
    }

    /// Masks `event` to `obs`; `None` (or the token `eps`) means unobservable.
    pub fn mask(mut self, event: impl Into<String>, obs: Option<&str>) -> Self {
        let obs = obs.filter(|o| *o != EPSILON_TOKEN).map(str::to_string);
        self.mask.push((event.into(), obs));
        self
    }

    pub fn fault_events<I, S>(mut self, events: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        self.fault_events = Some(events.into_iter().map(Into::into).collect());
        self
    }

    pub fn secret_states<I, S>(mut self, states: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        self.secret_states = Some(states.into_iter().map(Into::into).collect());
        self
    }

    pub fn build(self) -> Result<Fsa, ModelError> {
        let state_ix = intern("state", &self.states)?;
        let event_ix = intern("event", &self.events)?;
        if self.states.is_empty() {
            return Err(ModelError::NoStates);
        }

        let state = |name: &str| {
            state_ix
                .get(name)
                .map(|&i| StateId(i))
                .ok_or_else(|| ModelError::DanglingReference { kind: "state", id: name.to_string() })
        };
        let event = |name: &str| {
            event_ix
                .get(name)
                .map(|&i| EventId(i))
                .ok_or_else(|| ModelError::DanglingReference { kind: "event", id: name.to_string() })
        };

        // Mask, in event order.
        let mut raw_mask: Vec<Option<Option<String>>> = vec![None; self.events.len()];
        for (ev, obs) in &self.mask {
            let e = event(ev)?;
            if raw_mask[e.index()].is_some() {
                return Err(ModelError::DuplicateMask(ev.clone()));
            }
            raw_mask[e.index()] = Some(obs.clone());
        }
        let mut observations = match &self.observations {
            Some(list) => {
                if list.iter().any(|o| o == EPSILON_TOKEN) {
                    return Err(ModelError::ReservedSymbol);
                }
                intern("observation", list)?;
                list.clone()
            }
            None => Vec::new(),
        };
        let declared = self.observations.is_some();
        let mut mask = Vec::with_capacity(self.events.len());
        for (i, m) in raw_mask.iter().enumerate() {
            let m = m.as_ref().ok_or_else(|| ModelError::MaskNotTotal(self.events[i].clone()))?;
            mask.push(match m {
                None => None,
                Some(o) => Some(ObsId(match observations.iter().position(|x| x == o) {
                    Some(p) => p as u32,
                    None if declared => {
                        return Err(ModelError::DanglingReference { kind: "observation", id: o.clone() })
                    }
                    None => {
                        observations.push(o.clone());
                        (observations.len() - 1) as u32
                    }
                })),
            });
        }
        for (i, o) in observations.iter().enumerate() {
            if !mask.contains(&Some(ObsId(i as u32))) {
                return Err(ModelError::UnusedObservation(o.clone()));
            }
        }

        let mut transitions = BTreeMap::new();
        for (src, ev, dst) in &self.transitions {
            let key = (state(src)?, event(ev)?);
            let target = state(dst)?;
            if transitions.insert(key, target).is_some() {
                return Err(ModelError::DuplicateTransition { state: src.clone(), event: ev.clone() });
            }
        }

        let initial = self.initial.iter().map(|s| state(s)).collect::<Result<StateSet, _>>()?;
        if initial.is_empty() {
            return Err(ModelError::NoInitialStates);
        }
        let fault_events = self
            .fault_events
            .as_ref()
            .map(|l| l.iter().map(|e| event(e)).collect::<Result<BTreeSet<_>, _>>())
            .transpose()?;
        let secret_states = self
            .secret_states
            .as_ref()
            .map(|l| l.iter().map(|s| state(s)).collect::<Result<StateSet, _>>())
            .transpose()?;

        Ok(Fsa {
            name: self.name,
            states: self.states,
            events: self.events,
            observations,
            transitions,
            initial,
            mask,
            fault_events,
            secret_states,
        })
    }
}

fn intern(kind: &'static str, names: &[String]) -> Result<HashMap<String, u32>, ModelError> {
    let mut map = HashMap::with_capacity(names.len());
    for (i, n) in names.iter().enumerate() {
        if map.insert(n.clone(), i as u32).is_some() {
            return Err(ModelError::DuplicateId { kind, id: n.clone() });
        }
    }
    Ok(map)
}

/// An [`Fsa`] known to satisfy liveness (A1) and to contain no unobservable
/// cycle (A2), with adjacency precomputed.
#[derive(Debug, Clone)]
pub struct ValidatedFsa {
    fsa: Fsa,
    succ: Vec<Vec<(EventId, StateId)>>,
    eps_succ: Vec<Vec<StateId>>,
    obs_succ: Vec<Vec<(ObsId, StateId)>>,
    reachable: StateSet,
}

impl Deref for ValidatedFsa {
    type Target = Fsa;

    fn deref(&self) -> &Fsa {
        &self.fsa
    }
}

impl fmt::Display for ValidatedFsa {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} ({} states, {} events, {} observations)",
            self.fsa.name().unwrap_or("<unnamed>"),
            self.num_states(),
            self.num_events(),
            self.num_observations()
        )
    }
}

/// Checks A1 and A2 and caches adjacency and the reachable set.
pub fn validate_fsa(fsa: Fsa) -> Result<ValidatedFsa, ModelError> {
    let n = fsa.num_states();
    let mut succ = vec![Vec::new(); n];
    let mut eps_succ = vec![Vec::new(); n];
    let mut obs_succ = vec![Vec::new(); n];
    for (x, e, y) in fsa.transitions() {
        succ[x.index()].push((e, y));
        match fsa.mask(e) {
            None => eps_succ[x.index()].push(y),
            Some(o) => obs_succ[x.index()].push((o, y)),
        }
    }
    if let Some(x) = fsa.state_ids().find(|x| succ[x.index()].is_empty()) {
        return Err(ModelError::NotLive(fsa.state_name(x).to_string()));
    }
    if let Some(cycle) = find_cycle(&eps_succ) {
        return Err(ModelError::UnobservableCycle(
            cycle.into_iter().map(|x| fsa.state_name(x).to_string()).collect(),
        ));
    }
    for v in eps_succ.iter_mut() {
        v.sort();
        v.dedup();
    }

    let mut reachable: StateSet = fsa.initial.clone();
    let mut stack: Vec<StateId> = reachable.iter().copied().collect();
    while let Some(x) = stack.pop() {
        for &(_, y) in &succ[x.index()] {
            if reachable.insert(y) {
                stack.push(y);
            }
        }
    }

    Ok(ValidatedFsa { fsa, succ, eps_succ, obs_succ, reachable })
}

/// Returns some cycle of the graph (as a closed walk listing each node once),
/// if one exists.
fn find_cycle(adj: &[Vec<StateId>]) -> Option<Vec<StateId>> {
    #[derive(Clone, Copy, PartialEq)]
    enum Color {
        White,
        Grey,
        Black,
    }
    let n = adj.len();
    let mut color = vec![Color::White; n];
    for root in 0..n {
        if color[root] != Color::White {
            continue;
        }
        // (node, next child index)
        let mut stack: Vec<(usize, usize)> = vec![(root, 0)];
        color[root] = Color::Grey;
        while let Some(top) = stack.len().checked_sub(1) {
            let (v, i) = stack[top];
            if i < adj[v].len() {
                stack[top].1 += 1;
                let w = adj[v][i].index();
                match color[w] {
                    Color::White => {
                        color[w] = Color::Grey;
                        stack.push((w, 0));
                    }
                    Color::Grey => {
                        let start = stack.iter().position(|&(u, _)| u == w).unwrap();
                        return Some(stack[start..].iter().map(|&(u, _)| StateId(u as u32)).collect());
                    }
                    Color::Black => {}
                }
            } else {
                color[v] = Color::Black;
                stack.pop();
            }
        }
    }
    None
}

impl ValidatedFsa {
    pub fn fsa(&self) -> &Fsa {
        &self.fsa
    }

    pub fn into_inner(self) -> Fsa {
        self.fsa
    }

    /// States reachable from `X0`.
    pub fn reachable_states(&self) -> &StateSet {
        &self.reachable
    }

    /// Outgoing transitions of `x`, in event order.
    pub fn successors(&self, x: StateId) -> &[(EventId, StateId)] {
        &self.succ[x.index()]
    }

    pub(crate) fn eps_successors(&self, x: StateId) -> &[StateId] {
        &self.eps_succ[x.index()]
    }

    pub(crate) fn obs_successors(&self, x: StateId) -> &[(ObsId, StateId)] {
        &self.obs_succ[x.index()]
    }

    /// Replaces the secret annotation, revalidating cheaply.
    pub fn with_secret_states(&self, secret: Option<StateSet>) -> ValidatedFsa {
        let mut v = self.clone();
        v.fsa.secret_states = secret;
        v
    }
}
