//! Fault partition, boundary and indicator states, first-fault strings.

use std::collections::BTreeSet;

use super::{validate_fsa, EventId, Fsa, ModelError, StateId, StateSet, ValidatedFsa};

/// Partition of the state space into normal and fault states such that a
/// string contains a fault event iff it ends in a fault state.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FaultPartition {
    pub normal: StateSet,
    pub fault: StateSet,
}

impl FaultPartition {
    pub fn is_fault(&self, x: StateId) -> bool {
        self.fault.contains(&x)
    }
}

impl ValidatedFsa {
    fn fault_set(&self) -> Result<&BTreeSet<EventId>, ModelError> {
        match self.fault_events() {
            Some(f) if !f.is_empty() => Ok(f),
            _ => Err(ModelError::NoFaultEvents),
        }
    }

    /// Reachable pairs of (state, has-a-fault-occurred).
    fn fault_product(&self, faults: &BTreeSet<EventId>) -> BTreeSet<(StateId, bool)> {
        let mut seen: BTreeSet<(StateId, bool)> =
            self.initial_states().iter().map(|&x| (x, false)).collect();
        let mut stack: Vec<(StateId, bool)> = seen.iter().copied().collect();
        while let Some((x, b)) = stack.pop() {
            for &(e, y) in self.successors(x) {
                let next = (y, b || faults.contains(&e));
                if seen.insert(next) {
                    stack.push(next);
                }
            }
        }
        seen
    }

    /// Returns an automaton on which the fault partition is well defined,
    /// together with that partition.
    ///
    /// If no state is reachable both with and without a prior fault, the
    /// automaton is returned unchanged (unreachable states count as normal);
    /// otherwise states are paired with a fault bit and only reachable pairs
    /// are kept. Refined states are named `(x,0)` and `(x,1)`.
    pub fn refine_fault_partition(&self) -> Result<(ValidatedFsa, FaultPartition), ModelError> {
        let faults = self.fault_set()?;
        let pairs = self.fault_product(faults);
        let ambiguous = pairs.iter().any(|&(x, b)| b && pairs.contains(&(x, false)));
        if !ambiguous {
            let fault: StateSet = pairs.iter().filter(|p| p.1).map(|p| p.0).collect();
            let normal = self.state_ids().filter(|x| !fault.contains(x)).collect();
            return Ok((self.clone(), FaultPartition { normal, fault }));
        }

        let name = |&(x, b): &(StateId, bool)| format!("({},{})", self.state_name(x), u8::from(b));
        let mut builder = Fsa::builder()
            .states(pairs.iter().map(name))
            .events(self.event_names().iter().cloned())
            .observations(self.obs_names().iter().cloned())
            .initial(self.initial_states().iter().map(|&x| name(&(x, false))))
            .fault_events(faults.iter().map(|&e| self.event_name(e).to_string()));
        if let Some(name) = self.name() {
            builder = builder.name(name);
        }
        for e in self.event_ids() {
            builder = builder.mask(self.event_name(e), self.mask(e).map(|o| self.obs_name(o)));
        }
        for &(x, b) in &pairs {
            for &(e, y) in self.successors(x) {
                let target = (y, b || faults.contains(&e));
                builder = builder.transition(name(&(x, b)), self.event_name(e), name(&target));
            }
        }
        if let Some(secret) = self.secret_states() {
            builder = builder.secret_states(pairs.iter().filter(|p| secret.contains(&p.0)).map(name));
        }
        let refined = validate_fsa(builder.build()?)?;
        let fault = pairs
            .iter()
            .enumerate()
            .filter(|(_, p)| p.1)
            .map(|(i, _)| StateId(i as u32))
            .collect();
        let normal = pairs
            .iter()
            .enumerate()
            .filter(|(_, p)| !p.1)
            .map(|(i, _)| StateId(i as u32))
            .collect();
        Ok((refined, FaultPartition { normal, fault }))
    }

    /// Normal states at which some fault event is enabled.
    pub fn boundary_states(&self, part: &FaultPartition) -> StateSet {
        let faults = self.fault_events().cloned().unwrap_or_default();
        part.normal
            .iter()
            .copied()
            .filter(|&x| self.successors(x).iter().any(|(e, _)| faults.contains(e)))
            .collect()
    }

    /// Normal states from which every infinite run eventually enters a fault
    /// state: normal states that cannot reach, through normal states only, a
    /// cycle of normal states.
    pub fn indicator_states(&self, part: &FaultPartition) -> StateSet {
        let normal = &part.normal;
        let normal_succ = |x: StateId| {
            self.successors(x)
                .iter()
                .map(|&(_, y)| y)
                .filter(|y| normal.contains(y))
                .collect::<Vec<_>>()
        };
        let reaches = |from: StateId, goal: StateId| {
            let mut seen = StateSet::new();
            let mut stack = normal_succ(from);
            while let Some(y) = stack.pop() {
                if y == goal {
                    return true;
                }
                if seen.insert(y) {
                    stack.extend(normal_succ(y));
                }
            }
            false
        };
        let on_cycle: StateSet = normal.iter().copied().filter(|&x| reaches(x, x)).collect();
        // Backward closure of `on_cycle` inside X_N.
        let mut escaping = on_cycle;
        loop {
            let before = escaping.len();
            for &x in normal {
                if !escaping.contains(&x) && normal_succ(x).iter().any(|y| escaping.contains(y)) {
                    escaping.insert(x);
                }
            }
            if escaping.len() == before {
                break;
            }
        }
        normal.iter().copied().filter(|x| !escaping.contains(x)).collect()
    }

    /// All strings of length at most `max_len` from an initial state whose
    /// last event is the first fault occurrence.
    pub fn first_fault_strings(&self, max_len: usize) -> BTreeSet<Vec<EventId>> {
        let faults = self.fault_events().cloned().unwrap_or_default();
        let mut out = BTreeSet::new();
        let mut stack: Vec<(StateId, Vec<EventId>)> =
            self.initial_states().iter().map(|&x| (x, Vec::new())).collect();
        while let Some((x, s)) = stack.pop() {
            if s.len() == max_len {
                continue;
            }
            for &(e, y) in self.successors(x) {
                let mut t = s.clone();
                t.push(e);
                if faults.contains(&e) {
                    out.insert(t);
                } else {
                    stack.push((y, t));
                }
            }
        }
        out
    }
}
