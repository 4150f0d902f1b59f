//! Unobservable reach, the observable step relation and state estimation.

use std::collections::{BTreeSet, HashMap, VecDeque};

use super::{EventId, ObsId, StateId, StateSet, ValidatedFsa};

/// A relation between states, used to track `(anchor, current)` pairs while
/// simulating an observation forward.
pub type StatePairs = BTreeSet<(StateId, StateId)>;

impl ValidatedFsa {
    /// Least set containing `from` and closed under ε-labelled transitions.
    pub fn unobservable_reach(&self, from: &StateSet) -> StateSet {
        let mut out = from.clone();
        let mut stack: Vec<StateId> = from.iter().copied().collect();
        while let Some(x) = stack.pop() {
            for &y in self.eps_successors(x) {
                if out.insert(y) {
                    stack.push(y);
                }
            }
        }
        out
    }

    /// States reachable from `from` by a string whose observation is exactly
    /// `o`: ε-closure, one event masked to `o`, ε-closure.
    pub fn observable_step(&self, from: &StateSet, o: ObsId) -> StateSet {
        self.step_closed(&self.unobservable_reach(from), o)
    }

    /// As [`observable_step`](Self::observable_step) for a set already closed
    /// under unobservable reach.
    pub(crate) fn step_closed(&self, closed: &StateSet, o: ObsId) -> StateSet {
        let mut next = StateSet::new();
        for &x in closed {
            for &(p, y) in self.obs_successors(x) {
                if p == o {
                    next.insert(y);
                }
            }
        }
        self.unobservable_reach(&next)
    }

    /// `X̂(ε) = UR(X0)`.
    pub fn initial_estimate(&self) -> StateSet {
        self.unobservable_reach(self.initial_states())
    }

    /// Current-state estimate: states reachable from `X0` by some string
    /// observed as `alpha`.
    pub fn current_state_estimate(&self, alpha: &[ObsId]) -> StateSet {
        alpha
            .iter()
            .fold(self.initial_estimate(), |est, &o| self.step_closed(&est, o))
    }

    /// Initial-state estimate: initial states from which some string observed
    /// as `alpha` starts.
    pub fn initial_state_estimate(&self, alpha: &[ObsId]) -> StateSet {
        let mut rel = StatePairs::new();
        for &x0 in self.initial_states() {
            for x in self.unobservable_reach(&StateSet::from([x0])) {
                rel.insert((x0, x));
            }
        }
        for &o in alpha {
            rel = self.advance_pairs(&rel, o);
        }
        rel.into_iter().map(|(x0, _)| x0).collect()
    }

    /// Delayed-state estimate: states at instant `|alpha|` of strings observed
    /// as `alpha`, restricted to those that continue with observation `beta`.
    pub fn delayed_state_estimate(&self, alpha: &[ObsId], beta: &[ObsId]) -> StateSet {
        let mut rel = self.anchor_pairs(&self.current_state_estimate(alpha));
        for &o in beta {
            rel = self.advance_pairs(&rel, o);
        }
        rel.into_iter().map(|(x, _)| x).collect()
    }

    /// `{(x, x') : x ∈ est, x' ∈ UR({x})}` — the starting relation for
    /// delayed estimation from an anchor estimate.
    pub fn anchor_pairs(&self, est: &StateSet) -> StatePairs {
        let mut rel = StatePairs::new();
        for &x in est {
            for y in self.unobservable_reach(&StateSet::from([x])) {
                rel.insert((x, y));
            }
        }
        rel
    }

    /// Advances the second coordinate of every pair by observation `o`. The
    /// second coordinates are assumed closed under unobservable reach per
    /// anchor, which every relation built here satisfies.
    pub fn advance_pairs(&self, rel: &StatePairs, o: ObsId) -> StatePairs {
        let mut next = StatePairs::new();
        for &(a, x) in rel {
            for &(p, y) in self.obs_successors(x) {
                if p != o {
                    continue;
                }
                for z in self.unobservable_reach(&StateSet::from([y])) {
                    next.insert((a, z));
                }
            }
        }
        next
    }

    /// A shortest string from an initial state that is observed as `alpha`
    /// and ends in `target`, if one exists.
    pub fn string_for(&self, alpha: &[ObsId], target: StateId) -> Option<Vec<EventId>> {
        type Node = (StateId, usize);
        let mut parent: HashMap<Node, Option<(Node, EventId)>> = HashMap::new();
        let mut queue = VecDeque::new();
        for &x in self.initial_states() {
            parent.insert((x, 0), None);
            queue.push_back((x, 0));
        }
        let goal = (target, alpha.len());
        while let Some(n @ (x, i)) = queue.pop_front() {
            if n == goal {
                let mut s = Vec::new();
                let mut cur = n;
                while let Some((prev, e)) = parent[&cur] {
                    s.push(e);
                    cur = prev;
                }
                s.reverse();
                return Some(s);
            }
            for &(e, y) in self.successors(x) {
                let next = match self.mask(e) {
                    None => (y, i),
                    Some(o) if i < alpha.len() && alpha[i] == o => (y, i + 1),
                    Some(_) => continue,
                };
                if let std::collections::hash_map::Entry::Vacant(v) = parent.entry(next) {
                    v.insert(Some((n, e)));
                    queue.push_back(next);
                }
            }
        }
        None
    }

    /// States reached by `s` from some initial state, or `None` if `s` is
    /// not in the language.
    pub fn run_string(&self, s: &[EventId]) -> Option<StateSet> {
        let mut cur: StateSet = self.initial_states().clone();
        for &e in s {
            cur = cur.iter().filter_map(|&x| self.delta(x, e)).collect();
            if cur.is_empty() {
                return None;
            }
        }
        Some(cur)
    }

    /// Observation of an event string.
    pub fn project(&self, s: &[EventId]) -> Vec<ObsId> {
        s.iter().filter_map(|&e| self.mask(e)).collect()
    }
}
