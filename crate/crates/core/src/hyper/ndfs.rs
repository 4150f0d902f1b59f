//! Nested depth-first search for accepting lassos.

use std::collections::HashMap;
use std::hash::Hash;

/// An implicitly given Büchi graph.
pub trait BuchiGraph {
    type State: Clone + Eq + Hash;

    fn initial(&self) -> Vec<Self::State>;
    fn successors(&self, s: &Self::State) -> Vec<Self::State>;
    fn is_accepting(&self, s: &Self::State) -> bool;
}

/// An accepting lasso `stem · cycle^ω`; `cycle[0]` is accepting.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StateLasso<S> {
    pub stem: Vec<S>,
    pub cycle: Vec<S>,
}

struct Search<'g, G: BuchiGraph> {
    g: &'g G,
    ids: HashMap<G::State, usize>,
    states: Vec<G::State>,
    succ: Vec<Option<Vec<usize>>>,
    outer: Vec<bool>,
    inner: Vec<bool>,
}

impl<'g, G: BuchiGraph> Search<'g, G> {
    fn intern(&mut self, s: G::State) -> usize {
        if let Some(&i) = self.ids.get(&s) {
            return i;
        }
        let i = self.states.len();
        self.ids.insert(s.clone(), i);
        self.states.push(s);
        self.succ.push(None);
        self.outer.push(false);
        self.inner.push(false);
        i
    }

    fn successors(&mut self, i: usize) -> Vec<usize> {
        if let Some(s) = &self.succ[i] {
            return s.clone();
        }
        let next = self.g.successors(&self.states[i]);
        let ids: Vec<usize> = next.into_iter().map(|s| self.intern(s)).collect();
        self.succ[i] = Some(ids.clone());
        ids
    }

    /// Inner search from accepting `seed` back to `seed`; returns the cycle.
    fn inner_dfs(&mut self, seed: usize) -> Option<Vec<usize>> {
        let mut stack: Vec<(usize, Vec<usize>, usize)> = Vec::new();
        let succ = self.successors(seed);
        stack.push((seed, succ, 0));
        self.inner[seed] = true;
        while let Some(top) = stack.len().checked_sub(1) {
            let (i, len) = (stack[top].2, stack[top].1.len());
            if i == len {
                stack.pop();
                continue;
            }
            let w = stack[top].1[i];
            stack[top].2 += 1;
            if w == seed {
                return Some(stack.iter().map(|f| f.0).collect());
            }
            if !self.inner[w] {
                self.inner[w] = true;
                let ws = self.successors(w);
                stack.push((w, ws, 0));
            }
        }
        None
    }

    fn run(&mut self) -> Option<StateLasso<usize>> {
        let roots: Vec<usize> = self.g.initial().into_iter().map(|s| self.intern(s)).collect();
        for root in roots {
            if self.outer[root] {
                continue;
            }
            let mut stack: Vec<(usize, Vec<usize>, usize)> = Vec::new();
            self.outer[root] = true;
            let succ = self.successors(root);
            stack.push((root, succ, 0));
            while let Some(top) = stack.len().checked_sub(1) {
                let (v, i, len) = (stack[top].0, stack[top].2, stack[top].1.len());
                if i < len {
                    let w = stack[top].1[i];
                    stack[top].2 += 1;
                    if !self.outer[w] {
                        self.outer[w] = true;
                        let ws = self.successors(w);
                        stack.push((w, ws, 0));
                    }
                    continue;
                }
                // Post-order: launch the nested search from accepting states.
                if self.g.is_accepting(&self.states[v]) {
                    if let Some(cycle) = self.inner_dfs(v) {
                        let stem = stack[..top].iter().map(|f| f.0).collect();
                        return Some(StateLasso { stem, cycle });
                    }
                }
                stack.pop();
            }
        }
        None
    }
}

/// Finds an accepting lasso reachable from an initial state, exploring in the
/// order successors are returned. Deterministic for deterministic graphs.
pub fn find_accepting_lasso<G: BuchiGraph>(g: &G) -> Option<StateLasso<G::State>> {
    let mut s = Search {
        g,
        ids: HashMap::new(),
        states: Vec::new(),
        succ: Vec::new(),
        outer: Vec::new(),
        inner: Vec::new(),
    };
    let lasso = s.run()?;
    Some(StateLasso {
        stem: lasso.stem.into_iter().map(|i| s.states[i].clone()).collect(),
        cycle: lasso.cycle.into_iter().map(|i| s.states[i].clone()).collect(),
    })
}

/// Whether the graph has no accepting lasso.
pub fn is_empty<G: BuchiGraph>(g: &G) -> bool {
    find_accepting_lasso(g).is_none()
}

/// Shrinks a lasso over any equality type: collapses a periodic cycle to its
/// primitive root and rolls stem suffixes into the cycle.
pub fn normalize_lasso<T: Clone + PartialEq>(mut stem: Vec<T>, mut cycle: Vec<T>) -> (Vec<T>, Vec<T>) {
    let n = cycle.len();
    if let Some(p) = (1..=n).find(|&p| n.is_multiple_of(p) && (0..n).all(|i| cycle[i] == cycle[i % p])) {
        cycle.truncate(p);
    }
    while let (Some(s), Some(c)) = (stem.last(), cycle.last()) {
        if s != c {
            break;
        }
        stem.pop();
        cycle.rotate_right(1);
    }
    (stem, cycle)
}
