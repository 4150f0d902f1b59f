//! Bounded `∃∀` checking: π1 ranges over lassos up to a size bound, and
//! each candidate is checked exactly against all π2.

use std::cell::RefCell;
use std::collections::HashMap;

use super::buchi::{BState, BuchiAutomaton};
use super::forall_forall::single_witness;
use super::ndfs::{is_empty, normalize_lasso, BuchiGraph};
use super::{prefix_name, EngineError, EngineId, Mode, Truth, Verdict, WitnessKind};
use crate::formula::{HyperFormula, Ltl, Quantifier};
use crate::kripke::{KripkeStructure, Lasso};

/// A fixed π1 lasso composed with all runs of `K` and an automaton reading
/// both traces.
pub(crate) struct LassoProduct<'a> {
    k: &'a KripkeStructure,
    pi1: &'a Lasso,
    aut: &'a BuchiAutomaton,
    letters: RefCell<HashMap<(usize, usize), u64>>,
}

impl<'a> LassoProduct<'a> {
    pub(crate) fn new(k: &'a KripkeStructure, pi1: &'a Lasso, aut: &'a BuchiAutomaton) -> Self {
        LassoProduct { k, pi1, aut, letters: RefCell::default() }
    }

    fn letter(&self, pos: usize, n: usize) -> u64 {
        *self
            .letters
            .borrow_mut()
            .entry((pos, n))
            .or_insert_with(|| self.aut.letter(&[self.k.label(self.pi1.at(pos)), self.k.label(n)]))
    }

    fn next_pos(&self, pos: usize) -> usize {
        if pos + 1 < self.pi1.size() {
            pos + 1
        } else {
            self.pi1.stem.len()
        }
    }
}

impl BuchiGraph for LassoProduct<'_> {
    type State = (u32, u32, BState);

    fn initial(&self) -> Vec<Self::State> {
        self.k
            .initial_nodes()
            .iter()
            .flat_map(|&n| self.aut.initial(self.letter(0, n)).into_iter().map(move |q| (0, n as u32, q)))
            .collect()
    }

    fn successors(&self, s: &Self::State) -> Vec<Self::State> {
        let pos = self.next_pos(s.0 as usize);
        self.k
            .successors(s.1 as usize)
            .iter()
            .flat_map(|&m| {
                self.aut.successors(&s.2, self.letter(pos, m)).into_iter().map(move |q| (pos as u32, m as u32, q))
            })
            .collect()
    }

    fn is_accepting(&self, s: &Self::State) -> bool {
        self.aut.is_accepting(&s.2)
    }
}

/// Paths of exactly `len` nodes from initial nodes, in lexicographic order.
fn paths(k: &KripkeStructure, len: usize) -> Vec<Vec<usize>> {
    let sorted = |xs: &[usize]| {
        let mut v = xs.to_vec();
        v.sort_unstable();
        v
    };
    let mut out = Vec::new();
    let mut stack: Vec<Vec<usize>> = sorted(k.initial_nodes()).into_iter().rev().map(|n| vec![n]).collect();
    while let Some(p) = stack.pop() {
        if p.len() == len {
            out.push(p);
            continue;
        }
        for m in sorted(k.successors(*p.last().unwrap())).into_iter().rev() {
            let mut q = p.clone();
            q.push(m);
            stack.push(q);
        }
    }
    out
}

/// All π1 lassos with `|stem| + |cycle| ≤ bound`, shortest first, then by
/// node sequence and stem length. Non-primitive lassos are skipped since
/// they denote a run already enumerated.
pub fn candidate_lassos(k: &KripkeStructure, bound: usize) -> impl Iterator<Item = Lasso> + '_ {
    (1..=bound).flat_map(move |len| {
        paths(k, len).into_iter().flat_map(move |p| {
            (0..len).filter_map(move |s| {
                if !k.has_edge(p[len - 1], p[s]) {
                    return None;
                }
                let (stem, cycle) = (p[..s].to_vec(), p[s..].to_vec());
                let norm = normalize_lasso(stem.clone(), cycle.clone());
                (norm == (stem.clone(), cycle.clone())).then(|| Lasso::new(stem, cycle))
            })
        })
    })
}

/// Whether every run of `k` taken as π2 satisfies `body` with π1 = `pi1`.
pub(crate) fn holds_for_all_pi2(k: &KripkeStructure, pi1: &Lasso, neg_aut: &BuchiAutomaton) -> bool {
    is_empty(&LassoProduct::new(k, pi1, neg_aut))
}

/// Semi-decides an `∃∀` formula: true with the first lasso π1 (up to
/// `bound` nodes) for which every π2 satisfies the body, inconclusive
/// otherwise.
pub fn check_exists_forall_bounded(k: &KripkeStructure, f: &HyperFormula, bound: usize) -> Result<Verdict, EngineError> {
    if f.quantifiers() != (Quantifier::Exists, Quantifier::Forall) {
        return Err(EngineError::PrefixMismatch { expected: "∃∀", found: prefix_name(f) });
    }
    if bound == 0 {
        return Err(EngineError::ZeroBound);
    }
    let body = Ltl::from_body(&f.body, k.symbols())?;
    let neg = BuchiAutomaton::new(&body.negate())?;
    for pi1 in candidate_lassos(k, bound) {
        if holds_for_all_pi2(k, &pi1, &neg) {
            let mut v = Verdict::new(Truth::True, Mode::Bounded(bound), EngineId::ExistsForallBounded)
                .with_witness(single_witness(k, WitnessKind::Confirmation, pi1, None));
            v.certified = true;
            return Ok(v);
        }
    }
    Ok(Verdict::new(Truth::Inconclusive, Mode::Bounded(bound), EngineId::ExistsForallBounded))
}
