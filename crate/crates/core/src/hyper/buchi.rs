//! LTL to Büchi translation by the closure (tableau) construction.
//!
//! Maximal propositional subformulas become *predicates* whose truth is read
//! off the current letter; every `X` and `U` subformula gets one bit. An
//! automaton state is a bit vector together with the predicate valuation of
//! the letter it accepts, so states are letter-labelled and transitions are
//! letter-independent. Transitions enforce the one-step expansion laws
//!
//! ```text
//! X φ ∈ A  ⇔  φ ∈ B
//! φ U ψ ∈ A  ⇔  ψ ∈ A ∨ (φ ∈ A ∧ φ U ψ ∈ B)
//! ```
//!
//! and one generalized acceptance set per until (`φ U ψ ∉ A ∨ ψ ∈ A`) is
//! degeneralized with a round-robin counter. States are produced on demand.

use std::cell::RefCell;
use std::collections::HashMap;

use super::EngineError;
use crate::formula::Ltl;
use crate::kripke::Label;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
enum Node {
    True,
    Pred(usize),
    Bit(usize),
    Not(Box<Node>),
    Or(Box<Node>, Box<Node>),
}

#[derive(Debug, Clone)]
enum Temporal {
    Next(Node),
    Until(Node, Node),
}

/// A state: temporal bits, the predicate valuation of its letter, and the
/// degeneralization counter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BState {
    pub bits: u64,
    pub pmask: u64,
    pub counter: u8,
}

#[derive(Debug)]
pub struct BuchiAutomaton {
    preds: Vec<Ltl>,
    temporals: Vec<Temporal>,
    root: Node,
    untils: Vec<usize>,
    initial_cache: RefCell<HashMap<u64, Vec<u64>>>,
    succ_cache: RefCell<HashMap<(u64, u64, u64), Vec<u64>>>,
}

const MAX_BITS: usize = 63;

impl BuchiAutomaton {
    /// Translates `f`. Fails only if `f` has more than 63 temporal
    /// subformulas or predicates.
    pub fn new(f: &Ltl) -> Result<Self, EngineError> {
        let mut b = Builder::default();
        let root = b.compile(f);
        if b.temporals.len() > MAX_BITS || b.preds.len() > MAX_BITS {
            return Err(EngineError::FormulaTooLarge(format!(
                "{} temporal subformulas, {} predicates",
                b.temporals.len(),
                b.preds.len()
            )));
        }
        let untils = (0..b.temporals.len())
            .filter(|&i| matches!(b.temporals[i], Temporal::Until(..)))
            .collect();
        Ok(BuchiAutomaton {
            preds: b.preds,
            temporals: b.temporals,
            root,
            untils,
            initial_cache: RefCell::default(),
            succ_cache: RefCell::default(),
        })
    }

    pub fn num_temporal(&self) -> usize {
        self.temporals.len()
    }

    pub fn predicates(&self) -> &[Ltl] {
        &self.preds
    }

    /// Predicate valuation of a letter; `labels[v]` labels trace variable `v`.
    pub fn letter(&self, labels: &[Label]) -> u64 {
        self.preds
            .iter()
            .enumerate()
            .filter(|(_, p)| p.eval_prop(labels))
            .fold(0, |m, (i, _)| m | (1 << i))
    }

    fn eval(&self, n: &Node, bits: u64, pmask: u64) -> bool {
        match n {
            Node::True => true,
            Node::Pred(i) => pmask >> i & 1 == 1,
            Node::Bit(i) => bits >> i & 1 == 1,
            Node::Not(a) => !self.eval(a, bits, pmask),
            Node::Or(a, b) => self.eval(a, bits, pmask) || self.eval(b, bits, pmask),
        }
    }

    fn locally_consistent(&self, bits: u64, pmask: u64) -> bool {
        self.untils.iter().all(|&j| {
            let Temporal::Until(phi, psi) = &self.temporals[j] else { unreachable!() };
            let set = bits >> j & 1 == 1;
            if self.eval(psi, bits, pmask) {
                set
            } else {
                !set || self.eval(phi, bits, pmask)
            }
        })
    }

    fn all_bits(&self) -> u64 {
        if self.temporals.is_empty() {
            0
        } else {
            (1u64 << self.temporals.len()) - 1
        }
    }

    /// Initial states reading a letter with predicate valuation `pmask`.
    pub fn initial(&self, pmask: u64) -> Vec<BState> {
        let bits = self
            .initial_cache
            .borrow_mut()
            .entry(pmask)
            .or_insert_with(|| {
                submasks(self.all_bits())
                    .filter(|&b| self.locally_consistent(b, pmask) && self.eval(&self.root, b, pmask))
                    .collect()
            })
            .clone();
        bits.into_iter().map(|b| BState { bits: b, pmask, counter: 0 }).collect()
    }

    /// Successors of `a` that read a letter with valuation `next_pmask`.
    pub fn successors(&self, a: &BState, next_pmask: u64) -> Vec<BState> {
        let key = (a.bits, a.pmask, next_pmask);
        let bits = self
            .succ_cache
            .borrow_mut()
            .entry(key)
            .or_insert_with(|| self.compute_successors(a.bits, a.pmask, next_pmask))
            .clone();
        let counter = self.next_counter(a);
        bits.into_iter().map(|b| BState { bits: b, pmask: next_pmask, counter }).collect()
    }

    fn compute_successors(&self, bits: u64, pmask: u64, next_pmask: u64) -> Vec<u64> {
        let mut fixed_mask = 0u64;
        let mut fixed_val = 0u64;
        for &j in &self.untils {
            let Temporal::Until(phi, psi) = &self.temporals[j] else { unreachable!() };
            if self.eval(psi, bits, pmask) {
                continue;
            }
            if bits >> j & 1 == 1 {
                fixed_mask |= 1 << j;
                fixed_val |= 1 << j;
            } else if self.eval(phi, bits, pmask) {
                fixed_mask |= 1 << j;
            }
        }
        let free = self.all_bits() & !fixed_mask;
        submasks(free)
            .map(|f| f | fixed_val)
            .filter(|&b| {
                self.locally_consistent(b, next_pmask)
                    && self.temporals.iter().enumerate().all(|(j, t)| match t {
                        Temporal::Next(child) => (bits >> j & 1 == 1) == self.eval(child, b, next_pmask),
                        Temporal::Until(..) => true,
                    })
            })
            .collect()
    }

    fn in_acceptance_set(&self, a: &BState, k: usize) -> bool {
        let j = self.untils[k];
        let Temporal::Until(_, psi) = &self.temporals[j] else { unreachable!() };
        a.bits >> j & 1 == 0 || self.eval(psi, a.bits, a.pmask)
    }

    fn next_counter(&self, a: &BState) -> u8 {
        let k = self.untils.len();
        if k == 0 {
            return 0;
        }
        let c = a.counter as usize;
        if self.in_acceptance_set(a, c) {
            ((c + 1) % k) as u8
        } else {
            a.counter
        }
    }

    pub fn is_accepting(&self, a: &BState) -> bool {
        self.untils.is_empty() || (a.counter == 0 && self.in_acceptance_set(a, 0))
    }
}

/// All submasks of `m`, including 0 and `m`, in increasing order.
fn submasks(m: u64) -> impl Iterator<Item = u64> {
    let mut next = Some(0u64);
    std::iter::from_fn(move || {
        let cur = next?;
        next = if cur == m { None } else { Some(((cur | !m).wrapping_add(1)) & m) };
        Some(cur)
    })
}

#[derive(Default)]
struct Builder {
    preds: Vec<Ltl>,
    pred_ix: HashMap<Ltl, usize>,
    temporals: Vec<Temporal>,
    temporal_ix: HashMap<Ltl, usize>,
}

impl Builder {
    fn compile(&mut self, f: &Ltl) -> Node {
        if matches!(f, Ltl::True) {
            return Node::True;
        }
        if f.is_propositional() {
            let next = self.preds.len();
            let i = *self.pred_ix.entry(f.clone()).or_insert(next);
            if i == next {
                self.preds.push(f.clone());
            }
            return Node::Pred(i);
        }
        match f {
            Ltl::Not(a) => Node::Not(Box::new(self.compile(a))),
            Ltl::Or(a, b) => Node::Or(Box::new(self.compile(a)), Box::new(self.compile(b))),
            Ltl::Next(a) => {
                if let Some(&i) = self.temporal_ix.get(f) {
                    return Node::Bit(i);
                }
                let child = self.compile(a);
                self.push_temporal(f, Temporal::Next(child))
            }
            Ltl::Until(a, b) => {
                if let Some(&i) = self.temporal_ix.get(f) {
                    return Node::Bit(i);
                }
                let (x, y) = (self.compile(a), self.compile(b));
                self.push_temporal(f, Temporal::Until(x, y))
            }
            Ltl::True | Ltl::Atom(_) => unreachable!("propositional formulas handled above"),
        }
    }

    fn push_temporal(&mut self, f: &Ltl, t: Temporal) -> Node {
        let i = self.temporals.len();
        self.temporals.push(t);
        self.temporal_ix.insert(f.clone(), i);
        Node::Bit(i)
    }
}
