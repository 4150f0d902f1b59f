//! Exact `∀∃` checking for the synchronous fragment.
//!
//! The body must be `A → C` (or just `C`) where `A` mentions only π1 and
//! every conjunct of `C` is one of
//!
//! * a propositional constraint, read at instant 0;
//! * `G P` with `P` propositional;
//! * `P U Q` with `P` propositional and `Q` propositional over π1 alone.
//!
//! Such obligations can be discharged instant by instant: walking π1 through
//! the structure, we track the set of nodes at which some π2 prefix
//! satisfying every obligation so far can stand. Because each `Q` reads only
//! π1, all candidate π2 agree on when an until is fulfilled. The formula is
//! violated iff some π1 satisfies `A` while the tracked set eventually
//! empties or an until stays pending forever.

use std::cell::RefCell;
use std::collections::HashMap;

use super::buchi::{BState, BuchiAutomaton};
use super::forall_forall::single_witness;
use super::ndfs::{find_accepting_lasso, normalize_lasso, BuchiGraph};
use super::{prefix_name, EngineError, EngineId, Verdict, WitnessKind};
use crate::formula::{Body, HyperFormula, Ltl, Quantifier};
use crate::kripke::{KripkeStructure, Label, Lasso};

/// The body split into antecedent and per-instant obligations.
#[derive(Debug, Clone)]
pub(crate) struct SyncBody {
    pub antecedent: Ltl,
    anchors: Vec<Ltl>,
    globals: Vec<Ltl>,
    /// `(P, Q)` per until.
    untils: Vec<(Ltl, Ltl)>,
}

fn conjuncts(b: Body, out: &mut Vec<Body>) {
    match b {
        Body::And(l, r) => {
            conjuncts(*l, out);
            conjuncts(*r, out);
        }
        other => out.push(other),
    }
}

impl SyncBody {
    pub(crate) fn classify(f: &HyperFormula, k: &KripkeStructure) -> Result<Self, EngineError> {
        let sym = k.symbols();
        let body = f.body.expand_macros(&sym.states, &sym.observations);
        let lower = |b: &Body| Ltl::from_body(b, sym).map_err(EngineError::from);
        let (a, c) = match body {
            Body::Implies(a, c) => (*a, *c),
            c => (Body::True, c),
        };
        if a.vars() & !1 != 0 {
            return Err(EngineError::NotSynchronousFragment(format!("antecedent `{a}` mentions π2")));
        }
        let mut parts = Vec::new();
        conjuncts(c, &mut parts);
        let mut sb = SyncBody { antecedent: lower(&a)?, anchors: vec![], globals: vec![], untils: vec![] };
        for part in parts {
            match &part {
                p if p.is_propositional() => sb.anchors.push(lower(p)?),
                Body::Always(p) if p.is_propositional() => sb.globals.push(lower(p)?),
                Body::Until(p, q) if p.is_propositional() && q.is_propositional() && q.vars() & !1 == 0 => {
                    sb.untils.push((lower(p)?, lower(q)?))
                }
                other => {
                    return Err(EngineError::NotSynchronousFragment(format!("unsupported conjunct `{other}`")))
                }
            }
        }
        if sb.untils.len() > 64 {
            return Err(EngineError::FormulaTooLarge(format!("{} until obligations", sb.untils.len())));
        }
        Ok(sb)
    }
}

/// Tracked candidate set for π2.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
enum DState {
    /// No π2 can meet the obligations.
    Dead,
    /// Every obligation is discharged for some surviving π2.
    Sat,
    Track { set: Vec<u64>, pending: u64 },
}

struct SyncProduct<'a> {
    k: &'a KripkeStructure,
    body: &'a SyncBody,
    aut: BuchiAutomaton,
    words: usize,
    letters: RefCell<HashMap<usize, u64>>,
}

impl SyncProduct<'_> {
    fn letter(&self, a: usize) -> u64 {
        *self.letters.borrow_mut().entry(a).or_insert_with(|| self.aut.letter(&[self.k.label(a)]))
    }

    /// Filters candidate nodes `cands` at one instant where π1 stands on `a`.
    fn filter(&self, a: usize, cands: impl Iterator<Item = usize>, pending: u64, first: bool) -> DState {
        let l1 = self.k.label(a);
        let pair = |n: usize| -> [Label; 2] { [l1, self.k.label(n)] };
        let mut still = pending;
        let mut active: Vec<&Ltl> = Vec::new();
        for (j, (p, q)) in self.body.untils.iter().enumerate() {
            if pending >> j & 1 == 0 {
                continue;
            }
            if q.eval_prop(&[l1]) {
                still &= !(1 << j);
            } else {
                active.push(p);
            }
        }
        active.extend(self.body.globals.iter());
        if first {
            active.extend(self.body.anchors.iter());
        }
        let mut set = vec![0u64; self.words];
        let mut any = false;
        for n in cands {
            let ls = pair(n);
            if active.iter().all(|p| p.eval_prop(&ls)) {
                set[n / 64] |= 1 << (n % 64);
                any = true;
            }
        }
        if !any {
            DState::Dead
        } else if self.body.globals.is_empty() && still == 0 {
            DState::Sat
        } else {
            DState::Track { set, pending: still }
        }
    }

    fn step(&self, d: &DState, a2: usize) -> DState {
        match d {
            DState::Dead => DState::Dead,
            DState::Sat => DState::Sat,
            DState::Track { set, pending } => {
                let mut next = vec![0u64; self.words];
                for n in members(set) {
                    for &m in self.k.successors(n) {
                        next[m / 64] |= 1 << (m % 64);
                    }
                }
                self.filter(a2, members(&next), *pending, false)
            }
        }
    }

    fn all_pending(&self) -> u64 {
        match self.body.untils.len() {
            64 => u64::MAX,
            n => (1u64 << n) - 1,
        }
    }
}

fn members(set: &[u64]) -> impl Iterator<Item = usize> + '_ {
    set.iter()
        .enumerate()
        .flat_map(|(w, &bits)| (0..64).filter(move |b| bits >> b & 1 == 1).map(move |b| w * 64 + b))
}

impl BuchiGraph for SyncProduct<'_> {
    type State = (u32, BState, DState);

    fn initial(&self) -> Vec<Self::State> {
        let init = self.k.initial_nodes();
        init.iter()
            .flat_map(|&a| {
                let d = self.filter(a, init.iter().copied(), self.all_pending(), true);
                self.aut.initial(self.letter(a)).into_iter().map(move |q| (a as u32, q, d.clone()))
            })
            .collect()
    }

    fn successors(&self, s: &Self::State) -> Vec<Self::State> {
        let (a, q, d) = s;
        self.k
            .successors(*a as usize)
            .iter()
            .flat_map(|&a2| {
                let d2 = self.step(d, a2);
                self.aut.successors(q, self.letter(a2)).into_iter().map(move |q2| (a2 as u32, q2, d2.clone()))
            })
            .collect()
    }

    fn is_accepting(&self, s: &Self::State) -> bool {
        let violating = match &s.2 {
            DState::Dead => true,
            DState::Sat => false,
            DState::Track { pending, .. } => *pending != 0,
        };
        violating && self.aut.is_accepting(&s.1)
    }
}

/// Finds a π1 lasso for which no π2 satisfies the body, if any.
pub(crate) fn find_violation(k: &KripkeStructure, body: &SyncBody) -> Result<Option<Lasso>, EngineError> {
    let g = SyncProduct {
        k,
        body,
        aut: BuchiAutomaton::new(&body.antecedent)?,
        words: k.num_nodes().div_ceil(64).max(1),
        letters: RefCell::default(),
    };
    Ok(find_accepting_lasso(&g).map(|l| {
        let node = |s: &(u32, BState, DState)| s.0 as usize;
        let (stem, cycle) = normalize_lasso(l.stem.iter().map(node).collect(), l.cycle.iter().map(node).collect());
        Lasso::new(stem, cycle)
    }))
}

/// Decides a `∀∃` formula of the synchronous fragment exactly; a violation
/// comes with the universal trace.
pub fn check_forall_exists_sync(k: &KripkeStructure, f: &HyperFormula) -> Result<Verdict, EngineError> {
    if f.quantifiers() != (Quantifier::Forall, Quantifier::Exists) {
        return Err(EngineError::PrefixMismatch { expected: "∀∃", found: prefix_name(f) });
    }
    let body = SyncBody::classify(f, k)?;
    Ok(match find_violation(k, &body)? {
        None => Verdict::exact(true, EngineId::ForallExistsSync),
        Some(pi1) => Verdict::exact(false, EngineId::ForallExistsSync)
            .with_witness(single_witness(k, WitnessKind::Refutation, pi1, None)),
    })
}
