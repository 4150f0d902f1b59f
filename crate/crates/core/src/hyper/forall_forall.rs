//! Self-composition checking for non-alternating prefixes.

use std::cell::RefCell;
use std::collections::HashMap;

use super::buchi::{BState, BuchiAutomaton};
use super::ndfs::{find_accepting_lasso, normalize_lasso, BuchiGraph};
use super::{prefix_name, EngineError, EngineId, Verdict, Witness, WitnessKind};
use crate::formula::{HyperFormula, Ltl, Quantifier};
use crate::kripke::{KripkeStructure, Lasso};

/// `K × K × A`, where `A` reads pairs of labels.
///
/// Pairs are explored with distinct nodes first and otherwise in node
/// order, so witnesses prefer traces that actually differ.
pub struct SelfComposition<'a> {
    k: &'a KripkeStructure,
    aut: BuchiAutomaton,
    letters: RefCell<HashMap<(usize, usize), u64>>,
}

impl<'a> SelfComposition<'a> {
    pub fn new(k: &'a KripkeStructure, body: &Ltl) -> Result<Self, EngineError> {
        Ok(SelfComposition { k, aut: BuchiAutomaton::new(body)?, letters: RefCell::default() })
    }

    fn letter(&self, a: usize, b: usize) -> u64 {
        *self
            .letters
            .borrow_mut()
            .entry((a, b))
            .or_insert_with(|| self.aut.letter(&[self.k.label(a), self.k.label(b)]))
    }
}

fn ordered_pairs(xs: &[usize], ys: &[usize]) -> Vec<(usize, usize)> {
    let mut v: Vec<(usize, usize)> = xs.iter().flat_map(|&a| ys.iter().map(move |&b| (a, b))).collect();
    v.sort_by_key(|&(a, b)| (a == b, a, b));
    v
}

impl BuchiGraph for SelfComposition<'_> {
    type State = (u32, u32, BState);

    fn initial(&self) -> Vec<Self::State> {
        let init = self.k.initial_nodes();
        ordered_pairs(init, init)
            .into_iter()
            .flat_map(|(a, b)| {
                self.aut.initial(self.letter(a, b)).into_iter().map(move |q| (a as u32, b as u32, q))
            })
            .collect()
    }

    fn successors(&self, s: &Self::State) -> Vec<Self::State> {
        let (a, b, q) = (s.0 as usize, s.1 as usize, s.2);
        ordered_pairs(self.k.successors(a), self.k.successors(b))
            .into_iter()
            .flat_map(|(a2, b2)| {
                self.aut.successors(&q, self.letter(a2, b2)).into_iter().map(move |q2| (a2 as u32, b2 as u32, q2))
            })
            .collect()
    }

    fn is_accepting(&self, s: &Self::State) -> bool {
        self.aut.is_accepting(&s.2)
    }
}

/// Builds a witness from a pair lasso, normalizing each projection.
pub(crate) fn pair_witness(
    k: &KripkeStructure,
    kind: WitnessKind,
    stem: Vec<(usize, usize)>,
    cycle: Vec<(usize, usize)>,
) -> Witness {
    let (stem, cycle) = normalize_lasso(stem, cycle);
    let project = |f: fn(&(usize, usize)) -> usize| {
        let (s, c) = normalize_lasso(stem.iter().map(f).collect(), cycle.iter().map(f).collect());
        Lasso::new(s, c)
    };
    let pi1 = project(|p| p.0);
    let pi2 = project(|p| p.1);
    single_witness(k, kind, pi1, Some(pi2))
}

pub(crate) fn single_witness(k: &KripkeStructure, kind: WitnessKind, pi1: Lasso, pi2: Option<Lasso>) -> Witness {
    let mut rendered = vec![k.render_lasso(&pi1)];
    rendered.extend(pi2.as_ref().map(|l| k.render_lasso(l)));
    Witness { kind, pi1, pi2, rendered }
}

/// Stem and cycle of a lasso over node pairs.
type PairLasso = (Vec<(usize, usize)>, Vec<(usize, usize)>);

fn search(k: &KripkeStructure, body: &Ltl) -> Result<Option<PairLasso>, EngineError> {
    let g = SelfComposition::new(k, body)?;
    let pair = |s: &(u32, u32, BState)| (s.0 as usize, s.1 as usize);
    Ok(find_accepting_lasso(&g)
        .map(|l| (l.stem.iter().map(pair).collect(), l.cycle.iter().map(pair).collect())))
}

/// Decides a `∀∀` formula exactly; a violation comes with both traces.
pub fn check_forall_forall(k: &KripkeStructure, f: &HyperFormula) -> Result<Verdict, EngineError> {
    if f.quantifiers() != (Quantifier::Forall, Quantifier::Forall) {
        return Err(EngineError::PrefixMismatch { expected: "∀∀", found: prefix_name(f) });
    }
    let body = Ltl::from_body(&f.body, k.symbols())?;
    Ok(match search(k, &body.negate())? {
        None => Verdict::exact(true, EngineId::ForallForall),
        Some((stem, cycle)) => Verdict::exact(false, EngineId::ForallForall)
            .with_witness(pair_witness(k, WitnessKind::Refutation, stem, cycle)),
    })
}

/// Decides an `∃∃` formula exactly; a satisfying pair is returned.
pub fn check_exists_exists(k: &KripkeStructure, f: &HyperFormula) -> Result<Verdict, EngineError> {
    if f.quantifiers() != (Quantifier::Exists, Quantifier::Exists) {
        return Err(EngineError::PrefixMismatch { expected: "∃∃", found: prefix_name(f) });
    }
    let body = Ltl::from_body(&f.body, k.symbols())?;
    Ok(match search(k, &body)? {
        None => Verdict::exact(false, EngineId::ExistsExists),
        Some((stem, cycle)) => Verdict::exact(true, EngineId::ExistsExists)
            .with_witness(pair_witness(k, WitnessKind::Confirmation, stem, cycle)),
    })
}
