//! Independent re-checking of witnesses.

use super::buchi::BuchiAutomaton;
use super::exists_forall::holds_for_all_pi2;
use super::{prefix_name, EngineError, Witness, WitnessKind};
use crate::formula::{eval_body, HyperFormula, LabelLasso, Ltl, Quantifier};
use crate::kripke::{KripkeStructure, Lasso};

fn labels(k: &KripkeStructure, l: &Lasso) -> LabelLasso {
    let (stem, cycle) = k.lasso_labels(l);
    LabelLasso::new(stem, cycle)
}

/// Checks that `w` establishes the verdict it claims for `f` on `k`.
///
/// Both lassos must be runs of `k` (otherwise `NotARun`). Two-trace
/// witnesses are evaluated directly; a lone π1 is checked against every π2
/// by an emptiness test. Returns whether the witness holds up.
pub fn replay_witness(f: &HyperFormula, w: &Witness, k: &KripkeStructure) -> Result<bool, EngineError> {
    use Quantifier::{Exists, Forall};
    k.check_run(&w.pi1)?;
    if let Some(p2) = &w.pi2 {
        k.check_run(p2)?;
    }
    let expected = match (w.kind, w.pi2.is_some()) {
        (WitnessKind::Refutation, true) => (Forall, Forall),
        (WitnessKind::Confirmation, true) => (Exists, Exists),
        (WitnessKind::Refutation, false) => (Forall, Exists),
        (WitnessKind::Confirmation, false) => (Exists, Forall),
    };
    if f.quantifiers() != expected {
        let name = match expected {
            (Forall, Forall) => "∀∀",
            (Exists, Exists) => "∃∃",
            (Forall, Exists) => "∀∃",
            (Exists, Forall) => "∃∀",
        };
        return Err(EngineError::PrefixMismatch { expected: name, found: prefix_name(f) });
    }
    let body = Ltl::from_body(&f.body, k.symbols())?;
    Ok(match (&w.pi2, w.kind) {
        (Some(p2), kind) => {
            let sat = eval_body(&body, &[&labels(k, &w.pi1), &labels(k, p2)]);
            sat == (kind == WitnessKind::Confirmation)
        }
        (None, WitnessKind::Refutation) => holds_for_all_pi2(k, &w.pi1, &BuchiAutomaton::new(&body)?),
        (None, WitnessKind::Confirmation) => holds_for_all_pi2(k, &w.pi1, &BuchiAutomaton::new(&body.negate())?),
    })
}
