//! The nine property formulas, instantiated for a concrete automaton.

use super::{Body, FormulaError, HyperFormula, Quantifier};
use crate::des::{FaultPartition, StateSet, ValidatedFsa};
use crate::Property;

/// Which Kripke structure a formula is checked on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StructureKind {
    Plain,
    /// With τ-labelled copies.
    Modified,
}

const P1: usize = 0;
const P2: usize = 1;

/// Returns the formula characterising `property` on `fsa`, with all macros
/// expanded over its alphabets and annotations.
///
/// Diagnosability and predictability need `part`, the fault partition of
/// `fsa` (see [`ValidatedFsa::refine_fault_partition`]); the opacity
/// properties need the secret annotation of `fsa`.
///
/// The initial-state opacity formula requires the existential trace to
/// start in an initial state as part of its obligation: placed in the
/// antecedent, the constraint could be dodged by choosing a trace from a
/// non-initial node of `K_G` and the formula would hold vacuously.
pub fn property_formula(
    property: Property,
    fsa: &ValidatedFsa,
    part: Option<&FaultPartition>,
) -> Result<(HyperFormula, StructureKind), FormulaError> {
    let states = |set: &StateSet, var: usize| Body::disj(set.iter().map(|&x| Body::state(fsa.state_name(x), var)));
    let obs_eq = || {
        Body::conj(fsa.obs_ids().map(|o| {
            let o = fsa.obs_name(o);
            Body::obs(o, P1).iff(Body::obs(o, P2))
        }))
    };
    let state_eq = || {
        Body::conj(fsa.state_ids().map(|x| {
            let x = fsa.state_name(x);
            Body::state(x, P1).iff(Body::state(x, P2))
        }))
    };
    let init = |var: usize| states(fsa.initial_states(), var);
    let fault = |var: usize| -> Result<Body, FormulaError> {
        let part = part.ok_or(FormulaError::MissingAnnotation("fault partition"))?;
        Ok(states(&part.fault, var))
    };
    let secret = || fsa.secret_states().ok_or(FormulaError::MissingAnnotation("secret states"));
    let non_secret = |secret: &StateSet| -> StateSet { fsa.state_ids().filter(|x| !secret.contains(x)).collect() };

    use Quantifier::{Exists, Forall};
    use StructureKind::{Modified, Plain};
    let (q1, q2, body, kind) = match property {
        Property::Diagnosability => {
            let body = fault(P1)?.eventually().and(obs_eq().always()).implies(fault(P2)?.eventually());
            (Forall, Forall, body, Plain)
        }
        Property::Predictability => {
            let body = obs_eq().until(fault(P1)?).implies(fault(P2)?.eventually());
            (Forall, Forall, body, Plain)
        }
        Property::IDetectability => {
            let body = init(P1).and(init(P2)).and(obs_eq().always()).implies(state_eq());
            (Forall, Forall, body, Plain)
        }
        Property::StrongDetectability => {
            (Forall, Forall, obs_eq().always().implies(state_eq().always().eventually()), Plain)
        }
        Property::WeakDetectability => {
            (Exists, Forall, obs_eq().always().implies(state_eq().always().eventually()), Plain)
        }
        Property::DelayedDetectability => (Forall, Forall, obs_eq().always().implies(state_eq().always()), Plain),
        Property::InitialStateOpacity => {
            let s = secret()?;
            let body = init(P1)
                .and(states(s, P1))
                .implies(init(P2).and(obs_eq().always()).and(states(&non_secret(s), P2)));
            (Forall, Exists, body, Plain)
        }
        Property::CurrentStateOpacity | Property::InfiniteStepOpacity => {
            let s = secret()?;
            let antecedent = Body::tau(P1).once().and(Body::tau(P1).implies(states(s, P1)).always());
            let equality = if property == Property::CurrentStateOpacity {
                obs_eq().until(Body::tau(P1))
            } else {
                obs_eq().always()
            };
            let anchor = Body::tau(P1).implies(Body::tau(P2).and(states(&non_secret(s), P2))).always();
            (Forall, Exists, antecedent.implies(equality.and(anchor)), Modified)
        }
    };
    Ok((HyperFormula::new(q1, q2, body), kind))
}
