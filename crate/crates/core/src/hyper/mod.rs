//! HyperLTL model checking on Kripke structures.
//!
//! * `∀∀` (and `∃∃`): self-composition, Büchi translation of the (negated)
//!   body, nested DFS — exact.
//! * `∀∃` in the synchronous fragment: π1 is walked through the structure
//!   while the set of π2 nodes still consistent with the obligations is
//!   tracked — exact.
//! * `∃∀`: bounded enumeration of π1 lassos — a semi-decision.
//!
//! [`verify`] builds the right structure and formula for a [`Property`] and
//! routes it.

mod buchi;
mod exists_forall;
mod forall_exists;
mod forall_forall;
pub mod ndfs;
mod replay;
mod verdict;

use std::time::Instant;

pub use buchi::{BState, BuchiAutomaton};
pub use exists_forall::check_exists_forall_bounded;
pub use forall_exists::check_forall_exists_sync;
pub use forall_forall::{check_exists_exists, check_forall_forall, SelfComposition};
pub use replay::replay_witness;
pub use verdict::{EngineId, Evidence, Mode, Truth, Verdict, Witness, WitnessKind};

use crate::des::ValidatedFsa;
use crate::formula::{property_formula, HyperFormula, Quantifier, StructureKind};
use crate::kripke::{build_kripke, build_modified_kripke, KripkeStructure};
use crate::{Error, Property};

#[derive(Debug, thiserror::Error, Clone, PartialEq, Eq)]
pub enum EngineError {
    #[error("quantifier prefix mismatch: this engine handles {expected}, formula has {found}")]
    PrefixMismatch { expected: &'static str, found: String },
    #[error("formula is outside the synchronous ∀∃ fragment: {0}")]
    NotSynchronousFragment(String),
    #[error("formula too large for the tableau: {0}")]
    FormulaTooLarge(String),
    #[error("bound must be at least 1")]
    ZeroBound,
    #[error(transparent)]
    Formula(#[from] crate::formula::FormulaError),
    #[error(transparent)]
    Kripke(#[from] crate::kripke::KripkeError),
}

pub(crate) fn prefix_name(f: &HyperFormula) -> String {
    let q = |q: Quantifier| if q == Quantifier::Forall { "∀" } else { "∃" };
    let (a, b) = f.quantifiers();
    format!("{}{}", q(a), q(b))
}

/// How weak detectability is decided.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WeakRoute {
    /// Exact: a reachable observer cycle of singleton estimates.
    Observer,
    /// Bounded `∃∀` lasso enumeration with the given bound.
    Bounded(usize),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerifyOptions {
    pub weak_route: WeakRoute,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions { weak_route: WeakRoute::Observer }
    }
}

/// The structure, formula and (for fault properties) refined automaton on
/// which `property` is checked.
#[derive(Debug, Clone)]
pub struct Instance {
    pub fsa: ValidatedFsa,
    pub formula: HyperFormula,
    pub structure: KripkeStructure,
    pub kind: StructureKind,
}

/// Builds the checking instance for `property`: fault properties run on the
/// fault-refined automaton, the two opacity properties anchored at an
/// instant run on the modified structure.
pub fn instance(fsa: &ValidatedFsa, property: Property) -> Result<Instance, Error> {
    let (model, part) = if property.needs_faults() {
        let (m, p) = fsa.refine_fault_partition()?;
        (m, Some(p))
    } else {
        (fsa.clone(), None)
    };
    let (formula, kind) = property_formula(property, &model, part.as_ref())?;
    let plain = build_kripke(&model);
    let structure = match kind {
        StructureKind::Plain => plain,
        StructureKind::Modified => build_modified_kripke(&plain)?,
    };
    Ok(Instance { fsa: model, formula, structure, kind })
}

/// Decides `property` for `fsa`.
pub fn verify(fsa: &ValidatedFsa, property: Property, opts: &VerifyOptions) -> Result<Verdict, Error> {
    let start = Instant::now();
    let mut v = if property == Property::WeakDetectability && opts.weak_route == WeakRoute::Observer {
        crate::oracle::weak_detectability_exact(fsa)
    } else {
        let inst = instance(fsa, property)?;
        let bound = match opts.weak_route {
            WeakRoute::Bounded(b) => b,
            WeakRoute::Observer => DEFAULT_BOUND,
        };
        let mut v = check_formula(&inst.structure, &inst.formula, bound)?;
        v.formula = Some(inst.formula.to_string());
        v
    };
    v.property = Some(property);
    v.elapsed = start.elapsed();
    Ok(v)
}

/// Default lasso bound for `∃∀` formulas.
pub const DEFAULT_BOUND: usize = 8;

/// Routes a formula to the engine matching its prefix.
pub fn check_formula(k: &KripkeStructure, f: &HyperFormula, bound: usize) -> Result<Verdict, EngineError> {
    use Quantifier::{Exists, Forall};
    match f.quantifiers() {
        (Forall, Forall) => check_forall_forall(k, f),
        (Exists, Exists) => check_exists_exists(k, f),
        (Forall, Exists) => check_forall_exists_sync(k, f),
        (Exists, Forall) => check_exists_forall_bounded(k, f, bound),
    }
}
