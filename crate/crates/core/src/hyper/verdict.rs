use std::fmt;
use std::time::Duration;

use crate::kripke::{Lasso, RenderedLasso};
use crate::Property;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Truth {
    True,
    False,
    Inconclusive,
}

impl Truth {
    pub fn is_true(self) -> bool {
        self == Truth::True
    }

    pub fn is_false(self) -> bool {
        self == Truth::False
    }

    pub fn is_inconclusive(self) -> bool {
        self == Truth::Inconclusive
    }

    pub fn from_bool(b: bool) -> Self {
        if b {
            Truth::True
        } else {
            Truth::False
        }
    }

    pub fn as_bool(self) -> Option<bool> {
        match self {
            Truth::True => Some(true),
            Truth::False => Some(false),
            Truth::Inconclusive => None,
        }
    }
}

impl fmt::Display for Truth {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Truth::True => "true",
            Truth::False => "false",
            Truth::Inconclusive => "inconclusive",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mode {
    Exact,
    /// Semi-decision with the given lasso (or depth) bound.
    Bounded(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EngineId {
    ForallForall,
    ExistsExists,
    ForallExistsSync,
    ExistsForallBounded,
    ObserverWeakDetectability,
    Oracle,
}

impl EngineId {
    pub fn name(self) -> &'static str {
        match self {
            EngineId::ForallForall => "hyper-forall-forall",
            EngineId::ExistsExists => "hyper-exists-exists",
            EngineId::ForallExistsSync => "hyper-forall-exists-sync",
            EngineId::ExistsForallBounded => "hyper-exists-forall-bounded",
            EngineId::ObserverWeakDetectability => "observer-weak-detectability",
            EngineId::Oracle => "oracle",
        }
    }

    pub fn is_hyper(self) -> bool {
        !matches!(self, EngineId::Oracle)
    }
}

impl fmt::Display for EngineId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Whether a witness shows the formula false or true.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum WitnessKind {
    /// Traces on which the body fails for every choice of the inner
    /// existential (or, for `∀∀`, the two traces themselves).
    Refutation,
    /// Traces on which the body holds for every choice of the inner
    /// universal (or, for `∃∃`, the two traces themselves).
    Confirmation,
}

/// Lasso runs of the structure instantiating the outer quantifier, plus the
/// inner one when the prefix is not alternating.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Witness {
    pub kind: WitnessKind,
    pub pi1: Lasso,
    pub pi2: Option<Lasso>,
    pub rendered: Vec<RenderedLasso>,
}

/// Definition-level evidence produced by the oracle.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Evidence {
    /// Observation sequence α.
    pub observations: Vec<String>,
    /// Continuation β for delayed estimates.
    pub continuation: Option<Vec<String>>,
    /// The estimate witnessing the verdict.
    pub estimate: Vec<String>,
    /// Event string realising the evidence, when one is reconstructed.
    pub string: Option<Vec<String>>,
    /// Current-state estimates along the prefixes of α.
    pub prefix_estimates: Vec<Vec<String>>,
    pub note: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Verdict {
    pub property: Option<Property>,
    pub holds: Truth,
    pub mode: Mode,
    pub engine: EngineId,
    pub witness: Option<Witness>,
    pub evidence: Option<Evidence>,
    /// A correctness argument backs the verdict (always for exact engines).
    pub certified: bool,
    pub formula: Option<String>,
    pub elapsed: Duration,
}

impl Verdict {
    pub fn new(holds: Truth, mode: Mode, engine: EngineId) -> Self {
        Verdict {
            property: None,
            holds,
            mode,
            engine,
            witness: None,
            evidence: None,
            certified: mode == Mode::Exact && !holds.is_inconclusive(),
            formula: None,
            elapsed: Duration::ZERO,
        }
    }

    pub fn exact(holds: bool, engine: EngineId) -> Self {
        Verdict::new(Truth::from_bool(holds), Mode::Exact, engine)
    }

    pub fn with_witness(mut self, w: Witness) -> Self {
        self.witness = Some(w);
        self
    }
}
