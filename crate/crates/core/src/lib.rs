//! Verification of observational properties of partially-observed
//! discrete-event systems.
//!
//! A system is an automaton whose events are seen through an observation
//! mask ([`des`]). Each property — diagnosability, predictability, four
//! flavours of detectability and three of opacity — is decided by checking
//! a two-trace HyperLTL formula ([`formula`]) on a Kripke structure built
//! from the automaton ([`kripke`]) with the model checkers in [`hyper`].
//! An independent checker working directly from state estimates
//! ([`oracle`]) cross-validates every verdict.
//!
//! ```
//! use hyperdes::{des, hyper, Property};
//!
//! let fsa = des::Fsa::builder()
//!     .states(["0", "1"])
//!     .events(["a", "b"])
//!     .transition("0", "a", "1")
//!     .transition("1", "b", "1")
//!     .initial(["0"])
//!     .mask("a", Some("o1"))
//!     .mask("b", Some("o2"))
//!     .build()
//!     .unwrap();
//! let fsa = des::validate_fsa(fsa).unwrap();
//! let v = hyper::verify(&fsa, Property::StrongDetectability, &Default::default()).unwrap();
//! assert!(v.holds.is_true());
//! ```

pub mod des;
pub mod formula;
pub mod hyper;
pub mod io;
pub mod kripke;
pub mod oracle;

use std::fmt;
use std::str::FromStr;

/// The nine properties.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Property {
    Diagnosability,
    Predictability,
    IDetectability,
    StrongDetectability,
    WeakDetectability,
    DelayedDetectability,
    InitialStateOpacity,
    CurrentStateOpacity,
    InfiniteStepOpacity,
}

impl Property {
    pub const ALL: [Property; 9] = [
        Property::Diagnosability,
        Property::Predictability,
        Property::IDetectability,
        Property::StrongDetectability,
        Property::WeakDetectability,
        Property::DelayedDetectability,
        Property::InitialStateOpacity,
        Property::CurrentStateOpacity,
        Property::InfiniteStepOpacity,
    ];

    pub const FAULT: [Property; 2] = [Property::Diagnosability, Property::Predictability];

    pub const DETECTABILITY: [Property; 4] = [
        Property::IDetectability,
        Property::StrongDetectability,
        Property::WeakDetectability,
        Property::DelayedDetectability,
    ];

    pub const OPACITY: [Property; 3] =
        [Property::InitialStateOpacity, Property::CurrentStateOpacity, Property::InfiniteStepOpacity];

    pub fn name(self) -> &'static str {
        match self {
            Property::Diagnosability => "diagnosability",
            Property::Predictability => "predictability",
            Property::IDetectability => "i-detectability",
            Property::StrongDetectability => "strong-detectability",
            Property::WeakDetectability => "weak-detectability",
            Property::DelayedDetectability => "delayed-detectability",
            Property::InitialStateOpacity => "initial-state-opacity",
            Property::CurrentStateOpacity => "current-state-opacity",
            Property::InfiniteStepOpacity => "infinite-step-opacity",
        }
    }

    pub fn needs_faults(self) -> bool {
        Property::FAULT.contains(&self)
    }

    pub fn needs_secrets(self) -> bool {
        Property::OPACITY.contains(&self)
    }
}

impl fmt::Display for Property {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, thiserror::Error, Clone, PartialEq, Eq)]
#[error("unknown property `{0}`")]
pub struct UnknownProperty(pub String);

impl FromStr for Property {
    type Err = UnknownProperty;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Property::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| UnknownProperty(s.to_string()))
    }
}

/// Any failure surfaced by the library.
#[derive(Debug, thiserror::Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error(transparent)]
    Model(#[from] des::ModelError),
    #[error(transparent)]
    Formula(#[from] formula::FormulaError),
    #[error(transparent)]
    Kripke(#[from] kripke::KripkeError),
    #[error(transparent)]
    Engine(#[from] hyper::EngineError),
    #[error(transparent)]
    Io(#[from] io::IoError),
}
