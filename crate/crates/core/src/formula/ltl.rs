//! Core LTL over resolved propositions.

use std::fmt;

use super::{AtomProp, Body, FormulaError};
use crate::kripke::{Label, Prop, Symbols};

/// An atom bound to a trace variable and a resolved proposition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RAtom {
    pub var: usize,
    pub prop: Prop,
}

/// Desugared LTL: the only form engines and evaluators consume.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Ltl {
    True,
    Atom(RAtom),
    Not(Box<Ltl>),
    Or(Box<Ltl>, Box<Ltl>),
    Next(Box<Ltl>),
    Until(Box<Ltl>, Box<Ltl>),
}

impl Ltl {
    /// Expands macros against `symbols`, desugars, and resolves names.
    pub fn from_body(body: &Body, symbols: &Symbols) -> Result<Ltl, FormulaError> {
        let core = body.expand_macros(&symbols.states, &symbols.observations).desugar();
        Self::resolve(&core, symbols)
    }

    fn resolve(b: &Body, symbols: &Symbols) -> Result<Ltl, FormulaError> {
        let r = |b: &Body| Self::resolve(b, symbols).map(Box::new);
        Ok(match b {
            Body::True => Ltl::True,
            Body::Atom(a) => {
                let prop = match &a.prop {
                    AtomProp::State(x) => Prop::State(crate::des::StateId(
                        position(&symbols.states, x)
                            .ok_or_else(|| FormulaError::UnknownProposition { kind: "state", id: x.clone() })?,
                    )),
                    AtomProp::Obs(o) => Prop::Obs(crate::des::ObsId(
                        position(&symbols.observations, o)
                            .ok_or_else(|| FormulaError::UnknownProposition { kind: "observation", id: o.clone() })?,
                    )),
                    AtomProp::Tau => Prop::Tau,
                };
                Ltl::Atom(RAtom { var: a.var, prop })
            }
            Body::Not(a) => Ltl::Not(r(a)?),
            Body::Or(a, c) => Ltl::Or(r(a)?, r(c)?),
            Body::Next(a) => Ltl::Next(r(a)?),
            Body::Until(a, c) => Ltl::Until(r(a)?, r(c)?),
            other => unreachable!("desugared body contains {other:?}"),
        })
    }

    /// Negation, collapsing a leading double negation.
    pub fn negate(&self) -> Ltl {
        match self {
            Ltl::Not(a) => (**a).clone(),
            other => Ltl::Not(Box::new(other.clone())),
        }
    }

    pub fn is_propositional(&self) -> bool {
        match self {
            Ltl::True | Ltl::Atom(_) => true,
            Ltl::Not(a) => a.is_propositional(),
            Ltl::Or(a, b) => a.is_propositional() && b.is_propositional(),
            Ltl::Next(_) | Ltl::Until(..) => false,
        }
    }

    /// Bit mask of trace variables mentioned.
    pub fn vars(&self) -> u8 {
        match self {
            Ltl::True => 0,
            Ltl::Atom(a) => 1 << a.var,
            Ltl::Not(a) | Ltl::Next(a) => a.vars(),
            Ltl::Or(a, b) | Ltl::Until(a, b) => a.vars() | b.vars(),
        }
    }

    /// Evaluates a propositional formula on one instant; `labels[v]` is the
    /// label of trace variable `v`.
    ///
    /// # Panics
    /// If the formula is temporal.
    pub fn eval_prop(&self, labels: &[Label]) -> bool {
        match self {
            Ltl::True => true,
            Ltl::Atom(a) => labels[a.var].holds(a.prop),
            Ltl::Not(a) => !a.eval_prop(labels),
            Ltl::Or(a, b) => a.eval_prop(labels) || b.eval_prop(labels),
            Ltl::Next(_) | Ltl::Until(..) => panic!("eval_prop on a temporal formula"),
        }
    }

    /// Number of distinct subformulas.
    pub fn closure_size(&self) -> usize {
        fn walk<'a>(l: &'a Ltl, seen: &mut std::collections::HashSet<&'a Ltl>) {
            if !seen.insert(l) {
                return;
            }
            match l {
                Ltl::True | Ltl::Atom(_) => {}
                Ltl::Not(a) | Ltl::Next(a) => walk(a, seen),
                Ltl::Or(a, b) | Ltl::Until(a, b) => {
                    walk(a, seen);
                    walk(b, seen);
                }
            }
        }
        let mut seen = std::collections::HashSet::new();
        walk(self, &mut seen);
        seen.len()
    }
}

fn position(names: &[String], name: &str) -> Option<u32> {
    names.iter().position(|n| n == name).map(|i| i as u32)
}

impl fmt::Display for Ltl {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Ltl::True => write!(f, "true"),
            Ltl::Atom(a) => {
                let v = a.var + 1;
                match a.prop {
                    Prop::State(x) => write!(f, "x#{}@p{v}", x.0),
                    Prop::Obs(o) => write!(f, "o#{}@p{v}", o.0),
                    Prop::Tau => write!(f, "tau@p{v}"),
                }
            }
            Ltl::Not(a) => write!(f, "!({a})"),
            Ltl::Or(a, b) => write!(f, "({a} | {b})"),
            Ltl::Next(a) => write!(f, "X({a})"),
            Ltl::Until(a, b) => write!(f, "({a} U {b})"),
        }
    }
}
