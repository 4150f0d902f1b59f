//! Two-trace HyperLTL formulas: syntax tree, concrete syntax, macro
//! expansion, desugaring and the property templates.
//!
//! The concrete grammar is documented in `docs/formula-grammar.md`.

mod eval;
mod ltl;
mod parser;
mod printer;
mod templates;

use std::fmt;

pub use eval::{eval_body, LabelLasso};
pub use ltl::{Ltl, RAtom};
pub use parser::parse_formula;
pub use printer::body_to_string;
pub use templates::{property_formula, StructureKind};

#[derive(Debug, thiserror::Error, Clone, PartialEq, Eq)]
pub enum FormulaError {
    #[error("syntax error at byte {pos}: {msg}")]
    SyntaxError { pos: usize, msg: String },
    #[error("unbound trace variable `{0}`")]
    UnboundTraceVar(String),
    #[error("expected exactly two trace quantifiers over distinct variables, found {0}")]
    ArityError(String),
    #[error("missing {0} annotation")]
    MissingAnnotation(&'static str),
    #[error("unknown {kind} proposition `{id}`")]
    UnknownProposition { kind: &'static str, id: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Quantifier {
    Forall,
    Exists,
}

impl Quantifier {
    pub fn keyword(self) -> &'static str {
        match self {
            Quantifier::Forall => "forall",
            Quantifier::Exists => "exists",
        }
    }
}

/// A proposition as written: state and observation ids are names resolved
/// against a structure only when the formula is checked.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum AtomProp {
    State(String),
    Obs(String),
    Tau,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Atom {
    pub prop: AtomProp,
    /// Index into the quantifier prefix (0 or 1).
    pub var: usize,
}

/// LTL body over two trace variables. Everything except `Atom`, `True`,
/// `Not`, `Or`, `Next` and `Until` is sugar; `ObsEq`/`StateEq` are macros
/// that need a structure's alphabet to expand.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Body {
    True,
    False,
    Atom(Atom),
    Not(Box<Body>),
    And(Box<Body>, Box<Body>),
    Or(Box<Body>, Box<Body>),
    Implies(Box<Body>, Box<Body>),
    Iff(Box<Body>, Box<Body>),
    Next(Box<Body>),
    Until(Box<Body>, Box<Body>),
    Eventually(Box<Body>),
    Always(Box<Body>),
    /// ◇₁: holds eventually, and exactly once.
    Once(Box<Body>),
    ObsEq(usize, usize),
    StateEq(usize, usize),
}

#[allow(clippy::should_implement_trait)]
impl Body {
    pub fn atom(prop: AtomProp, var: usize) -> Body {
        Body::Atom(Atom { prop, var })
    }

    pub fn state(name: &str, var: usize) -> Body {
        Body::atom(AtomProp::State(name.to_string()), var)
    }

    pub fn obs(name: &str, var: usize) -> Body {
        Body::atom(AtomProp::Obs(name.to_string()), var)
    }

    pub fn tau(var: usize) -> Body {
        Body::atom(AtomProp::Tau, var)
    }

    pub fn not(self) -> Body {
        Body::Not(Box::new(self))
    }

    pub fn and(self, rhs: Body) -> Body {
        Body::And(Box::new(self), Box::new(rhs))
    }

    pub fn or(self, rhs: Body) -> Body {
        Body::Or(Box::new(self), Box::new(rhs))
    }

    pub fn implies(self, rhs: Body) -> Body {
        Body::Implies(Box::new(self), Box::new(rhs))
    }

    pub fn iff(self, rhs: Body) -> Body {
        Body::Iff(Box::new(self), Box::new(rhs))
    }

    pub fn next(self) -> Body {
        Body::Next(Box::new(self))
    }

    pub fn until(self, rhs: Body) -> Body {
        Body::Until(Box::new(self), Box::new(rhs))
    }

    pub fn eventually(self) -> Body {
        Body::Eventually(Box::new(self))
    }

    pub fn always(self) -> Body {
        Body::Always(Box::new(self))
    }

    pub fn once(self) -> Body {
        Body::Once(Box::new(self))
    }

    /// Left-folded conjunction; `True` when empty.
    pub fn conj<I: IntoIterator<Item = Body>>(items: I) -> Body {
        items.into_iter().reduce(Body::and).unwrap_or(Body::True)
    }

    /// Left-folded disjunction; `False` when empty.
    pub fn disj<I: IntoIterator<Item = Body>>(items: I) -> Body {
        items.into_iter().reduce(Body::or).unwrap_or(Body::False)
    }

    /// True when no temporal operator occurs.
    pub fn is_propositional(&self) -> bool {
        match self {
            Body::True | Body::False | Body::Atom(_) | Body::ObsEq(..) | Body::StateEq(..) => true,
            Body::Not(a) => a.is_propositional(),
            Body::And(a, b) | Body::Or(a, b) | Body::Implies(a, b) | Body::Iff(a, b) => {
                a.is_propositional() && b.is_propositional()
            }
            Body::Next(_) | Body::Until(..) | Body::Eventually(_) | Body::Always(_) | Body::Once(_) => false,
        }
    }

    /// Trace variables mentioned, as a bit mask.
    pub fn vars(&self) -> u8 {
        match self {
            Body::True | Body::False => 0,
            Body::Atom(a) => 1 << a.var,
            Body::ObsEq(p, q) | Body::StateEq(p, q) => (1 << p) | (1 << q),
            Body::Not(a) | Body::Next(a) | Body::Eventually(a) | Body::Always(a) | Body::Once(a) => a.vars(),
            Body::And(a, b) | Body::Or(a, b) | Body::Implies(a, b) | Body::Iff(a, b) | Body::Until(a, b) => {
                a.vars() | b.vars()
            }
        }
    }

    /// Rewrites into `{Atom, True, Not, Or, Next, Until}`; macros are kept
    /// as leaves.
    pub fn desugar(&self) -> Body {
        use Body::*;
        let d = |b: &Body| b.desugar();
        let not = |b: Body| Not(Box::new(b));
        let or = |a: Body, b: Body| Or(Box::new(a), Box::new(b));
        let and = |a: Body, b: Body| not(or(not(a), not(b)));
        let eventually = |b: Body| Until(Box::new(True), Box::new(b));
        let always = |b: Body| not(eventually(not(b)));
        match self {
            True | Atom(_) | ObsEq(..) | StateEq(..) => self.clone(),
            False => not(True),
            Not(a) => not(d(a)),
            Or(a, b) => or(d(a), d(b)),
            Next(a) => Next(Box::new(d(a))),
            Until(a, b) => Until(Box::new(d(a)), Box::new(d(b))),
            And(a, b) => and(d(a), d(b)),
            Implies(a, b) => or(not(d(a)), d(b)),
            Iff(a, b) => {
                let (a, b) = (d(a), d(b));
                or(and(a.clone(), b.clone()), and(not(a), not(b)))
            }
            Eventually(a) => eventually(d(a)),
            Always(a) => always(d(a)),
            Once(a) => {
                let a = d(a);
                let never_again = always(not(a.clone()));
                and(eventually(a.clone()), always(or(not(a), Next(Box::new(never_again)))))
            }
        }
    }

    /// Expands `obseq`/`stateeq` over the given alphabets.
    pub fn expand_macros(&self, states: &[String], observations: &[String]) -> Body {
        use Body::*;
        let e = |b: &Body| Box::new(b.expand_macros(states, observations));
        match self {
            True | False | Atom(_) => self.clone(),
            ObsEq(p, q) => Body::conj(observations.iter().map(|o| Body::obs(o, *p).iff(Body::obs(o, *q)))),
            StateEq(p, q) => Body::conj(states.iter().map(|x| Body::state(x, *p).iff(Body::state(x, *q)))),
            Not(a) => Not(e(a)),
            Next(a) => Next(e(a)),
            Eventually(a) => Eventually(e(a)),
            Always(a) => Always(e(a)),
            Once(a) => Once(e(a)),
            And(a, b) => And(e(a), e(b)),
            Or(a, b) => Or(e(a), e(b)),
            Implies(a, b) => Implies(e(a), e(b)),
            Iff(a, b) => Iff(e(a), e(b)),
            Until(a, b) => Until(e(a), e(b)),
        }
    }

    /// Number of distinct subformulas.
    pub fn closure_size(&self) -> usize {
        fn walk(b: &Body, seen: &mut std::collections::HashSet<Body>) {
            if !seen.insert(b.clone()) {
                return;
            }
            match b {
                Body::True | Body::False | Body::Atom(_) | Body::ObsEq(..) | Body::StateEq(..) => {}
                Body::Not(a) | Body::Next(a) | Body::Eventually(a) | Body::Always(a) | Body::Once(a) => walk(a, seen),
                Body::And(a, c) | Body::Or(a, c) | Body::Implies(a, c) | Body::Iff(a, c) | Body::Until(a, c) => {
                    walk(a, seen);
                    walk(c, seen);
                }
            }
        }
        let mut seen = std::collections::HashSet::new();
        walk(self, &mut seen);
        seen.len()
    }
}

/// A formula `Q1 π1. Q2 π2. body`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct HyperFormula {
    pub prefix: [(Quantifier, String); 2],
    pub body: Body,
}

impl HyperFormula {
    pub fn new(q1: Quantifier, q2: Quantifier, body: Body) -> Self {
        HyperFormula { prefix: [(q1, "p1".to_string()), (q2, "p2".to_string())], body }
    }

    pub fn quantifiers(&self) -> (Quantifier, Quantifier) {
        (self.prefix[0].0, self.prefix[1].0)
    }

    /// Number of quantifier alternations in the prefix.
    pub fn alternation_depth(&self) -> usize {
        usize::from(self.prefix[0].0 != self.prefix[1].0)
    }

    pub fn var_name(&self, var: usize) -> &str {
        &self.prefix[var].1
    }
}

impl fmt::Display for HyperFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (q, v) in &self.prefix {
            write!(f, "{} {}. ", q.keyword(), v)?;
        }
        printer::write_body(f, &self.body, &[self.prefix[0].1.as_str(), self.prefix[1].1.as_str()])
    }
}
