//! Exact evaluation of LTL over ultimately periodic traces.

use std::collections::HashMap;

use super::Ltl;
use crate::kripke::Label;

/// A label trace `stem · cycle^ω`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelLasso {
    pub stem: Vec<Label>,
    pub cycle: Vec<Label>,
}

impl LabelLasso {
    pub fn new(stem: Vec<Label>, cycle: Vec<Label>) -> Self {
        assert!(!cycle.is_empty(), "lasso cycle must be nonempty");
        LabelLasso { stem, cycle }
    }

    pub fn at(&self, i: usize) -> Label {
        if i < self.stem.len() {
            self.stem[i]
        } else {
            self.cycle[(i - self.stem.len()) % self.cycle.len()]
        }
    }
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Evaluates `body` at instant 0 with trace variable `v` bound to
/// `assignment[v]`.
///
/// The traces are aligned on a common lasso (longest stem, least common
/// multiple of the cycles); each subformula is evaluated at every position,
/// with `U` computed as a least fixpoint around the loop.
pub fn eval_body(body: &Ltl, assignment: &[&LabelLasso]) -> bool {
    let stem = assignment.iter().map(|l| l.stem.len()).max().unwrap_or(0);
    let cycle = assignment.iter().map(|l| l.cycle.len()).fold(1, |a, b| a / gcd(a, b) * b);
    let n = stem + cycle;
    let letters: Vec<Vec<Label>> = (0..n).map(|i| assignment.iter().map(|l| l.at(i)).collect()).collect();
    let mut ev = Evaluator { letters, stem, memo: HashMap::new() };
    ev.values(body)[0]
}

struct Evaluator<'a> {
    letters: Vec<Vec<Label>>,
    stem: usize,
    memo: HashMap<&'a Ltl, Vec<bool>>,
}

impl<'a> Evaluator<'a> {
    fn succ(&self, i: usize) -> usize {
        if i + 1 < self.letters.len() {
            i + 1
        } else {
            self.stem
        }
    }

    fn values(&mut self, f: &'a Ltl) -> Vec<bool> {
        if let Some(v) = self.memo.get(f) {
            return v.clone();
        }
        let n = self.letters.len();
        let v: Vec<bool> = match f {
            Ltl::True => vec![true; n],
            Ltl::Atom(a) => self.letters.iter().map(|l| l[a.var].holds(a.prop)).collect(),
            Ltl::Not(a) => self.values(a).into_iter().map(|b| !b).collect(),
            Ltl::Or(a, b) => {
                let (x, y) = (self.values(a), self.values(b));
                x.iter().zip(&y).map(|(p, q)| *p || *q).collect()
            }
            Ltl::Next(a) => {
                let x = self.values(a);
                (0..n).map(|i| x[self.succ(i)]).collect()
            }
            Ltl::Until(a, b) => {
                let (x, y) = (self.values(a), self.values(b));
                let mut v = y.clone();
                loop {
                    let mut changed = false;
                    for i in (0..n).rev() {
                        if !v[i] && x[i] && v[self.succ(i)] {
                            v[i] = true;
                            changed = true;
                        }
                    }
                    if !changed {
                        break v;
                    }
                }
            }
        };
        self.memo.insert(f, v.clone());
        v
    }
}
