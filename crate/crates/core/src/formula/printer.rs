//! Minimal-parenthesis printer; output re-parses to the same tree.

use std::fmt::{self, Write};

use super::{AtomProp, Body};

const IFF: u8 = 1;
const IMPLIES: u8 = 2;
const OR: u8 = 3;
const AND: u8 = 4;
const UNTIL: u8 = 5;
const UNARY: u8 = 6;
const ATOMIC: u8 = 7;

fn prec(b: &Body) -> u8 {
    match b {
        Body::Iff(..) => IFF,
        Body::Implies(..) => IMPLIES,
        Body::Or(..) => OR,
        Body::And(..) => AND,
        Body::Until(..) => UNTIL,
        Body::Not(_) | Body::Next(_) | Body::Eventually(_) | Body::Always(_) | Body::Once(_) => UNARY,
        _ => ATOMIC,
    }
}

pub(crate) fn is_bare_id(s: &str) -> bool {
    !s.is_empty() && s.chars().all(|c| c.is_ascii_alphanumeric() || c == '_')
}

pub(crate) fn write_id<W: Write>(w: &mut W, s: &str) -> fmt::Result {
    if is_bare_id(s) {
        return w.write_str(s);
    }
    w.write_char('"')?;
    for c in s.chars() {
        if c == '"' || c == '\\' {
            w.write_char('\\')?;
        }
        w.write_char(c)?;
    }
    w.write_char('"')
}

pub(crate) fn write_body<W: Write>(w: &mut W, b: &Body, vars: &[&str]) -> fmt::Result {
    go(w, b, 0, vars)
}

fn go<W: Write>(w: &mut W, b: &Body, min: u8, vars: &[&str]) -> fmt::Result {
    let paren = prec(b) < min;
    if paren {
        w.write_char('(')?;
    }
    let var = |i: usize| vars.get(i).copied().unwrap_or("?");
    match b {
        Body::True => w.write_str("true")?,
        Body::False => w.write_str("false")?,
        Body::Atom(a) => {
            match &a.prop {
                AtomProp::State(x) => {
                    w.write_str("x:")?;
                    write_id(w, x)?;
                }
                AtomProp::Obs(o) => {
                    w.write_str("o:")?;
                    write_id(w, o)?;
                }
                AtomProp::Tau => w.write_str("tau")?,
            }
            write!(w, "@{}", var(a.var))?;
        }
        Body::ObsEq(p, q) => write!(w, "obseq({},{})", var(*p), var(*q))?,
        Body::StateEq(p, q) => write!(w, "stateeq({},{})", var(*p), var(*q))?,
        Body::Not(a) => {
            w.write_char('!')?;
            go(w, a, UNARY, vars)?;
        }
        Body::Next(a) | Body::Eventually(a) | Body::Always(a) | Body::Once(a) => {
            let op = match b {
                Body::Next(_) => "X ",
                Body::Eventually(_) => "F ",
                Body::Always(_) => "G ",
                _ => "F1 ",
            };
            w.write_str(op)?;
            go(w, a, UNARY, vars)?;
        }
        Body::And(l, r) => binary(w, l, " & ", r, AND, false, vars)?,
        Body::Or(l, r) => binary(w, l, " | ", r, OR, false, vars)?,
        Body::Implies(l, r) => binary(w, l, " -> ", r, IMPLIES, true, vars)?,
        Body::Iff(l, r) => binary(w, l, " <-> ", r, IFF, true, vars)?,
        Body::Until(l, r) => binary(w, l, " U ", r, UNTIL, true, vars)?,
    }
    if paren {
        w.write_char(')')?;
    }
    Ok(())
}

fn binary<W: Write>(
    w: &mut W,
    l: &Body,
    op: &str,
    r: &Body,
    p: u8,
    right_assoc: bool,
    vars: &[&str],
) -> fmt::Result {
    let (lp, rp) = if right_assoc { (p + 1, p) } else { (p, p + 1) };
    go(w, l, lp, vars)?;
    w.write_str(op)?;
    go(w, r, rp, vars)
}

/// Prints a body with the default variable names `p1`, `p2`.
pub fn body_to_string(b: &Body) -> String {
    let mut s = String::new();
    write_body(&mut s, b, &["p1", "p2"]).expect("writing to a String cannot fail");
    s
}

impl fmt::Display for Body {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_body(f, self, &["p1", "p2"])
    }
}
