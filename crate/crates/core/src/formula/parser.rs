//! Recursive-descent parser for the formula grammar.
//!
//! ```text
//! formula := (("forall" | "exists") VAR ".")* body
//! body    := imp ("<->" body)?
//! imp     := or ("->" imp)?
//! or      := and ("|" and)*
//! and     := until ("&" until)*
//! until   := unary ("U" until)?
//! unary   := ("!" | "X" | "F" | "G" | "F1") unary | primary
//! primary := "(" body ")" | "true" | "false"
//!          | "x:" ID "@" VAR | "o:" ID "@" VAR | "tau@" VAR
//!          | "obseq(" VAR "," VAR ")" | "stateeq(" VAR "," VAR ")"
//! ID      := [A-Za-z0-9_]+ | '"' (escaped char)* '"'
//! ```

use super::{Atom, AtomProp, Body, FormulaError, HyperFormula, Quantifier};

pub fn parse_formula(text: &str) -> Result<HyperFormula, FormulaError> {
    let mut p = Parser { src: text, pos: 0, vars: Vec::new() };
    let mut prefix = Vec::new();
    loop {
        p.skip_ws();
        let save = p.pos;
        let q = match p.ident().as_deref() {
            Some("forall") => Quantifier::Forall,
            Some("exists") => Quantifier::Exists,
            _ => {
                p.pos = save;
                break;
            }
        };
        p.skip_ws();
        let at = p.pos;
        let name = p.ident().ok_or_else(|| p.error(at, "expected a trace variable"))?;
        p.expect(".")?;
        prefix.push((q, name.clone()));
        p.vars.push(name);
    }
    let body = p.body()?;
    p.skip_ws();
    if p.pos < p.src.len() {
        return Err(p.error(p.pos, "unexpected trailing input"));
    }
    if prefix.len() != 2 || prefix[0].1 == prefix[1].1 {
        let names: Vec<String> = prefix.iter().map(|(q, v)| format!("{} {v}", q.keyword())).collect();
        return Err(FormulaError::ArityError(if names.is_empty() {
            "none".into()
        } else {
            names.join(", ")
        }));
    }
    let mut it = prefix.into_iter();
    Ok(HyperFormula { prefix: [it.next().unwrap(), it.next().unwrap()], body })
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
    vars: Vec<String>,
}

impl<'a> Parser<'a> {
    fn rest(&self) -> &'a str {
        &self.src[self.pos..]
    }

    fn error(&self, pos: usize, msg: &str) -> FormulaError {
        FormulaError::SyntaxError { pos, msg: msg.to_string() }
    }

    fn skip_ws(&mut self) {
        let trimmed = self.rest().trim_start();
        self.pos = self.src.len() - trimmed.len();
    }

    fn eat(&mut self, tok: &str) -> bool {
        self.skip_ws();
        if self.rest().starts_with(tok) {
            self.pos += tok.len();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, tok: &str) -> Result<(), FormulaError> {
        if self.eat(tok) {
            Ok(())
        } else {
            Err(self.error(self.pos, &format!("expected `{tok}`")))
        }
    }

    /// Reads `[A-Za-z0-9_]+` at the current position (no whitespace skip).
    fn ident(&mut self) -> Option<String> {
        let len = self
            .rest()
            .find(|c: char| !(c.is_ascii_alphanumeric() || c == '_'))
            .unwrap_or(self.rest().len());
        if len == 0 {
            return None;
        }
        let s = self.rest()[..len].to_string();
        self.pos += len;
        Some(s)
    }

    fn peek_ident(&mut self) -> Option<String> {
        self.skip_ws();
        let save = self.pos;
        let id = self.ident();
        self.pos = save;
        id
    }

    fn var(&mut self) -> Result<usize, FormulaError> {
        self.skip_ws();
        let at = self.pos;
        let name = self.ident().ok_or_else(|| self.error(at, "expected a trace variable"))?;
        self.lookup(&name)
    }

    fn lookup(&self, name: &str) -> Result<usize, FormulaError> {
        self.vars
            .iter()
            .position(|v| v == name)
            .ok_or_else(|| FormulaError::UnboundTraceVar(name.to_string()))
    }

    fn id(&mut self) -> Result<String, FormulaError> {
        let at = self.pos;
        if !self.rest().starts_with('"') {
            return self.ident().ok_or_else(|| self.error(at, "expected an identifier"));
        }
        self.pos += 1;
        let mut out = String::new();
        let mut chars = self.rest().char_indices();
        while let Some((i, c)) = chars.next() {
            match c {
                '"' => {
                    self.pos += i + 1;
                    return Ok(out);
                }
                '\\' => match chars.next() {
                    Some((_, e)) => out.push(e),
                    None => break,
                },
                c => out.push(c),
            }
        }
        Err(self.error(at, "unterminated quoted identifier"))
    }

    fn body(&mut self) -> Result<Body, FormulaError> {
        let lhs = self.implies()?;
        if self.eat("<->") {
            return Ok(lhs.iff(self.body()?));
        }
        Ok(lhs)
    }

    fn implies(&mut self) -> Result<Body, FormulaError> {
        let lhs = self.or()?;
        if self.eat("->") {
            return Ok(lhs.implies(self.implies()?));
        }
        Ok(lhs)
    }

    fn or(&mut self) -> Result<Body, FormulaError> {
        let mut lhs = self.and()?;
        while self.eat("|") {
            lhs = lhs.or(self.and()?);
        }
        Ok(lhs)
    }

    fn and(&mut self) -> Result<Body, FormulaError> {
        let mut lhs = self.until()?;
        while self.eat("&") {
            lhs = lhs.and(self.until()?);
        }
        Ok(lhs)
    }

    fn until(&mut self) -> Result<Body, FormulaError> {
        let lhs = self.unary()?;
        if self.peek_ident().as_deref() == Some("U") {
            self.ident();
            return Ok(lhs.until(self.until()?));
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Body, FormulaError> {
        if self.eat("!") {
            return Ok(self.unary()?.not());
        }
        let op: fn(Body) -> Body = match self.peek_ident().as_deref() {
            Some("X") => Body::next,
            Some("F") => Body::eventually,
            Some("G") => Body::always,
            Some("F1") => Body::once,
            _ => return self.primary(),
        };
        self.ident();
        Ok(op(self.unary()?))
    }

    fn primary(&mut self) -> Result<Body, FormulaError> {
        self.skip_ws();
        let at = self.pos;
        if self.eat("(") {
            let b = self.body()?;
            self.expect(")")?;
            return Ok(b);
        }
        let Some(word) = self.ident() else {
            return Err(self.error(at, "expected a formula"));
        };
        match word.as_str() {
            "true" => Ok(Body::True),
            "false" => Ok(Body::False),
            "tau" => {
                self.expect("@")?;
                Ok(Body::Atom(Atom { prop: AtomProp::Tau, var: self.var()? }))
            }
            "x" | "o" if self.rest().starts_with(':') => {
                self.pos += 1;
                let id = self.id()?;
                self.expect("@")?;
                let var = self.var()?;
                let prop = if word == "x" { AtomProp::State(id) } else { AtomProp::Obs(id) };
                Ok(Body::Atom(Atom { prop, var }))
            }
            "obseq" | "stateeq" => {
                self.expect("(")?;
                let p = self.var()?;
                self.expect(",")?;
                let q = self.var()?;
                self.expect(")")?;
                Ok(if word == "obseq" { Body::ObsEq(p, q) } else { Body::StateEq(p, q) })
            }
            other => match self.lookup(other) {
                Ok(_) => Err(self.error(at, "a trace variable is not a formula")),
                Err(e) => Err(e),
            },
        }
    }
}
