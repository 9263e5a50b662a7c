//! Human-readable polynomial syntax: `26171/9604*x^4*y^2 - 3*x + (2*u+1)*y`.

use super::{Monomial, MultiPoly};
use crate::coeffs::Field;
use crate::error::{parse_err, Result};

/// Term order used when printing.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PrintOrder {
    /// Descending grevlex.
    Grevlex,
    /// Descending lexicographic.
    Lex,
}

/// `x, y` or `x, y, z` for two or three variables, `x1 … xn` otherwise.
pub fn default_names(nvars: usize) -> Vec<String> {
    match nvars {
        2 => vec!["x".into(), "y".into()],
        3 => vec!["x".into(), "y".into(), "z".into()],
        n => (1..=n).map(|i| format!("x{i}")).collect(),
    }
}

pub(super) fn format_poly<F: Field>(p: &MultiPoly<F>, names: &[String], order: PrintOrder) -> String {
    if p.is_zero() {
        return "0".into();
    }
    let f = p.field();
    let mut terms: Vec<(&Monomial, &F::Elem)> = p.terms().rev().collect();
    if order == PrintOrder::Lex {
        terms.sort_by(|a, b| b.0.lex_cmp(a.0));
    }
    let mut out = String::new();
    for (m, c) in terms {
        let t = if m.is_one() {
            f.format(c)
        } else {
            let mono = m.format_with(names);
            let s = f.format(c);
            if f.is_one(c) {
                mono
            } else if s.starts_with('-') && f.is_one(&f.neg(c)) {
                format!("-{mono}")
            } else if f.is_atomic(c) {
                format!("{s}*{mono}")
            } else {
                format!("({s})*{mono}")
            }
        };
        if !out.is_empty() && !t.starts_with('-') {
            out.push('+');
        }
        out.push_str(&t);
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(String),
    Ident(String),
    Op(char),
}

fn tokenize(s: &str) -> Result<Vec<Tok>> {
    let chars: Vec<char> = s.chars().map(|c| if c == '\u{2212}' { '-' } else { c }).collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            out.push(Tok::Num(chars[start..i].iter().collect()));
        } else if c.is_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            out.push(Tok::Ident(chars[start..i].iter().collect()));
        } else if "+-*/^()".contains(c) {
            out.push(Tok::Op(c));
            i += 1;
        } else {
            return Err(parse_err(s, format!("unexpected character '{c}'")));
        }
    }
    Ok(out)
}

struct Parser<'a, F: Field> {
    src: &'a str,
    toks: Vec<Tok>,
    pos: usize,
    field: &'a F,
    names: &'a [String],
}

impl<F: Field> Parser<'_, F> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(&Tok::Op(c)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn err(&self, msg: &str) -> crate::Error {
        parse_err(self.src, format!("{msg} at token {}", self.pos + 1))
    }

    fn expr(&mut self) -> Result<MultiPoly<F>> {
        let mut acc = MultiPoly::zero(self.field, self.names.len());
        let mut sign = if self.eat('-') {
            -1
        } else {
            self.eat('+');
            1
        };
        loop {
            let t = self.term()?;
            acc = if sign < 0 { acc.sub(&t) } else { acc.add(&t) };
            if self.eat('+') {
                sign = 1;
            } else if self.eat('-') {
                sign = -1;
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<MultiPoly<F>> {
        let mut acc = self.factor()?;
        loop {
            if self.eat('*') {
                acc = acc.mul(&self.factor()?);
            } else if self.eat('/') {
                let d = self.factor()?;
                if !d.is_constant() || d.is_zero() {
                    return Err(self.err("division by a non-constant or zero"));
                }
                let inv = self.field.inv(d.leading_coeff().unwrap()).unwrap();
                acc = acc.scale(&inv);
            } else if matches!(self.peek(), Some(Tok::Num(_) | Tok::Ident(_) | Tok::Op('('))) {
                acc = acc.mul(&self.factor()?);
            } else {
                return Ok(acc);
            }
        }
    }

    fn factor(&mut self) -> Result<MultiPoly<F>> {
        if self.eat('-') {
            return Ok(self.factor()?.neg());
        }
        let base = self.atom()?;
        if self.eat('^') {
            match self.peek().cloned() {
                Some(Tok::Num(n)) => {
                    self.pos += 1;
                    let e: u32 = n.parse().map_err(|_| self.err("exponent too large"))?;
                    Ok(base.pow(e))
                }
                _ => Err(self.err("expected an exponent")),
            }
        } else {
            Ok(base)
        }
    }

    fn atom(&mut self) -> Result<MultiPoly<F>> {
        let n = self.names.len();
        match self.peek().cloned() {
            Some(Tok::Num(s)) => {
                self.pos += 1;
                Ok(MultiPoly::constant(self.field, n, self.field.parse(&s)?))
            }
            Some(Tok::Ident(s)) => {
                self.pos += 1;
                if let Some(i) = self.names.iter().position(|v| *v == s) {
                    Ok(MultiPoly::var(self.field, n, i))
                } else {
                    let c = self
                        .field
                        .parse(&s)
                        .map_err(|_| self.err(&format!("unknown variable '{s}'")))?;
                    Ok(MultiPoly::constant(self.field, n, c))
                }
            }
            Some(Tok::Op('(')) => {
                self.pos += 1;
                let e = self.expr()?;
                if !self.eat(')') {
                    return Err(self.err("expected ')'"));
                }
                Ok(e)
            }
            _ => Err(self.err("expected a number, variable or '('")),
        }
    }
}

/// Parses a polynomial in the named variables.
pub fn parse_poly<F: Field>(field: &F, names: &[String], s: &str) -> Result<MultiPoly<F>> {
    let toks = tokenize(s)?;
    if toks.is_empty() {
        return Err(parse_err(s, "empty polynomial"));
    }
    let mut p = Parser { src: s, toks, pos: 0, field, names };
    let out = p.expr()?;
    if p.pos != p.toks.len() {
        return Err(p.err("trailing input"));
    }
    Ok(out)
}
