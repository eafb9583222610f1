//! Recursive-descent parser for element and scalar expressions.
//!
//! ```text
//! expr   := ['+'|'-'] term (('+'|'-') term)*
//! term   := factor (('*'|'/') factor)*
//! factor := ('+'|'-') factor | integer | 'z' ['^' integer] | '(' expr ')' | atom
//! atom   := label '(' ints ')'                 loop term x(r)
//!         | 'h' '[' ints ']'                   Hamiltonian h_r
//!         | 'K' '[' '(' ints ')' ',' '(' ints ')' ']'   central K(u, r)
//!         | 'K' digits | 'd' digits            K_i, d_i (1-based)
//! ```
//! `z` is the generator `zeta_N` of the coefficient field.

use std::collections::BTreeMap;

use num_bigint::BigInt;

use crate::error::{Error, Result};
use crate::lattice::Degree;
use crate::scalar::{CycScalar, CyclotomicField};
use crate::simple_lie::GElem;
use crate::tau::{TauAlgebra, TauElement};

#[derive(Clone, Debug, PartialEq, Eq)]
enum Atom {
    One,
    Loop(usize, Degree),
    Ham(Degree),
    Central(Vec<i64>, Degree),
    K(usize),
    D(usize),
}

/// A sum of `coefficient * atom` terms, each tagged with its source position.
type Sum = Vec<(CycScalar, Atom, usize)>;

struct Parser<'a> {
    src: Vec<char>,
    pos: usize,
    field: CyclotomicField,
    labels: &'a [String],
    n: usize,
}

fn err<T>(pos: usize, msg: impl Into<String>) -> Result<T> {
    Err(Error::Parse { pos, msg: msg.into() })
}

impl<'a> Parser<'a> {
    fn new(src: &str, field: CyclotomicField, labels: &'a [String], n: usize) -> Self {
        Self {
            src: src.chars().collect(),
            pos: 0,
            field,
            labels,
            n,
        }
    }

    fn skip_ws(&mut self) {
        while self.src.get(self.pos).is_some_and(|c| c.is_whitespace()) {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            let found = self.peek().map_or("end of input".to_string(), |f| format!("'{f}'"));
            err(self.pos, format!("expected '{c}', found {found}"))
        }
    }

    fn finish(&mut self) -> Result<()> {
        match self.peek() {
            None => Ok(()),
            Some(c) => err(self.pos, format!("unexpected '{c}'")),
        }
    }

    fn digits(&mut self) -> Option<String> {
        self.skip_ws();
        let start = self.pos;
        while self.src.get(self.pos).is_some_and(char::is_ascii_digit) {
            self.pos += 1;
        }
        (self.pos > start).then(|| self.src[start..self.pos].iter().collect())
    }

    fn int(&mut self) -> Result<i64> {
        let neg = self.eat('-');
        if !neg {
            self.eat('+');
        }
        let pos = self.pos;
        let d = self.digits().ok_or(Error::Parse {
            pos,
            msg: "expected an integer".into(),
        })?;
        let v: i64 = d.parse().map_err(|_| Error::Parse {
            pos,
            msg: "integer out of range".into(),
        })?;
        Ok(if neg { -v } else { v })
    }

    fn ints(&mut self, close: char) -> Result<Vec<i64>> {
        let mut out = Vec::new();
        if self.eat(close) {
            return Ok(out);
        }
        loop {
            out.push(self.int()?);
            if self.eat(close) {
                return Ok(out);
            }
            self.expect(',')?;
        }
    }

    fn degree(&mut self, close: char, start: usize) -> Result<Degree> {
        let v = self.ints(close)?;
        if v.len() != self.n {
            return err(start, format!("degree has {} entries, expected {}", v.len(), self.n));
        }
        Ok(Degree(v))
    }

    fn ident(&mut self) -> Option<String> {
        self.skip_ws();
        let start = self.pos;
        if !self
            .src
            .get(self.pos)
            .is_some_and(|c| c.is_ascii_alphabetic() || *c == '_')
        {
            return None;
        }
        while self
            .src
            .get(self.pos)
            .is_some_and(|c| c.is_ascii_alphanumeric() || *c == '_' || *c == '\'')
        {
            self.pos += 1;
        }
        Some(self.src[start..self.pos].iter().collect())
    }

    fn expr(&mut self) -> Result<Sum> {
        let mut out = Sum::new();
        let mut sign = if self.eat('-') {
            -self.field.one()
        } else {
            self.eat('+');
            self.field.one()
        };
        loop {
            for (c, a, p) in self.term()? {
                out.push((&c * &sign, a, p));
            }
            if self.eat('+') {
                sign = self.field.one();
            } else if self.eat('-') {
                sign = -self.field.one();
            } else {
                return Ok(out);
            }
        }
    }

    fn term(&mut self) -> Result<Sum> {
        let mut acc = self.factor()?;
        loop {
            if self.eat('*') {
                let pos = self.pos;
                let rhs = self.factor()?;
                acc = self.multiply(acc, rhs, pos)?;
            } else if self.eat('/') {
                let pos = self.pos;
                let rhs = self.factor()?;
                let d = scalar_of(&rhs, pos)?;
                let inv = d.invert().map_err(|_| Error::Parse {
                    pos,
                    msg: "division by zero".into(),
                })?;
                acc = acc.into_iter().map(|(c, a, p)| (&c * &inv, a, p)).collect();
            } else {
                return Ok(acc);
            }
        }
    }

    fn multiply(&self, a: Sum, b: Sum, pos: usize) -> Result<Sum> {
        let mut out = Sum::new();
        for (ca, aa, pa) in &a {
            for (cb, ab, pb) in &b {
                let (atom, p) = match (aa, ab) {
                    (Atom::One, x) => (x.clone(), *pb),
                    (x, Atom::One) => (x.clone(), *pa),
                    _ => return err(pos, "product of two basis elements is not defined; use bracket"),
                };
                out.push((ca * cb, atom, p));
            }
        }
        Ok(out)
    }

    fn factor(&mut self) -> Result<Sum> {
        let start = {
            self.skip_ws();
            self.pos
        };
        match self.peek() {
            Some(sign @ ('-' | '+')) => {
                self.pos += 1;
                let inner = self.factor()?;
                if sign == '+' {
                    return Ok(inner);
                }
                Ok(inner.into_iter().map(|(c, a, p)| (-&c, a, p)).collect())
            }
            Some('(') => {
                self.pos += 1;
                let inner = self.expr()?;
                self.expect(')')?;
                Ok(inner)
            }
            Some(c) if c.is_ascii_digit() => {
                let d = self.digits().expect("digit");
                let v: BigInt = d.parse().expect("digits");
                Ok(vec![(self.field.big(v), Atom::One, start)])
            }
            Some(c) if c.is_ascii_alphabetic() || c == '_' => {
                let id = self.ident().expect("identifier");
                self.atom(&id, start)
            }
            Some(c) => err(start, format!("unexpected '{c}'")),
            None => err(start, "unexpected end of input"),
        }
    }

    fn atom(&mut self, id: &str, start: usize) -> Result<Sum> {
        let one = self.field.one();
        let next = self.peek();
        if next == Some('(') {
            let idx = self
                .labels
                .iter()
                .position(|l| l == id)
                .map_or_else(|| err(start, format!("unknown basis label '{id}'")), Ok)?;
            self.pos += 1;
            let r = self.degree(')', start)?;
            return Ok(vec![(one, Atom::Loop(idx, r), start)]);
        }
        if next == Some('[') && id == "h" {
            self.pos += 1;
            let r = self.degree(']', start)?;
            return Ok(vec![(one, Atom::Ham(r), start)]);
        }
        if next == Some('[') && id == "K" {
            self.pos += 1;
            self.expect('(')?;
            let u = self.ints(')')?;
            self.expect(',')?;
            self.expect('(')?;
            let r = self.degree(')', start)?;
            self.expect(']')?;
            if u.len() != self.n {
                return err(
                    start,
                    format!("central vector has {} entries, expected {}", u.len(), self.n),
                );
            }
            return Ok(vec![(one, Atom::Central(u, r), start)]);
        }
        if id == "z" {
            let e = if self.eat('^') { self.int()? } else { 1 };
            return Ok(vec![(self.field.zeta_pow(e), Atom::One, start)]);
        }
        for (prefix, is_k) in [("K", true), ("d", false)] {
            if let Some(rest) = id.strip_prefix(prefix) {
                if !rest.is_empty() && rest.chars().all(|c| c.is_ascii_digit()) {
                    let i: usize = rest.parse().map_err(|_| Error::Parse {
                        pos: start,
                        msg: "index out of range".into(),
                    })?;
                    if i == 0 || i > self.n {
                        return err(start, format!("index {i} out of range 1..={}", self.n));
                    }
                    let atom = if is_k { Atom::K(i - 1) } else { Atom::D(i - 1) };
                    return Ok(vec![(one, atom, start)]);
                }
            }
        }
        err(start, format!("unknown symbol '{id}'"))
    }
}

fn scalar_of(sum: &Sum, pos: usize) -> Result<CycScalar> {
    let mut acc: Option<CycScalar> = None;
    for (c, a, p) in sum {
        if *a != Atom::One {
            return err(*p, "expected a scalar");
        }
        acc = Some(match acc {
            Some(x) => &x + c,
            None => c.clone(),
        });
    }
    acc.map_or_else(|| err(pos, "empty scalar"), Ok)
}

/// Parses a coefficient such as `-3/2`, `z^2 - 1` or `(1 + z)/3`.
pub fn parse_scalar(src: &str, field: CyclotomicField) -> Result<CycScalar> {
    let mut p = Parser::new(src, field, &[], 0);
    let sum = p.expr()?;
    p.finish()?;
    scalar_of(&sum, 0)
}

/// Parses an element of `tau` against the algebra's basis labels.
pub fn parse_element(src: &str, alg: &TauAlgebra) -> Result<TauElement> {
    let mut p = Parser::new(src, alg.field(), alg.lie().labels(), alg.n());
    let sum = p.expr()?;
    p.finish()?;
    let field = alg.field();
    let mut out = alg.zero();
    let mut loops: BTreeMap<Degree, (GElem, usize)> = BTreeMap::new();
    for (c, atom, pos) in sum {
        let wrap = |e: Error| match e {
            Error::Parse { .. } => e,
            other => Error::Parse {
                pos,
                msg: other.to_string(),
            },
        };
        match atom {
            Atom::One => {
                if !c.is_zero() {
                    return err(pos, "scalar term without a basis element");
                }
            }
            Atom::Loop(i, r) => {
                let entry = loops.entry(r).or_insert((GElem::zero(), pos));
                entry.0.add_term(i, &c);
            }
            Atom::Ham(r) => out = out.add(&alg.hamiltonian(&r).map_err(wrap)?.scale(&c)),
            Atom::Central(u, r) => {
                let v: Vec<CycScalar> = u.iter().map(|&x| &field.int(x) * &c).collect();
                out = out.add(&alg.central(&v, &r).map_err(wrap)?);
            }
            Atom::K(i) => out = out.add(&alg.k(i).map_err(wrap)?.scale(&c)),
            Atom::D(i) => out = out.add(&alg.d(i).map_err(wrap)?.scale(&c)),
        }
    }
    for (r, (g, pos)) in loops {
        let x = alg.loop_elem(&g, &r).map_err(|e| Error::Parse {
            pos,
            msg: e.to_string(),
        })?;
        out = out.add(&x);
    }
    Ok(out)
}

/// Parses a degree tuple such as `(1,-2)` or `1,-2`.
pub fn parse_degree(src: &str) -> Result<Degree> {
    let mut p = Parser::new(src, CyclotomicField::new(1)?, &[], 0);
    let paren = p.eat('(');
    let v = if paren { p.ints(')')? } else { p.ints_until_end()? };
    p.finish()?;
    Ok(Degree(v))
}

impl Parser<'_> {
    fn ints_until_end(&mut self) -> Result<Vec<i64>> {
        let mut out = Vec::new();
        if self.peek().is_none() {
            return Ok(out);
        }
        loop {
            out.push(self.int()?);
            if self.peek().is_none() {
                return Ok(out);
            }
            self.expect(',')?;
        }
    }
}

/// Renders `src` with a caret under `pos`.
pub fn caret(src: &str, pos: usize) -> String {
    format!("  {src}\n  {}^", " ".repeat(pos.min(src.chars().count())))
}
