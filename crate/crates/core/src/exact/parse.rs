//! Recursive-descent parser for polynomial expressions in `u` and `v`.
//!
//! Accepts `+ - * / ^`, parentheses, integer literals and the variables.
//! Division is only allowed by constants.

use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::Zero;

use super::Poly;
use crate::{Error, Rational};

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(BigInt),
    U,
    V,
    Op(char),
}

fn lex(s: &str) -> Result<Vec<Tok>, String> {
    let chars: Vec<char> = s.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        match c {
            ' ' | '\t' | '\n' => i += 1,
            '0'..='9' => {
                let start = i;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                let lit: String = chars[start..i].iter().collect();
                out.push(Tok::Num(lit.parse().map_err(|e| format!("{e}"))?));
            }
            'u' => {
                out.push(Tok::U);
                i += 1;
            }
            'v' => {
                out.push(Tok::V);
                i += 1;
            }
            '\u{2212}' => {
                out.push(Tok::Op('-'));
                i += 1;
            }
            '+' | '-' | '*' | '/' | '^' | '(' | ')' => {
                out.push(Tok::Op(c));
                i += 1;
            }
            _ => return Err(format!("unexpected character {c:?}")),
        }
    }
    Ok(out)
}

struct Parser {
    toks: Vec<Tok>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }

    fn eat(&mut self, op: char) -> bool {
        if self.peek() == Some(&Tok::Op(op)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<Poly, String> {
        let mut acc = self.term()?;
        loop {
            if self.eat('+') {
                acc += self.term()?;
            } else if self.eat('-') {
                acc = acc - self.term()?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<Poly, String> {
        let mut acc = self.unary()?;
        loop {
            if self.eat('*') {
                acc = acc * self.unary()?;
            } else if self.eat('/') {
                let d = self.unary()?;
                let c = d
                    .as_constant()
                    .ok_or_else(|| "division by a non-constant".to_string())?;
                if c.is_zero() {
                    return Err("division by zero".into());
                }
                acc = acc.scale(&(Rational::from_integer(1.into()) / c));
            } else {
                return Ok(acc);
            }
        }
    }

    fn unary(&mut self) -> Result<Poly, String> {
        if self.eat('-') {
            return Ok(-self.unary()?);
        }
        if self.eat('+') {
            return self.unary();
        }
        self.power()
    }

    fn power(&mut self) -> Result<Poly, String> {
        let base = self.atom()?;
        if self.eat('^') {
            match self.toks.get(self.pos).cloned() {
                Some(Tok::Num(n)) => {
                    self.pos += 1;
                    let e: u32 = n.try_into().map_err(|_| "exponent too large".to_string())?;
                    Ok(base.pow(e))
                }
                _ => Err("exponent must be a non-negative integer".into()),
            }
        } else {
            Ok(base)
        }
    }

    fn atom(&mut self) -> Result<Poly, String> {
        let tok = self.toks.get(self.pos).cloned();
        self.pos += 1;
        match tok {
            Some(Tok::Num(n)) => Ok(Poly::constant(Rational::from_integer(n))),
            Some(Tok::U) => Ok(Poly::u()),
            Some(Tok::V) => Ok(Poly::v()),
            Some(Tok::Op('(')) => {
                let inner = self.expr()?;
                if !self.eat(')') {
                    return Err("missing ')'".into());
                }
                Ok(inner)
            }
            Some(t) => Err(format!("unexpected token {t:?}")),
            None => Err("unexpected end of input".into()),
        }
    }
}

impl FromStr for Poly {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let wrap = |m: String| Error::InvalidScenario(format!("polynomial {s:?}: {m}"));
        let toks = lex(s).map_err(wrap)?;
        if toks.is_empty() {
            return Err(wrap("empty expression".into()));
        }
        let mut p = Parser { toks, pos: 0 };
        let out = p.expr().map_err(wrap)?;
        if p.pos != p.toks.len() {
            return Err(wrap(format!("trailing input at token {}", p.pos)));
        }
        Ok(out)
    }
}
