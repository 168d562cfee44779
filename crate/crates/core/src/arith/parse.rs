use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};

use super::{BiPoly, Rational, UniPoly};
use crate::error::{Error, Result};

/// A parsed polynomial together with the variable spellings it used.
#[derive(Clone, Debug)]
pub struct ParsedPoly {
    pub poly: BiPoly,
    pub mu_name: String,
    pub v_name: String,
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(BigInt),
    Ident(String),
    Op(char),
}

fn lex(s: &str) -> Result<Vec<(usize, Tok)>> {
    let b: Vec<char> = s.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < b.len() {
        let c = b[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            let st = i;
            while i < b.len() && b[i].is_ascii_digit() {
                i += 1;
            }
            let txt: String = b[st..i].iter().collect();
            out.push((st, Tok::Num(txt.parse().unwrap())));
        } else if c.is_alphabetic() || c == '_' {
            let st = i;
            while i < b.len() && (b[i].is_alphanumeric() || b[i] == '_') {
                i += 1;
            }
            out.push((st, Tok::Ident(b[st..i].iter().collect())));
        } else if "+-*/^()".contains(c) {
            out.push((i, Tok::Op(c)));
            i += 1;
        } else {
            return Err(Error::Parse { pos: i, msg: format!("unexpected character '{c}'") });
        }
    }
    Ok(out)
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    end: usize,
    mu_name: Option<String>,
    v_name: Option<String>,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(_, t)| t)
    }

    fn offset(&self) -> usize {
        self.toks.get(self.pos).map(|(p, _)| *p).unwrap_or(self.end)
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(Error::Parse { pos: self.offset(), msg: msg.into() })
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(&Tok::Op(c)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<BiPoly> {
        let mut acc = self.term()?;
        loop {
            if self.eat('+') {
                acc = &acc + &self.term()?;
            } else if self.eat('-') {
                acc = &acc - &self.term()?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<BiPoly> {
        let mut acc = self.unary()?;
        loop {
            if self.eat('*') {
                acc = &acc * &self.unary()?;
            } else if self.peek() == Some(&Tok::Op('/')) {
                let at = self.offset();
                self.pos += 1;
                let d = self.unary()?;
                let c = match (d.deg_v(), d.coeffs().first()) {
                    (Some(0), Some(c)) if c.is_constant() => c.coeff(0),
                    _ => return Err(Error::Parse { pos: at, msg: "division by a non-constant".into() }),
                };
                if c.is_zero() {
                    return Err(Error::Parse { pos: at, msg: "division by zero".into() });
                }
                acc = acc.scale(&c.recip());
            } else {
                return Ok(acc);
            }
        }
    }

    fn unary(&mut self) -> Result<BiPoly> {
        if self.eat('-') {
            return Ok(-self.unary()?);
        }
        if self.eat('+') {
            return self.unary();
        }
        self.power()
    }

    fn power(&mut self) -> Result<BiPoly> {
        let base = self.atom()?;
        if !self.eat('^') {
            return Ok(base);
        }
        let e = match self.peek() {
            Some(Tok::Num(n)) => n.to_u32().filter(|&e| e <= 10_000),
            _ => return self.err("exponent must be a nonnegative integer"),
        };
        let Some(e) = e else {
            return self.err("exponent too large");
        };
        self.pos += 1;
        let mut acc = BiPoly::constant(UniPoly::one());
        for _ in 0..e {
            acc = &acc * &base;
        }
        Ok(acc)
    }

    fn atom(&mut self) -> Result<BiPoly> {
        let tok = match self.peek() {
            Some(t) => t.clone(),
            None => return self.err("unexpected end of input"),
        };
        match tok {
            Tok::Num(n) => {
                self.pos += 1;
                Ok(BiPoly::constant(UniPoly::constant(Rational::from_integer(n))))
            }
            Tok::Ident(name) => {
                let mu = matches!(name.as_str(), "mu" | "X");
                let v = matches!(name.as_str(), "V" | "Y" | "T");
                if !mu && !v {
                    return self.err(format!("unknown variable '{name}'"));
                }
                let slot = if mu { &mut self.mu_name } else { &mut self.v_name };
                match slot {
                    Some(prev) if *prev != name => {
                        let msg = format!("variable spelled both '{prev}' and '{name}'");
                        return self.err(msg);
                    }
                    _ => *slot = Some(name),
                }
                self.pos += 1;
                Ok(if mu {
                    BiPoly::constant(UniPoly::x())
                } else {
                    BiPoly::new(vec![UniPoly::zero(), UniPoly::one()])
                })
            }
            Tok::Op('(') => {
                self.pos += 1;
                let e = self.expr()?;
                if !self.eat(')') {
                    return self.err("expected ')'");
                }
                Ok(e)
            }
            Tok::Op(c) => self.err(format!("unexpected '{c}'")),
        }
    }
}

/// Parse a polynomial in `mu` (alias `X`) and `V` (aliases `Y`, `T`).
pub fn parse_bipoly(s: &str) -> Result<ParsedPoly> {
    let toks = lex(s)?;
    if toks.is_empty() {
        return Err(Error::Parse { pos: 0, msg: "empty polynomial".into() });
    }
    let mut p = Parser { toks, pos: 0, end: s.chars().count(), mu_name: None, v_name: None };
    let poly = p.expr()?;
    if p.pos != p.toks.len() {
        return p.err("trailing input");
    }
    let v_default = if p.mu_name.as_deref() == Some("X") { "Y" } else { "V" };
    let mu_default = if matches!(p.v_name.as_deref(), Some("Y")) { "X" } else { "mu" };
    Ok(ParsedPoly {
        poly,
        mu_name: p.mu_name.unwrap_or_else(|| mu_default.to_string()),
        v_name: p.v_name.unwrap_or_else(|| v_default.to_string()),
    })
}

impl FromStr for BiPoly {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        parse_bipoly(s).map(|p| p.poly)
    }
}
