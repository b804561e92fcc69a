//! Minimal arithmetic expression language for coefficients and polyvectors.
//!
//! ```text
//! sum     := product (('+' | '-') product)*
//! product := unary (('*' | '/') unary)*
//! unary   := ('-' | '+') unary | power
//! power   := atom ('^' (['-'] integer | atom))*
//! atom    := integer | name | 'd'name | '(' sum ')'
//! ```
//!
//! `^` followed by an integer is a power (negative exponents allowed); `^`
//! followed by anything else is the wedge product, so `x*dx^dw` is the
//! bivector `x d_x ^ d_w`. There is no implicit multiplication.

use std::collections::BTreeMap;

use num_traits::{One, Signed};

use crate::error::{Error, Result};
use crate::exactalg::{LPoly, Monomial, Rat, RatFn};
use crate::multivector::{sort_sign, Coeff, Multivector};

/// A parsed polyvector: degree plus components on increasing index tuples.
#[derive(Clone, Debug, PartialEq)]
pub struct PolyTerm {
    pub degree: usize,
    pub comps: BTreeMap<Vec<usize>, RatFn>,
}

impl PolyTerm {
    fn scalar(f: RatFn) -> Self {
        let mut comps = BTreeMap::new();
        if !f.is_zero() {
            comps.insert(Vec::new(), f);
        }
        PolyTerm { degree: 0, comps }
    }

    fn basis(i: usize) -> Self {
        let mut comps = BTreeMap::new();
        comps.insert(vec![i], RatFn::one());
        PolyTerm { degree: 1, comps }
    }

    fn as_scalar(&self) -> Option<RatFn> {
        if self.degree != 0 {
            return None;
        }
        Some(self.comps.get(&Vec::new()).cloned().unwrap_or_else(RatFn::zero))
    }

    fn add(mut self, rhs: PolyTerm, offset: usize) -> Result<Self> {
        if self.comps.is_empty() && self.degree == 0 {
            return Ok(rhs);
        }
        if rhs.comps.is_empty() && rhs.degree == 0 {
            return Ok(self);
        }
        if self.degree != rhs.degree {
            return Err(parse_err(offset, format!("cannot add degree {} and degree {} terms", self.degree, rhs.degree)));
        }
        for (k, v) in rhs.comps {
            let sum = match self.comps.remove(&k) {
                Some(a) => &a + &v,
                None => v,
            };
            if !sum.is_zero() {
                self.comps.insert(k, sum);
            }
        }
        Ok(self)
    }

    fn mul(&self, rhs: &PolyTerm) -> PolyTerm {
        let mut out = PolyTerm { degree: self.degree + rhs.degree, comps: BTreeMap::new() };
        for (i, a) in &self.comps {
            for (j, b) in &rhs.comps {
                let mut idx = i.clone();
                idx.extend_from_slice(j);
                let Some(s) = sort_sign(&mut idx) else { continue };
                let p = a * b;
                let p = if s < 0 { -p } else { p };
                let sum = match out.comps.remove(&idx) {
                    Some(x) => &x + &p,
                    None => p,
                };
                if !sum.is_zero() {
                    out.comps.insert(idx, sum);
                }
            }
        }
        out
    }

    fn neg(self) -> PolyTerm {
        PolyTerm { degree: self.degree, comps: self.comps.into_iter().map(|(k, v)| (k, -v)).collect() }
    }

    /// Converts to a multivector with Laurent coefficients, rejecting
    /// non-monomial denominators.
    pub fn to_multivector(&self, chart: usize, n: usize) -> Result<Multivector> {
        let mut m = Multivector::zero(chart, n, self.degree);
        for (k, v) in &self.comps {
            let p = v.to_lpoly().ok_or_else(|| parse_err(0, "coefficient is not a Laurent polynomial".into()))?;
            m.add_term(k, p);
        }
        Ok(m)
    }
}

fn parse_err(offset: usize, message: String) -> Error {
    Error::Parse { offset, message }
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Int(num_bigint::BigInt),
    Name(String),
    Sym(char),
}

fn tokenize(text: &str) -> Result<Vec<(usize, Tok)>> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        if c.is_ascii_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            let start = i;
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            out.push((start, Tok::Int(text[start..i].parse().expect("digits"))));
        } else if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            out.push((start, Tok::Name(text[start..i].to_string())));
        } else if "+-*/^()".contains(c) {
            out.push((i, Tok::Sym(c)));
            i += 1;
        } else {
            return Err(parse_err(i, format!("unexpected character '{}'", text[i..].chars().next().unwrap_or(c))));
        }
    }
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    end: usize,
    vars: &'a [String],
    basis: usize,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(_, t)| t)
    }

    fn offset(&self) -> usize {
        self.toks.get(self.pos).map(|(o, _)| *o).unwrap_or(self.end)
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(&Tok::Sym(c)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn sum(&mut self) -> Result<PolyTerm> {
        let mut acc = self.product()?;
        loop {
            let off = self.offset();
            if self.eat('+') {
                acc = acc.add(self.product()?, off)?;
            } else if self.eat('-') {
                acc = acc.add(self.product()?.neg(), off)?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn product(&mut self) -> Result<PolyTerm> {
        let mut acc = self.unary()?;
        loop {
            let off = self.offset();
            if self.eat('*') {
                acc = acc.mul(&self.unary()?);
            } else if self.eat('/') {
                let rhs = self.unary()?;
                let d = rhs.as_scalar().ok_or_else(|| parse_err(off, "division by a polyvector".into()))?;
                let inv = d.recip().map_err(|_| parse_err(off, "division by zero".into()))?;
                acc = acc.mul(&PolyTerm::scalar(inv));
            } else {
                return Ok(acc);
            }
        }
    }

    fn unary(&mut self) -> Result<PolyTerm> {
        if self.eat('-') {
            return Ok(self.unary()?.neg());
        }
        if self.eat('+') {
            return self.unary();
        }
        self.power()
    }

    fn power(&mut self) -> Result<PolyTerm> {
        let mut base = self.atom()?;
        loop {
            let off = self.offset();
            if !self.eat('^') {
                return Ok(base);
            }
            let neg = matches!(self.peek(), Some(Tok::Sym('-')));
            let is_int = matches!(
                (neg, self.peek(), self.toks.get(self.pos + 1).map(|(_, t)| t)),
                (false, Some(Tok::Int(_)), _) | (true, _, Some(Tok::Int(_)))
            );
            if is_int {
                if neg {
                    self.pos += 1;
                }
                let eoff = self.offset();
                let Some((_, Tok::Int(e))) = self.toks.get(self.pos).cloned() else { unreachable!() };
                self.pos += 1;
                let e: i32 = e.try_into().map_err(|_| parse_err(eoff, "exponent too large".into()))?;
                let e = if neg { -e } else { e };
                let s = base.as_scalar().ok_or_else(|| parse_err(off, "power of a polyvector".into()))?;
                let p = s.pow(e).map_err(|_| parse_err(off, "negative power of zero".into()))?;
                base = PolyTerm::scalar(p);
            } else {
                let rhs = self.atom()?;
                base = base.mul(&rhs);
            }
        }
    }

    fn atom(&mut self) -> Result<PolyTerm> {
        let off = self.offset();
        match self.toks.get(self.pos).cloned() {
            Some((_, Tok::Int(n))) => {
                self.pos += 1;
                Ok(PolyTerm::scalar(RatFn::constant(Rat::from_integer(n))))
            }
            Some((_, Tok::Name(name))) => {
                self.pos += 1;
                if let Some(i) = self.vars.iter().position(|v| *v == name) {
                    return Ok(PolyTerm::scalar(RatFn::from_poly(LPoly::var(i))));
                }
                if let Some(rest) = name.strip_prefix('d') {
                    if let Some(i) = self.vars.iter().position(|v| v == rest) {
                        if i < self.basis {
                            return Ok(PolyTerm::basis(i));
                        }
                    }
                }
                Err(parse_err(off, format!("unknown name '{name}'")))
            }
            Some((_, Tok::Sym('('))) => {
                self.pos += 1;
                let v = self.sum()?;
                if !self.eat(')') {
                    return Err(parse_err(self.offset(), "expected ')'".into()));
                }
                Ok(v)
            }
            Some((_, t)) => Err(parse_err(off, format!("unexpected token {t:?}"))),
            None => Err(parse_err(off, "unexpected end of input".into())),
        }
    }
}

/// Parses a polyvector expression. Names are resolved against `vars`; only
/// the first `basis` variables have direction symbols `d<name>`.
pub fn parse_polyvector(text: &str, vars: &[String], basis: usize) -> Result<PolyTerm> {
    let toks = tokenize(text)?;
    let mut p = Parser { toks, pos: 0, end: text.len(), vars, basis };
    let v = p.sum()?;
    if p.pos != p.toks.len() {
        return Err(parse_err(p.offset(), "trailing input".into()));
    }
    Ok(v)
}

pub fn parse_ratfn(text: &str, vars: &[String]) -> Result<RatFn> {
    let v = parse_polyvector(text, vars, 0)?;
    v.as_scalar().ok_or_else(|| parse_err(0, "expected a scalar expression".into()))
}

pub fn parse_lpoly(text: &str, vars: &[String]) -> Result<LPoly> {
    parse_ratfn(text, vars)?.to_lpoly().ok_or_else(|| parse_err(0, "expression is not a Laurent polynomial".into()))
}

pub fn parse_multivector(text: &str, vars: &[String], n: usize, chart: usize) -> Result<Multivector> {
    parse_polyvector(text, vars, n)?.to_multivector(chart, n)
}

pub fn names(list: &[&str]) -> Vec<String> {
    list.iter().map(|s| s.to_string()).collect()
}

fn print_rat(c: &Rat) -> String {
    if c.is_integer() {
        c.numer().to_string()
    } else {
        format!("{}/{}", c.numer(), c.denom())
    }
}

fn print_monomial(m: &Monomial, vars: &[String]) -> String {
    let mut parts = Vec::new();
    for (i, &e) in m.exps().iter().enumerate() {
        if e == 0 {
            continue;
        }
        let name = vars.get(i).cloned().unwrap_or_else(|| format!("z{i}"));
        parts.push(if e == 1 { name } else { format!("{name}^{e}") });
    }
    parts.join("*")
}

/// Canonical text form, terms in decreasing graded-lex order.
pub fn print_lpoly(p: &LPoly, vars: &[String]) -> String {
    if p.is_zero() {
        return "0".into();
    }
    let mut out = String::new();
    for (k, (m, c)) in p.terms().rev().enumerate() {
        let neg = c.is_negative();
        let a = c.abs();
        if k == 0 {
            if neg {
                out.push('-');
            }
        } else {
            out.push_str(if neg { " - " } else { " + " });
        }
        let mono = print_monomial(m, vars);
        if mono.is_empty() {
            out.push_str(&print_rat(&a));
        } else if a.is_one() {
            out.push_str(&mono);
        } else {
            out.push_str(&print_rat(&a));
            out.push('*');
            out.push_str(&mono);
        }
    }
    out
}

pub fn print_ratfn(f: &RatFn, vars: &[String]) -> String {
    if f.den() == &LPoly::one() {
        return print_lpoly(f.num(), vars);
    }
    format!("({})/({})", print_lpoly(f.num(), vars), print_lpoly(f.den(), vars))
}

/// Canonical text form of a multivector: one `coefficient*d..^d..` group per
/// index tuple.
pub fn print_multivector<C: Coeff>(m: &Multivector<C>, vars: &[String], coeff: impl Fn(&C) -> String) -> String {
    if m.is_zero() {
        return "0".into();
    }
    let mut parts = Vec::new();
    for (idx, c) in m.components() {
        let basis: Vec<String> = idx.iter().map(|&i| format!("d{}", vars.get(i).cloned().unwrap_or_else(|| format!("z{i}")))).collect();
        let basis = basis.join("^");
        let cs = coeff(c);
        parts.push(if basis.is_empty() {
            cs
        } else if cs == "1" {
            basis
        } else {
            format!("({cs})*{basis}")
        });
    }
    parts.join(" + ")
}

pub fn print_lpoly_multivector(m: &Multivector, vars: &[String]) -> String {
    print_multivector(m, vars, |c| print_lpoly(c, vars))
}

/// Text rendering for residual reports. `names` lists chart variables
/// followed by any further variables; `nchart` is the chart dimension.
pub trait Render {
    fn render(&self, names: &[String], nchart: usize) -> String;
    fn is_zero_value(&self) -> bool;
}

impl Render for LPoly {
    fn render(&self, names: &[String], _nchart: usize) -> String {
        print_lpoly(self, names)
    }
    fn is_zero_value(&self) -> bool {
        self.is_zero()
    }
}

impl Render for crate::exactalg::ParamJet {
    fn render(&self, names: &[String], nchart: usize) -> String {
        print_lpoly(&self.flatten(nchart), names)
    }
    fn is_zero_value(&self) -> bool {
        self.is_zero()
    }
}
