use std::collections::{BTreeMap, HashMap};
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};

use super::{LPoly, Monomial, Rat, RatFn};
use crate::error::{Error, Result};

/// Order marker for jets that carry no truncation (exact polynomials in the
/// parameters).
pub const EXACT: u32 = u32::MAX;

/// Truncated power series in deformation parameters `t_1..t_m` whose
/// coefficients are Laurent polynomials in chart variables.
///
/// Parameter exponents are stored as [`Monomial`]s with non-negative entries.
/// No term of total parameter degree above `order` is ever stored.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ParamJet {
    order: u32,
    terms: BTreeMap<Monomial, LPoly>,
}

/// Operation selector for [`jet_combine`].
pub enum JetOp<'a> {
    Add,
    Mul,
    /// Lifts a bilinear operation on coefficients to jets, truncating.
    BracketLift(&'a dyn Fn(&LPoly, &LPoly) -> LPoly),
}

/// Combines two jets of the same order.
pub fn jet_combine(a: &ParamJet, b: &ParamJet, op: JetOp<'_>) -> Result<ParamJet> {
    if a.order != b.order {
        return Err(Error::OrderMismatch(a.order, b.order));
    }
    Ok(match op {
        JetOp::Add => a + b,
        JetOp::Mul => a * b,
        JetOp::BracketLift(f) => a.bilinear(b, f),
    })
}

impl ParamJet {
    pub fn zero(order: u32) -> Self {
        ParamJet { order, terms: BTreeMap::new() }
    }

    pub fn exact(p: LPoly) -> Self {
        ParamJet::constant(p, EXACT)
    }

    pub fn constant(p: LPoly, order: u32) -> Self {
        let mut j = ParamJet::zero(order);
        j.add_term(Monomial::one(), p);
        j
    }

    /// The parameter `t_u` as a jet.
    pub fn param(u: usize, order: u32) -> Self {
        let mut j = ParamJet::zero(order);
        j.add_term(Monomial::var(u, 1), LPoly::one());
        j
    }

    pub fn from_terms<I: IntoIterator<Item = (Monomial, LPoly)>>(order: u32, it: I) -> Self {
        let mut j = ParamJet::zero(order);
        for (m, c) in it {
            j.add_term(m, c);
        }
        j
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn add_term(&mut self, exp: Monomial, c: LPoly) {
        debug_assert!(exp.is_polynomial());
        if c.is_zero() || exp.degree() > self.order as i64 {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(exp) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &LPoly)> {
        self.terms.iter()
    }

    pub fn coeff(&self, exp: &Monomial) -> LPoly {
        self.terms.get(exp).cloned().unwrap_or_else(LPoly::zero)
    }

    /// Value at the origin of parameter space.
    pub fn at_zero(&self) -> LPoly {
        self.coeff(&Monomial::one())
    }

    pub fn truncate(&self, order: u32) -> ParamJet {
        let order = order.min(self.order);
        ParamJet {
            order,
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.degree() <= order as i64)
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        }
    }

    pub fn with_order(&self, order: u32) -> ParamJet {
        let mut j = self.truncate(order);
        j.order = order;
        j
    }

    /// Terms of total parameter degree exactly `v`.
    pub fn homogeneous(&self, v: u32) -> BTreeMap<Monomial, LPoly> {
        self.terms
            .iter()
            .filter(|(m, _)| m.degree() == v as i64)
            .map(|(m, c)| (m.clone(), c.clone()))
            .collect()
    }

    /// Lowest parameter degree carrying a nonzero term.
    pub fn valuation(&self) -> Option<u32> {
        self.terms.keys().map(|m| m.degree() as u32).min()
    }

    pub fn scale(&self, c: &Rat) -> ParamJet {
        ParamJet::from_terms(self.order, self.terms.iter().map(|(m, p)| (m.clone(), p.scale(c))))
    }

    pub fn mul_lpoly(&self, p: &LPoly) -> ParamJet {
        ParamJet::from_terms(self.order, self.terms.iter().map(|(m, c)| (m.clone(), c * p)))
    }

    /// Derivative in a chart variable, coefficientwise.
    pub fn diff(&self, var: usize) -> ParamJet {
        ParamJet::from_terms(self.order, self.terms.iter().map(|(m, c)| (m.clone(), c.diff(var))))
    }

    /// Derivative in the parameter `t_u`; the order drops by one.
    pub fn param_diff(&self, u: usize) -> ParamJet {
        let order = if self.order == EXACT { EXACT } else { self.order.saturating_sub(1) };
        let mut out = ParamJet::zero(order);
        for (m, c) in &self.terms {
            let e = m.exp(u);
            if e > 0 {
                out.add_term(m.with_exp(u, e - 1), c.scale(&Rat::from_integer(e.into())));
            }
        }
        out
    }

    pub fn map_coeffs<F: FnMut(&LPoly) -> Result<LPoly>>(&self, mut f: F) -> Result<ParamJet> {
        let mut out = ParamJet::zero(self.order);
        for (m, c) in &self.terms {
            out.add_term(m.clone(), f(c)?);
        }
        Ok(out)
    }

    fn bilinear(&self, rhs: &ParamJet, f: &dyn Fn(&LPoly, &LPoly) -> LPoly) -> ParamJet {
        let order = self.order.min(rhs.order);
        let mut out = ParamJet::zero(order);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                let m = ma.mul(mb);
                if m.degree() <= order as i64 {
                    out.add_term(m, f(ca, cb));
                }
            }
        }
        out
    }

    /// Multiplicative inverse. The value at the origin must be a unit
    /// `c * z^a`, and a nonconstant jet needs a finite order.
    pub fn inverse(&self) -> Result<ParamJet> {
        let u = self.at_zero();
        let u_inv = u.inv()?;
        // self = u (1 + n) with n vanishing at the origin
        let mut n = self.mul_lpoly(&u_inv);
        n.add_term(Monomial::one(), -LPoly::one());
        if n.is_zero() {
            return Ok(ParamJet::constant(u_inv, self.order));
        }
        if self.order == EXACT {
            return Err(Error::NotInvertible);
        }
        let neg_n = -&n;
        let mut acc = ParamJet::constant(LPoly::one(), self.order);
        let mut power = acc.clone();
        for _ in 0..self.order {
            power = &power * &neg_n;
            if power.is_zero() {
                break;
            }
            acc = &acc + &power;
        }
        Ok(acc.mul_lpoly(&u_inv))
    }

    pub fn pow(&self, k: i32) -> Result<ParamJet> {
        if k < 0 {
            return self.inverse()?.pow(-k);
        }
        let mut acc = ParamJet::constant(LPoly::one(), self.order);
        let mut base = self.clone();
        let mut e = k as u32;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        Ok(acc)
    }

    /// Composition: chart variable `i` is replaced by `z[i]` (for
    /// `i < z.len()`, other variables stay), and parameter `t_u` by
    /// `params[u]` when given (identity otherwise).
    pub fn compose(&self, z: &[ParamJet], params: Option<&[ParamJet]>) -> Result<ParamJet> {
        let mut order = self.order;
        for j in z {
            order = order.min(j.order);
        }
        if let Some(ps) = params {
            for p in ps {
                order = order.min(p.order);
            }
        }
        let k = z.len();
        let mut zpow: HashMap<(usize, i32), ParamJet> = HashMap::new();
        let mut ppow: HashMap<(usize, i32), ParamJet> = HashMap::new();
        let mut out = ParamJet::zero(order);
        for (pexp, coef) in &self.terms {
            let pfactor = match params {
                None => {
                    let mut j = ParamJet::zero(order);
                    j.add_term(pexp.clone(), LPoly::one());
                    j
                }
                Some(ps) => {
                    let mut acc = ParamJet::constant(LPoly::one(), order);
                    for (u, &e) in pexp.exps().iter().enumerate() {
                        if e == 0 {
                            continue;
                        }
                        let val = ps.get(u).ok_or(Error::UnboundVariable(u))?;
                        let p = cached_pow(&mut ppow, u, e, val)?;
                        acc = &acc * &p;
                    }
                    acc
                }
            };
            if pfactor.is_zero() {
                continue;
            }
            let mut cval = ParamJet::zero(order);
            for (m, c) in coef.terms() {
                let rest = m.tail(k).shift_up(k);
                let mut t = ParamJet::constant(LPoly::term(c.clone(), rest), order);
                for (i, zi) in z.iter().enumerate() {
                    let e = m.exp(i);
                    if e == 0 {
                        continue;
                    }
                    let p = cached_pow(&mut zpow, i, e, zi)?;
                    t = &t * &p;
                }
                cval = &cval + &t;
            }
            out = &out + &(&cval * &pfactor);
        }
        Ok(out)
    }

    /// Expands a quotient of Laurent polynomials whose variables are laid
    /// out as `[chart vars (nchart)] [params (nparams)]` into a jet.
    pub fn from_ratfn(f: &RatFn, nchart: usize, nparams: usize, order: u32) -> Result<ParamJet> {
        let num = ParamJet::split(f.num(), nchart, nparams, order)?;
        if f.den() == &LPoly::one() {
            return Ok(num);
        }
        let den = ParamJet::split(f.den(), nchart, nparams, order)?;
        Ok(&num * &den.inverse()?)
    }

    /// Splits a polynomial in `[chart vars][params]` into a jet.
    pub fn split(p: &LPoly, nchart: usize, nparams: usize, order: u32) -> Result<ParamJet> {
        let mut j = ParamJet::zero(order);
        for (m, c) in p.terms() {
            if m.support_len() > nchart + nparams {
                return Err(Error::InvalidParams(format!(
                    "expression uses {} variables, expected at most {}",
                    m.support_len(),
                    nchart + nparams
                )));
            }
            let pexp = m.tail(nchart);
            if !pexp.is_polynomial() {
                return Err(Error::InvalidParams("negative power of a deformation parameter".into()));
            }
            j.add_term(pexp, LPoly::term(c.clone(), m.head(nchart)));
        }
        Ok(j)
    }

    /// Reassembles the jet as one polynomial in `[chart vars][params]`.
    pub fn flatten(&self, nchart: usize) -> LPoly {
        let mut out = LPoly::zero();
        for (pexp, c) in &self.terms {
            out += c.mul_monomial(&pexp.shift_up(nchart));
        }
        out
    }
}

fn cached_pow(cache: &mut HashMap<(usize, i32), ParamJet>, i: usize, e: i32, base: &ParamJet) -> Result<ParamJet> {
    if let Some(p) = cache.get(&(i, e)) {
        return Ok(p.clone());
    }
    let p = base.pow(e)?;
    cache.insert((i, e), p.clone());
    Ok(p)
}

impl std::fmt::Debug for ParamJet {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let parts: Vec<String> = self.terms.iter().map(|(m, c)| format!("({c:?})*t{:?}", m.exps())).collect();
        if self.order == EXACT {
            write!(f, "[{}]", parts.join(" + "))
        } else {
            write!(f, "[{}]_{}", parts.join(" + "), self.order)
        }
    }
}

impl<'a> Add<&'a ParamJet> for &'a ParamJet {
    type Output = ParamJet;
    fn add(self, rhs: &ParamJet) -> ParamJet {
        let order = self.order.min(rhs.order);
        let mut out = self.truncate(order);
        out.order = order;
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }
}

impl<'a> Sub<&'a ParamJet> for &'a ParamJet {
    type Output = ParamJet;
    fn sub(self, rhs: &ParamJet) -> ParamJet {
        self + &(-rhs)
    }
}

impl<'a> Mul<&'a ParamJet> for &'a ParamJet {
    type Output = ParamJet;
    fn mul(self, rhs: &ParamJet) -> ParamJet {
        self.bilinear(rhs, &|a, b| a * b)
    }
}

impl Neg for &ParamJet {
    type Output = ParamJet;
    fn neg(self) -> ParamJet {
        ParamJet { order: self.order, terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect() }
    }
}

impl Zero for ParamJet {
    fn zero() -> Self {
        ParamJet::zero(EXACT)
    }
    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
}

impl Add for ParamJet {
    type Output = ParamJet;
    fn add(self, rhs: ParamJet) -> ParamJet {
        &self + &rhs
    }
}

impl One for ParamJet {
    fn one() -> Self {
        ParamJet::exact(LPoly::one())
    }
}

impl Mul for ParamJet {
    type Output = ParamJet;
    fn mul(self, rhs: ParamJet) -> ParamJet {
        &self * &rhs
    }
}
