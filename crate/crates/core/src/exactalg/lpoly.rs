use std::collections::{BTreeMap, HashMap};
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use num_traits::{One, Signed, Zero};

use super::{Monomial, Rat};
use crate::error::{Error, Result};

/// Multivariate Laurent polynomial with rational coefficients.
///
/// Terms are kept in graded-lexicographic order and zero coefficients are
/// never stored, so structural equality is mathematical equality.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct LPoly {
    terms: BTreeMap<Monomial, Rat>,
}

impl LPoly {
    pub fn zero() -> Self {
        LPoly { terms: BTreeMap::new() }
    }

    pub fn one() -> Self {
        LPoly::constant(Rat::one())
    }

    pub fn constant(c: Rat) -> Self {
        LPoly::term(c, Monomial::one())
    }

    pub fn from_int(c: i64) -> Self {
        LPoly::constant(Rat::from_integer(c.into()))
    }

    pub fn term(c: Rat, m: Monomial) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        LPoly { terms }
    }

    pub fn monomial(m: Monomial) -> Self {
        LPoly::term(Rat::one(), m)
    }

    pub fn var(var: usize) -> Self {
        LPoly::monomial(Monomial::var(var, 1))
    }

    pub fn from_terms<I: IntoIterator<Item = (Monomial, Rat)>>(it: I) -> Self {
        let mut p = LPoly::zero();
        for (m, c) in it {
            p.add_term(m, c);
        }
        p
    }

    pub fn add_term(&mut self, m: Monomial, c: Rat) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(m) {
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

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &Rat)> + ExactSizeIterator {
        self.terms.iter()
    }

    pub fn into_terms(self) -> impl Iterator<Item = (Monomial, Rat)> {
        self.terms.into_iter()
    }

    pub fn coeff(&self, m: &Monomial) -> Rat {
        self.terms.get(m).cloned().unwrap_or_else(Rat::zero)
    }

    /// The constant term.
    pub fn constant_term(&self) -> Rat {
        self.coeff(&Monomial::one())
    }

    /// If the polynomial is a single term `c * z^a`, returns it.
    pub fn as_unit(&self) -> Option<(&Monomial, &Rat)> {
        if self.terms.len() == 1 {
            self.terms.iter().next()
        } else {
            None
        }
    }

    pub fn as_constant(&self) -> Option<Rat> {
        if self.is_zero() {
            return Some(Rat::zero());
        }
        match self.as_unit() {
            Some((m, c)) if m.is_one() => Some(c.clone()),
            _ => None,
        }
    }

    pub fn is_polynomial(&self) -> bool {
        self.terms.keys().all(Monomial::is_polynomial)
    }

    /// Number of variable slots touched by any term.
    pub fn support_len(&self) -> usize {
        self.terms.keys().map(Monomial::support_len).max().unwrap_or(0)
    }

    pub fn scale(&self, c: &Rat) -> LPoly {
        if c.is_zero() {
            return LPoly::zero();
        }
        LPoly { terms: self.terms.iter().map(|(m, v)| (m.clone(), v * c)).collect() }
    }

    pub fn mul_monomial(&self, m: &Monomial) -> LPoly {
        LPoly { terms: self.terms.iter().map(|(k, v)| (k.mul(m), v.clone())).collect() }
    }

    /// Formal partial derivative with the Laurent power rule.
    pub fn diff(&self, var: usize) -> LPoly {
        let mut out = LPoly::zero();
        for (m, c) in &self.terms {
            let e = m.exp(var);
            if e != 0 {
                out.add_term(m.with_exp(var, e - 1), c * Rat::from_integer(e.into()));
            }
        }
        out
    }

    /// Multiplicative inverse; only units (single terms) are invertible.
    pub fn inv(&self) -> Result<LPoly> {
        match self.as_unit() {
            Some((m, c)) => Ok(LPoly::term(c.recip(), m.inv())),
            None if self.is_zero() => Err(Error::ZeroDenominator),
            None => Err(Error::NotInvertible),
        }
    }

    pub fn pow(&self, k: i32) -> Result<LPoly> {
        if k < 0 {
            return self.inv()?.pow(-k);
        }
        let mut base = self.clone();
        let mut acc = LPoly::one();
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

    /// Replaces variable `i` by `vals[i]` for `i < vals.len()`; variables
    /// beyond the assignment are left in place.
    ///
    /// Negative exponents require the assigned value to be a unit.
    pub fn compose(&self, vals: &[LPoly]) -> Result<LPoly> {
        let k = vals.len();
        let mut cache: HashMap<(usize, i32), LPoly> = HashMap::new();
        let mut out = LPoly::zero();
        for (m, c) in &self.terms {
            let mut t = LPoly::term(c.clone(), m.tail(k).shift_up(k));
            for (i, val) in vals.iter().enumerate() {
                let e = m.exp(i);
                if e == 0 {
                    continue;
                }
                let p = match cache.get(&(i, e)) {
                    Some(p) => p.clone(),
                    None => {
                        let p = val.pow(e)?;
                        cache.insert((i, e), p.clone());
                        p
                    }
                };
                t = &t * &p;
            }
            out += t;
        }
        Ok(out)
    }

    /// Substitutes exact values for all variables `< vals.len()` given as
    /// rationals; any remaining variables are kept.
    pub fn eval_partial(&self, vals: &[Rat]) -> Result<LPoly> {
        let consts: Vec<LPoly> = vals.iter().cloned().map(LPoly::constant).collect();
        self.compose(&consts)
    }

    /// Highest absolute exponent of any variable, used in tests for sizing.
    pub fn max_abs_exp(&self) -> i32 {
        self.terms.keys().flat_map(|m| m.exps().iter().map(|e| e.abs())).max().unwrap_or(0)
    }

    /// Moves every variable index up by `k` (inserting `k` fresh leading slots).
    pub fn shift_vars(&self, k: usize) -> LPoly {
        LPoly { terms: self.terms.iter().map(|(m, c)| (m.shift_up(k), c.clone())).collect() }
    }

    /// Total degree of the largest term.
    pub fn max_degree(&self) -> Option<i64> {
        self.terms.keys().map(Monomial::degree).max()
    }

    /// Sum of the absolute values of numerators; a crude size measure.
    pub fn height(&self) -> Rat {
        self.terms.values().map(|c| c.abs()).fold(Rat::zero(), |a, b| a + b)
    }
}

impl Monomial {
    pub(crate) fn shift_up(&self, k: usize) -> Monomial {
        if self.is_one() {
            return self.clone();
        }
        let mut v = vec![0; k];
        v.extend_from_slice(self.exps());
        Monomial::new(v)
    }
}

impl std::fmt::Debug for LPoly {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self.terms.iter().map(|(m, c)| format!("{c}*{m:?}")).collect();
        write!(f, "{}", parts.join(" + "))
    }
}

impl From<Rat> for LPoly {
    fn from(c: Rat) -> Self {
        LPoly::constant(c)
    }
}

impl<'a> Add<&'a LPoly> for &'a LPoly {
    type Output = LPoly;
    fn add(self, rhs: &LPoly) -> LPoly {
        let mut out = self.clone();
        out += rhs.clone();
        out
    }
}

impl Add for LPoly {
    type Output = LPoly;
    fn add(mut self, rhs: LPoly) -> LPoly {
        self += rhs;
        self
    }
}

impl AddAssign for LPoly {
    fn add_assign(&mut self, rhs: LPoly) {
        for (m, c) in rhs.terms {
            self.add_term(m, c);
        }
    }
}

impl AddAssign<&LPoly> for LPoly {
    fn add_assign(&mut self, rhs: &LPoly) {
        for (m, c) in &rhs.terms {
            self.add_term(m.clone(), c.clone());
        }
    }
}

impl<'a> Sub<&'a LPoly> for &'a LPoly {
    type Output = LPoly;
    fn sub(self, rhs: &LPoly) -> LPoly {
        let mut out = self.clone();
        out -= rhs.clone();
        out
    }
}

impl Sub for LPoly {
    type Output = LPoly;
    fn sub(mut self, rhs: LPoly) -> LPoly {
        self -= rhs;
        self
    }
}

impl SubAssign for LPoly {
    fn sub_assign(&mut self, rhs: LPoly) {
        for (m, c) in rhs.terms {
            self.add_term(m, -c);
        }
    }
}

impl<'a> Mul<&'a LPoly> for &'a LPoly {
    type Output = LPoly;
    fn mul(self, rhs: &LPoly) -> LPoly {
        let mut out = LPoly::zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                out.add_term(ma.mul(mb), ca * cb);
            }
        }
        out
    }
}

impl Mul for LPoly {
    type Output = LPoly;
    fn mul(self, rhs: LPoly) -> LPoly {
        &self * &rhs
    }
}

impl Neg for LPoly {
    type Output = LPoly;
    fn neg(self) -> LPoly {
        LPoly { terms: self.terms.into_iter().map(|(m, c)| (m, -c)).collect() }
    }
}

impl Neg for &LPoly {
    type Output = LPoly;
    fn neg(self) -> LPoly {
        self.clone().neg()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x() -> LPoly {
        LPoly::var(0)
    }
    fn w() -> LPoly {
        LPoly::var(1)
    }

    #[test]
    fn power_rule() {
        // d(x^2 w)/dx = 2 x w
        let p = &(&x() * &x()) * &w();
        assert_eq!(p.diff(0), (&x() * &w()).scale(&Rat::from_integer(2.into())));
    }

    #[test]
    fn laurent_power_rule() {
        let p = x().pow(-1).unwrap();
        assert_eq!(p.diff(0), -x().pow(-2).unwrap());
    }

    #[test]
    fn constant_derivative_vanishes() {
        assert!(LPoly::from_int(7).diff(0).is_zero());
    }

    #[test]
    fn non_unit_inverse_rejected() {
        let p = &x() + &w();
        assert_eq!(p.inv(), Err(Error::NotInvertible));
        assert_eq!(LPoly::zero().inv(), Err(Error::ZeroDenominator));
    }

    #[test]
    fn compose_keeps_unassigned_variables() {
        // p = x * a where a is variable 2; substitute x -> w^2 only in slot 0..2
        let p = &x() * &LPoly::var(2);
        let q = p.compose(&[&w() * &w(), w()]).unwrap();
        assert_eq!(q, &(&w() * &w()) * &LPoly::var(2));
    }

    #[test]
    fn compose_inverts_monomials() {
        // x^-2 with x -> 1/v  gives v^2
        let p = x().pow(-2).unwrap();
        let q = p.compose(&[x().pow(-1).unwrap()]).unwrap();
        assert_eq!(q, x().pow(2).unwrap());
    }
}
