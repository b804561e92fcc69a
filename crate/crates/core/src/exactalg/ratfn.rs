use std::ops::{Add, Div, Mul, Neg, Sub};

use super::{LPoly, Rat};
use crate::error::{Error, Result};

/// Formal quotient of Laurent polynomials.
///
/// Never reduced by a gcd; equality is tested by cross-multiplication.
/// Only trivial normalizations are applied (a unit denominator is divided
/// out, and zero becomes `0/1`).
#[derive(Clone)]
pub struct RatFn {
    num: LPoly,
    den: LPoly,
}

impl RatFn {
    pub fn new(num: LPoly, den: LPoly) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::ZeroDenominator);
        }
        Ok(RatFn { num, den }.normalized())
    }

    pub fn from_poly(p: LPoly) -> Self {
        RatFn { num: p, den: LPoly::one() }
    }

    pub fn zero() -> Self {
        RatFn::from_poly(LPoly::zero())
    }

    pub fn one() -> Self {
        RatFn::from_poly(LPoly::one())
    }

    pub fn constant(c: Rat) -> Self {
        RatFn::from_poly(LPoly::constant(c))
    }

    pub fn num(&self) -> &LPoly {
        &self.num
    }

    pub fn den(&self) -> &LPoly {
        &self.den
    }

    fn normalized(self) -> Self {
        if self.num.is_zero() {
            return RatFn::zero();
        }
        match self.den.inv() {
            Ok(inv) => RatFn { num: &self.num * &inv, den: LPoly::one() },
            Err(_) => self,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    /// The Laurent polynomial this quotient equals, if the denominator is a unit.
    pub fn to_lpoly(&self) -> Option<LPoly> {
        self.den.inv().ok().map(|inv| &self.num * &inv)
    }

    pub fn recip(&self) -> Result<RatFn> {
        if self.num.is_zero() {
            return Err(Error::ZeroDenominator);
        }
        Ok(RatFn { num: self.den.clone(), den: self.num.clone() }.normalized())
    }

    pub fn pow(&self, k: i32) -> Result<RatFn> {
        let base = if k < 0 { self.recip()? } else { self.clone() };
        let e = k.unsigned_abs() as i32;
        Ok(RatFn { num: base.num.pow(e)?, den: base.den.pow(e)? }.normalized())
    }

    pub fn diff(&self, var: usize) -> RatFn {
        // (n/d)' = (n' d - n d') / d^2
        let num = &(&self.num.diff(var) * &self.den) - &(&self.num * &self.den.diff(var));
        RatFn { num, den: &self.den * &self.den }.normalized()
    }

    pub fn scale(&self, c: &Rat) -> RatFn {
        RatFn { num: self.num.scale(c), den: self.den.clone() }.normalized()
    }
}

impl PartialEq for RatFn {
    fn eq(&self, other: &Self) -> bool {
        &self.num * &other.den == &other.num * &self.den
    }
}

impl Eq for RatFn {}

impl std::fmt::Debug for RatFn {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.den == LPoly::one() {
            write!(f, "{:?}", self.num)
        } else {
            write!(f, "({:?})/({:?})", self.num, self.den)
        }
    }
}

impl From<LPoly> for RatFn {
    fn from(p: LPoly) -> Self {
        RatFn::from_poly(p)
    }
}

impl<'a> Add<&'a RatFn> for &'a RatFn {
    type Output = RatFn;
    fn add(self, rhs: &RatFn) -> RatFn {
        if self.den == rhs.den {
            return RatFn { num: &self.num + &rhs.num, den: self.den.clone() }.normalized();
        }
        let num = &(&self.num * &rhs.den) + &(&rhs.num * &self.den);
        RatFn { num, den: &self.den * &rhs.den }.normalized()
    }
}

impl<'a> Sub<&'a RatFn> for &'a RatFn {
    type Output = RatFn;
    fn sub(self, rhs: &RatFn) -> RatFn {
        self + &(-rhs)
    }
}

impl<'a> Mul<&'a RatFn> for &'a RatFn {
    type Output = RatFn;
    fn mul(self, rhs: &RatFn) -> RatFn {
        RatFn { num: &self.num * &rhs.num, den: &self.den * &rhs.den }.normalized()
    }
}

impl<'a> Div<&'a RatFn> for &'a RatFn {
    type Output = Result<RatFn>;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, rhs: &RatFn) -> Result<RatFn> {
        Ok(self * &rhs.recip()?)
    }
}

impl Neg for &RatFn {
    type Output = RatFn;
    fn neg(self) -> RatFn {
        RatFn { num: -&self.num, den: self.den.clone() }
    }
}

impl Neg for RatFn {
    type Output = RatFn;
    fn neg(self) -> RatFn {
        -&self
    }
}

/// Replaces every variable of `p` by the corresponding rational function.
///
/// `assignment[i]` is the value of variable `i`; a variable occurring in `p`
/// without an assigned value is an error.
pub fn substitute(p: &RatFn, assignment: &[Option<RatFn>]) -> Result<RatFn> {
    for a in assignment.iter().flatten() {
        if a.den.is_zero() {
            return Err(Error::ZeroDenominator);
        }
    }
    let num = substitute_poly(&p.num, assignment)?;
    let den = substitute_poly(&p.den, assignment)?;
    &num / &den
}

fn substitute_poly(p: &LPoly, assignment: &[Option<RatFn>]) -> Result<RatFn> {
    let mut out = RatFn::zero();
    for (m, c) in p.terms() {
        let mut t = RatFn::constant(c.clone());
        for (i, &e) in m.exps().iter().enumerate() {
            if e == 0 {
                continue;
            }
            let val = assignment.get(i).and_then(Option::as_ref).ok_or(Error::UnboundVariable(i))?;
            t = &t * &val.pow(e)?;
        }
        out = &out + &t;
    }
    Ok(out)
}
