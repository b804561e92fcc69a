use std::fmt::Debug;

use crate::error::Result;
use crate::exactalg::{LPoly, ParamJet, Rat, EXACT};

/// Coefficient ring for multivector components.
pub trait Coeff: Clone + PartialEq + Debug + Send + Sync {
    fn zero() -> Self;
    fn is_zero(&self) -> bool;
    fn add(&self, other: &Self) -> Self;
    fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }
    fn mul(&self, other: &Self) -> Self;
    fn neg(&self) -> Self;
    fn scale(&self, r: &Rat) -> Self;
    fn diff(&self, var: usize) -> Self;
    fn from_lpoly(p: LPoly) -> Self;
    /// Substitutes `z[i]` for chart variable `i`; later variables stay.
    fn compose(&self, z: &[Self]) -> Result<Self>;
}

impl Coeff for LPoly {
    fn zero() -> Self {
        LPoly::zero()
    }
    fn is_zero(&self) -> bool {
        LPoly::is_zero(self)
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn neg(&self) -> Self {
        -self
    }
    fn scale(&self, r: &Rat) -> Self {
        LPoly::scale(self, r)
    }
    fn diff(&self, var: usize) -> Self {
        LPoly::diff(self, var)
    }
    fn from_lpoly(p: LPoly) -> Self {
        p
    }
    fn compose(&self, z: &[Self]) -> Result<Self> {
        LPoly::compose(self, z)
    }
}

impl Coeff for ParamJet {
    fn zero() -> Self {
        ParamJet::zero(EXACT)
    }
    fn is_zero(&self) -> bool {
        ParamJet::is_zero(self)
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn neg(&self) -> Self {
        -self
    }
    fn scale(&self, r: &Rat) -> Self {
        ParamJet::scale(self, r)
    }
    fn diff(&self, var: usize) -> Self {
        ParamJet::diff(self, var)
    }
    fn from_lpoly(p: LPoly) -> Self {
        ParamJet::exact(p)
    }
    fn compose(&self, z: &[Self]) -> Result<Self> {
        ParamJet::compose(self, z, None)
    }
}
