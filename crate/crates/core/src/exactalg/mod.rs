//! Exact arithmetic: rationals, Laurent polynomials, formal quotients and
//! parameter jets.

mod jet;
pub mod linalg;
mod lpoly;
mod monomial;
mod ratfn;

pub use jet::{jet_combine, JetOp, ParamJet, EXACT};
pub use lpoly::LPoly;
pub use monomial::Monomial;
pub use ratfn::{substitute, RatFn};

/// Arbitrary-precision rational, always in lowest terms with positive
/// denominator.
pub type Rat = num_rational::BigRational;

/// Alias used where a jet carries Laurent polynomial coefficients.
pub type Jet = ParamJet;

pub fn rat(n: i64, d: i64) -> Rat {
    Rat::new(n.into(), d.into())
}

pub fn int(n: i64) -> Rat {
    Rat::from_integer(n.into())
}
