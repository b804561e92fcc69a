//! Exact symbolic deformation theory of holomorphic Poisson structures on
//! charted spaces.

pub mod cech;
pub mod deformation;
pub mod error;
pub mod exactalg;
pub mod expr;
pub mod family;
pub mod mcsolver;
pub mod multivector;

pub use error::{Error, Result};
pub use exactalg::{LPoly, Monomial, ParamJet, Rat, RatFn};
pub use multivector::{ChartMap, Multivector};
