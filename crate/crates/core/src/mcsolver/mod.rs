//! Order-by-order formal solvers: Maurer-Cartan existence and completeness.

mod completeness;

pub use completeness::{complete_family, completeness_defect, verify_congruences, CompletenessSolution, OrderDiagnostics};

use std::collections::BTreeMap;

use serde::Serialize;

use crate::cech::{CechComplex, CellTerm, CohomologyReport, TotalCochain};
use crate::error::{Error, Result};
use crate::exactalg::{LPoly, Monomial, Rat};
use crate::expr::print_lpoly;

/// All monomials of total degree `d` in `m` variables, in increasing order.
pub fn monomials(m: usize, d: u32) -> Vec<Monomial> {
    fn rec(m: usize, d: u32, prefix: &mut Vec<i32>, out: &mut Vec<Monomial>) {
        if prefix.len() + 1 == m {
            prefix.push(d as i32);
            out.push(Monomial::new(prefix.clone()));
            prefix.pop();
            return;
        }
        for e in (0..=d).rev() {
            prefix.push(e as i32);
            rec(m, d - e, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if m == 0 {
        if d == 0 {
            out.push(Monomial::one());
        }
        return out;
    }
    rec(m, d, &mut Vec::new(), &mut out);
    out.sort();
    out
}

/// Total cochain whose coefficients are polynomials in parameters, stored
/// per parameter monomial and truncated above `order`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CochainSeries {
    pub degree: usize,
    pub order: u32,
    pub terms: BTreeMap<Monomial, TotalCochain>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SeriesTerm {
    pub monomial: String,
    pub cells: Vec<CellTerm>,
}

impl CochainSeries {
    pub fn zero(degree: usize, order: u32) -> Self {
        CochainSeries { degree, order, terms: BTreeMap::new() }
    }

    pub fn insert(&mut self, m: Monomial, c: TotalCochain) -> Result<()> {
        if c.degree() != self.degree {
            return Err(Error::DegreeMismatch { expected: self.degree, found: c.degree() });
        }
        if m.degree() > i64::from(self.order) {
            return Ok(());
        }
        let sum = match self.terms.remove(&m) {
            Some(old) => old.add(&c)?,
            None => c,
        };
        if !sum.is_zero() {
            self.terms.insert(m, sum);
        }
        Ok(())
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn homogeneous(&self, v: u32) -> impl Iterator<Item = (&Monomial, &TotalCochain)> {
        self.terms.iter().filter(move |(m, _)| m.degree() == i64::from(v))
    }

    pub fn truncate(&self, order: u32) -> CochainSeries {
        let order = order.min(self.order);
        CochainSeries {
            degree: self.degree,
            order,
            terms: self.terms.iter().filter(|(m, _)| m.degree() <= i64::from(order)).map(|(m, c)| (m.clone(), c.clone())).collect(),
        }
    }

    pub fn differential(&self, cx: &CechComplex) -> Result<CochainSeries> {
        let mut out = CochainSeries::zero(self.degree + 1, self.order);
        for (m, c) in &self.terms {
            out.insert(m.clone(), cx.total_differential(c)?)?;
        }
        Ok(out)
    }

    /// `[a, b]` truncated at the smaller order.
    pub fn bracket(&self, other: &CochainSeries, cx: &CechComplex) -> Result<CochainSeries> {
        let mut out = CochainSeries::zero(self.degree + other.degree, self.order.min(other.order));
        for (ma, a) in &self.terms {
            for (mb, b) in &other.terms {
                let m = ma.mul(mb);
                if m.degree() > i64::from(out.order) {
                    continue;
                }
                out.insert(m, cx.bracket(a, b)?)?;
            }
        }
        Ok(out)
    }

    pub fn add(&self, other: &CochainSeries) -> Result<CochainSeries> {
        let mut out = self.truncate(other.order);
        for (m, c) in &other.terms {
            out.insert(m.clone(), c.clone())?;
        }
        Ok(out)
    }

    pub fn scale(&self, r: &Rat) -> CochainSeries {
        CochainSeries {
            degree: self.degree,
            order: self.order,
            terms: self.terms.iter().map(|(m, c)| (m.clone(), c.scale(r))).filter(|(_, c)| !c.is_zero()).collect(),
        }
    }

    pub fn to_terms(&self, params: &[String], chart_vars: &[Vec<String>]) -> Vec<SeriesTerm> {
        self.terms
            .iter()
            .map(|(m, c)| SeriesTerm { monomial: print_lpoly(&LPoly::monomial(m.clone()), params), cells: c.to_terms(chart_vars) })
            .collect()
    }
}

fn half() -> Rat {
    Rat::new(1.into(), 2.into())
}

/// `D beta + 1/2 [beta, beta]`.
pub fn mc_expression(cx: &CechComplex, beta: &CochainSeries) -> Result<CochainSeries> {
    beta.differential(cx)?.add(&beta.bracket(beta, cx)?.scale(&half()))
}

/// Order-`v` part of `D beta + 1/2 [beta, beta]`, per parameter monomial.
pub fn mc_defect(cx: &CechComplex, beta: &CochainSeries, v: u32) -> Result<BTreeMap<Monomial, TotalCochain>> {
    let mut wide = beta.clone();
    wide.order = wide.order.max(v);
    let full = mc_expression(cx, &wide)?;
    if let Some((m, _)) = full.terms.iter().find(|(m, _)| m.degree() < i64::from(v)) {
        return Err(Error::PrerequisiteViolated(format!("Maurer-Cartan equation fails below order {v} at {m:?}")));
    }
    Ok(full.homogeneous(v).map(|(m, c)| (m.clone(), c.clone())).collect())
}

#[derive(Clone, Debug, PartialEq)]
pub enum OrderOutcome {
    Correction(TotalCochain),
    Obstruction(Vec<Rat>),
}

/// Kills an exact defect: returns `x` with `D x = -defect`, or the
/// coordinates of its class when that class is nonzero.
pub fn solve_order(cx: &CechComplex, defect: &TotalCochain, h2: &CohomologyReport) -> Result<OrderOutcome> {
    if defect.is_zero() {
        return Ok(OrderOutcome::Correction(TotalCochain::zero(defect.degree().saturating_sub(1), cx.dim())));
    }
    let coords = cx.project_to_basis(defect, h2)?;
    if coords.iter().any(|x| !num_traits::Zero::is_zero(x)) {
        return Ok(OrderOutcome::Obstruction(coords));
    }
    let neg = defect.scale(&Rat::from_integer((-1).into()));
    match cx.solve_exact(&neg)? {
        Some(x) => Ok(OrderOutcome::Correction(x)),
        None => Err(Error::OutOfTruncation(Vec::new())),
    }
}

fn ser_coords<S: serde::Serializer>(v: &[(String, Vec<Rat>)], s: S) -> std::result::Result<S::Ok, S::Error> {
    let out: Vec<(String, Vec<String>)> = v.iter().map(|(m, c)| (m.clone(), c.iter().map(|x| x.to_string()).collect())).collect();
    out.serialize(s)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LedgerEntry {
    pub order: u32,
    /// Obstruction class coordinates per parameter monomial.
    #[serde(serialize_with = "ser_coords")]
    pub classes: Vec<(String, Vec<Rat>)>,
    pub obstructed: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MCSolution {
    pub beta: CochainSeries,
    pub order: u32,
    pub ledger: Vec<LedgerEntry>,
    /// Number of nonzero cells of the defect one order above the solution.
    pub residual_cells: usize,
}

impl MCSolution {
    pub fn clean(&self) -> bool {
        self.ledger.iter().all(|e| !e.obstructed)
    }

    /// Recomputes `D beta + 1/2 [beta, beta]` truncated at `order`.
    pub fn verify(&self, cx: &CechComplex) -> Result<bool> {
        Ok(mc_expression(cx, &self.beta.truncate(self.order))?.is_zero())
    }
}

/// Solves the Maurer-Cartan equation up to order `order`, starting from
/// `beta_1 = sum_u t_u h1.basis[u]`.
pub fn solve_existence(cx: &CechComplex, h1: &CohomologyReport, h2: &CohomologyReport, order: u32) -> Result<MCSolution> {
    if h1.degree != 1 || h2.degree != 2 {
        return Err(Error::DegreeMismatch { expected: 1, found: h1.degree });
    }
    let m = h1.basis.len();
    let names: Vec<String> = (1..=m).map(|u| format!("t{u}")).collect();
    let mut beta = CochainSeries::zero(1, order);
    if order >= 1 {
        for (u, b) in h1.basis.iter().enumerate() {
            beta.insert(Monomial::var(u, 1), b.cochain.clone())?;
        }
    }
    let mut ledger = Vec::new();
    let mut reached = order.min(1);
    for v in 2..=order {
        let defects = mc_defect(cx, &beta, v)?;
        let mut classes = Vec::new();
        let mut obstructed = false;
        let mut corrections = Vec::new();
        for (mono, d) in &defects {
            let label = print_lpoly(&LPoly::monomial(mono.clone()), &names);
            match solve_order(cx, d, h2)? {
                OrderOutcome::Correction(x) => {
                    classes.push((label, vec![Rat::from_integer(0.into()); h2.basis.len()]));
                    corrections.push((mono.clone(), x));
                }
                OrderOutcome::Obstruction(c) => {
                    obstructed = true;
                    classes.push((label, c));
                }
            }
        }
        ledger.push(LedgerEntry { order: v, classes, obstructed });
        if obstructed {
            break;
        }
        for (mono, x) in corrections {
            beta.insert(mono, x)?;
        }
        reached = v;
    }
    let beta = beta.truncate(reached);
    let residual_cells = mc_defect(cx, &beta, reached + 1)?.values().map(|c| c.cells().count()).sum();
    Ok(MCSolution { beta, order: reached, ledger, residual_cells })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn monomial_enumeration() {
        assert_eq!(monomials(2, 2).len(), 3);
        assert_eq!(monomials(3, 3).len(), 10);
        assert_eq!(monomials(0, 0), vec![Monomial::one()]);
        assert!(monomials(0, 1).is_empty());
        assert!(monomials(2, 3).iter().all(|m| m.degree() == 3));
    }
}
