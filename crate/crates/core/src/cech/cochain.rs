use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::exactalg::{LPoly, Rat};
use crate::multivector::{ChartId, Multivector};

/// Element of the total complex: one multivector per increasing chart tuple
/// `I = (i_0 < ... < i_p)`, written in the coordinates of chart `i_0`, with
/// multivector degree `q = k + 1 - p`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct TotalCochain {
    k: usize,
    n: usize,
    cells: BTreeMap<Vec<ChartId>, Multivector>,
}

impl TotalCochain {
    pub fn zero(k: usize, n: usize) -> Self {
        TotalCochain { k, n, cells: BTreeMap::new() }
    }

    pub fn degree(&self) -> usize {
        self.k
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn is_zero(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn cells(&self) -> impl Iterator<Item = (&Vec<ChartId>, &Multivector)> {
        self.cells.iter()
    }

    pub fn cell(&self, tuple: &[ChartId]) -> Option<&Multivector> {
        self.cells.get(tuple)
    }

    /// Čech degree `p` of the parts present.
    pub fn cech_degrees(&self) -> Vec<usize> {
        let mut ps: Vec<usize> = self.cells.keys().map(|t| t.len() - 1).collect();
        ps.dedup();
        ps
    }

    /// Adds `m` to the cell on the increasing tuple `tuple`.
    pub fn add_cell(&mut self, tuple: Vec<ChartId>, m: Multivector) -> Result<()> {
        if tuple.is_empty() || tuple.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidParams(format!("chart tuple {tuple:?} is not increasing")));
        }
        let q = self.k + 2 - tuple.len();
        if tuple.len() > self.k + 1 || m.degree() != q {
            return Err(Error::DegreeMismatch { expected: self.k + 2 - tuple.len().min(self.k + 1), found: m.degree() });
        }
        if m.chart() != tuple[0] {
            return Err(Error::ChartMismatch(m.chart(), tuple[0]));
        }
        if m.is_zero() {
            return Ok(());
        }
        let sum = match self.cells.remove(&tuple) {
            Some(old) => old.add(&m)?,
            None => m,
        };
        if !sum.is_zero() {
            self.cells.insert(tuple, sum);
        }
        Ok(())
    }

    pub fn add(&self, other: &TotalCochain) -> Result<TotalCochain> {
        if self.k != other.k {
            return Err(Error::DegreeMismatch { expected: self.k, found: other.k });
        }
        let mut out = self.clone();
        for (t, m) in &other.cells {
            out.add_cell(t.clone(), m.clone())?;
        }
        Ok(out)
    }

    pub fn sub(&self, other: &TotalCochain) -> Result<TotalCochain> {
        self.add(&other.scale(&Rat::from_integer((-1).into())))
    }

    pub fn scale(&self, r: &Rat) -> TotalCochain {
        let mut out = TotalCochain::zero(self.k, self.n);
        for (t, m) in &self.cells {
            let s = m.scale(r);
            if !s.is_zero() {
                out.cells.insert(t.clone(), s);
            }
        }
        out
    }

    /// Keeps only cells of Čech degree `p`.
    pub fn part(&self, p: usize) -> TotalCochain {
        TotalCochain {
            k: self.k,
            n: self.n,
            cells: self.cells.iter().filter(|(t, _)| t.len() == p + 1).map(|(t, m)| (t.clone(), m.clone())).collect(),
        }
    }

    /// Number of monomial terms over all cells.
    pub fn size(&self) -> usize {
        self.cells.values().map(|m| m.components().map(|(_, c)| c.len()).sum::<usize>()).sum()
    }

    /// Structured view for reports.
    pub fn to_terms(&self, chart_vars: &[Vec<String>]) -> Vec<CellTerm> {
        self.cells
            .iter()
            .map(|(t, m)| CellTerm {
                charts: t.clone(),
                value: crate::expr::print_lpoly_multivector(m, &chart_vars[t[0]]),
            })
            .collect()
    }

    pub(crate) fn insert_raw(&mut self, tuple: Vec<ChartId>, m: Multivector) {
        if !m.is_zero() {
            self.cells.insert(tuple, m);
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CellTerm {
    pub charts: Vec<ChartId>,
    pub value: String,
}

/// Coefficient polynomial of a multivector, if it has one component.
pub fn single_coeff(m: &Multivector) -> Option<&LPoly> {
    let mut it = m.components();
    let first = it.next()?;
    it.next().is_none().then_some(first.1)
}
