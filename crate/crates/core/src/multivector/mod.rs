//! Polyvector fields on a single chart.
//!
//! A degree-q field is stored as a map from strictly increasing index tuples
//! `I = (i_1 < ... < i_q)` to coefficients, meaning `sum_I c_I d_{i_1}^...^d_{i_q}`.
//! For bivectors the stored `c_(a,b)` is the full antisymmetric coefficient
//! `g_ab`, with `g_ba = -g_ab` implied.

mod chartmap;
mod coeff;

pub use chartmap::{poisson_map_residual, pushforward, subsets, ChartMap};
pub use coeff::Coeff;

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::exactalg::{LPoly, Rat};

pub type ChartId = usize;

#[derive(Clone, PartialEq, Eq)]
pub struct Multivector<C = LPoly> {
    chart: ChartId,
    n: usize,
    degree: usize,
    comps: BTreeMap<Vec<usize>, C>,
}

/// Sorts `idx` in place and returns the permutation sign, or `None` if an
/// index repeats.
pub fn sort_sign(idx: &mut [usize]) -> Option<i32> {
    let mut sign = 1;
    for i in 1..idx.len() {
        let mut j = i;
        while j > 0 && idx[j - 1] > idx[j] {
            idx.swap(j - 1, j);
            sign = -sign;
            j -= 1;
        }
    }
    if idx.windows(2).any(|w| w[0] == w[1]) {
        None
    } else {
        Some(sign)
    }
}

impl<C: Coeff> Multivector<C> {
    pub fn zero(chart: ChartId, n: usize, degree: usize) -> Self {
        Multivector { chart, n, degree, comps: BTreeMap::new() }
    }

    /// `c * d_{idx[0]} ^ ... ^ d_{idx[q-1]}` with `idx` in any order.
    pub fn term(chart: ChartId, n: usize, idx: &[usize], c: C) -> Self {
        let mut m = Multivector::zero(chart, n, idx.len());
        m.add_term(idx, c);
        m
    }

    /// The function `c` viewed as a degree-0 multivector.
    pub fn function(chart: ChartId, n: usize, c: C) -> Self {
        Multivector::term(chart, n, &[], c)
    }

    pub fn chart(&self) -> ChartId {
        self.chart
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn is_zero(&self) -> bool {
        self.comps.is_empty()
    }

    pub fn components(&self) -> impl Iterator<Item = (&Vec<usize>, &C)> {
        self.comps.iter()
    }

    pub fn len(&self) -> usize {
        self.comps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.comps.is_empty()
    }

    pub fn component(&self, idx: &[usize]) -> C {
        let mut v = idx.to_vec();
        match sort_sign(&mut v) {
            None => C::zero(),
            Some(s) => match self.comps.get(&v) {
                None => C::zero(),
                Some(c) if s > 0 => c.clone(),
                Some(c) => c.neg(),
            },
        }
    }

    pub fn with_chart(mut self, chart: ChartId) -> Self {
        self.chart = chart;
        self
    }

    /// Adds `c * d_idx`, reordering `idx` with the appropriate sign.
    pub fn add_term(&mut self, idx: &[usize], c: C) {
        debug_assert_eq!(idx.len(), self.degree);
        debug_assert!(idx.iter().all(|&i| i < self.n));
        let mut v = idx.to_vec();
        let Some(s) = sort_sign(&mut v) else { return };
        let c = if s > 0 { c } else { c.neg() };
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.comps.entry(v) {
            Entry::Vacant(e) => {
                e.insert(c);
            }
            Entry::Occupied(mut e) => {
                let sum = e.get().add(&c);
                if sum.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = sum;
                }
            }
        }
    }

    fn check_same(&self, other: &Self) -> Result<()> {
        if self.chart != other.chart {
            return Err(Error::ChartMismatch(self.chart, other.chart));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        if self.degree != other.degree {
            return Err(Error::DegreeMismatch { expected: self.degree, found: other.degree });
        }
        let mut out = self.clone();
        for (k, c) in &other.comps {
            out.add_term(k, c.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        self.map(|c| c.neg())
    }

    pub fn scale(&self, r: &Rat) -> Self {
        self.map(|c| c.scale(r))
    }

    pub fn mul_coeff(&self, f: &C) -> Self {
        self.map(|c| c.mul(f))
    }

    /// Applies `f` to every coefficient, dropping zeros.
    pub fn map<F: Fn(&C) -> C>(&self, f: F) -> Self {
        let mut out = Multivector::zero(self.chart, self.n, self.degree);
        for (k, c) in &self.comps {
            let v = f(c);
            if !v.is_zero() {
                out.comps.insert(k.clone(), v);
            }
        }
        out
    }

    pub fn try_map<D: Coeff, F: FnMut(&C) -> Result<D>>(&self, mut f: F) -> Result<Multivector<D>> {
        let mut out = Multivector::zero(self.chart, self.n, self.degree);
        for (k, c) in &self.comps {
            let v = f(c)?;
            if !v.is_zero() {
                out.comps.insert(k.clone(), v);
            }
        }
        Ok(out)
    }

    /// Partial derivative of every coefficient in chart variable `var`.
    pub fn diff(&self, var: usize) -> Self {
        self.map(|c| c.diff(var))
    }

    pub fn wedge(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        let mut out = Multivector::zero(self.chart, self.n, self.degree + other.degree);
        if out.degree > self.n {
            return Ok(out);
        }
        for (i, a) in &self.comps {
            for (j, b) in &other.comps {
                let mut idx = i.clone();
                idx.extend_from_slice(j);
                out.add_term(&idx, a.mul(b));
            }
        }
        Ok(out)
    }

    /// Right derivative in the odd variable `d_var`: each term
    /// `c d_{j1}..d_{jq}` containing `d_var = d_{jr}` contributes
    /// `(-1)^(q-r) c d_{j1}..^d_{jr}..d_{jq}`.
    fn odd_derivatives(&self) -> Vec<(usize, Multivector<C>)> {
        let mut parts: BTreeMap<usize, Multivector<C>> = BTreeMap::new();
        if self.degree == 0 {
            return Vec::new();
        }
        for (idx, c) in &self.comps {
            let q = idx.len();
            for (r, &var) in idx.iter().enumerate() {
                let mut rest = idx.clone();
                rest.remove(r);
                let sign_neg = (q - 1 - r) % 2 == 1;
                let coeff = if sign_neg { c.neg() } else { c.clone() };
                parts
                    .entry(var)
                    .or_insert_with(|| Multivector::zero(self.chart, self.n, self.degree - 1))
                    .add_term(&rest, coeff);
            }
        }
        parts.into_iter().collect()
    }

    /// Schouten–Nijenhuis bracket.
    ///
    /// Uses `[P,Q] = sum_i (dP/dxi_i)^(dQ/dx_i) - (-1)^((p-1)(q-1)) (dQ/dxi_i)^(dP/dx_i)`
    /// with right odd derivatives; on vector fields this is the Lie bracket.
    pub fn schouten(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        if self.degree == 0 || other.degree == 0 {
            return Err(Error::DegreeZero);
        }
        let mut out = Multivector::zero(self.chart, self.n, self.degree + other.degree - 1);
        if out.degree > self.n {
            return Ok(out);
        }
        for (i, dp) in self.odd_derivatives() {
            let t = dp.wedge(&other.diff(i))?;
            for (k, c) in t.comps {
                out.add_term(&k, c);
            }
        }
        let swap_neg = ((self.degree - 1) * (other.degree - 1)).is_multiple_of(2);
        for (i, dq) in other.odd_derivatives() {
            let t = dq.wedge(&self.diff(i))?;
            for (k, c) in t.comps {
                out.add_term(&k, if swap_neg { c.neg() } else { c });
            }
        }
        Ok(out)
    }

    /// The cyclic sum `sum_l (s_lk d_l s_ij + s_li d_l s_jk + s_lj d_l s_ki)`
    /// for every `i < j < k`, keyed by the (0-based) triple.
    pub fn jacobi_defect(&self) -> Result<BTreeMap<(usize, usize, usize), C>> {
        if self.degree != 2 {
            return Err(Error::DegreeMismatch { expected: 2, found: self.degree });
        }
        let n = self.n;
        let s = |a: usize, b: usize| self.component(&[a, b]);
        let mut out = BTreeMap::new();
        for i in 0..n {
            for j in i + 1..n {
                for k in j + 1..n {
                    let mut acc = C::zero();
                    for l in 0..n {
                        for (x, y, (a, b)) in [(l, k, (i, j)), (l, i, (j, k)), (l, j, (k, i))] {
                            let f = s(x, y);
                            if f.is_zero() {
                                continue;
                            }
                            let d = s(a, b).diff(l);
                            acc = acc.add(&f.mul(&d));
                        }
                    }
                    if !acc.is_zero() {
                        out.insert((i, j, k), acc);
                    }
                }
            }
        }
        Ok(out)
    }
}

impl<C: Coeff> std::fmt::Debug for Multivector<C> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Multivector[chart {}, n {}, deg {}]{{", self.chart, self.n, self.degree)?;
        for (i, (k, c)) in self.comps.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{k:?}: {c:?}")?;
        }
        write!(f, "}}")
    }
}

/// Ratio `[s,s]_{ijk} / jacobi_defect(s)_{ijk}` for the bracket normalization
/// used by [`Multivector::schouten`].
pub const SCHOUTEN_JACOBI_RATIO: i64 = -2;

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactalg::int;

    fn v(i: usize) -> LPoly {
        LPoly::var(i)
    }

    fn mv(n: usize, idx: &[usize], c: LPoly) -> Multivector {
        Multivector::term(0, n, idx, c)
    }

    #[test]
    fn wedge_basis() {
        let a = mv(2, &[0], LPoly::one());
        let b = mv(2, &[1], LPoly::one());
        assert_eq!(a.wedge(&b).unwrap(), mv(2, &[0, 1], LPoly::one()));
        assert!(a.wedge(&a).unwrap().is_zero());
        let xa = mv(2, &[0], v(0));
        let wb = mv(2, &[1], v(1));
        assert_eq!(xa.wedge(&wb).unwrap(), mv(2, &[0, 1], &v(0) * &v(1)));
    }

    #[test]
    fn wedge_chart_mismatch() {
        let a = mv(2, &[0], LPoly::one());
        let b = Multivector::term(1, 2, &[1], LPoly::one());
        assert_eq!(a.wedge(&b), Err(Error::ChartMismatch(0, 1)));
    }

    #[test]
    fn lie_bracket_of_vector_fields() {
        let a = mv(1, &[0], LPoly::one());
        let b = mv(1, &[0], &v(0) * &v(0));
        assert_eq!(a.schouten(&b).unwrap(), mv(1, &[0], v(0).scale(&int(2))));
    }

    #[test]
    fn bracket_vanishes_in_top_degree() {
        let s = mv(2, &[0, 1], v(0));
        assert!(s.schouten(&s).unwrap().is_zero());
    }

    #[test]
    fn degree_zero_rejected() {
        let f = Multivector::function(0, 2, v(0));
        let s = mv(2, &[0, 1], v(0));
        assert_eq!(s.schouten(&f), Err(Error::DegreeZero));
    }

    #[test]
    fn defect_examples() {
        let s = mv(3, &[0, 1], v(2));
        assert!(s.jacobi_defect().unwrap().is_empty());

        let z1sq = &v(0) * &v(0);
        let z2sq = &v(1) * &v(1);
        let s = mv(3, &[0, 1], z1sq.clone()).add(&mv(3, &[1, 2], z2sq)).unwrap();
        let d = s.jacobi_defect().unwrap();
        let expect = (&z1sq * &v(1)).scale(&int(-2));
        assert_eq!(d.get(&(0, 1, 2)), Some(&expect));

        let br = s.schouten(&s).unwrap();
        assert_eq!(br.component(&[0, 1, 2]), expect.scale(&int(SCHOUTEN_JACOBI_RATIO)));

        let planar = mv(2, &[0, 1], z1sq);
        assert!(planar.jacobi_defect().unwrap().is_empty());
    }

    #[test]
    fn defect_requires_bivector() {
        let x = mv(2, &[0], v(0));
        assert_eq!(x.jacobi_defect().unwrap_err(), Error::DegreeMismatch { expected: 2, found: 1 });
    }
}
