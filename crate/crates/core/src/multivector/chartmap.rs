use std::collections::BTreeMap;

use super::{ChartId, Coeff, Multivector};
use crate::error::{Error, Result};
use crate::exactalg::LPoly;

/// Coordinate change `z_target = f(z_source)`: one component per target
/// variable, written in source variables.
#[derive(Clone, PartialEq, Debug)]
pub struct ChartMap<C = LPoly> {
    source: ChartId,
    target: ChartId,
    source_dim: usize,
    components: Vec<C>,
    inverse: Option<Box<ChartMap<C>>>,
}

impl<C: Coeff> ChartMap<C> {
    pub fn new(source: ChartId, target: ChartId, source_dim: usize, components: Vec<C>) -> Self {
        ChartMap { source, target, source_dim, components, inverse: None }
    }

    pub fn identity(chart: ChartId, n: usize) -> Self {
        let comps = (0..n).map(|i| C::from_lpoly(LPoly::var(i))).collect();
        let mut m = ChartMap::new(chart, chart, n, comps);
        m.inverse = Some(Box::new(m.clone()));
        m
    }

    /// Attaches the declared inverse (a map `target -> source`).
    pub fn with_inverse(mut self, inv: ChartMap<C>) -> Self {
        let mut inv = inv;
        inv.inverse = None;
        let mut me = self.clone();
        me.inverse = None;
        inv.inverse = Some(Box::new(me));
        self.inverse = Some(Box::new(inv));
        self
    }

    pub fn source(&self) -> ChartId {
        self.source
    }

    pub fn target(&self) -> ChartId {
        self.target
    }

    pub fn source_dim(&self) -> usize {
        self.source_dim
    }

    pub fn target_dim(&self) -> usize {
        self.components.len()
    }

    pub fn components(&self) -> &[C] {
        &self.components
    }

    pub fn inverse(&self) -> Option<&ChartMap<C>> {
        self.inverse.as_deref()
    }

    pub fn require_inverse(&self) -> Result<&ChartMap<C>> {
        self.inverse().ok_or(Error::MissingInverse { source_chart: self.source, target_chart: self.target })
    }

    /// `c(f(z))`: a function of target variables rewritten in source variables.
    pub fn pull(&self, c: &C) -> Result<C> {
        c.compose(&self.components)
    }

    /// `self o first`, where `first: A -> B` and `self: B -> C`.
    pub fn after(&self, first: &ChartMap<C>) -> Result<ChartMap<C>> {
        if first.target != self.source {
            return Err(Error::ChartMismatch(first.target, self.source));
        }
        let comps = self.components.iter().map(|c| first.pull(c)).collect::<Result<Vec<_>>>()?;
        let mut out = ChartMap::new(first.source, self.target, first.source_dim, comps);
        if let (Some(fi), Some(si)) = (first.inverse(), self.inverse()) {
            let mut fi = fi.clone();
            fi.inverse = None;
            let mut si = si.clone();
            si.inverse = None;
            out = out.with_inverse(fi.after(&si)?);
        }
        Ok(out)
    }

    /// Applies `g` to every component.
    pub fn try_map<D: Coeff, F: FnMut(&C) -> Result<D>>(&self, f: &mut F) -> Result<ChartMap<D>> {
        let comps = self.components.iter().map(&mut *f).collect::<Result<Vec<_>>>()?;
        let inverse = match &self.inverse {
            None => None,
            Some(inv) => {
                let inv_comps = inv.components.iter().map(&mut *f).collect::<Result<Vec<_>>>()?;
                Some(Box::new(ChartMap::new(inv.source, inv.target, inv.source_dim, inv_comps)))
            }
        };
        Ok(ChartMap { source: self.source, target: self.target, source_dim: self.source_dim, components: comps, inverse })
    }

    /// Components of `self o inverse - id` and `inverse o self - id`; all
    /// zero iff the declared inverse is a two-sided inverse.
    pub fn round_trip_residuals(&self) -> Result<Vec<C>> {
        let inv = self.require_inverse()?;
        let mut out = Vec::new();
        for (i, c) in self.components.iter().enumerate() {
            out.push(inv.pull(c)?.sub(&C::from_lpoly(LPoly::var(i))));
        }
        for (i, c) in inv.components.iter().enumerate() {
            out.push(self.pull(c)?.sub(&C::from_lpoly(LPoly::var(i))));
        }
        Ok(out)
    }

    /// `d f^a / d z^r`.
    pub fn jacobian(&self, a: usize, r: usize) -> C {
        self.components[a].diff(r)
    }

    /// Jacobian transform of a multivector in source variables:
    /// `sum_K L^K det(Jac[J, K])` for every target tuple `J`.
    pub fn transform(&self, l: &Multivector<C>) -> Result<Multivector<C>> {
        if l.chart() != self.source {
            return Err(Error::ChartMismatch(l.chart(), self.source));
        }
        let q = l.degree();
        let m = self.target_dim();
        let mut out = Multivector::zero(self.target, m, q);
        if q > m {
            return Ok(out);
        }
        let jac: Vec<Vec<C>> = (0..m).map(|a| (0..self.source_dim).map(|r| self.jacobian(a, r)).collect()).collect();
        let targets = subsets(m, q);
        for (k, c) in l.components() {
            for j in &targets {
                let minor: Vec<Vec<C>> = j.iter().map(|&a| k.iter().map(|&r| jac[a][r].clone()).collect()).collect();
                let d = det(&minor);
                if !d.is_zero() {
                    out.add_term(j, c.mul(&d));
                }
            }
        }
        Ok(out)
    }
}

/// All strictly increasing `q`-tuples from `0..n`.
pub fn subsets(n: usize, q: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, q: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == q {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, q, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, q, &mut Vec::new(), &mut out);
    out
}

fn det<C: Coeff>(m: &[Vec<C>]) -> C {
    match m.len() {
        0 => C::from_lpoly(LPoly::one()),
        1 => m[0][0].clone(),
        2 => m[0][0].mul(&m[1][1]).sub(&m[0][1].mul(&m[1][0])),
        n => {
            let mut acc = C::zero();
            for col in 0..n {
                if m[0][col].is_zero() {
                    continue;
                }
                let minor: Vec<Vec<C>> =
                    m[1..].iter().map(|row| row.iter().enumerate().filter(|(c, _)| *c != col).map(|(_, x)| x.clone()).collect()).collect();
                let t = m[0][col].mul(&det(&minor));
                acc = if col % 2 == 0 { acc.add(&t) } else { acc.sub(&t) };
            }
            acc
        }
    }
}

/// Expresses `l` (on `f.source`) on `f.target` by the Jacobian law followed by
/// substitution of the declared inverse.
pub fn pushforward<C: Coeff>(l: &Multivector<C>, f: &ChartMap<C>) -> Result<Multivector<C>> {
    let inv = f.require_inverse()?;
    if l.chart() != f.source {
        return Err(Error::ChartMismatch(l.chart(), f.source));
    }
    let raw = f.transform(l)?;
    raw.try_map(|c| inv.pull(c))
}

/// `R^J = L_tgt^J o f - sum_K L_src^K det(df[J,K])`, keyed by the tuples
/// where it is nonzero.
pub fn poisson_map_residual<C: Coeff>(
    f: &ChartMap<C>,
    src: &Multivector<C>,
    tgt: &Multivector<C>,
) -> Result<BTreeMap<Vec<usize>, C>> {
    if tgt.chart() != f.target {
        return Err(Error::ChartMismatch(tgt.chart(), f.target));
    }
    if src.degree() != tgt.degree() {
        return Err(Error::DegreeMismatch { expected: src.degree(), found: tgt.degree() });
    }
    let moved = f.transform(src)?;
    let mut out = BTreeMap::new();
    for j in subsets(f.target_dim(), tgt.degree()) {
        let r = f.pull(&tgt.component(&j))?.sub(&moved.component(&j));
        if !r.is_zero() {
            out.insert(j, r);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactalg::int;

    fn v(i: usize) -> LPoly {
        LPoly::var(i)
    }

    fn inv(p: &LPoly) -> LPoly {
        p.inv().unwrap()
    }

    fn p2_01() -> ChartMap {
        // (x, w) -> (1/x, w/x), self-inverse in form
        let f = ChartMap::new(0, 1, 2, vec![inv(&v(0)), &v(1) * &inv(&v(0))]);
        let g = ChartMap::new(1, 0, 2, vec![inv(&v(0)), &v(1) * &inv(&v(0))]);
        f.with_inverse(g)
    }

    #[test]
    fn identity_pushforward() {
        let l = Multivector::term(0, 2, &[0, 1], &v(0) + &v(1));
        let id = ChartMap::identity(0, 2);
        assert_eq!(pushforward(&l, &id).unwrap(), l);
    }

    #[test]
    fn missing_inverse() {
        let f: ChartMap = ChartMap::new(0, 1, 2, vec![v(0), v(1)]);
        let l = Multivector::term(0, 2, &[0, 1], v(0));
        assert_eq!(pushforward(&l, &f), Err(Error::MissingInverse { source_chart: 0, target_chart: 1 }));
    }

    #[test]
    fn p2_chart_change_residual_vanishes() {
        let f = p2_01();
        assert!(f.round_trip_residuals().unwrap().iter().all(|r| r.is_zero()));
        let l0 = Multivector::term(0, 2, &[0, 1], v(0));
        let l1 = pushforward(&l0, &f).unwrap();
        // x d_x ^ d_w becomes -x1^2 d_x1 ^ d_w1 on the second chart
        assert_eq!(l1, Multivector::term(1, 2, &[0, 1], -(&v(0) * &v(0))));
        assert!(poisson_map_residual(&f, &l0, &l1).unwrap().is_empty());
    }

    #[test]
    fn hirzebruch_fiber_inversion() {
        // (u, x) -> (u, 1/x): t x^2 du^dx becomes -t du^dy (t as a trailing symbol)
        let t = v(2);
        let f = ChartMap::new(0, 1, 2, vec![v(0), inv(&v(1))]).with_inverse(ChartMap::new(1, 0, 2, vec![v(0), inv(&v(1))]));
        let l = Multivector::term(0, 2, &[0, 1], &t * &(&v(1) * &v(1)));
        let got = pushforward(&l, &f).unwrap();
        assert_eq!(got, Multivector::term(1, 2, &[0, 1], -t));
    }

    #[test]
    fn functoriality_on_p2() {
        let f = p2_01();
        let l0 = Multivector::term(0, 2, &[0, 1], &(&v(0) * &v(1)) + &LPoly::from_int(3));
        let twice = pushforward(&pushforward(&l0, &f).unwrap(), f.inverse().unwrap()).unwrap();
        let direct = pushforward(&l0, &f.inverse().unwrap().after(&f).unwrap()).unwrap();
        assert_eq!(twice, l0);
        assert_eq!(direct, l0);
    }

    #[test]
    fn determinant_three_by_three() {
        let m: Vec<Vec<LPoly>> = [[2, 0, 1], [1, 3, 0], [0, 1, 4]]
            .iter()
            .map(|r| r.iter().map(|&x| LPoly::from_int(x)).collect())
            .collect();
        assert_eq!(det(&m), LPoly::constant(int(25)));
    }
}
