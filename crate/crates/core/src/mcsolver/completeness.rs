use std::collections::BTreeMap;

use serde::Serialize;

use crate::cech::{CechComplex, Settings, TotalCochain};
use crate::deformation::{infinitesimal_cocycle, ks_matrix};
use crate::error::{Error, Result};
use crate::exactalg::linalg::{Echelon, SparseVec};
use crate::exactalg::{LPoly, Monomial, ParamJet, Rat};
use crate::expr::print_lpoly;
use crate::family::PoissonFamily;
use crate::multivector::{poisson_map_residual, ChartMap, Multivector};

/// Parameter map `t = h(s)` and chart maps `g_j(z_j, s)` carrying the test
/// family onto the target family.
#[derive(Clone, Debug, PartialEq)]
pub struct CompletenessSolution {
    pub h: Vec<ParamJet>,
    pub g: Vec<Vec<ParamJet>>,
    pub order: u32,
    pub diagnostics: Vec<OrderDiagnostics>,
    /// Dimension of the degree 0 cohomology, the gauge freedom in `(h, g)`.
    pub gauge_dim: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OrderDiagnostics {
    pub order: u32,
    pub monomials: usize,
    pub defect_cells: usize,
    pub unknowns: usize,
    pub rank: usize,
}

impl CompletenessSolution {
    /// The identity seed: `h = 0`, `g_j = id`.
    pub fn seed(target: &PoissonFamily, order: u32) -> Self {
        let n = target.atlas.dim();
        let h = vec![ParamJet::zero(order); target.param_count()];
        let g = (0..target.atlas.len())
            .map(|_| (0..n).map(|a| ParamJet::constant(LPoly::var(a), order)).collect())
            .collect();
        CompletenessSolution { h, g, order, diagnostics: Vec::new(), gauge_dim: 0 }
    }

    pub fn render_h(&self, params: &[String]) -> Vec<String> {
        self.h.iter().map(|j| print_lpoly(&j.flatten(0), params)).collect()
    }
}

fn chart_map(j: usize, comps: &[ParamJet]) -> ChartMap<ParamJet> {
    ChartMap::new(j, j, comps.len(), comps.to_vec())
}

fn identity_jets(n: usize, order: u32) -> Vec<ParamJet> {
    (0..n).map(|a| ParamJet::constant(LPoly::var(a), order)).collect()
}

/// Residuals of both congruences as jets in `s`: the transition residual
/// on each overlap `[j, k]` (chart-`j` components, in chart-`k` variables)
/// and the bivector residual on each chart.
struct Residuals {
    transitions: BTreeMap<(usize, usize), Vec<ParamJet>>,
    bivectors: Vec<Multivector<ParamJet>>,
}

fn residuals(target: &PoissonFamily, test: &PoissonFamily, sol: &CompletenessSolution) -> Result<Residuals> {
    let n = target.atlas.dim();
    let order = sol.order;
    let mut transitions = BTreeMap::new();
    for (j, k) in target.atlas.pairs() {
        let fm = target.atlas.require_transition(j, k)?;
        let fnn = test.atlas.require_transition(j, k)?;
        let mut comps = Vec::with_capacity(n);
        for a in 0..n {
            let lhs = sol.g[j][a].compose(fnn.components(), None)?;
            let rhs = fm.components()[a].compose(&sol.g[k], Some(&sol.h))?;
            comps.push((&lhs - &rhs).with_order(order));
        }
        transitions.insert((j, k), comps);
    }
    let mut bivectors = Vec::new();
    let ident = identity_jets(n, order);
    for j in 0..target.atlas.len() {
        let tgt = target.bivectors[j].try_map(|c| Ok(c.compose(&ident, Some(&sol.h))?.with_order(order)))?;
        let src = test.bivectors[j].try_map(|c| Ok(c.with_order(order)))?;
        let res = poisson_map_residual(&chart_map(j, &sol.g[j]), &src, &tgt)?;
        let mut m = Multivector::zero(j, n, 2);
        for (idx, c) in res {
            m.add_term(&idx, c.with_order(order));
        }
        bivectors.push(m);
    }
    Ok(Residuals { transitions, bivectors })
}

impl Residuals {
    fn lowest_order(&self) -> Option<u32> {
        let t = self.transitions.values().flatten().filter_map(ParamJet::valuation);
        let b = self.bivectors.iter().flat_map(|m| m.components().filter_map(|(_, c)| c.valuation()).collect::<Vec<_>>());
        t.chain(b).min()
    }

    /// Degree `v` part as total cochains in chart coordinates: the
    /// bivector residual enters with a minus sign.
    fn homogeneous(&self, target: &PoissonFamily, v: u32) -> Result<BTreeMap<Monomial, TotalCochain>> {
        let (central, _) = target.central()?;
        let n = central.dim();
        let mut out: BTreeMap<Monomial, TotalCochain> = BTreeMap::new();
        let mut put = |m: Monomial, cell: Vec<usize>, mv: Multivector| -> Result<()> {
            out.entry(m).or_insert_with(|| TotalCochain::zero(1, n)).add_cell(cell, mv)
        };
        for (j, b) in self.bivectors.iter().enumerate() {
            for (idx, c) in b.components() {
                for (m, p) in c.homogeneous(v) {
                    put(m, vec![j], Multivector::term(j, n, idx, -p))?;
                }
            }
        }
        for (&(j, k), comps) in &self.transitions {
            let back = central.require_transition(k, j)?;
            for (a, c) in comps.iter().enumerate() {
                for (m, p) in c.homogeneous(v) {
                    put(m, vec![j, k], Multivector::term(j, n, &[a], p.compose(back.components())?))?;
                }
            }
        }
        out.retain(|_, c| !c.is_zero());
        Ok(out)
    }
}

/// Degree `v` defect of a partial solution, per monomial in `s`.
pub fn completeness_defect(
    target: &PoissonFamily,
    test: &PoissonFamily,
    partial: &CompletenessSolution,
    v: u32,
) -> Result<BTreeMap<Monomial, TotalCochain>> {
    let res = residuals(target, test, partial)?;
    if let Some(low) = res.lowest_order() {
        if low < v {
            return Err(Error::PrerequisiteViolated(format!("congruences fail at order {low} < {v}")));
        }
    }
    res.homogeneous(target, v)
}

fn same_central_fiber(a: &PoissonFamily, b: &PoissonFamily) -> Result<bool> {
    let (aa, ab) = a.central()?;
    let (ba, bb) = b.central()?;
    if aa.charts != ba.charts || aa.pairs() != ba.pairs() || ab != bb {
        return Ok(false);
    }
    for (j, k) in aa.pairs() {
        for (x, y) in [(j, k), (k, j)] {
            if aa.transition(x, y).map(ChartMap::components) != ba.transition(x, y).map(ChartMap::components) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Finds `h(s)` and `g_j(z_j, s)` order by order so that the test family is
/// the pullback of the target family along `h`, up to the chart maps `g_j`.
pub fn complete_family(target: &PoissonFamily, test: &PoissonFamily, order: u32, settings: &Settings) -> Result<CompletenessSolution> {
    if !same_central_fiber(target, test)? {
        return Err(Error::PrerequisiteViolated("target and test families have different central fibers".into()));
    }
    let target = target.truncate(order);
    let test = test.truncate(order);
    let (atlas, bivs) = target.central()?;
    let cx = CechComplex::new(&atlas, &bivs)?;
    let h1 = cx.hypercohomology(1, settings)?;
    let ks = ks_matrix(&target, &cx, &h1)?;
    if ks.rank < h1.dimension {
        return Err(Error::NotSurjective { rank: ks.rank, dim: h1.dimension });
    }
    let gauge_dim = cx.hypercohomology(0, settings)?.dimension;
    let m = target.param_count();
    let ks_cochains = (0..m)
        .map(|u| {
            let mut dir = vec![Rat::from_integer(0.into()); m];
            dir[u] = Rat::from_integer(1.into());
            infinitesimal_cocycle(&target, &dir)?.to_cochain()
        })
        .collect::<Result<Vec<_>>>()?;
    let ks_vecs = ks_cochains.iter().map(|c| cx.to_vectors(c)).collect::<Result<Vec<_>>>()?;

    let mut sol = CompletenessSolution::seed(&target, order);
    sol.gauge_dim = gauge_dim;
    for v in 1..=order {
        let defects = completeness_defect(&target, &test, &sol, v)?;
        let mut diag = OrderDiagnostics { order: v, monomials: defects.len(), defect_cells: 0, unknowns: 0, rank: 0 };
        for (mono, r0) in &defects {
            diag.defect_cells += r0.cells().count();
            let rvec = cx.to_vectors(r0)?;
            let mut slices: Vec<Vec<i64>> = rvec.keys().cloned().collect();
            for kv in &ks_vecs {
                slices.extend(kv.keys().cloned());
            }
            slices.sort();
            slices.dedup();
            let offsets: BTreeMap<&Vec<i64>, usize> = {
                let mut acc = 0;
                let mut map = BTreeMap::new();
                for g in &slices {
                    map.insert(g, acc);
                    acc += cx.slice_basis(1, g).len();
                }
                map
            };
            let globalize = |vs: &BTreeMap<Vec<i64>, SparseVec>| -> SparseVec {
                let mut out = SparseVec::new();
                for (g, v) in vs {
                    let off = offsets[g];
                    for (i, x) in v {
                        out.insert(off + i, x.clone());
                    }
                }
                out
            };
            let mut ech = Echelon::new();
            for kv in &ks_vecs {
                ech.insert(&globalize(kv));
            }
            let mut gauge_cells = Vec::new();
            for g in &slices {
                let cols = cx.differential_columns(0, g)?;
                for (i, col) in cols.into_iter().enumerate() {
                    let mut one = BTreeMap::new();
                    one.insert(g.clone(), col.into_iter().map(|(r, x)| (r, -x)).collect::<SparseVec>());
                    ech.insert(&globalize(&one));
                    gauge_cells.push((g.clone(), i));
                }
            }
            diag.unknowns += m + gauge_cells.len();
            diag.rank += ech.rank();
            let comb = ech.solve(&globalize(&rvec)).ok_or_else(|| Error::UnsolvableOrder {
                order: v,
                detail: format!("defect at {mono:?} is outside the span of the Kodaira-Spencer classes and coboundaries"),
            })?;
            for (l, x) in comb {
                if l < m {
                    sol.h[l].add_term(mono.clone(), LPoly::constant(x));
                } else {
                    let (g, i) = &gauge_cells[l - m];
                    let mut v = SparseVec::new();
                    v.insert(*i, x);
                    let gamma = cx.from_vector(0, g, &v);
                    for (cell, mv) in gamma.cells() {
                        let j = cell[0];
                        for (idx, c) in mv.components() {
                            sol.g[j][idx[0]].add_term(mono.clone(), c.clone());
                        }
                    }
                }
            }
        }
        let check = residuals(&target, &test, &sol)?;
        if let Some(low) = check.lowest_order() {
            if low <= v {
                return Err(Error::UnsolvableOrder { order: v, detail: format!("congruence still fails at order {low}") });
            }
        }
        sol.diagnostics.push(diag);
    }
    Ok(sol)
}

/// Checks both congruences through `order`.
pub fn verify_congruences(target: &PoissonFamily, test: &PoissonFamily, sol: &CompletenessSolution) -> Result<bool> {
    let res = residuals(&target.truncate(sol.order), &test.truncate(sol.order), sol)?;
    Ok(res.lowest_order().is_none())
}
