//! Poisson analytic families in atlas and quotient presentations.

mod examples;
pub mod spec;

pub use examples::{
    build_example, hirzebruch_nagata, hopf, hopf_iterate, p2, p2_full, torus, ExampleKind, Family, P2_ALL_MONOMIALS,
    P2_DIRECTIONS,
};
pub use spec::FamilySpec;

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::exactalg::{LPoly, ParamJet, RatFn};
use crate::expr::{parse_polyvector, parse_ratfn, Render};
use crate::multivector::{poisson_map_residual, pushforward, ChartId, ChartMap, Coeff, Multivector};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Chart {
    pub name: String,
    pub vars: Vec<String>,
}

impl Chart {
    pub fn new(name: &str, vars: &[&str]) -> Self {
        Chart { name: name.into(), vars: vars.iter().map(|s| s.to_string()).collect() }
    }

    pub fn dim(&self) -> usize {
        self.vars.len()
    }
}

/// Charts with transition maps. `transition(j, k)` is `f_jk`, the map from
/// chart `k` to chart `j` (`z_j = f_jk(z_k)`), carrying `f_kj` as its inverse.
#[derive(Clone, Debug)]
pub struct Atlas<C = LPoly> {
    pub charts: Vec<Chart>,
    overlaps: BTreeMap<(ChartId, ChartId), ChartMap<C>>,
    pub triples: Vec<[ChartId; 3]>,
}

impl<C: Coeff> Atlas<C> {
    pub fn new(charts: Vec<Chart>) -> Self {
        Atlas { charts, overlaps: BTreeMap::new(), triples: Vec::new() }
    }

    pub fn len(&self) -> usize {
        self.charts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.charts.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.charts.first().map(Chart::dim).unwrap_or(0)
    }

    /// Registers `forward: k -> j` and `backward: j -> k`.
    pub fn add_overlap(&mut self, forward: ChartMap<C>, backward: ChartMap<C>) {
        let (k, j) = (forward.source(), forward.target());
        let f = forward.clone().with_inverse(backward.clone());
        let b = backward.with_inverse(forward);
        self.overlaps.insert((j, k), f);
        self.overlaps.insert((k, j), b);
    }

    pub fn transition(&self, j: ChartId, k: ChartId) -> Option<&ChartMap<C>> {
        self.overlaps.get(&(j, k))
    }

    pub fn require_transition(&self, j: ChartId, k: ChartId) -> Result<&ChartMap<C>> {
        if j == k {
            return Err(Error::ChartMismatch(j, k));
        }
        self.transition(j, k).ok_or(Error::MissingInverse { source_chart: k, target_chart: j })
    }

    /// Unordered overlapping pairs `(j, k)` with `j < k`.
    pub fn pairs(&self) -> Vec<(ChartId, ChartId)> {
        self.overlaps.keys().filter(|(j, k)| j < k).copied().collect()
    }

    pub fn map_coeffs<D: Coeff, F: FnMut(&C) -> Result<D>>(&self, mut f: F) -> Result<Atlas<D>> {
        let mut overlaps = BTreeMap::new();
        for (key, m) in &self.overlaps {
            overlaps.insert(*key, m.try_map(&mut f)?);
        }
        Ok(Atlas { charts: self.charts.clone(), overlaps, triples: self.triples.clone() })
    }

    /// Moves a multivector from chart `k` to chart `j`.
    pub fn move_to(&self, m: &Multivector<C>, j: ChartId) -> Result<Multivector<C>> {
        if m.chart() == j {
            return Ok(m.clone());
        }
        pushforward(m, self.require_transition(j, m.chart())?)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub residual: Option<String>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub checks: Vec<Check>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }

    pub(crate) fn push<C: Render>(&mut self, name: String, residuals: &[C], names: &[String], nchart: usize) {
        let bad: Vec<String> = residuals.iter().filter(|r| !r.is_zero_value()).map(|r| r.render(names, nchart)).collect();
        let passed = bad.is_empty();
        self.checks.push(Check { name, passed, residual: (!passed).then(|| bad.join("; ")) });
    }

    pub fn extend(&mut self, other: ValidationReport) {
        self.checks.extend(other.checks);
    }
}

fn with_params(vars: &[String], params: &[String]) -> Vec<String> {
    vars.iter().chain(params).cloned().collect()
}

/// Round-trip identities on every overlap and the cocycle identity
/// `f_ik = f_ij o f_jk` on every listed triple.
pub fn validate_atlas<C: Coeff + Render>(atlas: &Atlas<C>, params: &[String]) -> ValidationReport {
    let mut rep = ValidationReport::default();
    for (j, k) in atlas.pairs() {
        let name = format!("inverse {}<->{}", atlas.charts[j].name, atlas.charts[k].name);
        let names = with_params(&atlas.charts[k].vars, params);
        match atlas.require_transition(j, k).and_then(|f| f.round_trip_residuals()) {
            Ok(res) => rep.push(name, &res, &names, atlas.charts[k].dim()),
            Err(e) => rep.checks.push(Check { name, passed: false, residual: Some(e.to_string()) }),
        }
    }
    for &[i, j, k] in &atlas.triples {
        let name = format!("cocycle {}-{}-{}", atlas.charts[i].name, atlas.charts[j].name, atlas.charts[k].name);
        let names = with_params(&atlas.charts[k].vars, params);
        let res = (|| -> Result<Vec<C>> {
            let direct = atlas.require_transition(i, k)?;
            let composed = atlas.require_transition(i, j)?.after(atlas.require_transition(j, k)?)?;
            Ok(direct.components().iter().zip(composed.components()).map(|(a, b)| a.sub(b)).collect())
        })();
        match res {
            Ok(res) => rep.push(name, &res, &names, atlas.charts[k].dim()),
            Err(e) => rep.checks.push(Check { name, passed: false, residual: Some(e.to_string()) }),
        }
    }
    rep
}

fn validate_poisson<C: Coeff + Render>(
    atlas: &Atlas<C>,
    bivectors: &[Multivector<C>],
    params: &[String],
) -> ValidationReport {
    let mut rep = ValidationReport::default();
    for (j, b) in bivectors.iter().enumerate() {
        let names = with_params(&atlas.charts[j].vars, params);
        let res: Vec<C> = match b.jacobi_defect() {
            Ok(d) => d.into_values().collect(),
            Err(e) => {
                rep.checks.push(Check { name: format!("jacobi {}", atlas.charts[j].name), passed: false, residual: Some(e.to_string()) });
                continue;
            }
        };
        rep.push(format!("jacobi {}", atlas.charts[j].name), &res, &names, atlas.charts[j].dim());
    }
    for (j, k) in atlas.pairs() {
        for (a, b) in [(j, k), (k, j)] {
            let name = format!("poisson map {}->{}", atlas.charts[b].name, atlas.charts[a].name);
            let names = with_params(&atlas.charts[b].vars, params);
            let res = atlas
                .require_transition(a, b)
                .and_then(|f| poisson_map_residual(f, &bivectors[b], &bivectors[a]))
                .map(|m| m.into_values().collect::<Vec<_>>());
            match res {
                Ok(res) => rep.push(name, &res, &names, atlas.charts[b].dim()),
                Err(e) => rep.checks.push(Check { name, passed: false, residual: Some(e.to_string()) }),
            }
        }
    }
    rep
}

/// Atlas with parameter-dependent transitions and one bivector jet per chart.
#[derive(Clone, Debug)]
pub struct PoissonFamily {
    pub atlas: Atlas<ParamJet>,
    pub bivectors: Vec<Multivector<ParamJet>>,
    pub params: Vec<String>,
    pub order: u32,
}

impl PoissonFamily {
    pub fn param_count(&self) -> usize {
        self.params.len()
    }

    /// The central fiber: every jet evaluated at `t = 0`.
    pub fn central(&self) -> Result<(Atlas<LPoly>, Vec<Multivector<LPoly>>)> {
        let atlas = self.atlas.map_coeffs(|j| Ok(j.at_zero()))?;
        let bivs = self.bivectors.iter().map(|b| b.try_map(|j| Ok(j.at_zero()))).collect::<Result<Vec<_>>>()?;
        Ok((atlas, bivs))
    }

    /// Truncates every jet to `order`.
    pub fn truncate(&self, order: u32) -> PoissonFamily {
        let order = order.min(self.order);
        let atlas = self.atlas.map_coeffs(|j| Ok(j.with_order(order))).expect("truncation is infallible");
        let bivectors = self.bivectors.iter().map(|b| b.try_map(|j| Ok(j.with_order(order))).expect("infallible")).collect();
        PoissonFamily { atlas, bivectors, params: self.params.clone(), order }
    }

    /// Substitutes `t_u = h[u](s)`; the result is parametrized by `s` with
    /// names `new_params`.
    pub fn pullback(&self, h: &[ParamJet], new_params: Vec<String>) -> Result<PoissonFamily> {
        if h.len() != self.params.len() {
            return Err(Error::InvalidParams(format!("expected {} parameter values, got {}", self.params.len(), h.len())));
        }
        if h.iter().any(|j| !j.at_zero().is_zero()) {
            return Err(Error::InvalidParams("parameter map must vanish at the origin".into()));
        }
        let order = h.iter().map(ParamJet::order).fold(self.order, u32::min);
        let sub = |j: &ParamJet| -> Result<ParamJet> { Ok(j.compose(&[], Some(h))?.with_order(order)) };
        let atlas = self.atlas.map_coeffs(sub)?;
        let bivectors = self.bivectors.iter().map(|b| b.try_map(sub)).collect::<Result<Vec<_>>>()?;
        Ok(PoissonFamily { atlas, bivectors, params: new_params, order })
    }

    /// Re-centers the family at `t0` by substituting `t -> t0 + t`. Terms of
    /// the original jet beyond its order are unknown, so the result is exact
    /// only when the family is polynomial of degree at most `order` in `t`.
    pub fn recenter(&self, t0: &[crate::exactalg::Rat]) -> Result<PoissonFamily> {
        if t0.len() != self.params.len() {
            return Err(Error::InvalidParams("wrong number of center coordinates".into()));
        }
        let h: Vec<ParamJet> = t0
            .iter()
            .enumerate()
            .map(|(u, c)| &ParamJet::param(u, crate::exactalg::EXACT) + &ParamJet::exact(LPoly::constant(c.clone())))
            .collect();
        let order = self.order;
        let sub = |j: &ParamJet| -> Result<ParamJet> { Ok(j.compose(&[], Some(&h))?.with_order(order)) };
        let atlas = self.atlas.map_coeffs(sub)?;
        let bivectors = self.bivectors.iter().map(|b| b.try_map(sub)).collect::<Result<Vec<_>>>()?;
        Ok(PoissonFamily { atlas, bivectors, params: self.params.clone(), order })
    }
}

pub fn validate_family(fam: &PoissonFamily) -> ValidationReport {
    validate_poisson(&fam.atlas, &fam.bivectors, &fam.params)
}

/// Validates atlas identities and Poisson conditions together.
pub fn validate_all(fam: &PoissonFamily) -> ValidationReport {
    let mut rep = validate_atlas(&fam.atlas, &fam.params);
    rep.extend(validate_family(fam));
    rep
}

/// Ambient chart with generators of a group of Poisson automorphisms.
///
/// Variables are laid out as the chart coordinates followed by `symbols`
/// (parameters and constants). Everything is exact: no truncation applies.
#[derive(Clone, Debug)]
pub struct QuotientFamily {
    pub chart: Chart,
    pub symbols: Vec<String>,
    pub generators: Vec<ChartMap<LPoly>>,
    pub bivector: Multivector<LPoly>,
    /// Imposed relations `symbol = value`, keyed by variable index.
    pub relations: Vec<(usize, LPoly)>,
}

impl QuotientFamily {
    pub fn vars(&self) -> Vec<String> {
        with_params(&self.chart.vars, &self.symbols)
    }

    fn apply_relations(&self, p: &LPoly) -> Result<LPoly> {
        let mut out = p.clone();
        for (var, val) in &self.relations {
            let mut vals: Vec<LPoly> = (0..*var).map(LPoly::var).collect();
            vals.push(val.clone());
            out = out.compose(&vals)?;
        }
        Ok(out)
    }
}

pub fn validate_quotient(fam: &QuotientFamily) -> ValidationReport {
    let mut rep = ValidationReport::default();
    let names = fam.vars();
    let n = fam.chart.dim();
    match fam.bivector.jacobi_defect() {
        Ok(d) => {
            let res: Vec<LPoly> = d.into_values().map(|r| fam.apply_relations(&r).unwrap_or(r)).collect();
            rep.push("jacobi".into(), &res, &names, n)
        }
        Err(e) => rep.checks.push(Check { name: "jacobi".into(), passed: false, residual: Some(e.to_string()) }),
    }
    for (g, gen) in fam.generators.iter().enumerate() {
        let name = format!("invariance g{}", g + 1);
        let res = poisson_map_residual(gen, &fam.bivector, &fam.bivector)
            .and_then(|m| m.into_values().map(|r| fam.apply_relations(&r)).collect::<Result<Vec<_>>>());
        match res {
            Ok(res) => rep.push(name, &res, &names, n),
            Err(e) => rep.checks.push(Check { name, passed: false, residual: Some(e.to_string()) }),
        }
    }
    rep
}

/// Parses a transition component list into a jet chart map. Variables are
/// the source chart's followed by the parameters.
pub fn parse_jet_map(
    source: ChartId,
    target: ChartId,
    source_vars: &[String],
    params: &[String],
    exprs: &[String],
    order: u32,
) -> Result<ChartMap<ParamJet>> {
    let names = with_params(source_vars, params);
    let n = source_vars.len();
    let comps = exprs
        .iter()
        .map(|e| ParamJet::from_ratfn(&parse_ratfn(e, &names)?, n, params.len(), order))
        .collect::<Result<Vec<_>>>()?;
    Ok(ChartMap::new(source, target, n, comps))
}

/// Parses a bivector (or any polyvector) with jet coefficients.
pub fn parse_jet_polyvector(
    chart: ChartId,
    vars: &[String],
    params: &[String],
    text: &str,
    degree: usize,
    order: u32,
) -> Result<Multivector<ParamJet>> {
    let names = with_params(vars, params);
    let n = vars.len();
    let term = parse_polyvector(text, &names, n)?;
    let mut m = Multivector::zero(chart, n, degree);
    if term.comps.is_empty() {
        return Ok(m);
    }
    if term.degree != degree {
        return Err(Error::DegreeMismatch { expected: degree, found: term.degree });
    }
    for (idx, c) in &term.comps {
        m.add_term(idx, ParamJet::from_ratfn(c, n, params.len(), order)?);
    }
    Ok(m)
}

/// Parses an exact map over `[chart vars][symbols]`.
pub fn parse_exact_map(chart: ChartId, vars: &[String], exprs: &[String]) -> Result<ChartMap<LPoly>> {
    let comps = exprs
        .iter()
        .map(|e| {
            let f: RatFn = parse_ratfn(e, vars)?;
            f.to_lpoly().ok_or_else(|| Error::Parse { offset: 0, message: format!("'{e}' is not a Laurent polynomial") })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ChartMap::new(chart, chart, comps.len(), comps))
}
