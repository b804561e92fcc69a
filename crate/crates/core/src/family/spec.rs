//! Declarative family description shared by the builders and the JSON
//! front end.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{parse_exact_map, parse_jet_map, parse_jet_polyvector, Atlas, Chart, Family, PoissonFamily, QuotientFamily};
use crate::error::{Error, Result};
use crate::expr::{parse_lpoly, parse_polyvector};
use crate::multivector::Multivector;

pub const FAMILY_SCHEMA: &str = "hpd-family/1";

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SpecKind {
    Atlas,
    Quotient,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParamSpec {
    pub names: Vec<String>,
    pub order: u32,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChartSpec {
    pub name: String,
    pub variables: Vec<String>,
}

/// `forward` writes the first chart's coordinates in the second chart's
/// coordinates; `backward` is the opposite direction.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OverlapSpec {
    pub pair: [String; 2],
    pub forward: Vec<String>,
    pub backward: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeneratorSpec {
    pub map: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub inverse: Option<Vec<String>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FamilySpec {
    pub schema: String,
    pub kind: SpecKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub params: ParamSpec,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub symbols: Vec<String>,
    pub charts: Vec<ChartSpec>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub overlaps: Vec<OverlapSpec>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub triples: Vec<[String; 3]>,
    /// Bivector per chart; charts left out are filled in by pushforward.
    pub bivectors: BTreeMap<String, String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub generators: Vec<GeneratorSpec>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub relations: Vec<String>,
}

fn invalid(msg: String) -> Error {
    Error::InvalidParams(msg)
}

impl FamilySpec {
    fn chart_index(&self, name: &str) -> Result<usize> {
        self.charts.iter().position(|c| c.name == name).ok_or_else(|| invalid(format!("unknown chart '{name}'")))
    }

    fn charts(&self) -> Vec<Chart> {
        self.charts.iter().map(|c| Chart { name: c.name.clone(), vars: c.variables.clone() }).collect()
    }

    pub fn build(&self) -> Result<Family> {
        if self.schema != FAMILY_SCHEMA {
            return Err(invalid(format!("unsupported schema '{}'", self.schema)));
        }
        match self.kind {
            SpecKind::Atlas => self.build_atlas().map(Family::Atlas),
            SpecKind::Quotient => self.build_quotient().map(Family::Quotient),
        }
    }

    fn build_atlas(&self) -> Result<PoissonFamily> {
        let charts = self.charts();
        if charts.is_empty() {
            return Err(invalid("atlas has no charts".into()));
        }
        let n = charts[0].dim();
        if charts.iter().any(|c| c.dim() != n) {
            return Err(invalid("charts have different dimensions".into()));
        }
        let params = &self.params.names;
        let order = self.params.order;
        let mut atlas: Atlas<crate::exactalg::ParamJet> = Atlas::new(charts.clone());
        for ov in &self.overlaps {
            let a = self.chart_index(&ov.pair[0])?;
            let b = self.chart_index(&ov.pair[1])?;
            if ov.forward.len() != n || ov.backward.len() != n {
                return Err(invalid(format!("overlap {}-{} needs {n} components each way", ov.pair[0], ov.pair[1])));
            }
            let fwd = parse_jet_map(b, a, &charts[b].vars, params, &ov.forward, order)?;
            let bwd = parse_jet_map(a, b, &charts[a].vars, params, &ov.backward, order)?;
            atlas.add_overlap(fwd, bwd);
        }
        for t in &self.triples {
            atlas.triples.push([self.chart_index(&t[0])?, self.chart_index(&t[1])?, self.chart_index(&t[2])?]);
        }
        let mut bivs: Vec<Option<Multivector<crate::exactalg::ParamJet>>> = vec![None; charts.len()];
        for (name, text) in &self.bivectors {
            let j = self.chart_index(name)?;
            bivs[j] = Some(parse_jet_polyvector(j, &charts[j].vars, params, text, 2, order)?);
        }
        // fill missing charts from any chart that overlaps them
        loop {
            let missing: Vec<usize> = (0..charts.len()).filter(|&j| bivs[j].is_none()).collect();
            if missing.is_empty() {
                break;
            }
            let mut progress = false;
            for j in missing {
                let src = (0..charts.len()).find(|&k| bivs[k].is_some() && atlas.transition(j, k).is_some());
                if let Some(k) = src {
                    let moved = atlas.move_to(bivs[k].as_ref().expect("present"), j)?;
                    bivs[j] = Some(moved);
                    progress = true;
                }
            }
            if !progress {
                return Err(invalid("some charts have no bivector and no overlap to derive one".into()));
            }
        }
        Ok(PoissonFamily { atlas, bivectors: bivs.into_iter().map(|b| b.expect("filled")).collect(), params: params.clone(), order })
    }

    fn build_quotient(&self) -> Result<QuotientFamily> {
        let charts = self.charts();
        if charts.len() != 1 {
            return Err(invalid("quotient families have exactly one ambient chart".into()));
        }
        let chart = charts[0].clone();
        let n = chart.dim();
        let mut symbols = self.symbols.clone();
        for p in &self.params.names {
            if !symbols.contains(p) {
                symbols.push(p.clone());
            }
        }
        let vars: Vec<String> = chart.vars.iter().chain(&symbols).cloned().collect();
        let mut generators = Vec::new();
        for g in &self.generators {
            if g.map.len() != n {
                return Err(invalid(format!("generator needs {n} components")));
            }
            let mut map = parse_exact_map(0, &vars, &g.map)?;
            if let Some(inv) = &g.inverse {
                map = map.with_inverse(parse_exact_map(0, &vars, inv)?);
            }
            generators.push(map);
        }
        let text = self.bivectors.get(&chart.name).ok_or_else(|| invalid("missing ambient bivector".into()))?;
        let term = parse_polyvector(text, &vars, n)?;
        let bivector = if term.comps.is_empty() { Multivector::zero(0, n, 2) } else { term.to_multivector(0, n)? };
        if bivector.degree() != 2 {
            return Err(Error::DegreeMismatch { expected: 2, found: bivector.degree() });
        }
        let mut relations = Vec::new();
        for r in &self.relations {
            let (lhs, rhs) = r.split_once('=').ok_or_else(|| invalid(format!("relation '{r}' has no '='")))?;
            let var = vars
                .iter()
                .position(|v| v == lhs.trim())
                .filter(|&i| i >= n)
                .ok_or_else(|| invalid(format!("relation must set a symbol, got '{}'", lhs.trim())))?;
            relations.push((var, parse_lpoly(rhs, &vars)?));
        }
        Ok(QuotientFamily { chart, symbols, generators, bivector, relations })
    }
}
