//! Infinitesimal deformations of Poisson families and the Kodaira-Spencer map.

use std::collections::BTreeMap;

use serde::{Serialize, Serializer};

use crate::cech::{CechComplex, CohomologyReport, TotalCochain};
use crate::error::{Error, Result};
use crate::exactalg::{linalg, LPoly, ParamJet, Rat};
use crate::family::{Atlas, PoissonFamily, ValidationReport};
use crate::multivector::{ChartId, Multivector};

/// First-order part of a family along a tangent direction: bivectors
/// `lambda_j` and vector fields `theta_jk` (for `j < k`, on chart `j`).
#[derive(Clone, Debug, PartialEq)]
pub struct InfCocycle {
    pub lambda: Vec<Multivector>,
    pub theta: BTreeMap<(ChartId, ChartId), Multivector>,
    pub direction: Vec<Rat>,
}

impl InfCocycle {
    pub fn zero(atlas: &Atlas<LPoly>, direction: Vec<Rat>) -> Self {
        let n = atlas.dim();
        InfCocycle {
            lambda: (0..atlas.len()).map(|j| Multivector::zero(j, n, 2)).collect(),
            theta: atlas.pairs().into_iter().map(|(j, k)| ((j, k), Multivector::zero(j, n, 1))).collect(),
            direction,
        }
    }

    pub fn to_cochain(&self) -> Result<TotalCochain> {
        let n = self.lambda.first().map(Multivector::dim).unwrap_or(0);
        let mut c = TotalCochain::zero(1, n);
        for (j, l) in self.lambda.iter().enumerate() {
            c.add_cell(vec![j], l.clone())?;
        }
        for (&(j, k), th) in &self.theta {
            c.add_cell(vec![j, k], th.clone())?;
        }
        Ok(c)
    }
}

fn first_order(j: &ParamJet, direction: &[Rat]) -> LPoly {
    let mut out = LPoly::zero();
    for (u, c) in direction.iter().enumerate() {
        if !num_traits::Zero::is_zero(c) {
            out += j.param_diff(u).at_zero().scale(c);
        }
    }
    out
}

pub fn infinitesimal_cocycle(fam: &PoissonFamily, direction: &[Rat]) -> Result<InfCocycle> {
    if direction.len() != fam.param_count() {
        return Err(Error::InvalidParams(format!(
            "direction has {} components, family has {} parameters",
            direction.len(),
            fam.param_count()
        )));
    }
    let (central, _) = fam.central()?;
    let n = fam.atlas.dim();
    let lambda = fam.bivectors.iter().map(|b| b.try_map(|c| Ok(first_order(c, direction)))).collect::<Result<Vec<_>>>()?;
    let mut theta = BTreeMap::new();
    for (j, k) in fam.atlas.pairs() {
        let f = fam.atlas.require_transition(j, k)?;
        let back = central.require_transition(k, j)?;
        let mut v = Multivector::zero(j, n, 1);
        for (a, comp) in f.components().iter().enumerate() {
            let d = first_order(comp, direction);
            if !d.is_zero() {
                v.add_term(&[a], d.compose(back.components())?);
            }
        }
        theta.insert((j, k), v);
    }
    Ok(InfCocycle { lambda, theta, direction: direction.to_vec() })
}

/// Checks `[Lambda0, lambda_j] = 0`, `lambda_k - lambda_j + [Lambda0, theta_jk] = 0`
/// and `theta_jk - theta_ik + theta_ij = 0` exactly.
pub fn verify_cocycle_identities(c: &InfCocycle, atlas: &Atlas<LPoly>, lambda0: &[Multivector]) -> ValidationReport {
    let mut rep = ValidationReport::default();
    let name = |j: ChartId| atlas.charts[j].name.clone();
    let record = |rep: &mut ValidationReport, label: String, chart: ChartId, r: Result<Multivector>| match r {
        Ok(m) => {
            let vals: Vec<LPoly> = m.components().map(|(_, c)| c.clone()).collect();
            rep.push(label, &vals, &atlas.charts[chart].vars, atlas.charts[chart].dim());
        }
        Err(e) => rep.checks.push(crate::family::Check { name: label, passed: false, residual: Some(e.to_string()) }),
    };
    for (j, l) in c.lambda.iter().enumerate() {
        record(&mut rep, format!("poisson {}", name(j)), j, lambda0[j].schouten(l));
    }
    let zero_theta = |j: ChartId| Multivector::zero(j, atlas.dim(), 1);
    let theta = |j: ChartId, k: ChartId| c.theta.get(&(j, k)).cloned().unwrap_or_else(|| zero_theta(j));
    for (j, k) in atlas.pairs() {
        let r = (|| {
            let moved = atlas.move_to(&c.lambda[k], j)?;
            moved.sub(&c.lambda[j])?.add(&lambda0[j].schouten(&theta(j, k))?)
        })();
        record(&mut rep, format!("compatibility {}-{}", name(j), name(k)), j, r);
    }
    let nc = atlas.len();
    for i in 0..nc {
        for j in i + 1..nc {
            for k in j + 1..nc {
                if atlas.transition(i, j).is_none() || atlas.transition(i, k).is_none() || atlas.transition(j, k).is_none() {
                    continue;
                }
                let r = (|| atlas.move_to(&theta(j, k), i)?.sub(&theta(i, k))?.add(&theta(i, j)))();
                record(&mut rep, format!("cocycle {}-{}-{}", name(i), name(j), name(k)), i, r);
            }
        }
    }
    rep
}

fn ser_rat_matrix<S: Serializer>(m: &[Vec<Rat>], s: S) -> std::result::Result<S::Ok, S::Error> {
    let strs: Vec<Vec<String>> = m.iter().map(|r| r.iter().map(|x| x.to_string()).collect()).collect();
    strs.serialize(s)
}

/// Rows follow the cohomology basis, columns the parameter directions.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct KSMatrix {
    pub params: Vec<String>,
    /// Slice label of each row.
    pub basis: Vec<Vec<i64>>,
    #[serde(serialize_with = "ser_rat_matrix")]
    pub matrix: Vec<Vec<Rat>>,
    pub rank: usize,
}

pub fn ks_matrix(fam: &PoissonFamily, cx: &CechComplex, report: &CohomologyReport) -> Result<KSMatrix> {
    if report.degree != 1 {
        return Err(Error::DegreeMismatch { expected: 1, found: report.degree });
    }
    let m = fam.param_count();
    let zero = Rat::from_integer(0.into());
    let one = Rat::from_integer(1.into());
    let mut columns = Vec::with_capacity(m);
    for u in 0..m {
        let mut dir = vec![zero.clone(); m];
        dir[u] = one.clone();
        let c = infinitesimal_cocycle(fam, &dir)?.to_cochain()?;
        columns.push(cx.project_to_basis(&c, report)?);
    }
    let rows = report.basis.len();
    let matrix: Vec<Vec<Rat>> = (0..rows).map(|r| columns.iter().map(|c| c[r].clone()).collect()).collect();
    let rank = linalg::rank(&columns);
    Ok(KSMatrix { params: fam.params.clone(), basis: report.basis.iter().map(|b| b.slice.clone()).collect(), matrix, rank })
}
