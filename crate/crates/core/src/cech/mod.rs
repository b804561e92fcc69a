//! Čech total complex of the truncated Poisson complex on monomial atlases.
//!
//! Transitions of the central fiber must be monomial, so every chart carries
//! a torus action compatible with the overlaps. A monomial multivector
//! `z^a d_J` on chart `j` has torus weight `chi = (a - 1_J) W_j`, where the
//! rows of `W_j` are the weights of the chart variables (chart 0 has
//! `W_0 = I`). With `Lambda0` of weight `e`, both parts of the differential
//! preserve the slice label `G = chi - q e`, and for a fixed `G` each pair
//! (chart tuple, direction set) carries at most one monomial. Slices are
//! therefore finite and are handled independently.

mod cochain;

pub use cochain::{single_coeff, CellTerm, TotalCochain};

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, Mutex};

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exactalg::linalg::{reduce_columns, Echelon, SparseVec};
use crate::exactalg::{LPoly, Monomial, Rat};
use crate::family::Atlas;
use crate::multivector::{pushforward, subsets, ChartId, Multivector};

pub type Slice = Vec<i64>;

/// One basis element of a slice: `z^exps d_dirs` on the intersection
/// `charts`, written in the coordinates of `charts[0]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SliceCell {
    pub charts: Vec<ChartId>,
    pub dirs: Vec<usize>,
    pub exps: Vec<i64>,
}

#[derive(Debug)]
struct SliceBasis {
    cells: Vec<SliceCell>,
    index: HashMap<(Vec<ChartId>, Vec<usize>), usize>,
}

#[derive(Debug)]
struct SliceCohomology {
    /// Kernel vectors of `D_k` chosen as class representatives.
    reps: Vec<SparseVec>,
    /// Representatives (labels `0..reps.len()`) followed by the image of `D_{k-1}`.
    projector: Echelon,
    /// Image of `D_{k-1}`, labels aligned with the degree `k-1` basis.
    image: Echelon,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Settings {
    pub window: [i64; 2],
    #[serde(rename = "box")]
    pub box_size: i64,
}

impl Default for Settings {
    fn default() -> Self {
        Settings { window: [-4, 4], box_size: 8 }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BasisClass {
    pub slice: Slice,
    pub weight: i64,
    pub terms: Vec<CellTerm>,
    #[serde(skip)]
    pub cochain: TotalCochain,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SliceDim {
    pub slice: Slice,
    pub weight: i64,
    pub dim: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CohomologyReport {
    pub degree: usize,
    pub settings: Settings,
    pub lambda0_weight: Vec<i64>,
    pub dimension: usize,
    pub by_weight: BTreeMap<i64, usize>,
    pub slices: Vec<SliceDim>,
    pub stable: bool,
    /// Nonzero slices found one step outside the box.
    pub unstable_slices: Vec<SliceDim>,
    pub basis: Vec<BasisClass>,
}

impl CohomologyReport {
    pub fn covers(&self, g: &[i64]) -> bool {
        let w: i64 = g.iter().sum();
        g.iter().all(|x| x.abs() <= self.settings.box_size) && w >= self.settings.window[0] && w <= self.settings.window[1]
    }
}

fn eps(p: usize, r: usize) -> i64 {
    if (p * r + p * (p + 1) / 2).is_multiple_of(2) {
        1
    } else {
        -1
    }
}

/// Sign of the cup bracket of a `(p, q)` cell with a `(p2, q2)` cell.
pub fn bracket_sign(p: usize, q: usize, p2: usize, q2: usize) -> i64 {
    let (r, r2) = (q - 1, q2 - 1);
    let koszul = if (p2 * r).is_multiple_of(2) { 1 } else { -1 };
    eps(p + p2, r + r2) * eps(p, r) * eps(p2, r2) * koszul
}

fn int_det(m: &[Vec<i64>]) -> i64 {
    let n = m.len();
    if n == 0 {
        return 1;
    }
    let mut acc = 0;
    for col in 0..n {
        if m[0][col] == 0 {
            continue;
        }
        let minor: Vec<Vec<i64>> =
            m[1..].iter().map(|row| row.iter().enumerate().filter(|(c, _)| *c != col).map(|(_, x)| *x).collect()).collect();
        let s = if col % 2 == 0 { 1 } else { -1 };
        acc += s * m[0][col] * int_det(&minor);
    }
    acc
}

fn int_inverse(m: &[Vec<i64>]) -> Option<Vec<Vec<i64>>> {
    let n = m.len();
    let d = int_det(m);
    if d.abs() != 1 {
        return None;
    }
    // adjugate / det
    let mut inv = vec![vec![0; n]; n];
    for (i, row) in inv.iter_mut().enumerate() {
        for (j, x) in row.iter_mut().enumerate() {
            let minor: Vec<Vec<i64>> = m
                .iter()
                .enumerate()
                .filter(|(r, _)| *r != j)
                .map(|(_, row)| row.iter().enumerate().filter(|(c, _)| *c != i).map(|(_, v)| *v).collect())
                .collect();
            let s = if (i + j) % 2 == 0 { 1 } else { -1 };
            *x = s * int_det(&minor) * d;
        }
    }
    Some(inv)
}

fn mat_mul(a: &[Vec<i64>], b: &[Vec<i64>]) -> Vec<Vec<i64>> {
    a.iter().map(|row| (0..b[0].len()).map(|c| row.iter().zip(b).map(|(x, br)| x * br[c]).sum()).collect()).collect()
}

fn vec_mat(v: &[i64], m: &[Vec<i64>]) -> Vec<i64> {
    (0..m.first().map(Vec::len).unwrap_or(0)).map(|c| v.iter().zip(m).map(|(x, r)| x * r[c]).sum()).collect()
}

/// Exponent matrix of a monomial map, rows indexed by target variable.
fn exponent_matrix(comps: &[LPoly], n: usize) -> Option<Vec<Vec<i64>>> {
    comps
        .iter()
        .map(|c| {
            let (m, _) = c.as_unit()?;
            (m.exps().len() <= n).then(|| m.padded(n).into_iter().map(i64::from).collect())
        })
        .collect()
}

/// `-e_b` lies in the semigroup spanned by the unit vectors and `gens`.
fn is_inverted(b: usize, gens: &[Vec<i64>], n: usize) -> bool {
    const BOUND: i64 = 4;
    let mut coeffs = vec![0i64; gens.len()];
    loop {
        let mut v = vec![0i64; n];
        for (c, g) in coeffs.iter().zip(gens) {
            for (x, y) in v.iter_mut().zip(g) {
                *x += c * y;
            }
        }
        if v[b] <= -1 && v.iter().enumerate().all(|(i, x)| i == b || *x <= 0) {
            return true;
        }
        let mut i = 0;
        loop {
            if i == coeffs.len() {
                return false;
            }
            coeffs[i] += 1;
            if coeffs[i] <= BOUND {
                break;
            }
            coeffs[i] = 0;
            i += 1;
        }
    }
}

/// The total complex of a monomial Poisson atlas with a homogeneous base
/// structure `Lambda0`.
pub struct CechComplex {
    atlas: Atlas<LPoly>,
    lambda0: Vec<Multivector>,
    n: usize,
    weights: Vec<Vec<Vec<i64>>>,
    weights_inv: Vec<Vec<Vec<i64>>>,
    e: Vec<i64>,
    /// Cells by Čech degree, with the inverted directions of each.
    tuples: Vec<Vec<(Vec<ChartId>, Vec<bool>)>>,
    bases: Mutex<HashMap<(usize, Slice), Arc<SliceBasis>>>,
    cohomology: Mutex<HashMap<(usize, Slice), Arc<SliceCohomology>>>,
}

impl std::fmt::Debug for CechComplex {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("CechComplex").field("charts", &self.atlas.len()).field("n", &self.n).field("e", &self.e).finish()
    }
}

impl CechComplex {
    /// `lambda0` holds one bivector per chart.
    pub fn new(atlas: &Atlas<LPoly>, lambda0: &[Multivector]) -> Result<Self> {
        let n = atlas.dim();
        let nc = atlas.len();
        if lambda0.len() != nc {
            return Err(Error::InvalidParams(format!("need one base bivector per chart, got {}", lambda0.len())));
        }
        for (j, l) in lambda0.iter().enumerate() {
            if l.chart() != j || l.degree() != 2 {
                return Err(Error::InvalidParams(format!("base bivector {j} is not a bivector on chart {j}")));
            }
        }
        let unsupported = |msg: String| Error::UnsupportedAtlas(msg);

        let mut mats: BTreeMap<(ChartId, ChartId), Vec<Vec<i64>>> = BTreeMap::new();
        for (j, k) in atlas.pairs() {
            for (a, b) in [(j, k), (k, j)] {
                let f = atlas.require_transition(a, b)?;
                let m = exponent_matrix(f.components(), n)
                    .ok_or_else(|| unsupported(format!("transition {b}->{a} is not monomial")))?;
                mats.insert((a, b), m);
            }
        }
        let mut weights: Vec<Option<Vec<Vec<i64>>>> = vec![None; nc];
        if nc > 0 {
            weights[0] = Some((0..n).map(|i| (0..n).map(|j| i64::from(i == j)).collect()).collect());
        }
        let mut queue = vec![0usize];
        #[allow(clippy::needless_range_loop)]
        while let Some(j) = queue.pop() {
            let wj = weights[j].clone().expect("visited");
            for k in 0..nc {
                if let Some(m) = mats.get(&(k, j)) {
                    let wk = mat_mul(m, &wj);
                    match &weights[k] {
                        None => {
                            weights[k] = Some(wk);
                            queue.push(k);
                        }
                        Some(old) if *old != wk => {
                            return Err(unsupported(format!("torus weights on chart {k} are inconsistent")));
                        }
                        _ => {}
                    }
                }
            }
        }
        let weights: Vec<Vec<Vec<i64>>> = weights
            .into_iter()
            .enumerate()
            .map(|(j, w)| w.ok_or_else(|| unsupported(format!("chart {j} is not connected to chart 0"))))
            .collect::<Result<_>>()?;
        for (&(a, b), m) in &mats {
            if mat_mul(m, &weights[b]) != weights[a] {
                return Err(unsupported(format!("torus weights disagree across {b}->{a}")));
            }
        }
        let weights_inv = weights
            .iter()
            .enumerate()
            .map(|(j, w)| int_inverse(w).ok_or_else(|| unsupported(format!("chart {j} weights are not unimodular"))))
            .collect::<Result<Vec<_>>>()?;

        // cells and their inverted directions
        let mut tuples: Vec<Vec<(Vec<ChartId>, Vec<bool>)>> = Vec::new();
        for len in 1..=nc {
            let mut level = Vec::new();
            for t in subsets(nc, len) {
                let connected = t.iter().enumerate().all(|(x, &a)| t[x + 1..].iter().all(|&b| mats.contains_key(&(a, b))));
                if !connected {
                    continue;
                }
                let gens: Vec<Vec<i64>> = t[1..].iter().flat_map(|&r| mats[&(r, t[0])].clone()).collect();
                let inv: Vec<bool> = (0..n).map(|b| is_inverted(b, &gens, n)).collect();
                for g in &gens {
                    if g.iter().zip(&inv).any(|(x, i)| *x < 0 && !i) {
                        return Err(unsupported(format!("intersection {t:?} is not a monomial localization")));
                    }
                }
                level.push((t, inv));
            }
            if level.is_empty() {
                break;
            }
            tuples.push(level);
        }

        let mut e: Option<Vec<i64>> = None;
        for (j, l) in lambda0.iter().enumerate() {
            for (dirs, c) in l.components() {
                for (m, _) in c.terms() {
                    let chi = Self::chi_raw(&weights[j], m, dirs, n);
                    match &e {
                        None => e = Some(chi),
                        Some(old) if *old != chi => return Err(Error::InhomogeneousBase),
                        _ => {}
                    }
                }
            }
        }
        let e = e.unwrap_or_else(|| vec![0; n]);
        Ok(CechComplex {
            atlas: atlas.clone(),
            lambda0: lambda0.to_vec(),
            n,
            weights,
            weights_inv,
            e,
            tuples,
            bases: Mutex::new(HashMap::new()),
            cohomology: Mutex::new(HashMap::new()),
        })
    }

    /// Builds the complex from a bivector on one chart, moved to the others.
    pub fn from_chart_bivector(atlas: &Atlas<LPoly>, lambda0: &Multivector) -> Result<Self> {
        let all = (0..atlas.len()).map(|j| atlas.move_to(lambda0, j)).collect::<Result<Vec<_>>>()?;
        Self::new(atlas, &all)
    }

    fn chi_raw(w: &[Vec<i64>], m: &Monomial, dirs: &[usize], n: usize) -> Vec<i64> {
        let mut a: Vec<i64> = m.padded(n).into_iter().map(i64::from).collect();
        for &d in dirs {
            a[d] -= 1;
        }
        vec_mat(&a, w)
    }

    pub fn atlas(&self) -> &Atlas<LPoly> {
        &self.atlas
    }

    pub fn lambda0(&self) -> &[Multivector] {
        &self.lambda0
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn lambda0_weight(&self) -> &[i64] {
        &self.e
    }

    pub fn chart_weights(&self, j: ChartId) -> &[Vec<i64>] {
        &self.weights[j]
    }

    /// Increasing chart tuples with nonempty intersection, of length `p + 1`.
    pub fn cells(&self, p: usize) -> impl Iterator<Item = &Vec<ChartId>> {
        self.tuples.get(p).into_iter().flatten().map(|(t, _)| t)
    }

    fn is_cell(&self, t: &[ChartId]) -> bool {
        self.inverted(t).is_some()
    }

    fn inverted(&self, t: &[ChartId]) -> Option<&[bool]> {
        let level = self.tuples.get(t.len().checked_sub(1)?)?;
        level.binary_search_by(|(x, _)| x.as_slice().cmp(t)).ok().map(|i| level[i].1.as_slice())
    }

    /// Slice label of the monomial term `z^m d_dirs` on chart `chart`.
    pub fn slice_of(&self, chart: ChartId, m: &Monomial, dirs: &[usize]) -> Slice {
        let chi = Self::chi_raw(&self.weights[chart], m, dirs, self.n);
        let q = dirs.len() as i64;
        chi.iter().zip(&self.e).map(|(c, e)| c - q * e).collect()
    }

    /// Basis cells of Čech degree `p` and multivector degree `q` in slice `g`.
    fn cells_in_slice(&self, p: usize, q: usize, g: &[i64]) -> Vec<SliceCell> {
        let mut out = Vec::new();
        if q == 0 || q > self.n {
            return out;
        }
        let Some(level) = self.tuples.get(p) else { return out };
        let chi: Vec<i64> = g.iter().zip(&self.e).map(|(x, e)| x + q as i64 * e).collect();
        for (t, inv) in level {
            let base = vec_mat(&chi, &self.weights_inv[t[0]]);
            for dirs in subsets(self.n, q) {
                let mut a = base.clone();
                for &d in &dirs {
                    a[d] += 1;
                }
                if a.iter().zip(inv).all(|(x, i)| *i || *x >= 0) {
                    out.push(SliceCell { charts: t.clone(), dirs, exps: a });
                }
            }
        }
        out
    }

    /// All basis cells of bidegree `(p, q)` with scalar weight `w` and every
    /// slice coordinate bounded by `box_size` in absolute value.
    pub fn enumerate_slice(&self, p: usize, q: usize, w: i64, box_size: i64) -> Vec<SliceCell> {
        let mut out = Vec::new();
        for g in box_slices(self.n, box_size) {
            if g.iter().sum::<i64>() == w {
                out.extend(self.cells_in_slice(p, q, &g));
            }
        }
        out
    }

    fn basis(&self, k: usize, g: &[i64]) -> Arc<SliceBasis> {
        let key = (k, g.to_vec());
        if let Some(b) = self.bases.lock().expect("cache lock").get(&key) {
            return b.clone();
        }
        let mut cells = Vec::new();
        for p in 0..=k {
            cells.extend(self.cells_in_slice(p, k + 1 - p, g));
        }
        let index = cells.iter().enumerate().map(|(i, c)| ((c.charts.clone(), c.dirs.clone()), i)).collect();
        let b = Arc::new(SliceBasis { cells, index });
        self.bases.lock().expect("cache lock").insert(key, b.clone());
        b
    }

    pub fn slice_basis(&self, k: usize, g: &[i64]) -> Vec<SliceCell> {
        self.basis(k, g).cells.clone()
    }

    fn cell_cochain(&self, k: usize, c: &SliceCell) -> TotalCochain {
        let exps: Vec<i32> = c.exps.iter().map(|&x| x as i32).collect();
        let m = Multivector::term(c.charts[0], self.n, &c.dirs, LPoly::monomial(Monomial::new(exps)));
        let mut out = TotalCochain::zero(k, self.n);
        out.insert_raw(c.charts.clone(), m);
        out
    }

    /// Cochain with the given coordinates in the basis of slice `(k, g)`.
    pub fn from_vector(&self, k: usize, g: &[i64], v: &SparseVec) -> TotalCochain {
        let basis = self.basis(k, g);
        let mut out = TotalCochain::zero(k, self.n);
        for (&i, x) in v {
            let c = self.cell_cochain(k, &basis.cells[i]).scale(x);
            out = out.add(&c).expect("same degree");
        }
        out
    }

    /// Splits a cochain into slice coordinate vectors.
    pub fn to_vectors(&self, c: &TotalCochain) -> Result<BTreeMap<Slice, SparseVec>> {
        let k = c.degree();
        let mut out: BTreeMap<Slice, SparseVec> = BTreeMap::new();
        for (t, m) in c.cells() {
            for (dirs, coeff) in m.components() {
                for (mono, x) in coeff.terms() {
                    let g = self.slice_of(t[0], mono, dirs);
                    let basis = self.basis(k, &g);
                    let idx = basis.index.get(&(t.clone(), dirs.clone())).copied().filter(|&i| {
                        let exps: Vec<i64> = mono.padded(self.n).into_iter().map(i64::from).collect();
                        basis.cells[i].exps == exps
                    });
                    let Some(i) = idx else {
                        return Err(Error::PrerequisiteViolated(format!(
                            "term {mono:?} d{dirs:?} is not a section over charts {t:?}"
                        )));
                    };
                    let e = out.entry(g).or_default();
                    let s = e.entry(i).or_insert_with(|| Rat::from_integer(0.into()));
                    *s += x;
                    if num_traits::Zero::is_zero(s) {
                        e.remove(&i);
                    }
                }
            }
        }
        out.retain(|_, v| !v.is_empty());
        Ok(out)
    }

    fn restrict_to(&self, m: &Multivector, target: ChartId) -> Result<Multivector> {
        if m.chart() == target {
            return Ok(m.clone());
        }
        pushforward(m, self.atlas.require_transition(target, m.chart())?)
    }

    /// `D = (-1)^(p+q) delta + [Lambda0, -]`.
    pub fn total_differential(&self, c: &TotalCochain) -> Result<TotalCochain> {
        let k = c.degree();
        let nc = self.atlas.len();
        let sign = if (k + 1).is_multiple_of(2) { Rat::from_integer(1.into()) } else { Rat::from_integer((-1).into()) };
        let mut out = TotalCochain::zero(k + 1, self.n);
        for (t, m) in c.cells() {
            for j in (0..nc).filter(|j| !t.contains(j)) {
                let r = t.iter().position(|&x| x > j).unwrap_or(t.len());
                let mut nt = t.clone();
                nt.insert(r, j);
                if !self.is_cell(&nt) {
                    continue;
                }
                let v = if r == 0 { self.restrict_to(m, j)? } else { m.clone() };
                let s = if r % 2 == 0 { sign.clone() } else { -sign.clone() };
                out.add_cell(nt, v.scale(&s))?;
            }
            if m.degree() < self.n {
                out.add_cell(t.clone(), self.lambda0[t[0]].schouten(m)?)?;
            }
        }
        Ok(out)
    }

    /// Cup bracket of total cochains.
    pub fn bracket(&self, a: &TotalCochain, b: &TotalCochain) -> Result<TotalCochain> {
        let mut out = TotalCochain::zero(a.degree() + b.degree(), self.n);
        for (ta, ma) in a.cells() {
            let last = *ta.last().expect("nonempty");
            for (tb, mb) in b.cells() {
                if tb[0] != last {
                    continue;
                }
                let q = ma.degree() + mb.degree() - 1;
                if q > self.n {
                    continue;
                }
                let mut t = ta.clone();
                t.extend_from_slice(&tb[1..]);
                if !self.is_cell(&t) {
                    continue;
                }
                let (p, p2) = (ta.len() - 1, tb.len() - 1);
                let s = bracket_sign(p, ma.degree(), p2, mb.degree());
                let v = ma.schouten(&self.restrict_to(mb, ta[0])?)?;
                out.add_cell(t, v.scale(&Rat::from_integer(s.into())))?;
            }
        }
        Ok(out)
    }

    fn column(&self, k: usize, g: &[i64], cell: &SliceCell) -> Result<SparseVec> {
        let image = self.total_differential(&self.cell_cochain(k, cell))?;
        let mut vecs = self.to_vectors(&image)?;
        let v = vecs.remove(g).unwrap_or_default();
        if !vecs.is_empty() {
            return Err(Error::InhomogeneousBase);
        }
        Ok(v)
    }

    /// Columns of `D` restricted to slice `g` in total degree `k`.
    pub fn differential_columns(&self, k: usize, g: &[i64]) -> Result<Vec<SparseVec>> {
        self.basis(k, g).cells.iter().map(|c| self.column(k, g, c)).collect()
    }

    fn slice_cohomology(&self, k: usize, g: &[i64]) -> Result<Arc<SliceCohomology>> {
        let key = (k, g.to_vec());
        if let Some(h) = self.cohomology.lock().expect("cache lock").get(&key) {
            return Ok(h.clone());
        }
        let red = reduce_columns(&self.differential_columns(k, g)?);
        let mut image = Echelon::new();
        if k > 0 {
            for col in self.differential_columns(k - 1, g)? {
                image.insert(&col);
            }
        }
        let mut reps = Vec::new();
        let mut probe = image.clone();
        for v in red.kernel {
            if probe.insert(&v).1.is_none() {
                reps.push(v);
            }
        }
        let mut projector = Echelon::new();
        for r in &reps {
            projector.insert(r);
        }
        if k > 0 {
            for col in self.differential_columns(k - 1, g)? {
                projector.insert(&col);
            }
        }
        let h = Arc::new(SliceCohomology { reps, projector, image });
        self.cohomology.lock().expect("cache lock").insert(key, h.clone());
        Ok(h)
    }

    /// Dimension of the degree `k` cohomology in slice `g`.
    pub fn slice_dimension(&self, k: usize, g: &[i64]) -> Result<usize> {
        Ok(self.slice_cohomology(k, g)?.reps.len())
    }

    /// Class representatives in slice `g`.
    pub fn slice_representatives(&self, k: usize, g: &[i64]) -> Result<Vec<TotalCochain>> {
        let h = self.slice_cohomology(k, g)?;
        Ok(h.reps.iter().map(|r| self.from_vector(k, g, r)).collect())
    }

    fn chart_vars(&self) -> Vec<Vec<String>> {
        self.atlas.charts.iter().map(|c| c.vars.clone()).collect()
    }

    pub fn hypercohomology(&self, k: usize, settings: &Settings) -> Result<CohomologyReport> {
        let [lo, hi] = settings.window;
        let e = settings.box_size;
        let in_window = |g: &Slice| {
            let w: i64 = g.iter().sum();
            w >= lo && w <= hi
        };
        let inner: Vec<Slice> = box_slices(self.n, e).into_iter().filter(in_window).collect();
        let outer: Vec<Slice> = box_slices(self.n, e + 1)
            .into_iter()
            .filter(|g| g.iter().any(|x| x.abs() == e + 1))
            .filter(in_window)
            .collect();
        let dims = |gs: &[Slice]| -> Result<Vec<(Slice, usize)>> {
            gs.par_iter().map(|g| Ok((g.clone(), self.slice_dimension(k, g)?))).collect()
        };
        let inner_dims = dims(&inner)?;
        let outer_dims = dims(&outer)?;
        let vars = self.chart_vars();
        let mut by_weight = BTreeMap::new();
        let mut slices = Vec::new();
        let mut basis = Vec::new();
        for (g, d) in inner_dims {
            if d == 0 {
                continue;
            }
            let w: i64 = g.iter().sum();
            *by_weight.entry(w).or_insert(0) += d;
            for c in self.slice_representatives(k, &g)? {
                basis.push(BasisClass { slice: g.clone(), weight: w, terms: c.to_terms(&vars), cochain: c });
            }
            slices.push(SliceDim { slice: g, weight: w, dim: d });
        }
        let unstable_slices: Vec<SliceDim> = outer_dims
            .into_iter()
            .filter(|(_, d)| *d > 0)
            .map(|(g, d)| SliceDim { weight: g.iter().sum(), slice: g, dim: d })
            .collect();
        Ok(CohomologyReport {
            degree: k,
            settings: settings.clone(),
            lambda0_weight: self.e.clone(),
            dimension: basis.len(),
            by_weight,
            slices,
            stable: unstable_slices.is_empty(),
            unstable_slices,
            basis,
        })
    }

    /// Coordinates of the class of `c` in the report's basis.
    pub fn project_to_basis(&self, c: &TotalCochain, report: &CohomologyReport) -> Result<Vec<Rat>> {
        let k = report.degree;
        if c.degree() != k {
            return Err(Error::DegreeMismatch { expected: k, found: c.degree() });
        }
        if !self.total_differential(c)?.is_zero() {
            return Err(Error::NotACocycle);
        }
        let mut offsets: BTreeMap<&Slice, usize> = BTreeMap::new();
        let mut acc = 0;
        for s in &report.slices {
            offsets.insert(&s.slice, acc);
            acc += s.dim;
        }
        let mut coords = vec![Rat::from_integer(0.into()); report.basis.len()];
        for (g, v) in self.to_vectors(c)? {
            let h = self.slice_cohomology(k, &g)?;
            if !report.covers(&g) {
                if h.reps.is_empty() || h.image.contains(&v) {
                    continue;
                }
                return Err(Error::OutOfTruncation(g));
            }
            let comb = h.projector.solve(&v).ok_or(Error::NotACocycle)?;
            let off = offsets.get(&g).copied().unwrap_or(0);
            for (l, x) in comb {
                if l < h.reps.len() {
                    coords[off + l] = x;
                }
            }
        }
        Ok(coords)
    }

    /// Obstruction coordinates of a cocycle: the slices (sorted) where its
    /// class is nonzero, with the class coordinates in that slice.
    pub fn classes(&self, c: &TotalCochain) -> Result<Vec<(Slice, Vec<Rat>)>> {
        let k = c.degree();
        let mut out = Vec::new();
        for (g, v) in self.to_vectors(c)? {
            let h = self.slice_cohomology(k, &g)?;
            if h.reps.is_empty() {
                continue;
            }
            let comb = h.projector.solve(&v).ok_or(Error::NotACocycle)?;
            let mut coords = vec![Rat::from_integer(0.into()); h.reps.len()];
            let mut nonzero = false;
            for (l, x) in comb {
                if l < h.reps.len() {
                    coords[l] = x;
                    nonzero = true;
                }
            }
            if nonzero {
                out.push((g, coords));
            }
        }
        Ok(out)
    }

    /// A preimage `x` with `D x = c`, slice by slice, using the earliest
    /// basis columns and zero free variables. `None` if `c` is not exact.
    pub fn solve_exact(&self, c: &TotalCochain) -> Result<Option<TotalCochain>> {
        let k = c.degree();
        if k == 0 {
            return Ok(c.is_zero().then(|| TotalCochain::zero(0, self.n)));
        }
        let vecs: Vec<(Slice, SparseVec)> = self.to_vectors(c)?.into_iter().collect();
        let parts: Vec<Option<TotalCochain>> = vecs
            .par_iter()
            .map(|(g, v)| -> Result<Option<TotalCochain>> {
                let h = self.slice_cohomology(k, g)?;
                Ok(h.image.solve(v).map(|comb| self.from_vector(k - 1, g, &comb)))
            })
            .collect::<Result<_>>()?;
        let mut out = TotalCochain::zero(k - 1, self.n);
        for p in parts {
            match p {
                Some(x) => out = out.add(&x)?,
                None => return Ok(None),
            }
        }
        Ok(Some(out))
    }

    /// Moves a bivector given on one chart to every chart, as a degree-1
    /// cochain of Čech degree 0.
    pub fn extend_global(&self, m: &Multivector) -> Result<TotalCochain> {
        let k = m.degree().checked_sub(1).ok_or(Error::DegreeZero)?;
        let mut out = TotalCochain::zero(k, self.n);
        for j in 0..self.atlas.len() {
            out.add_cell(vec![j], self.atlas.move_to(m, j)?)?;
        }
        Ok(out)
    }
}

/// All integer vectors in `[-b, b]^n`, in lexicographic order.
pub fn box_slices(n: usize, b: i64) -> Vec<Slice> {
    let mut out = vec![Vec::new()];
    for _ in 0..n {
        out = out.into_iter().flat_map(|v| (-b..=b).map(move |x| [v.clone(), vec![x]].concat())).collect();
    }
    out
}
