//! Exact sparse linear algebra over the rationals.
//!
//! Vectors are sparse maps from coordinate index to nonzero rational. The
//! central object is [`Echelon`], an incrementally built row-echelon basis of
//! a span that remembers how each stored row was formed from the labelled
//! input vectors. Inserting columns in a fixed order and never using the
//! dependent ones gives the deterministic "free variables are zero" rule.

use std::collections::BTreeMap;

use num_traits::{One, Zero};

use super::Rat;

pub type SparseVec = BTreeMap<usize, Rat>;

/// `acc += c * v`, dropping cancelled entries.
pub fn axpy(acc: &mut SparseVec, c: &Rat, v: &SparseVec) {
    if c.is_zero() {
        return;
    }
    for (&i, x) in v {
        let e = acc.entry(i).or_insert_with(Rat::zero);
        *e += c * x;
        if e.is_zero() {
            acc.remove(&i);
        }
    }
}

pub fn scale(v: &SparseVec, c: &Rat) -> SparseVec {
    if c.is_zero() {
        return SparseVec::new();
    }
    v.iter().map(|(&i, x)| (i, x * c)).collect()
}

#[derive(Clone, Debug)]
struct Row {
    vec: SparseVec,
    // combination of input labels producing `vec`
    comb: SparseVec,
}

/// Row-echelon basis of the span of labelled vectors.
#[derive(Clone, Debug, Default)]
pub struct Echelon {
    rows: BTreeMap<usize, Row>,
    labels: usize,
}

impl Echelon {
    pub fn new() -> Self {
        Echelon::default()
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Reduces `v` against the stored rows. Returns the residual and the
    /// label combination that was subtracted (`v = residual + sum comb_l * input_l`).
    pub fn reduce(&self, v: &SparseVec) -> (SparseVec, SparseVec) {
        let mut v = v.clone();
        let mut comb = SparseVec::new();
        let mut cursor = 0usize;
        loop {
            let next = v.range(cursor..).find(|(i, _)| self.rows.contains_key(i)).map(|(&i, c)| (i, c.clone()));
            let Some((i, c)) = next else { break };
            let row = &self.rows[&i];
            axpy(&mut v, &-c.clone(), &row.vec);
            axpy(&mut comb, &c, &row.comb);
            cursor = i + 1;
        }
        (v, comb)
    }

    /// Adds a vector under the next label; returns the label and whether it
    /// enlarged the span. When it did not, the returned kernel relation
    /// `e_label - comb` is provided.
    pub fn insert(&mut self, v: &SparseVec) -> (usize, Option<SparseVec>) {
        let label = self.labels;
        self.labels += 1;
        let (res, comb) = self.reduce(v);
        if res.is_empty() {
            let mut rel = scale(&comb, &-Rat::one());
            rel.insert(label, Rat::one());
            return (label, Some(rel));
        }
        let (&p, pc) = res.iter().next().expect("nonempty");
        let inv = pc.recip();
        let mut c = scale(&comb, &-Rat::one());
        c.insert(label, Rat::one());
        self.rows.insert(p, Row { vec: scale(&res, &inv), comb: scale(&c, &inv) });
        (label, None)
    }

    /// Skips a label without inserting anything (keeps label numbering
    /// aligned with an external column list).
    pub fn skip(&mut self) -> usize {
        let l = self.labels;
        self.labels += 1;
        l
    }

    pub fn contains(&self, v: &SparseVec) -> bool {
        self.reduce(v).0.is_empty()
    }

    /// Expresses `b` as a combination of the inserted labels, if possible.
    pub fn solve(&self, b: &SparseVec) -> Option<SparseVec> {
        let (res, comb) = self.reduce(b);
        res.is_empty().then_some(comb)
    }
}

/// Column-oriented view of a linear map: kernel basis and rank.
pub struct ColumnReduction {
    pub rank: usize,
    /// One kernel vector per dependent column, in column order.
    pub kernel: Vec<SparseVec>,
    pub echelon: Echelon,
}

pub fn reduce_columns(cols: &[SparseVec]) -> ColumnReduction {
    let mut ech = Echelon::new();
    let mut kernel = Vec::new();
    for c in cols {
        if let (_, Some(rel)) = ech.insert(c) {
            kernel.push(rel);
        }
    }
    ColumnReduction { rank: ech.rank(), kernel, echelon: ech }
}

/// Rank of a dense matrix given by rows.
pub fn rank(rows: &[Vec<Rat>]) -> usize {
    let mut ech = Echelon::new();
    for r in rows {
        ech.insert(&dense_to_sparse(r));
    }
    ech.rank()
}

pub fn dense_to_sparse(v: &[Rat]) -> SparseVec {
    v.iter().enumerate().filter(|(_, x)| !x.is_zero()).map(|(i, x)| (i, x.clone())).collect()
}

pub fn sparse_to_dense(v: &SparseVec, len: usize) -> Vec<Rat> {
    let mut out = vec![Rat::zero(); len];
    for (&i, x) in v {
        if i < len {
            out[i] = x.clone();
        }
    }
    out
}
