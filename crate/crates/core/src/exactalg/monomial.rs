use std::cmp::Ordering;
use std::fmt;

/// Exponent vector of a Laurent monomial.
///
/// Trailing zero exponents are trimmed, so the same monomial has a single
/// representation regardless of how many variables the surrounding ring has.
/// Variable `i` is the `i`-th coordinate of the chart (followed by any
/// symbolic constants the caller appends).
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Monomial(Vec<i32>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(Vec::new())
    }

    pub fn new(mut exps: Vec<i32>) -> Self {
        while exps.last() == Some(&0) {
            exps.pop();
        }
        Monomial(exps)
    }

    /// The monomial `z_var^power`.
    pub fn var(var: usize, power: i32) -> Self {
        let mut exps = vec![0; var + 1];
        exps[var] = power;
        Monomial::new(exps)
    }

    pub fn exp(&self, var: usize) -> i32 {
        self.0.get(var).copied().unwrap_or(0)
    }

    /// Exponents padded (or truncated) to `len` entries.
    pub fn padded(&self, len: usize) -> Vec<i32> {
        (0..len).map(|i| self.exp(i)).collect()
    }

    pub fn exps(&self) -> &[i32] {
        &self.0
    }

    /// Number of stored (non-trimmed) entries; every variable index at or
    /// beyond this has exponent zero.
    pub fn support_len(&self) -> usize {
        self.0.len()
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self) -> i64 {
        self.0.iter().map(|&e| e as i64).sum()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let len = self.0.len().max(other.0.len());
        Monomial::new((0..len).map(|i| self.exp(i) + other.exp(i)).collect())
    }

    pub fn inv(&self) -> Monomial {
        Monomial(self.0.iter().map(|e| -e).collect())
    }

    pub fn pow(&self, k: i32) -> Monomial {
        Monomial::new(self.0.iter().map(|e| e * k).collect())
    }

    pub fn with_exp(&self, var: usize, e: i32) -> Monomial {
        let len = self.0.len().max(var + 1);
        let mut v = self.padded(len);
        v[var] = e;
        Monomial::new(v)
    }

    /// True when no variable has a negative exponent.
    pub fn is_polynomial(&self) -> bool {
        self.0.iter().all(|&e| e >= 0)
    }

    /// Exponents restricted to variables `>= from`, shifted down to start at 0.
    pub fn tail(&self, from: usize) -> Monomial {
        Monomial::new(self.0.iter().skip(from).copied().collect())
    }

    /// Exponents of variables `< upto`.
    pub fn head(&self, upto: usize) -> Monomial {
        Monomial::new(self.0.iter().take(upto).copied().collect())
    }
}

impl Ord for Monomial {
    /// Graded lexicographic: total degree first, then exponents from the
    /// first variable on.
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree().cmp(&other.degree()).then_with(|| {
            let len = self.0.len().max(other.0.len());
            for i in 0..len {
                match self.exp(i).cmp(&other.exp(i)) {
                    Ordering::Equal => continue,
                    ord => return ord,
                }
            }
            Ordering::Equal
        })
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "z{:?}", self.0)
    }
}
