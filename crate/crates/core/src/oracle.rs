//! Truncated path-space representation: an independent numerical check.
//!
//! The basis consists of all admissible words of length at most the depth.
//! A generator `s_i` sends a basis word `x` to `ix` when the junction is
//! admissible and the result still fits, and to zero otherwise, which is the
//! natural compression of the representation on infinite admissible paths.
//! Products of few generators therefore act exactly on words that are long
//! enough to avoid the range deficiency at short words and short enough to
//! avoid truncation at the depth; comparisons and norm estimates restrict to
//! that interior band.

use alloc::collections::BTreeMap;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::element::CKElement;
use crate::linalg::{C64, ZERO};
use crate::matrix::{Word, ZeroOneMatrix};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OracleError {
    DepthTooSmall { required: usize, given: usize },
}

impl fmt::Display for OracleError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OracleError::DepthTooSmall { required, given } => {
                write!(f, "depth {given} too small, need at least {required}")
            }
        }
    }
}

/// Sparse operator on the truncated basis; entries are (row, column).
#[derive(Debug, Clone)]
pub struct SparseOp {
    entries: BTreeMap<(usize, usize), C64>,
}

impl SparseOp {
    pub fn entries(&self) -> &BTreeMap<(usize, usize), C64> {
        &self.entries
    }
}

pub struct TruncatedRep {
    matrix: Arc<ZeroOneMatrix>,
    depth: usize,
    words: Vec<Word>,
    index: BTreeMap<Word, usize>,
}

fn max_side(x: &CKElement) -> usize {
    x.terms()
        .keys()
        .map(|(mu, nu)| mu.len().max(nu.len()))
        .max()
        .unwrap_or(0)
}

impl TruncatedRep {
    pub fn new(matrix: &Arc<ZeroOneMatrix>, depth: usize) -> Self {
        let mut words = Vec::new();
        for k in 0..=depth {
            words.extend(matrix.admissible_words(k, None, None));
        }
        let index = words
            .iter()
            .enumerate()
            .map(|(i, w)| (w.clone(), i))
            .collect();
        TruncatedRep { matrix: matrix.clone(), depth, words, index }
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn basis_len(&self) -> usize {
        self.words.len()
    }

    pub fn words(&self) -> &[Word] {
        &self.words
    }

    /// Image of basis word `w` under `s_mu s_nu*`, if nonzero.
    fn apply_pair(&self, mu: &[u8], nu: &[u8], w: &[u8]) -> Option<Word> {
        if !w.starts_with(nu) {
            return None;
        }
        let rest = &w[nu.len()..];
        if let (Some(&last), Some(&first)) = (mu.last(), rest.first()) {
            if !self.matrix.entry(last, first) {
                return None;
            }
        }
        if mu.len() + rest.len() > self.depth {
            return None;
        }
        let mut out = mu.to_vec();
        out.extend_from_slice(rest);
        Some(out)
    }

    fn represent_raw(&self, x: &CKElement) -> SparseOp {
        let mut entries: BTreeMap<(usize, usize), C64> = BTreeMap::new();
        for ((mu, nu), coeff) in x.terms() {
            let c = coeff.to_complex();
            for (col, w) in self.words.iter().enumerate() {
                if let Some(out) = self.apply_pair(mu, nu, w) {
                    let row = self.index[&out];
                    let e = entries.entry((row, col)).or_insert(ZERO);
                    *e = *e + c;
                }
            }
        }
        entries.retain(|_, v| v.abs() > 0.0);
        SparseOp { entries }
    }

    /// Matrix of the element on the truncated basis; the depth must exceed
    /// the longest word in the element.
    pub fn represent(&self, x: &CKElement) -> Result<SparseOp, OracleError> {
        let required = max_side(x) + 1;
        if self.depth < required {
            return Err(OracleError::DepthTooSmall { required, given: self.depth });
        }
        Ok(self.represent_raw(x))
    }

    /// Compares two elements on the interior band: rows and columns of
    /// length at most `depth - d`, and at least one longer than any word in
    /// either element (shorter basis words are range-deficient and see
    /// different representatives of the same element differently).
    pub fn oracle_check(
        &self,
        x: &CKElement,
        y: &CKElement,
        d: usize,
        tol: f64,
    ) -> Result<bool, OracleError> {
        let lo = max_side(x).max(max_side(y)) + 1;
        let hi = self.depth.saturating_sub(d);
        if lo > hi {
            return Err(OracleError::DepthTooSmall { required: lo + d, given: self.depth });
        }
        let a = self.represent(x)?;
        let b = self.represent(y)?;
        let in_band = |i: usize| {
            let len = self.words[i].len();
            len >= lo && len <= hi
        };
        let mut keys: Vec<(usize, usize)> = a.entries.keys().copied().collect();
        keys.extend(b.entries.keys().copied());
        keys.sort_unstable();
        keys.dedup();
        for (row, col) in keys {
            if !in_band(row) || !in_band(col) {
                continue;
            }
            let va = a.entries.get(&(row, col)).copied().unwrap_or(ZERO);
            let vb = b.entries.get(&(row, col)).copied().unwrap_or(ZERO);
            if (va - vb).abs() > tol {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Largest singular value of the element compressed to interior
    /// columns; a lower bound on the operator norm that converges from
    /// below as the depth grows for degree-zero elements.
    pub fn norm_estimate(&self, x: &CKElement) -> f64 {
        let growth = x
            .terms()
            .keys()
            .map(|(mu, nu)| mu.len().saturating_sub(nu.len()))
            .max()
            .unwrap_or(0);
        let lo = max_side(x) + 1;
        let hi = self.depth.saturating_sub(growth);
        if lo > hi {
            return 0.0;
        }
        let op = self.represent_raw(x);
        let cols: Vec<usize> = (0..self.words.len())
            .filter(|&i| {
                let len = self.words[i].len();
                len >= lo && len <= hi
            })
            .collect();
        if cols.is_empty() {
            return 0.0;
        }
        let col_pos: BTreeMap<usize, usize> =
            cols.iter().enumerate().map(|(k, &c)| (c, k)).collect();
        let live: Vec<(usize, usize, C64)> = op
            .entries
            .iter()
            .filter_map(|(&(r, c), &v)| col_pos.get(&c).map(|&k| (r, k, v)))
            .collect();
        // Power iteration on the Gram operator of the compressed matrix.
        let n = cols.len();
        let rows = self.words.len();
        let mut v: Vec<C64> = (0..n)
            .map(|i| C64::new(1.0 + 0.1 * libm::sin(i as f64), 0.05 * libm::cos(i as f64)))
            .collect();
        let mut lam = 0.0_f64;
        for _ in 0..2000 {
            let mut av = vec![ZERO; rows];
            for &(r, k, val) in &live {
                av[r] = av[r] + val * v[k];
            }
            let mut w = vec![ZERO; n];
            for &(r, k, val) in &live {
                w[k] = w[k] + val.conj() * av[r];
            }
            let nrm = libm::sqrt(w.iter().map(|z| z.abs2()).sum());
            if nrm == 0.0 {
                return 0.0;
            }
            for z in w.iter_mut() {
                *z = z.scale(1.0 / nrm);
            }
            let prev = lam;
            lam = nrm;
            v = w;
            if (lam - prev).abs() <= 1e-14 * lam.max(1.0) {
                break;
            }
        }
        libm::sqrt(lam)
    }
}
