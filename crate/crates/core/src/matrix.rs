//! 0-1 matrices, finite graphs, and admissible-word combinatorics.
//!
//! Letters are 1-based throughout (`1..=n`), matching the usual indexing of
//! the generating partial isometries. Matrix powers for the aperiodicity
//! test are computed with arbitrary-precision integers so large exponents
//! cannot overflow.

use alloc::collections::BTreeSet;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_bigint::BigUint;
use num_traits::{One, Zero};

/// A word over the letters `1..=n`; the empty word is allowed.
pub type Word = Vec<u8>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MatrixError {
    /// Matrices must be at least 2x2.
    TooSmall { n: usize },
    NotSquare { row: usize, len: usize, n: usize },
    BadEntry { row: usize, col: usize },
    /// 1-based index of an all-zero row.
    ZeroRow { index: usize },
    /// 1-based index of an all-zero column.
    ZeroColumn { index: usize },
}

impl fmt::Display for MatrixError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MatrixError::TooSmall { n } => write!(f, "matrix size {n} is below the minimum 2"),
            MatrixError::NotSquare { row, len, n } => {
                write!(f, "row {row} has {len} entries, expected {n}")
            }
            MatrixError::BadEntry { row, col } => {
                write!(f, "entry at row {row}, column {col} is not 0 or 1")
            }
            MatrixError::ZeroRow { index } => write!(f, "row {index} is zero"),
            MatrixError::ZeroColumn { index } => write!(f, "column {index} is zero"),
        }
    }
}

/// A validated square 0-1 matrix with no zero rows or columns.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ZeroOneMatrix {
    n: usize,
    rows: Vec<Vec<u8>>,
}

impl ZeroOneMatrix {
    /// Validates a raw square array of integers.
    pub fn validate(raw: &[Vec<i64>]) -> Result<Self, MatrixError> {
        let n = raw.len();
        if n < 2 {
            return Err(MatrixError::TooSmall { n });
        }
        let mut rows = Vec::with_capacity(n);
        for (i, r) in raw.iter().enumerate() {
            if r.len() != n {
                return Err(MatrixError::NotSquare { row: i + 1, len: r.len(), n });
            }
            let mut row = Vec::with_capacity(n);
            for (j, &e) in r.iter().enumerate() {
                match e {
                    0 | 1 => row.push(e as u8),
                    _ => return Err(MatrixError::BadEntry { row: i + 1, col: j + 1 }),
                }
            }
            rows.push(row);
        }
        for (i, r) in rows.iter().enumerate() {
            if r.iter().all(|&e| e == 0) {
                return Err(MatrixError::ZeroRow { index: i + 1 });
            }
        }
        for j in 0..n {
            if rows.iter().all(|r| r[j] == 0) {
                return Err(MatrixError::ZeroColumn { index: j + 1 });
            }
        }
        Ok(ZeroOneMatrix { n, rows })
    }

    /// Convenience constructor from `0/1` literals.
    pub fn from_rows(raw: &[&[i64]]) -> Result<Self, MatrixError> {
        let v: Vec<Vec<i64>> = raw.iter().map(|r| r.to_vec()).collect();
        Self::validate(&v)
    }

    pub fn full(n: usize) -> Self {
        assert!(n >= 2);
        ZeroOneMatrix { n, rows: vec![vec![1; n]; n] }
    }

    pub fn shared(self) -> Arc<Self> {
        Arc::new(self)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Entry `A(i, j)` with 1-based letters.
    pub fn entry(&self, i: u8, j: u8) -> bool {
        self.rows[(i - 1) as usize][(j - 1) as usize] == 1
    }

    pub fn letters(&self) -> impl Iterator<Item = u8> + '_ {
        1..=self.n as u8
    }

    pub fn rows_raw(&self) -> &[Vec<u8>] {
        &self.rows
    }

    /// True when columns `i` and `j` coincide (1-based).
    pub fn columns_equal(&self, i: u8, j: u8) -> bool {
        (0..self.n).all(|r| self.rows[r][(i - 1) as usize] == self.rows[r][(j - 1) as usize])
    }

    /// Equivalence classes of `{1..n}` under column equality, each sorted,
    /// ordered by least member. These index the minimal projections of the
    /// diagonal subalgebra generated by the domain projections.
    pub fn column_classes(&self) -> Vec<Vec<u8>> {
        let mut classes: Vec<Vec<u8>> = Vec::new();
        for i in self.letters() {
            match classes.iter_mut().find(|c| self.columns_equal(c[0], i)) {
                Some(c) => c.push(i),
                None => classes.push(vec![i]),
            }
        }
        classes
    }

    /// Exactly one 1 per row and per column.
    pub fn is_permutation(&self) -> bool {
        let row_ok = self.rows.iter().all(|r| r.iter().map(|&e| e as usize).sum::<usize>() == 1);
        let col_ok = (0..self.n)
            .all(|j| self.rows.iter().map(|r| r[j] as usize).sum::<usize>() == 1);
        row_ok && col_ok
    }

    /// Smallest `m` with `A^m` entrywise positive, if one exists.
    ///
    /// The search is capped by the Wielandt bound `(n-1)^2 + 1`, which is
    /// sharp for primitive matrices; beyond it the matrix is not aperiodic.
    pub fn aperiodicity_exponent(&self) -> Option<usize> {
        let bound = (self.n - 1) * (self.n - 1) + 1;
        let a: Vec<Vec<BigUint>> = self
            .rows
            .iter()
            .map(|r| r.iter().map(|&e| BigUint::from(e)).collect())
            .collect();
        let mut power = a.clone();
        for m in 1..=bound {
            if power.iter().all(|r| r.iter().all(|e| !e.is_zero())) {
                return Some(m);
            }
            if m < bound {
                power = big_mat_mul(&power, &a);
            }
        }
        None
    }

    pub fn is_aperiodic(&self) -> bool {
        self.aperiodicity_exponent().is_some()
    }

    /// Is the word admissible, i.e. every junction entry of `A` is 1?
    pub fn admits(&self, word: &[u8]) -> bool {
        if word.iter().any(|&l| l == 0 || l as usize > self.n) {
            return false;
        }
        word.windows(2).all(|w| self.entry(w[0], w[1]))
    }

    /// All admissible words of length `k`, lexicographically sorted.
    ///
    /// `start` restricts the first letter to the given set. `end_cover`
    /// keeps only words whose last letter's row dominates the set, i.e.
    /// `A(last, l) = 1` for every `l` in `end_cover`; this is the constraint
    /// `r <= q_last` for the diagonal projection indexed by the set. Both
    /// filters are vacuous on the empty word (`k = 0`).
    pub fn admissible_words(
        &self,
        k: usize,
        start: Option<&BTreeSet<u8>>,
        end_cover: Option<&BTreeSet<u8>>,
    ) -> Vec<Word> {
        if k == 0 {
            return vec![Vec::new()];
        }
        let mut out = Vec::new();
        let mut word: Word = Vec::with_capacity(k);
        self.words_rec(k, start, end_cover, &mut word, &mut out);
        out
    }

    fn words_rec(
        &self,
        k: usize,
        start: Option<&BTreeSet<u8>>,
        end_cover: Option<&BTreeSet<u8>>,
        word: &mut Word,
        out: &mut Vec<Word>,
    ) {
        if word.len() == k {
            if let Some(cover) = end_cover {
                let last = *word.last().unwrap();
                if !cover.iter().all(|&l| self.entry(last, l)) {
                    return;
                }
            }
            out.push(word.clone());
            return;
        }
        for l in self.letters() {
            let ok = match word.last() {
                None => start.map_or(true, |s| s.contains(&l)),
                Some(&prev) => self.entry(prev, l),
            };
            if ok {
                word.push(l);
                self.words_rec(k, start, end_cover, word, out);
                word.pop();
            }
        }
    }

    /// Number of admissible words of length `k`.
    pub fn word_count(&self, k: usize) -> BigUint {
        if k == 0 {
            return BigUint::one();
        }
        // Sum of all entries of A^(k-1).
        let a: Vec<Vec<BigUint>> = self
            .rows
            .iter()
            .map(|r| r.iter().map(|&e| BigUint::from(e)).collect())
            .collect();
        let mut power: Vec<Vec<BigUint>> = (0..self.n)
            .map(|i| (0..self.n).map(|j| if i == j { BigUint::one() } else { BigUint::zero() }).collect())
            .collect();
        for _ in 0..(k - 1) {
            power = big_mat_mul(&power, &a);
        }
        power.iter().flat_map(|r| r.iter()).sum()
    }
}

impl fmt::Display for ZeroOneMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, r) in self.rows.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            for (j, e) in r.iter().enumerate() {
                if j > 0 {
                    write!(f, " ")?;
                }
                write!(f, "{e}")?;
            }
        }
        Ok(())
    }
}

fn big_mat_mul(a: &[Vec<BigUint>], b: &[Vec<BigUint>]) -> Vec<Vec<BigUint>> {
    let n = a.len();
    let mut out = vec![vec![BigUint::zero(); n]; n];
    for i in 0..n {
        for k in 0..n {
            if a[i][k].is_zero() {
                continue;
            }
            for j in 0..n {
                if !b[k][j].is_zero() {
                    out[i][j] += &a[i][k] * &b[k][j];
                }
            }
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GraphError {
    DuplicateVertex { id: String },
    DuplicateEdge { id: String },
    UnknownVertex { edge: String, vertex: String },
    /// Graphs must contain at least two edges.
    TooFewEdges { count: usize },
}

impl fmt::Display for GraphError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GraphError::DuplicateVertex { id } => write!(f, "duplicate vertex {id}"),
            GraphError::DuplicateEdge { id } => write!(f, "duplicate edge {id}"),
            GraphError::UnknownVertex { edge, vertex } => {
                write!(f, "edge {edge} refers to undeclared vertex {vertex}")
            }
            GraphError::TooFewEdges { count } => {
                write!(f, "graph has {count} edge(s), at least 2 required")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Edge {
    pub id: String,
    pub source: String,
    pub range: String,
}

/// A finite directed graph with named vertices and edges.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteGraph {
    vertices: Vec<String>,
    edges: Vec<Edge>,
}

impl FiniteGraph {
    pub fn new(vertices: Vec<String>, edges: Vec<Edge>) -> Result<Self, GraphError> {
        let mut seen = BTreeSet::new();
        for v in &vertices {
            if !seen.insert(v.clone()) {
                return Err(GraphError::DuplicateVertex { id: v.clone() });
            }
        }
        let mut eseen = BTreeSet::new();
        for e in &edges {
            if !eseen.insert(e.id.clone()) {
                return Err(GraphError::DuplicateEdge { id: e.id.clone() });
            }
            for v in [&e.source, &e.range] {
                if !seen.contains(v) {
                    return Err(GraphError::UnknownVertex {
                        edge: e.id.clone(),
                        vertex: v.clone(),
                    });
                }
            }
        }
        if edges.len() < 2 {
            return Err(GraphError::TooFewEdges { count: edges.len() });
        }
        Ok(FiniteGraph { vertices, edges })
    }

    pub fn vertices(&self) -> &[String] {
        &self.vertices
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    /// The edge matrix `A_E(e, f) = 1` iff `r(e) = s(f)`, with rows and
    /// columns in edge declaration order. Fails with `ZeroRow`/`ZeroColumn`
    /// when some edge has no successor or no predecessor.
    pub fn edge_matrix(&self) -> Result<ZeroOneMatrix, MatrixError> {
        let raw: Vec<Vec<i64>> = self
            .edges
            .iter()
            .map(|e| {
                self.edges
                    .iter()
                    .map(|f| if e.range == f.source { 1 } else { 0 })
                    .collect()
            })
            .collect();
        ZeroOneMatrix::validate(&raw)
    }

    /// There is some `k >= 1` with a length-`k` path between every ordered
    /// pair of edges; decided as aperiodicity of the edge matrix.
    pub fn is_strongly_connected_aperiodic(&self) -> bool {
        match self.edge_matrix() {
            Ok(m) => m.is_aperiodic(),
            Err(_) => false,
        }
    }
}
