//! Exact arithmetic in the dense *-subalgebra spanned by words `s_mu s_nu*`.
//!
//! Elements are finite linear combinations of word pairs with cyclotomic
//! rational coefficients. A pair `(mu, nu)` stands for `s_mu s_nu*`; the
//! empty word is the unit, so plain words and plain adjoints are the pairs
//! with one empty side. Construction eagerly drops pairs that the relations
//! force to zero (inadmissible words, or end rows sharing no common 1) and
//! contracts complete expansion blocks to a deterministic display form.
//!
//! Equality does not rely on the contracted form: two elements are compared
//! through their leveled expansions, whose terminal-matched word pairs are
//! linearly independent. The leveled form is also where operator norms of
//! degree-zero elements are computed, block by terminal letter.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::cyclotomic::RootScalar;
use crate::linalg::CMat;
use crate::matrix::{Word, ZeroOneMatrix};

pub type Pair = (Word, Word);

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AlgebraError {
    /// Operands live over different matrices.
    MatrixMismatch,
    IndexOutOfRange { letter: u8, n: usize },
    /// Operation defined only for homogeneous elements.
    MixedDegree,
    LevelTooSmall { required: usize, given: usize },
}

impl fmt::Display for AlgebraError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AlgebraError::MatrixMismatch => write!(f, "elements over different matrices"),
            AlgebraError::IndexOutOfRange { letter, n } => {
                write!(f, "letter {letter} out of range 1..={n}")
            }
            AlgebraError::MixedDegree => write!(f, "element is not homogeneous"),
            AlgebraError::LevelTooSmall { required, given } => {
                write!(f, "level {given} too small, need at least {required}")
            }
        }
    }
}

/// Generators of the algebra.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Generator {
    /// `s_i`
    S(u8),
    /// `s_i*`
    SStar(u8),
    /// Domain projection `q_i = s_i* s_i`.
    Q(u8),
    /// Range projection `p_i = s_i s_i*`.
    P(u8),
    Unit,
}

/// An element of the dense subalgebra in canonical (contracted) form.
#[derive(Debug, Clone)]
pub struct CKElement {
    matrix: Arc<ZeroOneMatrix>,
    terms: BTreeMap<Pair, RootScalar>,
}

/// Letters that can extend both words of a pair simultaneously; an empty
/// word imposes no constraint. A pair represents a nonzero element exactly
/// when both words are admissible and this set is nonempty.
pub fn extension_letters(m: &ZeroOneMatrix, mu: &[u8], nu: &[u8]) -> Vec<u8> {
    m.letters()
        .filter(|&j| {
            mu.last().map_or(true, |&e| m.entry(e, j))
                && nu.last().map_or(true, |&e| m.entry(e, j))
        })
        .collect()
}

fn pair_nonzero(m: &ZeroOneMatrix, mu: &[u8], nu: &[u8]) -> bool {
    m.admits(mu) && m.admits(nu) && !extension_letters(m, mu, nu).is_empty()
}

fn degree_of(pair: &Pair) -> i64 {
    pair.0.len() as i64 - pair.1.len() as i64
}

impl CKElement {
    pub fn zero(matrix: &Arc<ZeroOneMatrix>) -> Self {
        CKElement { matrix: matrix.clone(), terms: BTreeMap::new() }
    }

    pub fn unit(matrix: &Arc<ZeroOneMatrix>) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert((Vec::new(), Vec::new()), RootScalar::one());
        CKElement { matrix: matrix.clone(), terms }
    }

    pub fn generator(matrix: &Arc<ZeroOneMatrix>, g: Generator) -> Result<Self, AlgebraError> {
        let n = matrix.n();
        let check = |i: u8| {
            if i == 0 || i as usize > n {
                Err(AlgebraError::IndexOutOfRange { letter: i, n })
            } else {
                Ok(())
            }
        };
        let raw: Vec<(Pair, RootScalar)> = match g {
            Generator::Unit => vec![((Vec::new(), Vec::new()), RootScalar::one())],
            Generator::S(i) => {
                check(i)?;
                vec![((vec![i], Vec::new()), RootScalar::one())]
            }
            Generator::SStar(i) => {
                check(i)?;
                vec![((Vec::new(), vec![i]), RootScalar::one())]
            }
            Generator::P(i) => {
                check(i)?;
                vec![((vec![i], vec![i]), RootScalar::one())]
            }
            Generator::Q(i) => {
                check(i)?;
                matrix
                    .letters()
                    .filter(|&j| matrix.entry(i, j))
                    .map(|j| ((vec![j], vec![j]), RootScalar::one()))
                    .collect()
            }
        };
        Ok(Self::canonical(matrix.clone(), raw))
    }

    /// `s_mu` as an element.
    pub fn word(matrix: &Arc<ZeroOneMatrix>, mu: &[u8]) -> Result<Self, AlgebraError> {
        Self::pair(matrix, mu, &[])
    }

    /// `s_mu s_nu*` as an element (zero when the relations force it).
    pub fn pair(matrix: &Arc<ZeroOneMatrix>, mu: &[u8], nu: &[u8]) -> Result<Self, AlgebraError> {
        Self::from_terms(matrix, [((mu.to_vec(), nu.to_vec()), RootScalar::one())])
    }

    /// Builds an element from raw terms. Letters out of range are rejected;
    /// pairs that denote the zero element are dropped.
    pub fn from_terms<I>(matrix: &Arc<ZeroOneMatrix>, terms: I) -> Result<Self, AlgebraError>
    where
        I: IntoIterator<Item = (Pair, RootScalar)>,
    {
        let n = matrix.n();
        let mut raw: Vec<(Pair, RootScalar)> = Vec::new();
        for (pair, coeff) in terms {
            for &l in pair.0.iter().chain(pair.1.iter()) {
                if l == 0 || l as usize > n {
                    return Err(AlgebraError::IndexOutOfRange { letter: l, n });
                }
            }
            raw.push((pair, coeff));
        }
        Ok(Self::canonical(matrix.clone(), raw))
    }

    fn canonical<I>(matrix: Arc<ZeroOneMatrix>, raw: I) -> Self
    where
        I: IntoIterator<Item = (Pair, RootScalar)>,
    {
        let mut terms: BTreeMap<Pair, RootScalar> = BTreeMap::new();
        for (pair, coeff) in raw {
            if coeff.is_zero() || !pair_nonzero(&matrix, &pair.0, &pair.1) {
                continue;
            }
            match terms.remove(&pair) {
                Some(old) => {
                    let s = old.add(&coeff);
                    if !s.is_zero() {
                        terms.insert(pair, s);
                    }
                }
                None => {
                    terms.insert(pair, coeff);
                }
            }
        }
        let mut el = CKElement { matrix, terms };
        el.contract();
        el
    }

    /// Replaces every complete equal-coefficient expansion block
    /// `{ s_(mu j) s_(nu j)* : j extends both mu and nu }` by the single
    /// parent pair, repeatedly, scanning parents in lexicographic order.
    fn contract(&mut self) {
        loop {
            let mut parents: BTreeSet<Pair> = BTreeSet::new();
            for (mu, nu) in self.terms.keys() {
                if let (Some(&a), Some(&b)) = (mu.last(), nu.last()) {
                    if a == b {
                        parents.insert((mu[..mu.len() - 1].to_vec(), nu[..nu.len() - 1].to_vec()));
                    }
                }
            }
            let mut changed = false;
            for (pmu, pnu) in parents {
                let exts = extension_letters(&self.matrix, &pmu, &pnu);
                if exts.is_empty() {
                    continue;
                }
                let children: Vec<Pair> = exts
                    .iter()
                    .map(|&j| {
                        let mut mu = pmu.clone();
                        let mut nu = pnu.clone();
                        mu.push(j);
                        nu.push(j);
                        (mu, nu)
                    })
                    .collect();
                let common = match self.terms.get(&children[0]) {
                    Some(c) => c.clone(),
                    None => continue,
                };
                if !children[1..]
                    .iter()
                    .all(|p| self.terms.get(p).map_or(false, |c| c.eq(&common)))
                {
                    continue;
                }
                for p in &children {
                    self.terms.remove(p);
                }
                let parent = (pmu, pnu);
                match self.terms.remove(&parent) {
                    Some(old) => {
                        let s = old.add(&common);
                        if !s.is_zero() {
                            self.terms.insert(parent, s);
                        }
                    }
                    None => {
                        self.terms.insert(parent, common);
                    }
                }
                changed = true;
            }
            if !changed {
                break;
            }
        }
    }

    pub fn matrix(&self) -> &Arc<ZeroOneMatrix> {
        &self.matrix
    }

    pub fn terms(&self) -> &BTreeMap<Pair, RootScalar> {
        &self.terms
    }

    pub fn same_matrix(&self, other: &CKElement) -> bool {
        Arc::ptr_eq(&self.matrix, &other.matrix) || *self.matrix == *other.matrix
    }

    fn guard(&self, other: &CKElement) -> Result<(), AlgebraError> {
        if self.same_matrix(other) {
            Ok(())
        } else {
            Err(AlgebraError::MatrixMismatch)
        }
    }

    pub fn add(&self, other: &CKElement) -> Result<CKElement, AlgebraError> {
        self.guard(other)?;
        let raw = self
            .terms
            .iter()
            .chain(other.terms.iter())
            .map(|(p, c)| (p.clone(), c.clone()));
        Ok(Self::canonical(self.matrix.clone(), raw))
    }

    pub fn sub(&self, other: &CKElement) -> Result<CKElement, AlgebraError> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> CKElement {
        self.scale(&RootScalar::from_integer(-1))
    }

    pub fn scale(&self, s: &RootScalar) -> CKElement {
        if s.is_zero() {
            return CKElement::zero(&self.matrix);
        }
        CKElement {
            matrix: self.matrix.clone(),
            terms: self
                .terms
                .iter()
                .map(|(p, c)| (p.clone(), c.mul(s)))
                .collect(),
        }
    }

    /// Swaps the word pair and conjugates coefficients; an involution.
    pub fn adjoint(&self) -> CKElement {
        CKElement {
            matrix: self.matrix.clone(),
            terms: self
                .terms
                .iter()
                .map(|((mu, nu), c)| ((nu.clone(), mu.clone()), c.conj()))
                .collect(),
        }
    }

    /// Product under the defining relations. Per pair of terms the middle
    /// `s_nu* s_rho` collapses by prefix comparison: a proper prefix leaves
    /// a residual word on one side, an exact nonempty match inserts the
    /// domain projection of the shared end (expanded by relation 2), and
    /// incomparable words annihilate.
    pub fn multiply(&self, other: &CKElement) -> Result<CKElement, AlgebraError> {
        self.guard(other)?;
        let m = &*self.matrix;
        let mut raw: Vec<(Pair, RootScalar)> = Vec::new();
        for ((mu1, nu1), c1) in &self.terms {
            for ((mu2, nu2), c2) in &other.terms {
                let coeff = c1.mul(c2);
                if nu1 == mu2 {
                    if nu1.is_empty() {
                        raw.push(((mu1.clone(), nu2.clone()), coeff));
                    } else {
                        let end = *nu1.last().unwrap();
                        for j in m.letters() {
                            if !m.entry(end, j) {
                                continue;
                            }
                            if mu1.last().map_or(false, |&e| !m.entry(e, j)) {
                                continue;
                            }
                            if nu2.last().map_or(false, |&e| !m.entry(e, j)) {
                                continue;
                            }
                            let mut mu = mu1.clone();
                            let mut nu = nu2.clone();
                            mu.push(j);
                            nu.push(j);
                            raw.push(((mu, nu), coeff.clone()));
                        }
                    }
                } else if mu2.starts_with(nu1) {
                    let lambda = &mu2[nu1.len()..];
                    if mu1.last().map_or(false, |&e| !m.entry(e, lambda[0])) {
                        continue;
                    }
                    let mut mu = mu1.clone();
                    mu.extend_from_slice(lambda);
                    raw.push(((mu, nu2.clone()), coeff));
                } else if nu1.starts_with(mu2) {
                    let lambda = &nu1[mu2.len()..];
                    if nu2.last().map_or(false, |&e| !m.entry(e, lambda[0])) {
                        continue;
                    }
                    let mut nu = nu2.clone();
                    nu.extend_from_slice(lambda);
                    raw.push(((mu1.clone(), nu), coeff));
                }
            }
        }
        Ok(Self::canonical(self.matrix.clone(), raw))
    }

    pub fn pow(&self, k: u32) -> Result<CKElement, AlgebraError> {
        let mut acc = CKElement::unit(&self.matrix);
        for _ in 0..k {
            acc = acc.multiply(self)?;
        }
        Ok(acc)
    }

    /// Degrees `|mu| - |nu|` present in the term map.
    pub fn degrees(&self) -> BTreeSet<i64> {
        self.terms.keys().map(degree_of).collect()
    }

    pub fn is_homogeneous(&self) -> bool {
        self.degrees().len() <= 1
    }

    pub fn homogeneous_part(&self, d: i64) -> CKElement {
        CKElement {
            matrix: self.matrix.clone(),
            terms: self
                .terms
                .iter()
                .filter(|(p, _)| degree_of(p) == d)
                .map(|(p, c)| (p.clone(), c.clone()))
                .collect(),
        }
    }

    /// The minimal level at which this homogeneous element expands into
    /// terminal-matched pairs.
    fn matched_level(&self) -> usize {
        let mut level = 0;
        let mut bump = false;
        for (mu, nu) in self.terms.keys() {
            let long = mu.len().max(nu.len());
            if long > level {
                level = long;
                bump = false;
            }
            if long == level {
                if let (Some(a), Some(b)) = (mu.last(), nu.last()) {
                    if a != b {
                        bump = true;
                    }
                }
            }
        }
        if bump {
            level + 1
        } else {
            level
        }
    }

    /// Expands a homogeneous element so every long-side word has length
    /// `level` and terminal letters match; re-contracting recovers the
    /// element.
    pub fn expand_to_level(&self, level: usize) -> Result<LeveledForm, AlgebraError> {
        let mut degs = self.degrees();
        if degs.len() > 1 {
            return Err(AlgebraError::MixedDegree);
        }
        let degree = degs.pop_first().unwrap_or(0);
        let required = self.matched_level();
        if level < required {
            return Err(AlgebraError::LevelTooSmall { required, given: level });
        }
        let m = &*self.matrix;
        let mut terms: BTreeMap<Pair, RootScalar> = BTreeMap::new();
        for ((mu, nu), coeff) in &self.terms {
            let long = mu.len().max(nu.len());
            let want = level - long;
            let mut stack: Vec<Word> = vec![Vec::new()];
            while let Some(suffix) = stack.pop() {
                if suffix.len() == want {
                    let mut emu = mu.clone();
                    let mut enu = nu.clone();
                    emu.extend_from_slice(&suffix);
                    enu.extend_from_slice(&suffix);
                    let key = (emu, enu);
                    match terms.remove(&key) {
                        Some(old) => {
                            let s = old.add(coeff);
                            if !s.is_zero() {
                                terms.insert(key, s);
                            }
                        }
                        None => {
                            terms.insert(key, coeff.clone());
                        }
                    }
                    continue;
                }
                let exts = match suffix.last() {
                    Some(&e) => m.letters().filter(|&j| m.entry(e, j)).collect::<Vec<_>>(),
                    None => extension_letters(m, mu, nu),
                };
                for j in exts {
                    let mut next = suffix.clone();
                    next.push(j);
                    stack.push(next);
                }
            }
        }
        Ok(LeveledForm { matrix: self.matrix.clone(), level, degree, terms })
    }

    fn leveled_parts(&self) -> Result<Vec<LeveledForm>, AlgebraError> {
        self.degrees()
            .into_iter()
            .map(|d| {
                let part = self.homogeneous_part(d);
                let level = part.matched_level();
                part.expand_to_level(level)
            })
            .collect()
    }

    /// Exact zero test through the leveled expansion; the contracted term
    /// map may be nonempty for the zero element, so this is the authority.
    pub fn is_zero(&self) -> bool {
        if self.terms.is_empty() {
            return true;
        }
        match self.leveled_parts() {
            Ok(parts) => parts.iter().all(|p| p.terms.is_empty()),
            Err(_) => false,
        }
    }

    /// Decides equality in the algebra by comparing leveled expansions of
    /// the difference, degree by degree.
    pub fn equals(&self, other: &CKElement) -> Result<bool, AlgebraError> {
        Ok(self.sub(other)?.is_zero())
    }

    pub fn is_unitary(&self) -> Result<bool, AlgebraError> {
        let unit = CKElement::unit(&self.matrix);
        Ok(self.multiply(&self.adjoint())?.equals(&unit)?
            && self.adjoint().multiply(self)?.equals(&unit)?)
    }

    pub fn is_self_adjoint(&self) -> Result<bool, AlgebraError> {
        self.equals(&self.adjoint())
    }

    /// Does the element commute with every domain projection `q_i`?
    pub fn commutes_with_domain_projections(&self) -> Result<bool, AlgebraError> {
        for i in self.matrix.letters() {
            let q = CKElement::generator(&self.matrix, Generator::Q(i))?;
            if !self.multiply(&q)?.equals(&q.multiply(self)?)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Operator norm of a degree-zero element, computed as the largest
    /// block singular value of its terminal-matched leveled form. The only
    /// inexactness is the embedding of cyclotomic coefficients into floats.
    pub fn core_norm(&self) -> Result<f64, AlgebraError> {
        if self.terms.is_empty() {
            return Ok(0.0);
        }
        let degs = self.degrees();
        if degs.len() > 1 || !degs.contains(&0) {
            return Err(AlgebraError::MixedDegree);
        }
        let level = self.matched_level().max(1);
        let leveled = self.expand_to_level(level)?;
        Ok(leveled
            .blocks()
            .iter()
            .map(|(_, _, mat)| mat.opnorm())
            .fold(0.0, f64::max))
    }

    /// A basis of the commutant of the domain projections inside the span
    /// of level-`k` degree-zero word pairs. The commutation equations act
    /// diagonally on word pairs, so the basis consists of the pairs whose
    /// first letters have equal columns.
    pub fn diagonal_commutant_basis(matrix: &Arc<ZeroOneMatrix>, k: usize) -> Vec<CKElement> {
        assert!(k >= 1);
        let words = matrix.admissible_words(k, None, None);
        let mut out = Vec::new();
        for mu in &words {
            for nu in &words {
                if matrix.columns_equal(mu[0], nu[0]) && pair_nonzero(matrix, mu, nu) {
                    out.push(CKElement {
                        matrix: matrix.clone(),
                        terms: [((mu.clone(), nu.clone()), RootScalar::one())].into(),
                    });
                }
            }
        }
        out
    }

    /// The minimal projections of the subalgebra generated by the domain
    /// projections: one sum of range projections per column-equality class.
    pub fn minimal_diagonal_projections(matrix: &Arc<ZeroOneMatrix>) -> Vec<CKElement> {
        matrix
            .column_classes()
            .into_iter()
            .map(|class| {
                let raw = class
                    .into_iter()
                    .map(|l| ((vec![l], vec![l]), RootScalar::one()));
                CKElement::canonical(matrix.clone(), raw)
            })
            .collect()
    }
}

impl fmt::Display for CKElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", crate::literal::render_element(self))
    }
}

/// A homogeneous element written over terminal-matched word pairs of a
/// fixed level; the finite-dimensional matrix-unit picture of the AF core.
#[derive(Debug, Clone)]
pub struct LeveledForm {
    matrix: Arc<ZeroOneMatrix>,
    level: usize,
    degree: i64,
    terms: BTreeMap<Pair, RootScalar>,
}

impl LeveledForm {
    pub fn level(&self) -> usize {
        self.level
    }

    pub fn degree(&self) -> i64 {
        self.degree
    }

    pub fn terms(&self) -> &BTreeMap<Pair, RootScalar> {
        &self.terms
    }

    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    /// Re-contracts to a canonical element; inverse to `expand_to_level`.
    pub fn contract(&self) -> CKElement {
        CKElement::canonical(
            self.matrix.clone(),
            self.terms.iter().map(|(p, c)| (p.clone(), c.clone())),
        )
    }

    /// Sum of diagonal coefficients; for a projection this is the rank of
    /// its block-matrix picture at this level.
    pub fn trace(&self) -> RootScalar {
        let mut acc = RootScalar::zero();
        for ((mu, nu), c) in &self.terms {
            if mu == nu {
                acc = acc.add(c);
            }
        }
        acc
    }

    /// One complex matrix per terminal letter, rows and columns indexed by
    /// the words that actually appear (degree zero only).
    pub fn blocks(&self) -> Vec<(u8, Vec<Word>, CMat)> {
        assert_eq!(self.degree, 0, "blocks are defined for degree zero");
        if self.level == 0 {
            // Only the unit pair lives at level zero.
            let mut out = Vec::new();
            if let Some(c) = self.terms.get(&(Vec::new(), Vec::new())) {
                let mut mat = CMat::zeros(1, 1);
                mat[(0, 0)] = c.to_complex();
                out.push((0, vec![Vec::new()], mat));
            }
            return out;
        }
        let mut by_terminal: BTreeMap<u8, BTreeSet<Word>> = BTreeMap::new();
        for (mu, nu) in self.terms.keys() {
            let t = *mu.last().expect("level > 0");
            let entry = by_terminal.entry(t).or_default();
            entry.insert(mu.clone());
            entry.insert(nu.clone());
        }
        let mut out = Vec::new();
        for (t, words_set) in by_terminal {
            let words: Vec<Word> = words_set.into_iter().collect();
            let index: BTreeMap<&Word, usize> =
                words.iter().enumerate().map(|(i, w)| (w, i)).collect();
            let mut mat = CMat::zeros(words.len(), words.len());
            for ((mu, nu), c) in &self.terms {
                if mu.last() == Some(&t) {
                    mat[(index[mu], index[nu])] = c.to_complex();
                }
            }
            out.push((t, words, mat));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::ZeroOneMatrix;

    fn fib() -> Arc<ZeroOneMatrix> {
        ZeroOneMatrix::from_rows(&[&[1, 1], &[1, 0]]).unwrap().shared()
    }

    fn full2() -> Arc<ZeroOneMatrix> {
        ZeroOneMatrix::full(2).shared()
    }

    fn gen(m: &Arc<ZeroOneMatrix>, g: Generator) -> CKElement {
        CKElement::generator(m, g).unwrap()
    }

    #[test]
    fn unit_is_empty_pair() {
        let m = fib();
        let one = CKElement::unit(&m);
        assert_eq!(one.terms().len(), 1);
        assert!(one.terms().contains_key(&(Vec::new(), Vec::new())));
    }

    #[test]
    fn q2_equals_p1_for_fibonacci() {
        let m = fib();
        let q2 = gen(&m, Generator::Q(2));
        let p1 = gen(&m, Generator::P(1));
        assert!(q2.equals(&p1).unwrap());
    }

    #[test]
    fn q1_equals_unit_for_fibonacci() {
        let m = fib();
        let q1 = gen(&m, Generator::Q(1));
        assert!(q1.equals(&CKElement::unit(&m)).unwrap());
        // Canonical form contracts the full row to the unit pair.
        assert_eq!(q1.terms().len(), 1);
    }

    #[test]
    fn generator_index_checked() {
        let m = fib();
        assert!(matches!(
            CKElement::generator(&m, Generator::S(3)),
            Err(AlgebraError::IndexOutOfRange { letter: 3, n: 2 })
        ));
    }

    #[test]
    fn orthogonality_relation() {
        let m = fib();
        let s1s = gen(&m, Generator::SStar(1));
        let s2 = gen(&m, Generator::S(2));
        assert!(s1s.multiply(&s2).unwrap().is_zero());
    }

    #[test]
    fn s2star_s2_is_p1() {
        let m = fib();
        let prod = gen(&m, Generator::SStar(2))
            .multiply(&gen(&m, Generator::S(2)))
            .unwrap();
        assert!(prod.equals(&gen(&m, Generator::P(1))).unwrap());
    }

    #[test]
    fn mixed_word_product() {
        // (s_1 s_2*)(s_2 s_1*) = s_11 s_11* over the Fibonacci matrix.
        let m = fib();
        let a = CKElement::pair(&m, &[1], &[2]).unwrap();
        let b = CKElement::pair(&m, &[2], &[1]).unwrap();
        let prod = a.multiply(&b).unwrap();
        let want = CKElement::pair(&m, &[1, 1], &[1, 1]).unwrap();
        assert!(prod.equals(&want).unwrap());
    }

    #[test]
    fn relations_hold() {
        for m in [fib(), full2()] {
            let one = CKElement::unit(&m);
            let mut acc = CKElement::zero(&m);
            for i in m.letters() {
                acc = acc.add(&gen(&m, Generator::P(i))).unwrap();
            }
            assert!(acc.equals(&one).unwrap());
            for i in m.letters() {
                let lhs = gen(&m, Generator::SStar(i))
                    .multiply(&gen(&m, Generator::S(i)))
                    .unwrap();
                assert!(lhs.equals(&gen(&m, Generator::Q(i))).unwrap());
            }
        }
    }

    #[test]
    fn adjoint_examples() {
        let m = fib();
        let x = CKElement::pair(&m, &[1], &[2]).unwrap();
        assert!(x
            .adjoint()
            .equals(&CKElement::pair(&m, &[2], &[1]).unwrap())
            .unwrap());
        let p = gen(&m, Generator::P(2));
        assert!(p.adjoint().equals(&p).unwrap());
        let z = RootScalar::root_of_unity(3, 1);
        let y = gen(&m, Generator::S(1)).scale(&z);
        let want = gen(&m, Generator::SStar(1)).scale(&z.pow(2));
        assert!(y.adjoint().equals(&want).unwrap());
    }

    #[test]
    fn adjoint_is_antimultiplicative() {
        let m = fib();
        let x = CKElement::pair(&m, &[1], &[2]).unwrap();
        let y = gen(&m, Generator::S(2));
        let lhs = x.multiply(&y).unwrap().adjoint();
        let rhs = y.adjoint().multiply(&x.adjoint()).unwrap();
        assert!(lhs.equals(&rhs).unwrap());
    }

    #[test]
    fn expansion_of_p1() {
        let m = fib();
        let p1 = gen(&m, Generator::P(1));
        let lf = p1.expand_to_level(2).unwrap();
        let keys: Vec<Pair> = lf.terms().keys().cloned().collect();
        assert_eq!(keys, vec![(vec![1, 1], vec![1, 1]), (vec![1, 2], vec![1, 2])]);
        assert!(lf.contract().equals(&p1).unwrap());
    }

    #[test]
    fn expansion_of_unit_counts_words() {
        let m = fib();
        let one = CKElement::unit(&m);
        let lf = one.expand_to_level(1).unwrap();
        assert_eq!(lf.term_count(), 2);
        for k in 2..7 {
            let lf = one.expand_to_level(k).unwrap();
            assert_eq!(lf.term_count(), m.admissible_words(k, None, None).len());
        }
    }

    #[test]
    fn expansion_of_offdiagonal_pair() {
        let m = fib();
        let x = CKElement::pair(&m, &[1], &[2]).unwrap();
        let lf = x.expand_to_level(2).unwrap();
        let keys: Vec<Pair> = lf.terms().keys().cloned().collect();
        assert_eq!(keys, vec![(vec![1, 1], vec![2, 1])]);
    }

    #[test]
    fn level_too_small_detected() {
        let m = fib();
        let x = CKElement::pair(&m, &[1], &[2]).unwrap();
        assert!(matches!(
            x.expand_to_level(1),
            Err(AlgebraError::LevelTooSmall { required: 2, given: 1 })
        ));
    }

    #[test]
    fn mixed_degree_rejected() {
        let m = fib();
        let x = gen(&m, Generator::S(1)).add(&CKElement::unit(&m)).unwrap();
        assert!(matches!(x.expand_to_level(3), Err(AlgebraError::MixedDegree)));
        assert!(matches!(x.core_norm(), Err(AlgebraError::MixedDegree)));
    }

    #[test]
    fn mixed_degree_equality_per_part() {
        let m = fib();
        let s1 = gen(&m, Generator::S(1));
        let p1 = gen(&m, Generator::P(1));
        let q1 = gen(&m, Generator::Q(1));
        // Same element assembled via different representatives per degree.
        let a = s1.add(&p1).unwrap().add(&gen(&m, Generator::P(2))).unwrap();
        let b = s1.add(&q1).unwrap();
        assert!(a.equals(&b).unwrap());
        // A mismatch in a single homogeneous part is detected.
        let c = gen(&m, Generator::S(2)).add(&q1).unwrap();
        assert!(!a.equals(&c).unwrap());
        assert_eq!(a.degrees().len(), 2);
    }

    #[test]
    fn zero_detection_across_forms() {
        let m = fib();
        let p1 = gen(&m, Generator::P(1));
        let p2 = gen(&m, Generator::P(2));
        let one = CKElement::unit(&m);
        let x = p1.add(&p2).unwrap().sub(&one).unwrap();
        assert!(x.is_zero());
        // 1 - p_1 has a "stuck" term map but is still recognized equal to p_2.
        let y = one.sub(&p1).unwrap();
        assert!(!y.is_zero());
        assert!(y.equals(&p2).unwrap());
    }

    #[test]
    fn core_norm_examples() {
        let m = fib();
        let one = CKElement::unit(&m);
        assert!((one.core_norm().unwrap() - 1.0).abs() < 1e-12);
        let sym = gen(&m, Generator::P(1)).sub(&gen(&m, Generator::P(2))).unwrap();
        assert!((sym.core_norm().unwrap() - 1.0).abs() < 1e-12);
        let two = RootScalar::from_integer(2);
        let x = CKElement::pair(&m, &[1, 1], &[1, 1])
            .unwrap()
            .add(&CKElement::pair(&m, &[1, 2], &[1, 2]).unwrap().scale(&two))
            .unwrap();
        assert!((x.core_norm().unwrap() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn cstar_identity_spot_check() {
        let m = fib();
        let z = RootScalar::root_of_unity(12, 5);
        let x = CKElement::pair(&m, &[1], &[2])
            .unwrap()
            .scale(&z)
            .add(&gen(&m, Generator::P(2)).scale(&RootScalar::rational(3, 2)))
            .unwrap();
        let n1 = x.core_norm().unwrap();
        let n2 = x.adjoint().multiply(&x).unwrap().core_norm().unwrap();
        assert!((n2 - n1 * n1).abs() < 1e-8);
    }

    #[test]
    fn commutant_basis_examples() {
        let m = fib();
        let basis = CKElement::diagonal_commutant_basis(&m, 1);
        assert_eq!(basis.len(), 2);
        let full = full2();
        assert_eq!(CKElement::diagonal_commutant_basis(&full, 1).len(), 4);
        let perm = ZeroOneMatrix::from_rows(&[&[0, 1], &[1, 0]]).unwrap().shared();
        assert_eq!(CKElement::diagonal_commutant_basis(&perm, 1).len(), 2);
        for x in basis {
            assert!(x.commutes_with_domain_projections().unwrap());
        }
    }

    #[test]
    fn minimal_projections_examples() {
        let m = fib();
        let projections = CKElement::minimal_diagonal_projections(&m);
        assert_eq!(projections.len(), 2);
        assert!(projections[0].equals(&gen(&m, Generator::P(1))).unwrap());
        assert!(projections[1].equals(&gen(&m, Generator::P(2))).unwrap());

        let full = full2();
        let projections = CKElement::minimal_diagonal_projections(&full);
        assert_eq!(projections.len(), 1);
        assert!(projections[0].equals(&CKElement::unit(&full)).unwrap());

        let a = ZeroOneMatrix::from_rows(&[&[1, 1, 1], &[1, 1, 0], &[1, 1, 0]])
            .unwrap()
            .shared();
        let projections = CKElement::minimal_diagonal_projections(&a);
        assert_eq!(projections.len(), 2);
        let p12 = CKElement::generator(&a, Generator::P(1))
            .unwrap()
            .add(&CKElement::generator(&a, Generator::P(2)).unwrap())
            .unwrap();
        assert!(projections[0].equals(&p12).unwrap());

        for m in [fib(), full2(), a] {
            let rs = CKElement::minimal_diagonal_projections(&m);
            let mut sum = CKElement::zero(&m);
            for (i, r) in rs.iter().enumerate() {
                sum = sum.add(r).unwrap();
                for (j, s) in rs.iter().enumerate() {
                    let prod = r.multiply(s).unwrap();
                    if i == j {
                        assert!(prod.equals(r).unwrap());
                    } else {
                        assert!(prod.is_zero());
                    }
                }
            }
            assert!(sum.equals(&CKElement::unit(&m)).unwrap());
        }
    }

    #[test]
    fn ring_axioms_random_spot_check() {
        use crate::rng::SplitMix64;
        let m = fib();
        let mut rng = SplitMix64::new(42);
        let atoms: Vec<CKElement> = vec![
            gen(&m, Generator::S(1)),
            gen(&m, Generator::S(2)),
            gen(&m, Generator::SStar(1)),
            gen(&m, Generator::P(2)),
            CKElement::unit(&m),
        ];
        let rand_el = |rng: &mut SplitMix64| {
            let mut acc = CKElement::zero(&m);
            for _ in 0..3 {
                let a = &atoms[rng.next_below(atoms.len())];
                let c = RootScalar::root_of_unity(12, rng.next_below(12) as i64).scale(
                    &num_rational::BigRational::new(
                        num_bigint::BigInt::from(rng.next_below(5) as i64 - 2),
                        num_bigint::BigInt::from(1 + rng.next_below(3) as i64),
                    ),
                );
                acc = acc.add(&a.scale(&c)).unwrap();
            }
            acc
        };
        for _ in 0..10 {
            let x = rand_el(&mut rng);
            let y = rand_el(&mut rng);
            let z = rand_el(&mut rng);
            let assoc_l = x.multiply(&y).unwrap().multiply(&z).unwrap();
            let assoc_r = x.multiply(&y.multiply(&z).unwrap()).unwrap();
            assert!(assoc_l.equals(&assoc_r).unwrap());
            let dist_l = x.multiply(&y.add(&z).unwrap()).unwrap();
            let dist_r = x.multiply(&y).unwrap().add(&x.multiply(&z).unwrap()).unwrap();
            assert!(dist_l.equals(&dist_r).unwrap());
            let star_l = x.multiply(&y).unwrap().adjoint();
            let star_r = y.adjoint().multiply(&x.adjoint()).unwrap();
            assert!(star_l.equals(&star_r).unwrap());
        }
    }

    #[test]
    fn matrix_mismatch_detected() {
        let a = fib();
        let b = full2();
        let x = CKElement::unit(&a);
        let y = CKElement::unit(&b);
        assert!(matches!(x.add(&y), Err(AlgebraError::MatrixMismatch)));
        assert!(matches!(x.multiply(&y), Err(AlgebraError::MatrixMismatch)));
    }

    #[test]
    fn vanishing_pair_dropped_at_construction() {
        // Rows of the permutation matrix share no common 1, so s_1 s_2* = 0.
        let m = ZeroOneMatrix::from_rows(&[&[0, 1], &[1, 0]]).unwrap().shared();
        let x = CKElement::pair(&m, &[1], &[2]).unwrap();
        assert!(x.terms().is_empty());
    }
}
