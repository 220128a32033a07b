//! Unital endomorphisms fixing the domain projections, their associated
//! unitaries, and diagonal quasi-free actions of finite abelian groups.
//!
//! The correspondence sends a unitary `u` commuting with every `q_i` to the
//! endomorphism `lambda_u` with `lambda_u(s_i) = u s_i`, and an endomorphism
//! `sigma` fixing the `q_i` to `u_sigma = sum_i sigma(s_i) s_i*`; the two
//! maps are mutually inverse. Diagonal quasi-free automorphisms correspond
//! to unitaries in the span of the level-one words, and actions of finite
//! abelian groups are specified by integer eigenvalue data so that all
//! action arithmetic stays exact.

use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_rational::BigRational;
use num_bigint::BigInt;
use num_traits::ToPrimitive;

use crate::cyclotomic::RootScalar;
use crate::element::{AlgebraError, CKElement, Generator};
use crate::linalg::{orthonormal_column_basis, CMat};
use crate::matrix::{Word, ZeroOneMatrix};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EndoError {
    Algebra(AlgebraError),
    /// The candidate images violate a defining relation; the string names it.
    NotAnEndomorphism { relation: String },
    NotUnitary,
    /// Not in the span of level-one word pairs.
    NotInSpan,
    NotInCommutant,
    WrongLength { expected: usize, got: usize },
    /// Generator `t` does not satisfy its declared group order.
    OrderViolation { generator: usize },
    NonCommuting { a: usize, b: usize },
    NotCommutingFamily,
    NotFiniteOrder,
}

impl fmt::Display for EndoError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EndoError::Algebra(e) => write!(f, "{e}"),
            EndoError::NotAnEndomorphism { relation } => {
                write!(f, "images do not define an endomorphism: {relation} fails")
            }
            EndoError::NotUnitary => write!(f, "element is not unitary"),
            EndoError::NotInSpan => write!(f, "element does not lie in the level-one span"),
            EndoError::NotInCommutant => {
                write!(f, "element does not commute with the domain projections")
            }
            EndoError::WrongLength { expected, got } => {
                write!(f, "expected {expected} entries, got {got}")
            }
            EndoError::OrderViolation { generator } => {
                write!(f, "generator {generator} violates its declared order")
            }
            EndoError::NonCommuting { a, b } => {
                write!(f, "generators {a} and {b} do not commute")
            }
            EndoError::NotCommutingFamily => write!(f, "family does not commute"),
            EndoError::NotFiniteOrder => write!(f, "unitary is not of the declared finite order"),
        }
    }
}

impl From<AlgebraError> for EndoError {
    fn from(e: AlgebraError) -> Self {
        EndoError::Algebra(e)
    }
}

/// The endomorphism `lambda_u` applied to one element, computed termwise:
/// `lambda_u(s_mu s_nu*) = (u s_mu1 u s_mu2 ...)(u s_nu1 ...)*`. This is a
/// unital *-endomorphism whenever `u` is unitary and commutes with the
/// domain projections; the function itself only needs `u` to be an element
/// over the same matrix.
pub fn lambda_apply(u: &CKElement, x: &CKElement) -> Result<CKElement, AlgebraError> {
    let matrix = x.matrix();
    let image_word = |w: &Word| -> Result<CKElement, AlgebraError> {
        let mut acc = CKElement::unit(matrix);
        for &l in w {
            let s = CKElement::generator(matrix, Generator::S(l))?;
            acc = acc.multiply(u)?.multiply(&s)?;
        }
        Ok(acc)
    };
    let mut out = CKElement::zero(matrix);
    for ((mu, nu), coeff) in x.terms() {
        let part = image_word(mu)?
            .multiply(&image_word(nu)?.adjoint())?
            .scale(coeff);
        out = out.add(&part)?;
    }
    Ok(out)
}

/// A unital endomorphism given by its values on the generators.
#[derive(Debug, Clone)]
pub struct EndoSpec {
    matrix: Arc<ZeroOneMatrix>,
    images: Vec<CKElement>,
}

impl EndoSpec {
    pub fn new(images: Vec<CKElement>) -> Result<Self, EndoError> {
        let first = images.first().ok_or(EndoError::WrongLength { expected: 2, got: 0 })?;
        let matrix = first.matrix().clone();
        if images.len() != matrix.n() {
            return Err(EndoError::WrongLength { expected: matrix.n(), got: images.len() });
        }
        if !images.iter().all(|x| x.same_matrix(first)) {
            return Err(EndoError::Algebra(AlgebraError::MatrixMismatch));
        }
        Ok(EndoSpec { matrix, images })
    }

    pub fn identity(matrix: &Arc<ZeroOneMatrix>) -> Self {
        let images = matrix
            .letters()
            .map(|i| CKElement::generator(matrix, Generator::S(i)).unwrap())
            .collect();
        EndoSpec { matrix: matrix.clone(), images }
    }

    /// The endomorphism induced by a commutant unitary.
    pub fn from_unitary(u: &CKElement) -> Result<Self, EndoError> {
        let matrix = u.matrix().clone();
        let images = matrix
            .letters()
            .map(|i| {
                let s = CKElement::generator(&matrix, Generator::S(i))?;
                u.multiply(&s)
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(EndoSpec { matrix, images })
    }

    pub fn matrix(&self) -> &Arc<ZeroOneMatrix> {
        &self.matrix
    }

    pub fn images(&self) -> &[CKElement] {
        &self.images
    }

    /// Checks that the images preserve both defining relations and fix every
    /// domain projection.
    pub fn verify(&self) -> Result<(), EndoError> {
        let n = self.matrix.n() as u8;
        for i in 1..=n {
            for j in 1..=n {
                if i == j {
                    continue;
                }
                let prod = self.images[(i - 1) as usize]
                    .adjoint()
                    .multiply(&self.images[(j - 1) as usize])?;
                if !prod.is_zero() {
                    return Err(EndoError::NotAnEndomorphism {
                        relation: alloc::format!("s_{i}* s_{j} = 0"),
                    });
                }
            }
        }
        for i in 1..=n {
            let im = &self.images[(i - 1) as usize];
            let lhs = im.adjoint().multiply(im)?;
            let mut rhs = CKElement::zero(&self.matrix);
            for j in 1..=n {
                if self.matrix.entry(i, j) {
                    let pj = &self.images[(j - 1) as usize];
                    rhs = rhs.add(&pj.multiply(&pj.adjoint())?)?;
                }
            }
            if !lhs.equals(&rhs)? {
                return Err(EndoError::NotAnEndomorphism {
                    relation: alloc::format!("s_{i}* s_{i} = sum_j A({i},j) s_j s_j*"),
                });
            }
            let qi = CKElement::generator(&self.matrix, Generator::Q(i))?;
            if !lhs.equals(&qi)? {
                return Err(EndoError::NotAnEndomorphism {
                    relation: alloc::format!("sigma(q_{i}) = q_{i}"),
                });
            }
        }
        Ok(())
    }

    /// Applies the endomorphism termwise.
    pub fn apply(&self, x: &CKElement) -> Result<CKElement, EndoError> {
        let image_word = |w: &Word| -> Result<CKElement, AlgebraError> {
            let mut acc = CKElement::unit(&self.matrix);
            for &l in w {
                acc = acc.multiply(&self.images[(l - 1) as usize])?;
            }
            Ok(acc)
        };
        let mut out = CKElement::zero(&self.matrix);
        for ((mu, nu), coeff) in x.terms() {
            let part = image_word(mu)?
                .multiply(&image_word(nu)?.adjoint())?
                .scale(coeff);
            out = out.add(&part)?;
        }
        Ok(out)
    }

    /// Composition `self . rho` on generators.
    pub fn compose(&self, rho: &EndoSpec) -> Result<EndoSpec, EndoError> {
        let images = rho
            .images
            .iter()
            .map(|x| self.apply(x))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(EndoSpec { matrix: self.matrix.clone(), images })
    }

    /// True when every image is a linear combination of the level-one
    /// generators, so the span of the `s_i` is preserved.
    pub fn is_diagonal_quasi_free(&self) -> bool {
        self.images.iter().all(|x| {
            x.terms()
                .keys()
                .all(|(mu, nu)| mu.len() == 1 && nu.is_empty())
        })
    }
}

/// A unitary in the level-one span commuting with all domain projections;
/// the unitaries of the diagonal quasi-free correspondence.
#[derive(Debug, Clone)]
pub struct QFUnitary {
    element: CKElement,
}

impl QFUnitary {
    pub fn new(element: CKElement) -> Result<Self, EndoError> {
        if !element
            .terms()
            .keys()
            .all(|(mu, nu)| mu.len().max(nu.len()) <= 1)
        {
            return Err(EndoError::NotInSpan);
        }
        if !element.commutes_with_domain_projections()? {
            return Err(EndoError::NotInCommutant);
        }
        if !element.is_unitary()? {
            return Err(EndoError::NotUnitary);
        }
        Ok(QFUnitary { element })
    }

    /// `sum_i eta_i p_i` for unimodular scalars `eta_i`.
    pub fn diagonal(
        matrix: &Arc<ZeroOneMatrix>,
        eigenvalues: &[RootScalar],
    ) -> Result<Self, EndoError> {
        if eigenvalues.len() != matrix.n() {
            return Err(EndoError::WrongLength {
                expected: matrix.n(),
                got: eigenvalues.len(),
            });
        }
        let mut acc = CKElement::zero(matrix);
        for (i, eta) in matrix.letters().zip(eigenvalues.iter()) {
            let p = CKElement::generator(matrix, Generator::P(i))?;
            acc = acc.add(&p.scale(eta))?;
        }
        QFUnitary::new(acc)
    }

    pub fn element(&self) -> &CKElement {
        &self.element
    }

    pub fn matrix(&self) -> &Arc<ZeroOneMatrix> {
        self.element.matrix()
    }

    pub fn as_endo(&self) -> EndoSpec {
        EndoSpec::from_unitary(&self.element).expect("same matrix")
    }

    pub fn lambda(&self, x: &CKElement) -> Result<CKElement, AlgebraError> {
        lambda_apply(&self.element, x)
    }
}

/// `u_sigma = sum_i sigma(s_i) s_i*` for a verified endomorphism fixing the
/// domain projections; the inverse direction of the correspondence. The
/// roundtrip `lambda_(u_sigma)(s_i) = sigma(s_i)` is checked before
/// returning.
pub fn unitary_of_endo(sigma: &EndoSpec) -> Result<QFUnitary, EndoError> {
    sigma.verify()?;
    let matrix = sigma.matrix();
    let mut u = CKElement::zero(matrix);
    for (i, im) in matrix.letters().zip(sigma.images().iter()) {
        let ss = CKElement::generator(matrix, Generator::SStar(i))?;
        u = u.add(&im.multiply(&ss)?)?;
    }
    for (i, im) in matrix.letters().zip(sigma.images().iter()) {
        let s = CKElement::generator(matrix, Generator::S(i))?;
        if !lambda_apply(&u, &s)?.equals(im)? {
            return Err(EndoError::NotAnEndomorphism {
                relation: alloc::format!("roundtrip on s_{i}"),
            });
        }
    }
    QFUnitary::new(u)
}

/// `u_(sigma . rho) = sigma(u_rho) u_sigma`; computed directly and checked
/// against the unitary of the composition.
pub fn convolution_unitary(sigma: &EndoSpec, rho: &EndoSpec) -> Result<QFUnitary, EndoError> {
    let u_rho = unitary_of_endo(rho)?;
    let u_sigma = unitary_of_endo(sigma)?;
    let prod = sigma
        .apply(u_rho.element())?
        .multiply(u_sigma.element())?;
    let composed = unitary_of_endo(&sigma.compose(rho)?)?;
    if !prod.equals(composed.element())? {
        return Err(EndoError::NotAnEndomorphism {
            relation: String::from("convolution identity"),
        });
    }
    QFUnitary::new(prod)
}

/// Per-generator eigenvalue data for a diagonal action. The root order is
/// the order of the roots of unity used for this generator; the file format
/// ties it to the group order, but it can be set independently so that
/// violations of the declared order are expressible (and detected).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EigenRow {
    pub root_order: u32,
    pub exponents: Vec<i64>,
}

/// A finite abelian group `Z_(n_1) x ... x Z_(n_r)` acting diagonally:
/// generator `t` sends `s_i` to `zeta^(a_(t,i)) s_i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ActionSpec {
    pub group_orders: Vec<u32>,
    pub eigen_rows: Vec<EigenRow>,
}

impl ActionSpec {
    /// Standard diagonal data: roots of order `n_t` per generator.
    pub fn diagonal(group_orders: Vec<u32>, exponents: Vec<Vec<i64>>) -> Self {
        let eigen_rows = group_orders
            .iter()
            .zip(exponents)
            .map(|(&n, exps)| EigenRow { root_order: n, exponents: exps })
            .collect();
        ActionSpec { group_orders, eigen_rows }
    }

    pub fn eta(&self, t: usize, i: usize) -> RootScalar {
        let row = &self.eigen_rows[t];
        RootScalar::root_of_unity(row.root_order, row.exponents[i])
    }

    /// Verifies the action over the matrix: each generator's unitary lies in
    /// the level-one commutant, the declared group order holds through the
    /// convolution criterion, and the generators pairwise commute.
    pub fn verify(&self, matrix: &Arc<ZeroOneMatrix>) -> Result<VerifiedAction, EndoError> {
        if self.group_orders.len() != self.eigen_rows.len() {
            return Err(EndoError::WrongLength {
                expected: self.group_orders.len(),
                got: self.eigen_rows.len(),
            });
        }
        let n = matrix.n();
        let mut unitaries = Vec::new();
        for (t, row) in self.eigen_rows.iter().enumerate() {
            if row.exponents.len() != n {
                return Err(EndoError::WrongLength { expected: n, got: row.exponents.len() });
            }
            if row.root_order == 0 || self.group_orders[t] == 0 {
                return Err(EndoError::OrderViolation { generator: t });
            }
            let eigs: Vec<RootScalar> =
                (0..n).map(|i| self.eta(t, i)).collect();
            let u = QFUnitary::diagonal(matrix, &eigs)?;
            // sigma^n = id precisely when the convolution product
            // sigma^(n-1)(u) ... sigma(u) u is the unit.
            let endo = u.as_endo();
            let order = self.group_orders[t];
            let mut product = u.element().clone();
            let mut twisted = u.element().clone();
            for _ in 1..order {
                twisted = endo.apply(&twisted)?;
                product = twisted.multiply(&product)?;
            }
            if !product.equals(&CKElement::unit(matrix))? {
                return Err(EndoError::OrderViolation { generator: t });
            }
            unitaries.push(u);
        }
        for a in 0..unitaries.len() {
            for b in (a + 1)..unitaries.len() {
                let ea = unitaries[a].as_endo();
                let eb = unitaries[b].as_endo();
                let ab = ea.apply(unitaries[b].element())?.multiply(unitaries[a].element())?;
                let ba = eb.apply(unitaries[a].element())?.multiply(unitaries[b].element())?;
                if !ab.equals(&ba)? {
                    return Err(EndoError::NonCommuting { a, b });
                }
            }
        }
        Ok(VerifiedAction {
            matrix: matrix.clone(),
            spec: self.clone(),
            unitaries,
        })
    }
}

/// An action that passed verification, with the induced unitaries cached.
#[derive(Debug, Clone)]
pub struct VerifiedAction {
    matrix: Arc<ZeroOneMatrix>,
    spec: ActionSpec,
    unitaries: Vec<QFUnitary>,
}

impl VerifiedAction {
    pub fn matrix(&self) -> &Arc<ZeroOneMatrix> {
        &self.matrix
    }

    pub fn spec(&self) -> &ActionSpec {
        &self.spec
    }

    pub fn generator_count(&self) -> usize {
        self.unitaries.len()
    }

    pub fn unitary(&self, t: usize) -> &QFUnitary {
        &self.unitaries[t]
    }

    pub fn apply(&self, t: usize, x: &CKElement) -> Result<CKElement, AlgebraError> {
        self.unitaries[t].lambda(x)
    }

    pub fn is_fixed(&self, x: &CKElement) -> Result<bool, AlgebraError> {
        for t in 0..self.unitaries.len() {
            if !self.apply(t, x)?.equals(x)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Character exponent of a word under generator `t`, modulo the root
    /// order.
    pub fn word_exponent(&self, t: usize, word: &[u8]) -> i64 {
        let row = &self.spec.eigen_rows[t];
        let m = row.root_order as i64;
        word.iter()
            .map(|&l| row.exponents[(l - 1) as usize])
            .fold(0i64, |acc, e| (acc + e).rem_euclid(m))
    }

    /// Basis of the fixed-point part of the level-`k` degree-zero span:
    /// pairs whose words carry the same character under every generator.
    /// With `intersect_commutant` the basis is additionally cut down to the
    /// commutant of the domain projections (equal first-letter columns).
    pub fn fixed_point_core_basis(&self, k: usize, intersect_commutant: bool) -> Vec<CKElement> {
        let words = self.matrix.admissible_words(k, None, None);
        let mut out = Vec::new();
        for mu in &words {
            for nu in &words {
                let fixed = (0..self.unitaries.len())
                    .all(|t| self.word_exponent(t, mu) == self.word_exponent(t, nu));
                if !fixed {
                    continue;
                }
                if intersect_commutant && !self.matrix.columns_equal(mu[0], nu[0]) {
                    continue;
                }
                if let Ok(el) = CKElement::pair(&self.matrix, mu, nu) {
                    if !el.terms().is_empty() {
                        out.push(el);
                    }
                }
            }
        }
        out
    }
}

/// One block of the numerical conjugator returned by
/// [`diagonalize_commuting_family`].
#[derive(Debug, Clone)]
pub struct DiagBlock {
    pub terminal: u8,
    pub words: Vec<Word>,
    /// Unitary with `w u w*` diagonal for every family member.
    pub w: CMat,
}

/// Joint diagonalization data: exact spectral projections, a numerical
/// conjugator over the leveled frame, and its off-diagonal certificate.
#[derive(Debug, Clone)]
pub struct Diagonalization {
    pub level: usize,
    pub blocks: Vec<DiagBlock>,
    /// Max over family members of the off-diagonal Frobenius mass of
    /// `w u w*`.
    pub certificate: f64,
    /// Joint spectral projections, keyed by their eigenvalue exponents.
    pub projections: Vec<(Vec<u32>, CKElement)>,
}

/// Diagonalizes a commuting family of finite-order unitaries.
///
/// Spectral projections are computed exactly by discrete Fourier averaging
/// `P_a = (1/N) sum_k zeta^(-ak) u^k`, and joint projections as their exact
/// products. Only the conjugator is numerical: per terminal block, its rows
/// are orthonormal bases of the joint eigenspaces, ordered by eigenvalue
/// tuple. The returned certificate bounds the off-diagonal mass of every
/// conjugated family member.
pub fn diagonalize_commuting_family(
    family: &[QFUnitary],
    order: u32,
) -> Result<Diagonalization, EndoError> {
    let first = family.first().ok_or(EndoError::NotCommutingFamily)?;
    let matrix = first.matrix().clone();
    let one = CKElement::unit(&matrix);
    for a in 0..family.len() {
        for b in (a + 1)..family.len() {
            let ab = family[a].element().multiply(family[b].element())?;
            let ba = family[b].element().multiply(family[a].element())?;
            if !ab.equals(&ba)? {
                return Err(EndoError::NotCommutingFamily);
            }
        }
    }
    // Exact spectral projections per member.
    let inv_n = RootScalar::from_rational(BigRational::new(
        BigInt::from(1),
        BigInt::from(order as i64),
    ));
    let mut member_projections: Vec<Vec<(u32, CKElement)>> = Vec::new();
    for u in family {
        let mut powers = Vec::with_capacity(order as usize);
        let mut acc = one.clone();
        for _ in 0..order {
            powers.push(acc.clone());
            acc = acc.multiply(u.element())?;
        }
        if !acc.equals(&one)? {
            return Err(EndoError::NotFiniteOrder);
        }
        let mut projections = Vec::new();
        for a in 0..order {
            let mut p = CKElement::zero(&matrix);
            for (k, pw) in powers.iter().enumerate() {
                let phase = RootScalar::root_of_unity(order, -((a as i64) * (k as i64)));
                p = p.add(&pw.scale(&phase))?;
            }
            let p = p.scale(&inv_n.clone());
            if !p.is_zero() {
                // Spectral projections are idempotent and self-adjoint.
                debug_assert!(p.multiply(&p).unwrap().equals(&p).unwrap());
                projections.push((a, p));
            }
        }
        member_projections.push(projections);
    }
    // Joint projections as exact products, pruning zero intersections.
    let mut joint: Vec<(Vec<u32>, CKElement)> = vec![(Vec::new(), one.clone())];
    for projections in &member_projections {
        let mut next = Vec::new();
        for (tuple, p) in &joint {
            for (a, pa) in projections {
                let q = p.multiply(pa)?;
                if !q.is_zero() {
                    let mut t = tuple.clone();
                    t.push(*a);
                    next.push((t, q));
                }
            }
        }
        joint = next;
    }
    joint.sort_by(|x, y| x.0.cmp(&y.0));
    {
        let mut sum = CKElement::zero(&matrix);
        for (_, p) in &joint {
            sum = sum.add(p)?;
        }
        debug_assert!(sum.equals(&one).unwrap());
    }
    // Common frame level.
    let needed = |x: &CKElement| -> usize {
        match x.expand_to_level(0) {
            Ok(_) => 0,
            Err(AlgebraError::LevelTooSmall { required, .. }) => required,
            Err(_) => 0,
        }
    };
    let mut level = 1;
    for u in family {
        level = level.max(needed(u.element()));
    }
    for (_, p) in &joint {
        level = level.max(needed(p));
    }
    let frame_words = matrix.admissible_words(level, None, None);
    let mut blocks = Vec::new();
    let mut certificate = 0.0_f64;
    for t in matrix.letters() {
        let words: Vec<Word> = frame_words
            .iter()
            .filter(|w| *w.last().unwrap() == t)
            .cloned()
            .collect();
        if words.is_empty() {
            continue;
        }
        let index: alloc::collections::BTreeMap<&Word, usize> =
            words.iter().enumerate().map(|(i, w)| (w, i)).collect();
        let numeric = |x: &CKElement| -> Result<CMat, EndoError> {
            let lf = x.expand_to_level(level)?;
            let mut mat = CMat::zeros(words.len(), words.len());
            for ((mu, nu), c) in lf.terms() {
                if mu.last() == Some(&t) {
                    mat[(index[mu], index[nu])] = c.to_complex();
                }
            }
            Ok(mat)
        };
        // Orthonormal bases of the joint eigenspaces, stacked by tuple.
        let mut rows: Vec<Vec<crate::linalg::C64>> = Vec::new();
        for (_, p) in &joint {
            let lf = p.expand_to_level(level)?;
            let rank: i64 = {
                let mut acc = RootScalar::zero();
                for ((mu, nu), c) in lf.terms() {
                    if mu == nu && mu.last() == Some(&t) {
                        acc = acc.add(c);
                    }
                }
                acc.as_rational()
                    .and_then(|q| if q.is_integer() { q.to_integer().to_i64() } else { None })
                    .expect("projection rank must be a nonnegative integer")
            };
            if rank == 0 {
                continue;
            }
            let pb = numeric(p)?;
            rows.extend(orthonormal_column_basis(&pb, rank as usize));
        }
        debug_assert_eq!(rows.len(), words.len());
        let mut w = CMat::zeros(words.len(), words.len());
        for (r, basis_vec) in rows.iter().enumerate() {
            for (c, z) in basis_vec.iter().enumerate() {
                // Conjugator rows are the conjugated eigenbasis.
                w[(r, c)] = z.conj();
            }
        }
        for u in family {
            let ub = numeric(u.element())?;
            let conj = w.mul(&ub).mul(&w.adjoint());
            certificate = certificate.max(conj.offdiag_mass());
        }
        blocks.push(DiagBlock { terminal: t, words, w });
    }
    Ok(Diagonalization { level, blocks, certificate, projections: joint })
}
