//! Finite-dimensional Rokhlin models and the tower averaging estimate.
//!
//! A model is a block-matrix algebra with an automorphism that cyclically
//! permutes two towers of projections of coprime lengths `r` and `r + 1`,
//! together with a finite-order unitary whose shifted copies commute. The
//! averaging construction discretizes the spectral paths of the chain
//! entries `u_r` and `u_(r+1)` along the towers and assembles the unitary
//!
//! `z = sum_k u_k a^k(z0(k/r)) e_k + sum_l u_l a^l(z1(l/(r+1))) f_l`;
//!
//! telescoping then bounds `|| z a(z)* - u ||` by `2 pi / r`. The towers
//! are inputs here, so the bound is reproduced exactly, block by block.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::linalg::{C64, CMat, ONE};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ModelError {
    InvariantViolated { what: String },
}

impl fmt::Display for ModelError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModelError::InvariantViolated { what } => write!(f, "model invariant violated: {what}"),
        }
    }
}

const TOL: f64 = 1e-10;

/// An element of the block-matrix algebra.
#[derive(Debug, Clone)]
pub struct DElement {
    pub blocks: Vec<CMat>,
}

impl DElement {
    pub fn zeros(sizes: &[usize]) -> Self {
        DElement { blocks: sizes.iter().map(|&n| CMat::zeros(n, n)).collect() }
    }

    pub fn identity(sizes: &[usize]) -> Self {
        DElement { blocks: sizes.iter().map(|&n| CMat::identity(n)).collect() }
    }

    pub fn mul(&self, other: &DElement) -> DElement {
        DElement {
            blocks: self
                .blocks
                .iter()
                .zip(other.blocks.iter())
                .map(|(a, b)| a.mul(b))
                .collect(),
        }
    }

    pub fn add(&self, other: &DElement) -> DElement {
        DElement {
            blocks: self
                .blocks
                .iter()
                .zip(other.blocks.iter())
                .map(|(a, b)| a.add(b))
                .collect(),
        }
    }

    pub fn sub(&self, other: &DElement) -> DElement {
        DElement {
            blocks: self
                .blocks
                .iter()
                .zip(other.blocks.iter())
                .map(|(a, b)| a.sub(b))
                .collect(),
        }
    }

    pub fn adjoint(&self) -> DElement {
        DElement { blocks: self.blocks.iter().map(|b| b.adjoint()).collect() }
    }

    pub fn scale(&self, s: C64) -> DElement {
        DElement { blocks: self.blocks.iter().map(|b| b.scale(s)).collect() }
    }

    /// Operator norm: the largest block spectral norm.
    pub fn opnorm(&self) -> f64 {
        self.blocks.iter().map(|b| b.opnorm()).fold(0.0, f64::max)
    }

    pub fn distance(&self, other: &DElement) -> f64 {
        self.sub(other).opnorm()
    }
}

/// Automorphism: a permutation of equal-sized blocks composed with a
/// unitary conjugation on arrival.
#[derive(Debug, Clone)]
pub struct ModelAut {
    /// Block `b` maps onto block `perm[b]`.
    pub perm: Vec<usize>,
    /// Conjugating unitary at the target block.
    pub conj: Vec<CMat>,
}

impl ModelAut {
    pub fn apply(&self, x: &DElement) -> DElement {
        let mut blocks: Vec<CMat> = x.blocks.iter().map(|b| CMat::zeros(b.rows, b.cols)).collect();
        for (b, m) in x.blocks.iter().enumerate() {
            let target = self.perm[b];
            let v = &self.conj[target];
            blocks[target] = v.mul(m).mul(&v.adjoint());
        }
        DElement { blocks }
    }

    pub fn apply_power(&self, x: &DElement, k: usize) -> DElement {
        let mut acc = x.clone();
        for _ in 0..k {
            acc = self.apply(&acc);
        }
        acc
    }
}

/// Two cyclic towers of lengths `r` and `r + 1` with an automorphism
/// shifting each, and a finite-order unitary.
#[derive(Debug, Clone)]
pub struct RokhlinModel {
    pub sizes: Vec<usize>,
    pub r: usize,
    pub order: u32,
    pub aut: ModelAut,
    /// Tower projections `e_0 .. e_(r-1)` (full blocks of the first cycle).
    pub e: Vec<DElement>,
    /// Tower projections `f_0 .. f_r` (full blocks of the second cycle).
    pub f: Vec<DElement>,
    pub u: DElement,
}

fn block_indicator(sizes: &[usize], which: usize) -> DElement {
    let mut el = DElement::zeros(sizes);
    el.blocks[which] = CMat::identity(sizes[which]);
    el
}

impl RokhlinModel {
    /// Scalar model: functions on the disjoint union of two cycles, the
    /// automorphism rotating each cycle by one. The unitary is a primitive
    /// root of unity at one position of each cycle, so the chain entry
    /// `u_r` restricted to the first cycle is the constant holonomy.
    pub fn scalar_cycles(r: usize, order: u32) -> Self {
        assert!(r >= 2 && order >= 1);
        let sizes = vec![1usize; 2 * r + 1];
        let mut perm: Vec<usize> = Vec::with_capacity(2 * r + 1);
        for b in 0..r {
            perm.push((b + 1) % r);
        }
        for b in 0..=r {
            perm.push(r + (b + 1) % (r + 1));
        }
        let conj = sizes.iter().map(|&n| CMat::identity(n)).collect();
        let e: Vec<DElement> = (0..r).map(|i| block_indicator(&sizes, i)).collect();
        let f: Vec<DElement> = (0..=r).map(|j| block_indicator(&sizes, r + j)).collect();
        let mut u = DElement::identity(&sizes);
        let zeta = C64::unit(1.0 / order as f64);
        u.blocks[0] = CMat::from_rows(&[vec![zeta]]);
        u.blocks[r] = CMat::from_rows(&[vec![zeta]]);
        RokhlinModel { sizes, r, order, aut: ModelAut { perm, conj }, e, f, u }
    }

    /// Two-by-two block model: same cycle structure with 2x2 blocks, a
    /// rotated unitary at one position of each cycle, and nontrivial
    /// conjugators chosen in the commutant of that unitary so the shifted
    /// copies still commute.
    pub fn block2_cycles(r: usize, order: u32) -> Self {
        assert!(r >= 2 && order >= 1);
        let sizes = vec![2usize; 2 * r + 1];
        let mut perm: Vec<usize> = Vec::with_capacity(2 * r + 1);
        for b in 0..r {
            perm.push((b + 1) % r);
        }
        for b in 0..=r {
            perm.push(r + (b + 1) % (r + 1));
        }
        let c = libm::cos(0.6);
        let s = libm::sin(0.6);
        let w = CMat::from_rows(&[
            vec![C64::real(c), C64::real(-s)],
            vec![C64::real(s), C64::real(c)],
        ]);
        let diag = |a: C64, b: C64| {
            CMat::from_rows(&[vec![a, C64::real(0.0)], vec![C64::real(0.0), b]])
        };
        let zeta = C64::unit(1.0 / order as f64);
        let u0 = w.mul(&diag(zeta, ONE)).mul(&w.adjoint());
        let conj: Vec<CMat> = (0..sizes.len())
            .map(|b| {
                let phase = diag(C64::unit(0.13 * b as f64), C64::unit(0.31 * b as f64));
                w.mul(&phase).mul(&w.adjoint())
            })
            .collect();
        let e: Vec<DElement> = (0..r).map(|i| block_indicator(&sizes, i)).collect();
        let f: Vec<DElement> = (0..=r).map(|j| block_indicator(&sizes, r + j)).collect();
        let mut u = DElement::identity(&sizes);
        u.blocks[0] = u0.clone();
        u.blocks[r] = u0;
        RokhlinModel { sizes, r, order, aut: ModelAut { perm, conj }, e, f, u }
    }

    /// Chain entry `u_k = u a(u) ... a^(k-1)(u)`.
    pub fn chain(&self, k: usize) -> DElement {
        let mut acc = DElement::identity(&self.sizes);
        let mut shifted = self.u.clone();
        for i in 0..k {
            acc = acc.mul(&shifted);
            if i + 1 < k {
                shifted = self.aut.apply(&shifted);
            }
        }
        acc
    }

    /// Checks every structural invariant: partition of unity, exact tower
    /// shifts, unitarity and order of `u`, commutation of the shifted
    /// copies, and commutation of the chain with the tower projections.
    pub fn validate(&self) -> Result<(), ModelError> {
        let fail = |what: &str| {
            Err(ModelError::InvariantViolated { what: String::from(what) })
        };
        let one = DElement::identity(&self.sizes);
        let mut sum = DElement::zeros(&self.sizes);
        for p in self.e.iter().chain(self.f.iter()) {
            sum = sum.add(p);
        }
        if sum.distance(&one) > TOL {
            return fail("towers do not sum to the unit");
        }
        for (i, e) in self.e.iter().enumerate() {
            let next = &self.e[(i + 1) % self.r];
            if self.aut.apply(e).distance(next) > TOL {
                return fail("first tower is not shifted cyclically");
            }
        }
        for (j, f) in self.f.iter().enumerate() {
            let next = &self.f[(j + 1) % (self.r + 1)];
            if self.aut.apply(f).distance(next) > TOL {
                return fail("second tower is not shifted cyclically");
            }
        }
        for v in &self.aut.conj {
            if v.mul(&v.adjoint()).sub(&CMat::identity(v.rows)).max_abs() > TOL {
                return fail("conjugator is not unitary");
            }
        }
        if self.u.mul(&self.u.adjoint()).distance(&one) > TOL {
            return fail("u is not unitary");
        }
        let mut pow = one.clone();
        for _ in 0..self.order {
            pow = pow.mul(&self.u);
        }
        if pow.distance(&one) > TOL {
            return fail("u does not have the declared order");
        }
        let shifted: Vec<DElement> = (0..=self.r + 1)
            .map(|k| self.aut.apply_power(&self.u, k))
            .collect();
        for a in 0..shifted.len() {
            for b in (a + 1)..shifted.len() {
                let ab = shifted[a].mul(&shifted[b]);
                let ba = shifted[b].mul(&shifted[a]);
                if ab.distance(&ba) > TOL {
                    return fail("shifted copies of u do not commute");
                }
            }
        }
        for k in 0..=self.r + 1 {
            let uk = self.chain(k);
            for p in self.e.iter().chain(self.f.iter()) {
                if uk.mul(p).distance(&p.mul(&uk)) > TOL {
                    return fail("chain does not commute with the towers");
                }
            }
        }
        Ok(())
    }

    /// Numeric spectral path of a finite-order unitary via Fourier
    /// averaging; coefficients use the principal angles.
    fn spectral_path(&self, x: &DElement) -> Result<ModelPath, ModelError> {
        let n = self.order;
        let one = DElement::identity(&self.sizes);
        let mut powers = Vec::with_capacity(n as usize);
        let mut acc = one.clone();
        for _ in 0..n {
            powers.push(acc.clone());
            acc = acc.mul(x);
        }
        if acc.distance(&one) > TOL {
            return Err(ModelError::InvariantViolated {
                what: String::from("path input does not have the declared order"),
            });
        }
        let mut terms = Vec::new();
        for a in 0..n {
            let mut p = DElement::zeros(&self.sizes);
            for (k, pw) in powers.iter().enumerate() {
                let phase = C64::unit(-((a as f64) * (k as f64)) / n as f64)
                    .scale(1.0 / n as f64);
                p = p.add(&pw.scale(phase));
            }
            let mass: f64 = p.blocks.iter().map(|b| b.frobenius()).sum();
            if mass > 1e-9 {
                let signed = if 2 * a <= n { a as i64 } else { a as i64 - n as i64 };
                terms.push((signed as f64 / n as f64, p));
            }
        }
        Ok(ModelPath { terms })
    }
}

/// Spectral path in the model: `z(s) = sum exp(2 pi i (1-s) theta) P`.
pub struct ModelPath {
    terms: Vec<(f64, DElement)>,
}

impl ModelPath {
    pub fn eval(&self, s: f64, sizes: &[usize]) -> DElement {
        let mut acc = DElement::zeros(sizes);
        for (theta, p) in &self.terms {
            acc = acc.add(&p.scale(C64::unit((1.0 - s) * theta)));
        }
        acc
    }
}

#[derive(Debug, Clone)]
pub struct AveragingReport {
    /// `|| z a(z)* - u ||`.
    pub defect: f64,
    /// `2 pi / r`.
    pub bound: f64,
    /// `|| z z* - 1 ||`; sanity on the assembled unitary.
    pub unitarity_error: f64,
    pub passes: bool,
}

/// Runs the averaging construction in the model and measures the defect
/// against the telescoping bound.
pub fn build_averaged_unitary(model: &RokhlinModel) -> Result<(DElement, AveragingReport), ModelError> {
    model.validate()?;
    let r = model.r;
    let chain: Vec<DElement> = (0..=r + 1).map(|k| model.chain(k)).collect();
    let path0 = model.spectral_path(&chain[r])?;
    let path1 = model.spectral_path(&chain[r + 1])?;
    let mut z = DElement::zeros(&model.sizes);
    for (k, e) in model.e.iter().enumerate() {
        let sample = path0.eval(k as f64 / r as f64, &model.sizes);
        let part = chain[k]
            .mul(&model.aut.apply_power(&sample, k))
            .mul(e);
        z = z.add(&part);
    }
    for (l, f) in model.f.iter().enumerate() {
        let sample = path1.eval(l as f64 / (r + 1) as f64, &model.sizes);
        let part = chain[l]
            .mul(&model.aut.apply_power(&sample, l))
            .mul(f);
        z = z.add(&part);
    }
    let one = DElement::identity(&model.sizes);
    let unitarity_error = z.mul(&z.adjoint()).distance(&one);
    let defect = z.mul(&model.aut.apply(&z).adjoint()).distance(&model.u);
    let bound = 2.0 * core::f64::consts::PI / r as f64;
    let passes = defect <= bound;
    Ok((z, AveragingReport { defect, bound, unitarity_error, passes }))
}
