//! Symbolic and numerical computation engine for Cuntz-Krieger algebras.
//!
//! The crate works in the dense *-subalgebra of the Cuntz-Krieger algebra
//! `O_A` spanned by words `s_mu s_nu*` in the generating partial isometries,
//! with exact coefficients in a cyclotomic-rational field. On top of that
//! word arithmetic it provides:
//!
//! - validation and combinatorics of 0-1 matrices and finite graphs
//!   ([`matrix`]): aperiodicity exponents, admissible words, edge matrices;
//! - canonical forms, equality, leveled (AF-core) expansions and exact
//!   operator norms for degree-zero elements ([`element`]);
//! - the unitary/endomorphism correspondence, diagonal quasi-free actions of
//!   finite abelian groups, and joint diagonalization ([`endo`]);
//! - the canonical shift `phi(x) = sum_i s_i x s_i*`, its corner formulas,
//!   surjectivity obstruction and algebraic dilation ([`shift`]);
//! - cocycle chains, finite-order unitary paths, Rokhlin-tower averaging in
//!   finite-dimensional models with the `2*pi/r` defect bound, and a
//!   gradient-free witness search ([`cocycle`], [`rokhlin`]);
//! - K-groups via Smith normal form ([`ktheory`]);
//! - an independent truncated path-space representation used as a numerical
//!   oracle for the symbolic layer ([`oracle`]).
//!
//! The crate is `no_std` (with `alloc`); everything is deterministic and all
//! randomized procedures take explicit seeds.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod cocycle;
pub mod cyclotomic;
pub mod element;
pub mod endo;
pub mod ktheory;
pub mod linalg;
pub mod literal;
pub mod matrix;
pub mod oracle;
pub mod rng;
pub mod rokhlin;
pub mod shift;

pub use cyclotomic::RootScalar;
pub use element::{CKElement, Generator, LeveledForm};
pub use endo::{ActionSpec, EndoSpec, QFUnitary, VerifiedAction};
pub use matrix::{FiniteGraph, Word, ZeroOneMatrix};
