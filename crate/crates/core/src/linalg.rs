//! Minimal dense complex linear algebra.
//!
//! The matrices that show up here are small (AF-core blocks, Rokhlin-model
//! blocks), so a straightforward dense implementation with a cyclic Jacobi
//! eigensolver is both fast enough and fully deterministic. Operator norms
//! are computed as `sqrt(lambda_max(a* a))`.

use alloc::vec;
use alloc::vec::Vec;

/// Complex number with `f64` parts.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct C64 {
    pub re: f64,
    pub im: f64,
}

pub const ZERO: C64 = C64 { re: 0.0, im: 0.0 };
pub const ONE: C64 = C64 { re: 1.0, im: 0.0 };

impl C64 {
    pub fn new(re: f64, im: f64) -> Self {
        C64 { re, im }
    }

    pub fn real(re: f64) -> Self {
        C64 { re, im: 0.0 }
    }

    /// `exp(2*pi*i*t)`.
    pub fn unit(t: f64) -> Self {
        let a = 2.0 * core::f64::consts::PI * t;
        C64 { re: libm::cos(a), im: libm::sin(a) }
    }

    pub fn conj(self) -> Self {
        C64 { re: self.re, im: -self.im }
    }

    pub fn abs2(self) -> f64 {
        self.re * self.re + self.im * self.im
    }

    pub fn abs(self) -> f64 {
        libm::hypot(self.re, self.im)
    }

    pub fn scale(self, s: f64) -> Self {
        C64 { re: self.re * s, im: self.im * s }
    }

    pub fn is_zero(self) -> bool {
        self.re == 0.0 && self.im == 0.0
    }
}

impl core::ops::Add for C64 {
    type Output = C64;
    fn add(self, o: C64) -> C64 {
        C64 { re: self.re + o.re, im: self.im + o.im }
    }
}

impl core::ops::Sub for C64 {
    type Output = C64;
    fn sub(self, o: C64) -> C64 {
        C64 { re: self.re - o.re, im: self.im - o.im }
    }
}

impl core::ops::Mul for C64 {
    type Output = C64;
    fn mul(self, o: C64) -> C64 {
        C64 {
            re: self.re * o.re - self.im * o.im,
            im: self.re * o.im + self.im * o.re,
        }
    }
}

impl core::ops::Neg for C64 {
    type Output = C64;
    fn neg(self) -> C64 {
        C64 { re: -self.re, im: -self.im }
    }
}

impl core::ops::Div for C64 {
    type Output = C64;
    fn div(self, o: C64) -> C64 {
        let d = o.abs2();
        C64 {
            re: (self.re * o.re + self.im * o.im) / d,
            im: (self.im * o.re - self.re * o.im) / d,
        }
    }
}

/// Dense row-major complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct CMat {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<C64>,
}

impl CMat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        CMat { rows, cols, data: vec![ZERO; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = CMat::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = ONE;
        }
        m
    }

    pub fn from_rows(rows: &[Vec<C64>]) -> Self {
        let r = rows.len();
        let c = if r == 0 { 0 } else { rows[0].len() };
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            assert_eq!(row.len(), c);
            data.extend_from_slice(row);
        }
        CMat { rows: r, cols: c, data }
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn mul(&self, other: &CMat) -> CMat {
        assert_eq!(self.cols, other.rows);
        let mut out = CMat::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] = out[(i, j)] + a * other[(k, j)];
                }
            }
        }
        out
    }

    pub fn add(&self, other: &CMat) -> CMat {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let mut out = self.clone();
        for (x, y) in out.data.iter_mut().zip(other.data.iter()) {
            *x = *x + *y;
        }
        out
    }

    pub fn sub(&self, other: &CMat) -> CMat {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let mut out = self.clone();
        for (x, y) in out.data.iter_mut().zip(other.data.iter()) {
            *x = *x - *y;
        }
        out
    }

    pub fn scale(&self, s: C64) -> CMat {
        let mut out = self.clone();
        for x in out.data.iter_mut() {
            *x = *x * s;
        }
        out
    }

    pub fn adjoint(&self) -> CMat {
        let mut out = CMat::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(j, i)] = self[(i, j)].conj();
            }
        }
        out
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, z| {
            let a = z.abs();
            if a > m { a } else { m }
        })
    }

    pub fn frobenius(&self) -> f64 {
        libm::sqrt(self.data.iter().map(|z| z.abs2()).sum())
    }

    /// Frobenius norm of the off-diagonal part.
    pub fn offdiag_mass(&self) -> f64 {
        let mut s = 0.0;
        for i in 0..self.rows {
            for j in 0..self.cols {
                if i != j {
                    s += self[(i, j)].abs2();
                }
            }
        }
        libm::sqrt(s)
    }

    /// Operator (spectral) norm.
    pub fn opnorm(&self) -> f64 {
        if self.rows == 0 || self.cols == 0 {
            return 0.0;
        }
        let g = self.adjoint().mul(self);
        let eigs = hermitian_eigenvalues(&g);
        let max = eigs.iter().fold(0.0_f64, |m, &x| if x > m { x } else { m });
        libm::sqrt(max.max(0.0))
    }

    /// Fast lower-ish estimate of the operator norm by power iteration on
    /// `a* a`; used in inner search loops where the Jacobi solver would be
    /// too slow. Deterministic: fixed start vector and iteration count.
    pub fn opnorm_power(&self, iters: usize) -> f64 {
        if self.rows == 0 || self.cols == 0 {
            return 0.0;
        }
        let n = self.cols;
        let mut v: Vec<C64> = (0..n)
            .map(|i| C64::new(1.0 + 0.3 * libm::sin(i as f64 + 1.0), 0.1 * libm::cos(2.0 * i as f64)))
            .collect();
        normalize(&mut v);
        let mut lam = 0.0_f64;
        for _ in 0..iters {
            let av = self.matvec(&v);
            let mut w = self.adjoint_matvec(&av);
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
            if (lam - prev).abs() <= 1e-13 * lam.max(1.0) {
                break;
            }
        }
        libm::sqrt(lam)
    }

    pub fn matvec(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(v.len(), self.cols);
        let mut out = vec![ZERO; self.rows];
        for i in 0..self.rows {
            let mut acc = ZERO;
            for j in 0..self.cols {
                acc = acc + self[(i, j)] * v[j];
            }
            out[i] = acc;
        }
        out
    }

    pub fn adjoint_matvec(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(v.len(), self.rows);
        let mut out = vec![ZERO; self.cols];
        for i in 0..self.rows {
            let vi = v[i];
            if vi.is_zero() {
                continue;
            }
            for j in 0..self.cols {
                out[j] = out[j] + self[(i, j)].conj() * vi;
            }
        }
        out
    }
}

impl core::ops::Index<(usize, usize)> for CMat {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.cols + j]
    }
}

impl core::ops::IndexMut<(usize, usize)> for CMat {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.cols + j]
    }
}

fn normalize(v: &mut [C64]) {
    let n = libm::sqrt(v.iter().map(|z| z.abs2()).sum());
    if n > 0.0 {
        for z in v.iter_mut() {
            *z = z.scale(1.0 / n);
        }
    }
}

/// Eigenvalues of a Hermitian matrix by cyclic Jacobi rotations.
///
/// The input is assumed Hermitian; only the values are returned, sorted
/// ascending. Converges quadratically; the sweep cap is generous.
pub fn hermitian_eigenvalues(h: &CMat) -> Vec<f64> {
    assert!(h.is_square());
    let n = h.rows;
    if n == 0 {
        return Vec::new();
    }
    let mut a = h.clone();
    for _sweep in 0..60 {
        let mut off = 0.0;
        for p in 0..n {
            for q in (p + 1)..n {
                off += a[(p, q)].abs2();
            }
        }
        if off <= 1e-30 * (1.0 + a.max_abs() * a.max_abs()) {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                if apq.abs() <= 1e-300 {
                    continue;
                }
                // Unitary rotation u = diag(phase, 1) * r(theta) annihilating
                // the (p, q) entry of the Hermitian block
                // [[app, apq], [conj(apq), aqq]], apq = |apq|*phase.
                let app = a[(p, p)].re;
                let aqq = a[(q, q)].re;
                let absapq = apq.abs();
                let phase = C64::new(apq.re / absapq, apq.im / absapq);
                let theta = 0.5 * libm::atan2(2.0 * absapq, app - aqq);
                let c = libm::cos(theta);
                let s = libm::sin(theta);
                // b = a * u
                for i in 0..n {
                    let aip = a[(i, p)];
                    let aiq = a[(i, q)];
                    a[(i, p)] = aip * phase.scale(c) + aiq.scale(s);
                    a[(i, q)] = aiq.scale(c) - aip * phase.scale(s);
                }
                // a' = u^* * b
                for j in 0..n {
                    let apj = a[(p, j)];
                    let aqj = a[(q, j)];
                    a[(p, j)] = apj * phase.conj().scale(c) + aqj.scale(s);
                    a[(q, j)] = aqj.scale(c) - apj * phase.conj().scale(s);
                }
            }
        }
    }
    let mut eigs: Vec<f64> = (0..n).map(|i| a[(i, i)].re).collect();
    eigs.sort_by(|x, y| x.partial_cmp(y).unwrap());
    eigs
}

/// Gram-Schmidt with column pivoting: returns an orthonormal basis of the
/// column span of `m`, truncated to `rank` vectors. Deterministic: among
/// columns of near-equal residual norm the lowest index wins.
pub fn orthonormal_column_basis(m: &CMat, rank: usize) -> Vec<Vec<C64>> {
    let mut cols: Vec<Vec<C64>> = (0..m.cols)
        .map(|j| (0..m.rows).map(|i| m[(i, j)]).collect())
        .collect();
    let mut basis: Vec<Vec<C64>> = Vec::new();
    while basis.len() < rank {
        // Pick the remaining column with the largest residual norm.
        let mut best = usize::MAX;
        let mut best_norm = 0.0;
        for (j, col) in cols.iter().enumerate() {
            let nrm: f64 = col.iter().map(|z| z.abs2()).sum();
            if nrm > best_norm * (1.0 + 1e-12) {
                best_norm = nrm;
                best = j;
            }
        }
        if best == usize::MAX || best_norm <= 1e-24 {
            break;
        }
        let mut v = cols.remove(best);
        // Re-orthogonalize twice for numerical hygiene.
        for _ in 0..2 {
            for b in &basis {
                let ip = inner(b, &v);
                for (x, y) in v.iter_mut().zip(b.iter()) {
                    *x = *x - *y * ip;
                }
            }
        }
        normalize(&mut v);
        for col in cols.iter_mut() {
            let ip = inner(&v, col);
            for (x, y) in col.iter_mut().zip(v.iter()) {
                *x = *x - *y * ip;
            }
        }
        basis.push(v);
    }
    basis
}

/// `<a, b>` with conjugation in the first slot.
pub fn inner(a: &[C64], b: &[C64]) -> C64 {
    let mut acc = ZERO;
    for (x, y) in a.iter().zip(b.iter()) {
        acc = acc + x.conj() * *y;
    }
    acc
}

/// Cayley transform `(i*h + 1)(i*h - 1)^{-1}`-style unitary built from a
/// Hermitian `h`; used to generate unitary perturbations `exp(i*eps*h)`
/// without a matrix exponential. `h` must be Hermitian.
pub fn cayley_unitary(h: &CMat) -> CMat {
    assert!(h.is_square());
    let n = h.rows;
    let i = C64::new(0.0, 0.5);
    // u = (1 + i*h/2)(1 - i*h/2)^{-1}
    let a = CMat::identity(n).add(&h.scale(i));
    let b = CMat::identity(n).sub(&h.scale(i));
    a.mul(&solve_inverse(&b))
}

/// Dense inverse by Gauss-Jordan with partial pivoting. Panics on singular
/// input; callers only pass well-conditioned matrices (1 - i*h/2 with small h).
fn solve_inverse(m: &CMat) -> CMat {
    assert!(m.is_square());
    let n = m.rows;
    let mut a = m.clone();
    let mut inv = CMat::identity(n);
    for col in 0..n {
        let mut piv = col;
        let mut best = a[(col, col)].abs();
        for r in (col + 1)..n {
            let v = a[(r, col)].abs();
            if v > best {
                best = v;
                piv = r;
            }
        }
        assert!(best > 1e-300, "singular matrix in solve_inverse");
        if piv != col {
            for j in 0..n {
                a.data.swap(col * n + j, piv * n + j);
                inv.data.swap(col * n + j, piv * n + j);
            }
        }
        let d = a[(col, col)];
        for j in 0..n {
            a[(col, j)] = a[(col, j)] / d;
            inv[(col, j)] = inv[(col, j)] / d;
        }
        for r in 0..n {
            if r == col {
                continue;
            }
            let f = a[(r, col)];
            if f.is_zero() {
                continue;
            }
            for j in 0..n {
                let x = a[(col, j)] * f;
                a[(r, j)] = a[(r, j)] - x;
                let y = inv[(col, j)] * f;
                inv[(r, j)] = inv[(r, j)] - y;
            }
        }
    }
    inv
}

/// Random Hermitian matrix with entries of magnitude about `scale`.
pub fn random_hermitian(n: usize, scale: f64, rng: &mut crate::rng::SplitMix64) -> CMat {
    let mut h = CMat::zeros(n, n);
    for i in 0..n {
        h[(i, i)] = C64::real(scale * rng.next_signed());
        for j in (i + 1)..n {
            let z = C64::new(scale * rng.next_signed(), scale * rng.next_signed());
            h[(i, j)] = z;
            h[(j, i)] = z.conj();
        }
    }
    h
}
