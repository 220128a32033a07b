//! Exact arithmetic in cyclotomic-rational fields `Q(zeta_N)`.
//!
//! A scalar is stored as a rational polynomial in `zeta_N` reduced modulo
//! the `N`-th cyclotomic polynomial, so the power basis
//! `1, zeta, ..., zeta^(phi(N)-1)` gives a canonical representation and
//! equality is plain coefficient comparison (after lifting both operands to
//! a common order). All arithmetic is exact; conversion to floating point
//! happens only at the boundary to the numerical layer.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::linalg::C64;

pub fn euler_phi(n: u32) -> u32 {
    let mut result = n;
    let mut m = n;
    let mut p = 2;
    while p * p <= m {
        if m % p == 0 {
            while m % p == 0 {
                m /= p;
            }
            result -= result / p;
        }
        p += 1;
    }
    if m > 1 {
        result -= result / m;
    }
    result
}

pub fn divisors(n: u32) -> Vec<u32> {
    let mut out: Vec<u32> = (1..=n).filter(|d| n % d == 0).collect();
    out.sort_unstable();
    out
}

/// Coefficients of the `n`-th cyclotomic polynomial, ascending degree,
/// computed by dividing `x^n - 1` by the cyclotomic polynomials of the
/// proper divisors of `n`.
pub fn cyclotomic_polynomial(n: u32) -> Vec<BigInt> {
    assert!(n >= 1);
    let divs = divisors(n);
    let mut phis: BTreeMap<u32, Vec<BigInt>> = BTreeMap::new();
    for &d in &divs {
        let mut num = vec![BigInt::zero(); d as usize + 1];
        num[0] = -BigInt::one();
        num[d as usize] = BigInt::one();
        for &e in &divs {
            if e < d && d % e == 0 {
                num = int_poly_div_exact(&num, &phis[&e]);
            }
        }
        phis.insert(d, num);
    }
    phis.remove(&n).unwrap()
}

/// Exact division of integer polynomials; the divisor must be monic and
/// divide evenly (guaranteed for cyclotomic factors).
fn int_poly_div_exact(num: &[BigInt], den: &[BigInt]) -> Vec<BigInt> {
    let dd = den.len() - 1;
    assert!(den[dd].is_one());
    let mut rem: Vec<BigInt> = num.to_vec();
    let qd = num.len() - 1 - dd;
    let mut quot = vec![BigInt::zero(); qd + 1];
    for k in (0..=qd).rev() {
        let c = rem[k + dd].clone();
        if !c.is_zero() {
            quot[k] = c.clone();
            for (i, d) in den.iter().enumerate() {
                rem[k + i] -= &c * d;
            }
        }
    }
    debug_assert!(rem.iter().all(|c| c.is_zero()));
    quot
}

/// An exact element of `Q(zeta_order)` over the reduced power basis.
#[derive(Debug, Clone)]
pub struct RootScalar {
    order: u32,
    coeffs: Vec<BigRational>,
}

impl RootScalar {
    pub fn zero() -> Self {
        RootScalar { order: 1, coeffs: vec![BigRational::zero()] }
    }

    pub fn one() -> Self {
        RootScalar { order: 1, coeffs: vec![BigRational::one()] }
    }

    pub fn from_integer(k: i64) -> Self {
        RootScalar { order: 1, coeffs: vec![BigRational::from_integer(BigInt::from(k))] }
    }

    pub fn from_rational(q: BigRational) -> Self {
        RootScalar { order: 1, coeffs: vec![q] }
    }

    pub fn rational(num: i64, den: i64) -> Self {
        assert!(den != 0);
        Self::from_rational(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    /// `zeta_order ^ exp`, stored at the minimal primitive order.
    pub fn root_of_unity(order: u32, exp: i64) -> Self {
        assert!(order >= 1);
        let e = exp.rem_euclid(order as i64) as u32;
        let g = e.gcd(&order);
        let (ord, e) = if e == 0 { (1, 0) } else { (order / g, e / g) };
        let mut poly = vec![BigRational::zero(); e as usize + 1];
        poly[e as usize] = BigRational::one();
        RootScalar { order: ord, coeffs: reduce(poly, ord) }
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    pub fn is_one(&self) -> bool {
        self.coeffs[0].is_one() && self.coeffs[1..].iter().all(|c| c.is_zero())
    }

    /// The rational part if the scalar is rational, else `None`.
    pub fn as_rational(&self) -> Option<BigRational> {
        if self.coeffs[1..].iter().all(|c| c.is_zero()) {
            Some(self.coeffs[0].clone())
        } else {
            None
        }
    }

    fn lifted(&self, target: u32) -> Vec<BigRational> {
        debug_assert!(target % self.order == 0);
        if target == self.order {
            return self.coeffs.clone();
        }
        let step = (target / self.order) as usize;
        let mut poly = vec![BigRational::zero(); target as usize];
        for (i, c) in self.coeffs.iter().enumerate() {
            if !c.is_zero() {
                poly[i * step] = c.clone();
            }
        }
        reduce(poly, target)
    }

    fn binary<F>(&self, other: &RootScalar, f: F) -> RootScalar
    where
        F: Fn(Vec<BigRational>, Vec<BigRational>, u32) -> Vec<BigRational>,
    {
        let order = self.order.lcm(&other.order);
        let a = self.lifted(order);
        let b = other.lifted(order);
        RootScalar { order, coeffs: f(a, b, order) }
    }

    pub fn add(&self, other: &RootScalar) -> RootScalar {
        self.binary(other, |a, b, _| {
            a.into_iter().zip(b).map(|(x, y)| x + y).collect()
        })
    }

    pub fn sub(&self, other: &RootScalar) -> RootScalar {
        self.binary(other, |a, b, _| {
            a.into_iter().zip(b).map(|(x, y)| x - y).collect()
        })
    }

    pub fn mul(&self, other: &RootScalar) -> RootScalar {
        self.binary(other, |a, b, order| {
            let mut prod = vec![BigRational::zero(); a.len() + b.len()];
            for (i, x) in a.iter().enumerate() {
                if x.is_zero() {
                    continue;
                }
                for (j, y) in b.iter().enumerate() {
                    if !y.is_zero() {
                        prod[i + j] += x * y;
                    }
                }
            }
            reduce(prod, order)
        })
    }

    pub fn neg(&self) -> RootScalar {
        RootScalar {
            order: self.order,
            coeffs: self.coeffs.iter().map(|c| -c.clone()).collect(),
        }
    }

    pub fn scale(&self, q: &BigRational) -> RootScalar {
        RootScalar {
            order: self.order,
            coeffs: self.coeffs.iter().map(|c| c * q).collect(),
        }
    }

    /// Complex conjugation, `zeta^k -> zeta^(order-k)`.
    pub fn conj(&self) -> RootScalar {
        let n = self.order as usize;
        let mut poly = vec![BigRational::zero(); n];
        for (i, c) in self.coeffs.iter().enumerate() {
            if !c.is_zero() {
                poly[(n - i) % n] += c;
            }
        }
        RootScalar { order: self.order, coeffs: reduce(poly, self.order) }
    }

    pub fn pow(&self, mut k: u32) -> RootScalar {
        let mut acc = RootScalar::one();
        let mut base = self.clone();
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            k >>= 1;
        }
        acc
    }

    pub fn eq(&self, other: &RootScalar) -> bool {
        self.sub(other).is_zero()
    }

    pub fn to_complex(&self) -> C64 {
        let mut acc = C64::new(0.0, 0.0);
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let x = c.to_f64().expect("rational out of f64 range");
            acc = acc + C64::unit(i as f64 / self.order as f64).scale(x);
        }
        acc
    }
}

impl PartialEq for RootScalar {
    fn eq(&self, other: &Self) -> bool {
        RootScalar::eq(self, other)
    }
}

impl Eq for RootScalar {}

/// Reduce a rational polynomial in `zeta_n`: fold exponents modulo `n`,
/// then take the remainder modulo the `n`-th cyclotomic polynomial. The
/// result has exactly `phi(n)` coefficients.
fn reduce(mut poly: Vec<BigRational>, n: u32) -> Vec<BigRational> {
    let n_us = n as usize;
    if poly.len() > n_us {
        for e in (n_us..poly.len()).rev() {
            if !poly[e].is_zero() {
                let c = core::mem::replace(&mut poly[e], BigRational::zero());
                poly[e % n_us] += c;
            }
        }
        poly.truncate(n_us);
    }
    let phi = euler_phi(n) as usize;
    if poly.len() > phi {
        let cyc: Vec<BigRational> = cyclotomic_polynomial(n)
            .into_iter()
            .map(BigRational::from_integer)
            .collect();
        for e in (phi..poly.len()).rev() {
            if poly[e].is_zero() {
                continue;
            }
            let c = core::mem::replace(&mut poly[e], BigRational::zero());
            for (i, d) in cyc.iter().enumerate().take(phi) {
                poly[e - phi + i] -= &c * d;
            }
        }
        poly.truncate(phi);
    }
    poly.resize(phi, BigRational::zero());
    poly
}

impl fmt::Display for RootScalar {
    /// Renders in the coefficient syntax used by element literals:
    /// `a/b`, `zN^k`, `a/b zN^k`, or a parenthesized sum of such monomials.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms: Vec<(usize, &BigRational)> = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .collect();
        if terms.is_empty() {
            return write!(f, "0");
        }
        let monomial = |f: &mut fmt::Formatter<'_>, c: &BigRational, e: usize, lead: bool| {
            let sign = if c.is_negative() { "-" } else if lead { "" } else { "+" };
            let a = c.abs();
            if e == 0 {
                write!(f, "{sign}{a}")
            } else if a.is_one() {
                write!(f, "{sign}z{}^{}", self.order, e)
            } else {
                write!(f, "{sign}{a} z{}^{}", self.order, e)
            }
        };
        if terms.len() == 1 {
            let (e, c) = terms[0];
            monomial(f, c, e, true)
        } else {
            write!(f, "(")?;
            for (idx, (e, c)) in terms.iter().enumerate() {
                monomial(f, c, *e, idx == 0)?;
            }
            write!(f, ")")
        }
    }
}
