//! Primes of F_q[t]: verified monic irreducibles, their enumeration, and the
//! arithmetic functions mu and nu.

use std::fmt;

use rayon::prelude::*;

use super::field::{FieldSpec, FiniteField};
use super::kernel;
use super::poly::FqPoly;
use crate::error::{Error, Result};

/// A monic irreducible polynomial with its norm `q^deg`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct PrimePoly {
    poly: FqPoly,
    degree: usize,
    norm: u128,
}

impl fmt::Debug for PrimePoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PrimePoly({})", self.poly)
    }
}

impl fmt::Display for PrimePoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.poly, f)
    }
}

impl PrimePoly {
    pub fn new(poly: FqPoly) -> Result<Self> {
        if !poly.is_monic() || !poly.is_irreducible() {
            return Err(Error::NotIrreducible(poly.to_string()));
        }
        Self::from_verified(poly)
    }

    fn from_verified(poly: FqPoly) -> Result<Self> {
        let degree = poly.degree().expect("nonzero");
        let norm = poly.norm().ok_or(Error::Overflow("prime norm"))?;
        Ok(PrimePoly { poly, degree, norm })
    }

    pub fn poly(&self) -> &FqPoly {
        &self.poly
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    /// `||P|| = q^deg P`.
    pub fn norm(&self) -> u128 {
        self.norm
    }

    pub fn field(&self) -> &FieldSpec {
        self.poly.field()
    }
}

/// All monic irreducibles of degree exactly `d`, in canonical order.
pub fn enumerate_primes(field: &FieldSpec, d: usize) -> Vec<PrimePoly> {
    assert!(d >= 1, "prime degree must be positive");
    let count = (field.q() as u64)
        .checked_pow(d as u32)
        .expect("prime enumeration beyond u64 range");
    let q = field.q() as u64;
    (0..count)
        .into_par_iter()
        .filter_map(|i| {
            let mut coeffs = Vec::with_capacity(d + 1);
            let mut rest = i;
            for _ in 0..d {
                coeffs.push((rest % q) as u32);
                rest /= q;
            }
            coeffs.push(1);
            if d > 1 && has_root(field, &coeffs) {
                return None;
            }
            kernel::is_irreducible_monic(field, &coeffs).then(|| {
                PrimePoly::from_verified(FqPoly::new(field, coeffs)).expect("small degree")
            })
        })
        .collect()
}

fn has_root(field: &FieldSpec, coeffs: &[u32]) -> bool {
    (0..field.q()).any(|a| {
        coeffs
            .iter()
            .rev()
            .fold(0u32, |acc, c| field.add(&field.mul(&acc, &a), c))
            == 0
    })
}

/// All primes of degree `< bound`, ordered by degree then canonically.
pub fn primes_below_degree(field: &FieldSpec, bound: usize) -> Vec<PrimePoly> {
    (1..bound).flat_map(|d| enumerate_primes(field, d)).collect()
}

/// Integer Moebius function.
pub fn mobius_int(n: u64) -> i32 {
    assert!(n >= 1);
    let mut n = n;
    let mut sign = 1;
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            n /= d;
            if n.is_multiple_of(d) {
                return 0;
            }
            sign = -sign;
        }
        d += 1;
    }
    if n > 1 {
        sign = -sign;
    }
    sign
}

/// Number of monic irreducibles of degree `d` over F_q:
/// `(1/d) sum_{e | d} mu(e) q^{d/e}`.
pub fn prime_count(q: u64, d: u32) -> u128 {
    assert!(d >= 1);
    let mut acc: i128 = 0;
    for e in 1..=d {
        if d.is_multiple_of(e) {
            acc += mobius_int(e as u64) as i128 * (q as i128).pow(d / e);
        }
    }
    (acc / d as i128) as u128
}

/// `(mu(D), nu(D))` for nonzero `D`: nu counts distinct prime factors, mu is
/// zero unless `D` is square-free.
pub fn mobius_nu(d: &FqPoly) -> Result<(i32, usize)> {
    if d.is_zero() {
        return Err(Error::ZeroInput("mobius_nu"));
    }
    let nu: usize = d
        .radical()
        .factor_degree_counts()
        .iter()
        .map(|&(_, c)| c)
        .sum();
    let mu = if d.is_squarefree() {
        if nu.is_multiple_of(2) {
            1
        } else {
            -1
        }
    } else {
        0
    };
    Ok((mu, nu))
}
