//! The singular series `c_f = prod_P (1 - rho(P^2)/||P||^2)`: truncated
//! product, explicit tail bound and a two-sided enclosure.
//!
//! All bounds are exact rationals. With `k = deg_x f` and `R` from
//! [`compute_r`], a prime `P` not dividing `R` has `rho(P^2) <= k` and a prime
//! dividing `R` has `rho(P^2) <= k ||P||`, so
//!
//! ```text
//! S(m0) = sum_{deg P >= m0} rho(P^2)/||P||^2
//!      <= k sum_{d >= m0} pi_q(d)/q^{2d} + k sum_{P | R, deg P >= m0} 1/||P||.
//! ```
//!
//! The first sum is evaluated to degree `m0 + TAIL_TERMS` and the rest
//! bounded by `sum_{d > D} q^{-d}/d <= q^{-(D+1)} / ((D+1)(1 - 1/q))`.
//! The same two bounds show that an obstruction `rho(P^2) = ||P||^2` is only
//! possible when `||P|| <= k`, so scanning those primes certifies its absence.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;

use crate::bivariate::{compute_r, BivarPoly};
use crate::error::{Error, Result};
use crate::ff_poly::{enumerate_primes, prime_count, FqPoly, PrimePoly};
use crate::options::Limits;
use crate::residue::{rho_table, RhoTable};

/// Number of degrees summed explicitly in the tail before the geometric bound.
const TAIL_TERMS: usize = 24;

pub fn ratio(num: u128, den: u128) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

fn qpow(q: u128, e: usize) -> BigInt {
    num_traits::pow(BigInt::from(q), e)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SingularSeriesResult {
    pub m0: usize,
    /// `prod_{deg P < m0} (1 - rho(P^2)/||P||^2)`.
    pub partial_product: BigRational,
    /// `sum_{deg P < m0} rho(P^2)/||P||^2`.
    pub partial_sum: BigRational,
    pub tail_bound: BigRational,
    pub c_lo: BigRational,
    pub c_hi: BigRational,
    pub per_prime: Vec<RhoTable>,
    pub obstruction: Option<PrimePoly>,
    /// `R(t)`; absent when `f` is not square-free.
    pub r: Option<FqPoly>,
}

impl SingularSeriesResult {
    /// `c_lo` rounded down to an `f64`.
    pub fn c_lo_f64(&self) -> f64 {
        round_down(&self.c_lo)
    }

    /// `c_hi` rounded up to an `f64`.
    pub fn c_hi_f64(&self) -> f64 {
        round_up(&self.c_hi)
    }

    pub fn contains(&self, x: &BigRational) -> bool {
        &self.c_lo <= x && x <= &self.c_hi
    }
}

/// Largest `f64` not above `x` (up to a two-ulp margin), clamped at 0.
pub fn round_down(x: &BigRational) -> f64 {
    if x.is_zero() {
        return 0.0;
    }
    let v = x.to_f64().unwrap_or(0.0);
    v.next_down().next_down().max(0.0)
}

/// Smallest `f64` not below `x` (up to a two-ulp margin).
pub fn round_up(x: &BigRational) -> f64 {
    if x.is_zero() {
        return 0.0;
    }
    let v = x.to_f64().unwrap_or(f64::INFINITY);
    v.next_up().next_up()
}

/// Square-free `f` gives `Some(R)`; other nonzero `f` gives `None`.
fn r_if_squarefree(f: &BivarPoly) -> Result<Option<FqPoly>> {
    if f.is_zero() {
        return Err(Error::ZeroInput("singular series of the zero polynomial"));
    }
    if f.is_squarefree()? {
        Ok(Some(compute_r(f)?))
    } else {
        Ok(None)
    }
}

fn tables_for(f: &BivarPoly, primes: &[PrimePoly], r: Option<&FqPoly>, limits: &Limits) -> Result<Vec<RhoTable>> {
    // Without R every prime counts as dividing it: no Hensel shortcut.
    let zero = FqPoly::zero(f.field());
    let r = r.unwrap_or(&zero);
    primes
        .par_iter()
        .map(|p| rho_table(f, p, r, limits.residue_scan, limits.seed))
        .collect()
}

fn primes_of_degree_range(f: &BivarPoly, lo: usize, hi: usize) -> Vec<PrimePoly> {
    (lo.max(1)..hi).flat_map(|d| enumerate_primes(f.field(), d)).collect()
}

/// `v_1 = sum_{deg P < m0} rho(P^2)/||P||^2` with the per-prime tables.
pub fn singular_sum_partial(f: &BivarPoly, m0: usize, limits: &Limits) -> Result<(BigRational, Vec<RhoTable>)> {
    let r = r_if_squarefree(f)?;
    let primes = primes_of_degree_range(f, 1, m0);
    let tables = tables_for(f, &primes, r.as_ref(), limits)?;
    let sum = tables
        .iter()
        .fold(BigRational::zero(), |acc, t| acc + ratio(t.rho_p2, t.prime.norm() * t.prime.norm()));
    Ok((sum, tables))
}

/// Rigorous upper bound on `S(m0)` for square-free `f` with resultant data `r`.
pub fn tail_bound_with_r(f: &BivarPoly, m0: usize, r: &FqPoly) -> BigRational {
    let k = f.deg_x().unwrap_or(0) as u128;
    if k == 0 {
        // f = c(t) square-free: no value is divisible by a square.
        return BigRational::zero();
    }
    let q = f.field().q() as u128;
    let start = m0.max(1);
    let last = start + TAIL_TERMS;
    let mut sum = BigRational::zero();
    for d in start..=last {
        let pi = BigInt::from(prime_count(q as u64, d as u32));
        sum += BigRational::new(pi, qpow(q, 2 * d));
    }
    // sum_{d > last} q^{-d}/d <= q^{-(last+1)} / ((last+1)(1 - 1/q))
    sum += BigRational::new(
        BigInt::from(q),
        qpow(q, last + 1) * BigInt::from((last + 1) as u128) * BigInt::from(q - 1),
    );
    // Primes dividing R of degree >= m0.
    for (d, part) in r.radical().distinct_degree(None) {
        if d >= start {
            let count = part.degree().unwrap_or(0) / d;
            sum += BigRational::new(BigInt::from(count as u128), qpow(q, d));
        }
    }
    sum * BigRational::from_integer(BigInt::from(k))
}

/// Rigorous upper bound on the tail `S(m0)`; requires square-free `f`.
pub fn tail_bound(f: &BivarPoly, m0: usize) -> Result<BigRational> {
    let r = compute_r(f)?;
    Ok(tail_bound_with_r(f, m0, &r))
}

/// Enclosure `[c_lo, c_hi]` of `c_f`.
///
/// `c_hi` is the product over primes of degree below `m0` and
/// `c_lo = c_hi * max(0, 1 - tail)`, using `prod (1 - s_i) >= 1 - sum s_i`.
/// An obstructed prime gives `[0, 0]`. For square-free `f` the primes with
/// `||P|| <= deg_x f` are also examined, which rules out obstructions
/// everywhere else. A non-square-free `f` without an obstruction below `m0`
/// is rejected with `NotSquarefree`.
pub fn c_f_enclosure(f: &BivarPoly, m0: usize, limits: &Limits) -> Result<SingularSeriesResult> {
    let r = r_if_squarefree(f)?;
    let primes = primes_of_degree_range(f, 1, m0);
    let tables = tables_for(f, &primes, r.as_ref(), limits)?;
    let mut partial_product = BigRational::one();
    let mut partial_sum = BigRational::zero();
    let mut obstruction = None;
    for t in &tables {
        let n2 = t.prime.norm() * t.prime.norm();
        let s = ratio(t.rho_p2, n2);
        partial_product *= BigRational::one() - &s;
        partial_sum += s;
        if t.rho_p2 == n2 && obstruction.is_none() {
            obstruction = Some(t.prime.clone());
        }
    }
    if obstruction.is_none() && r.is_some() {
        let k = f.deg_x().unwrap_or(0) as u128;
        let q = f.field().q() as u128;
        let mut d = m0.max(1);
        while q.checked_pow(d as u32).is_some_and(|n| n <= k) {
            let extra = tables_for(f, &enumerate_primes(f.field(), d), r.as_ref(), limits)?;
            obstruction = extra
                .into_iter()
                .find(|t| t.rho_p2 == t.prime.norm() * t.prime.norm())
                .map(|t| t.prime);
            if obstruction.is_some() {
                break;
            }
            d += 1;
        }
    }
    let (tail, c_lo, c_hi) = match (&obstruction, &r) {
        (Some(_), r) => {
            let tail = r
                .as_ref()
                .map(|r| tail_bound_with_r(f, m0, r))
                .unwrap_or_else(BigRational::zero);
            (tail, BigRational::zero(), BigRational::zero())
        }
        (None, Some(r)) => {
            let tail = tail_bound_with_r(f, m0, r);
            let factor = BigRational::one() - &tail;
            let c_lo = if factor.is_positive() {
                &partial_product * factor
            } else {
                BigRational::zero()
            };
            (tail, c_lo, partial_product.clone())
        }
        (None, None) => return Err(Error::NotSquarefree),
    };
    Ok(SingularSeriesResult {
        m0,
        partial_product,
        partial_sum,
        tail_bound: tail,
        c_lo,
        c_hi,
        per_prime: tables,
        obstruction,
        r,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ff_poly::FieldSpec;

    fn bv(f: &FieldSpec, cs: &[&[u32]]) -> BivarPoly {
        BivarPoly::new(f, cs.iter().map(|c| FqPoly::from_ints(f, c)).collect())
    }

    #[test]
    fn partial_sums() {
        let f2 = FieldSpec::prime(2).unwrap();
        let lim = Limits::default();
        // t and t + 1 each contribute rho(P^2)/||P||^2 = 1/4.
        let (v, _) = singular_sum_partial(&bv(&f2, &[&[], &[1]]), 2, &lim).unwrap();
        assert_eq!(v, ratio(1, 2));
        for m0 in 0..4 {
            let (v, _) = singular_sum_partial(&bv(&f2, &[&[1]]), m0, &lim).unwrap();
            assert!(v.is_zero());
        }
        let f3 = FieldSpec::prime(3).unwrap();
        let (v, tables) = singular_sum_partial(&bv(&f3, &[&[0, 2], &[], &[1]]), 2, &lim).unwrap();
        assert_eq!(tables[0].rho_p2, 0);
        // x^2 = t mod (t+1)^2: t = -1 + (t+1) is not a square mod t+1 (-1 is a non-residue mod 3).
        // x^2 = t mod (t+2)^2: t = 1 + (t+2), two roots lifting uniquely.
        let expected = ratio(tables[1].rho_p2 + tables[2].rho_p2, 9);
        assert_eq!(v, expected);
        assert_eq!(tables[1].rho_p2, 0);
        assert_eq!(tables[2].rho_p2, 2);
    }

    #[test]
    fn enclosure_of_x_contains_zeta_value() {
        let f3 = FieldSpec::prime(3).unwrap();
        let res = c_f_enclosure(&bv(&f3, &[&[], &[1]]), 4, &Limits::default()).unwrap();
        assert!(res.contains(&ratio(2, 3)));
        assert!(res.obstruction.is_none());
        assert!(res.c_lo > BigRational::zero());
    }

    #[test]
    fn obstruction_gives_zero() {
        // f = t^2 x + t^2 = t^2 (x + 1) over F_2.
        let f2 = FieldSpec::prime(2).unwrap();
        let f = bv(&f2, &[&[0, 0, 1], &[0, 0, 1]]);
        let res = c_f_enclosure(&f, 3, &Limits::default()).unwrap();
        assert_eq!(res.obstruction.as_ref().unwrap().to_string(), "t");
        assert!(res.c_lo.is_zero() && res.c_hi.is_zero());
        // x^2 is not square-free and has no single obstructed prime.
        assert!(matches!(
            c_f_enclosure(&bv(&f2, &[&[], &[], &[1]]), 3, &Limits::default()),
            Err(Error::NotSquarefree)
        ));
    }

    #[test]
    fn obstruction_beyond_m0_is_found() {
        // (x^2 + x)(x^2 + x + t) over F_2: both factors vanish mod t at every
        // argument, so every value is divisible by t^2.
        let f2 = FieldSpec::prime(2).unwrap();
        let f = bv(&f2, &[&[], &[0, 1], &[1, 1], &[], &[1]]);
        let res = c_f_enclosure(&f, 1, &Limits::default()).unwrap();
        assert!(res.per_prime.is_empty());
        assert!(res.obstruction.is_some());
        assert!(res.c_hi.is_zero());
    }

    #[test]
    fn tail_against_direct_sum() {
        // f = x, q = 2, m0 = 3: the bound dominates the sum to degree 12 and
        // stays below sum_{d >= 3} 2^{-d} = 1/4.
        let f2 = FieldSpec::prime(2).unwrap();
        let f = bv(&f2, &[&[], &[1]]);
        let tail = tail_bound(&f, 3).unwrap();
        let mut direct = BigRational::zero();
        for d in 3..=12 {
            direct += ratio(prime_count(2, d as u32), 1u128 << (2 * d));
        }
        assert!(tail >= direct);
        assert!(tail <= ratio(1, 4));
        let mut prev = tail;
        for m0 in 4..9 {
            let t = tail_bound(&f, m0).unwrap();
            assert!(t < prev);
            prev = t;
        }
    }

    #[test]
    fn rounding_is_outward() {
        let x = ratio(2, 3);
        assert!(round_down(&x) < 2.0 / 3.0);
        assert!(round_up(&x) > 2.0 / 3.0);
    }
}
