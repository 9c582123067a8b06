//! Root counts of `f(t, x)` modulo `P` and `P^2`.
//!
//! For a prime `P` of F_q[t], `rho(P^j)` counts residues `a mod P^j` with
//! `P^j | f(a)`. Roots mod `P` come from the residue field F_q[t]/(P); the
//! count mod `P^2` follows from the first-order expansion
//! `f(a + bP) = f(a) + bP f_x(a) mod P^2`.

use std::fmt;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::bivariate::BivarPoly;
use crate::error::{check_budget, Error, Result};
use crate::ff_poly::{FieldSpec, FiniteField, FqPoly, Poly, PrimePoly};

/// Residue fields up to this size are scanned directly when listing roots.
const ROOT_SCAN_THRESHOLD: u128 = 256;

/// The finite field F_q[t]/(P), elements represented by polynomials of
/// degree below `deg P`.
#[derive(Clone)]
pub struct ResidueField {
    inner: Arc<ResidueInner>,
}

struct ResidueInner {
    prime: PrimePoly,
    base: FieldSpec,
}

impl PartialEq for ResidueField {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.inner, &other.inner) || self.inner.prime == other.inner.prime
    }
}

impl fmt::Debug for ResidueField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}[t]/({})", self.inner.base, self.inner.prime)
    }
}

impl ResidueField {
    pub fn new(prime: &PrimePoly) -> Self {
        ResidueField {
            inner: Arc::new(ResidueInner {
                prime: prime.clone(),
                base: prime.field().clone(),
            }),
        }
    }

    pub fn prime(&self) -> &PrimePoly {
        &self.inner.prime
    }

    pub fn base(&self) -> &FieldSpec {
        &self.inner.base
    }

    /// `Q = ||P||`.
    pub fn cardinality(&self) -> u128 {
        self.inner.prime.norm()
    }

    pub fn reduce(&self, a: &FqPoly) -> FqPoly {
        a.rem(self.modulus()).expect("nonzero modulus")
    }

    /// Coefficient-wise image of `f` in `(F_q[t]/(P))[x]`.
    pub fn reduce_bivar(&self, f: &BivarPoly) -> Poly<ResidueField> {
        Poly::new(self, f.coeffs().iter().map(|c| self.reduce(c)).collect())
    }

    fn modulus(&self) -> &FqPoly {
        self.inner.prime.poly()
    }
}

impl FiniteField for ResidueField {
    type Elem = FqPoly;

    fn zero(&self) -> FqPoly {
        FqPoly::zero(&self.inner.base)
    }

    fn one(&self) -> FqPoly {
        FqPoly::one(&self.inner.base)
    }

    fn is_zero(&self, a: &FqPoly) -> bool {
        a.is_zero()
    }

    fn add(&self, a: &FqPoly, b: &FqPoly) -> FqPoly {
        a + b
    }

    fn sub(&self, a: &FqPoly, b: &FqPoly) -> FqPoly {
        a - b
    }

    fn neg(&self, a: &FqPoly) -> FqPoly {
        -a
    }

    fn mul(&self, a: &FqPoly, b: &FqPoly) -> FqPoly {
        a.mulmod(b, self.modulus())
    }

    fn inv(&self, a: &FqPoly) -> Option<FqPoly> {
        a.inv_mod(self.modulus())
    }

    fn characteristic(&self) -> u64 {
        self.inner.base.p() as u64
    }

    fn prime_degree(&self) -> u32 {
        self.inner.base.e() * self.inner.prime.degree() as u32
    }

    fn from_u64(&self, n: u64) -> FqPoly {
        FqPoly::constant(&self.inner.base, self.inner.base.from_u64(n))
    }

    fn random_elem<R: Rng + ?Sized>(&self, rng: &mut R) -> FqPoly {
        FqPoly::random(&self.inner.base, self.inner.prime.degree(), rng)
    }

    fn element(&self, index: u64) -> FqPoly {
        FqPoly::from_index(&self.inner.base, index as u128, self.inner.prime.degree())
    }
}

/// How a [`RhoTable`] entry for `P^2` was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RhoMethod {
    /// Unique lifts of the roots with `f_x(a) != 0 mod P` (requires `P` not dividing R).
    Hensel,
    /// Scan of all residues mod `P^2`.
    Exhaustive,
    /// Per-root lift test: roots with `f_x(a) = 0 mod P` contribute `||P||`
    /// lifts when `P^2 | f(a)` and none otherwise.
    LiftCheck,
}

impl RhoMethod {
    pub fn as_str(&self) -> &'static str {
        match self {
            RhoMethod::Hensel => "hensel",
            RhoMethod::Exhaustive => "exhaustive",
            RhoMethod::LiftCheck => "lift_check",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RhoTable {
    pub prime: PrimePoly,
    pub rho_p: u128,
    pub rho_p2: u128,
    pub method: RhoMethod,
}

/// `rho(P)`; equals `||P||` when `f = 0 mod P`.
pub fn count_roots_mod_p(f: &BivarPoly, p: &PrimePoly) -> u128 {
    let rf = ResidueField::new(p);
    let g = rf.reduce_bivar(f);
    if g.is_zero() {
        return p.norm();
    }
    g.count_distinct_roots() as u128
}

/// The distinct roots of `f mod P`, as canonical representatives in
/// ascending order. `seed` drives the randomized splitting; the output does
/// not depend on it.
pub fn enumerate_roots_mod_p(f: &BivarPoly, p: &PrimePoly, seed: u64) -> Result<Vec<FqPoly>> {
    let rf = ResidueField::new(p);
    let g = rf.reduce_bivar(f);
    if g.is_zero() {
        return Err(Error::ZeroReduction {
            prime: p.to_string(),
        });
    }
    if p.norm() <= ROOT_SCAN_THRESHOLD {
        let roots = (0..p.norm() as u64)
            .map(|i| rf.element(i))
            .filter(|a| rf.is_zero(&g.eval(a)))
            .collect();
        return Ok(roots);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok(g.roots(&mut rng))
}

/// `rho(P^2)` as the number of roots mod `P` with nonvanishing x-derivative,
/// each of which lifts uniquely. Valid for primes not dividing `r`, where
/// roots with vanishing x-derivative have no lift.
pub fn rho_p2_hensel(f: &BivarPoly, p: &PrimePoly, r: &FqPoly, seed: u64) -> Result<u128> {
    if p.poly().divides(r) {
        return Err(Error::PrecondViolated(format!("{p} divides R")));
    }
    let roots = enumerate_roots_mod_p(f, p, seed)?;
    let fx = f.partial_x();
    let count = roots
        .iter()
        .filter(|a| !fx.eval_mod(a, p.poly()).is_zero())
        .count();
    Ok(count as u128)
}

/// Exact `rho(P^2)` for any prime: nonsingular roots lift uniquely, singular
/// roots lift to all `||P||` classes or to none according to whether
/// `P^2 | f(a)`. When `f = P h` the count is `||P|| * rho_h(P)`.
pub fn rho_p2_lift_check(f: &BivarPoly, p: &PrimePoly, seed: u64) -> u128 {
    let norm = p.norm();
    let rf = ResidueField::new(p);
    if rf.reduce_bivar(f).is_zero() {
        let h = f.div_t_exact(p.poly()).expect("P divides every coefficient");
        return norm * count_roots_mod_p(&h, p);
    }
    let roots = enumerate_roots_mod_p(f, p, seed).expect("nonzero reduction");
    let p2 = p.poly() * p.poly();
    let fx = f.partial_x();
    roots
        .iter()
        .map(|a| {
            if !fx.eval_mod(a, p.poly()).is_zero() {
                1
            } else if f.eval_mod(a, &p2).is_zero() {
                norm
            } else {
                0
            }
        })
        .sum()
}

/// `rho(P^j)` by scanning all `||P||^j` residues, `j` in {1, 2}.
pub fn rho_prime_power_exhaustive(f: &BivarPoly, p: &PrimePoly, j: u32, budget: u128) -> Result<u128> {
    if !(1..=2).contains(&j) {
        return Err(Error::PrecondViolated(format!("exponent {j} not in {{1, 2}}")));
    }
    let size = p.norm().checked_pow(j).ok_or(Error::Overflow("residue count"))?;
    check_budget(format!("residues mod ({p})^{j}"), size, budget)?;
    let modulus = p.poly().pow(j as u64);
    let len = p.degree() * j as usize;
    let field = f.field().clone();
    let count = (0..size as u64)
        .into_par_iter()
        .filter(|&i| {
            let a = FqPoly::from_index(&field, i as u128, len);
            f.eval_mod(&a, &modulus).is_zero()
        })
        .count();
    Ok(count as u128)
}

/// `rho(D^2) = prod_{P | D} rho(P^2)` for square-free `D`, from per-prime tables.
pub fn rho_composite(d: &FqPoly, tables: &[RhoTable]) -> Result<u128> {
    if d.is_zero() {
        return Err(Error::ZeroInput("rho_composite"));
    }
    if !d.is_squarefree() {
        return Err(Error::PrecondViolated(format!("{d} is not square-free")));
    }
    let mut rest = d.monic();
    let mut acc: u128 = 1;
    for t in tables {
        if let Some(q) = rest.div_exact(t.prime.poly()) {
            acc = acc.checked_mul(t.rho_p2).ok_or(Error::Overflow("rho(D^2)"))?;
            rest = q;
        }
    }
    if !rest.is_one() {
        return Err(Error::MissingFactorTable(rest.to_string()));
    }
    Ok(acc)
}

/// Chooses the cheapest exact method for `rho(P^2)`: Hensel when `P` does not
/// divide `r`, otherwise a scan within `scan_budget`, otherwise the lift test.
pub fn rho_table(f: &BivarPoly, p: &PrimePoly, r: &FqPoly, scan_budget: u128, seed: u64) -> Result<RhoTable> {
    let rho_p = count_roots_mod_p(f, p);
    let (rho_p2, method) = if !p.poly().divides(r) && rho_p < p.norm() {
        (rho_p2_hensel(f, p, r, seed)?, RhoMethod::Hensel)
    } else if p.norm().checked_mul(p.norm()).is_some_and(|s| s <= scan_budget) {
        (rho_prime_power_exhaustive(f, p, 2, scan_budget)?, RhoMethod::Exhaustive)
    } else {
        (rho_p2_lift_check(f, p, seed), RhoMethod::LiftCheck)
    };
    Ok(RhoTable {
        prime: p.clone(),
        rho_p,
        rho_p2,
        method,
    })
}
