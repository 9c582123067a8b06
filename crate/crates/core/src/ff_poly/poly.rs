//! Dense univariate polynomials over a finite field.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use rand::Rng;

use super::field::{FieldSpec, FiniteField};
use crate::error::{Error, Result};

/// A polynomial over `F`, coefficients lowest degree first, with no trailing
/// zero coefficient. The zero polynomial has no coefficients and degree
/// `None`, which orders below every `Some(d)`.
#[derive(Clone)]
pub struct Poly<F: FiniteField> {
    field: F,
    coeffs: Vec<F::Elem>,
}

/// An element of F_q[t].
pub type FqPoly = Poly<FieldSpec>;

impl<F: FiniteField> PartialEq for Poly<F> {
    fn eq(&self, other: &Self) -> bool {
        self.coeffs == other.coeffs && self.field == other.field
    }
}

impl<F: FiniteField> Eq for Poly<F> {}

impl<F: FiniteField> PartialOrd for Poly<F> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Canonical order: by degree, then by coefficients from the top down. For
/// polynomials over F_q this is the order of the integer `sum c_i q^i`.
impl<F: FiniteField> Ord for Poly<F> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.coeffs.iter().rev().cmp(other.coeffs.iter().rev()))
    }
}

impl<F: FiniteField> fmt::Debug for Poly<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Poly{:?}", self.coeffs)
    }
}

impl<F: FiniteField> Poly<F> {
    pub fn new(field: &F, mut coeffs: Vec<F::Elem>) -> Self {
        while coeffs.last().is_some_and(|c| field.is_zero(c)) {
            coeffs.pop();
        }
        Poly {
            field: field.clone(),
            coeffs,
        }
    }

    pub fn zero(field: &F) -> Self {
        Poly {
            field: field.clone(),
            coeffs: Vec::new(),
        }
    }

    pub fn one(field: &F) -> Self {
        Self::constant(field, field.one())
    }

    pub fn constant(field: &F, c: F::Elem) -> Self {
        Self::new(field, vec![c])
    }

    /// `c * X^deg`.
    pub fn monomial(field: &F, c: F::Elem, deg: usize) -> Self {
        let mut coeffs = vec![field.zero(); deg + 1];
        coeffs[deg] = c;
        Self::new(field, coeffs)
    }

    /// The variable itself.
    pub fn var(field: &F) -> Self {
        Self::monomial(field, field.one(), 1)
    }

    /// The polynomial whose coefficient vector is the base-|F| expansion of
    /// `index`, padded to at most `len` coefficients. Enumerating `index`
    /// over `0..|F|^len` visits every polynomial of degree `< len` in
    /// canonical order.
    pub fn from_index(field: &F, mut index: u128, len: usize) -> Self {
        let q = field.order().expect("field order fits u128");
        let mut coeffs = Vec::with_capacity(len);
        for _ in 0..len {
            coeffs.push(field.element((index % q) as u64));
            index /= q;
        }
        Self::new(field, coeffs)
    }

    pub fn random<R: Rng + ?Sized>(field: &F, len: usize, rng: &mut R) -> Self {
        let coeffs = (0..len).map(|_| field.random_elem(rng)).collect();
        Self::new(field, coeffs)
    }

    pub fn field(&self) -> &F {
        &self.field
    }

    pub fn coeffs(&self) -> &[F::Elem] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<F::Elem> {
        self.coeffs
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// True for nonzero constants and zero.
    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    pub fn is_one(&self) -> bool {
        self.coeffs.len() == 1 && self.field.is_one(&self.coeffs[0])
    }

    pub fn is_monic(&self) -> bool {
        self.coeffs.last().is_some_and(|c| self.field.is_one(c))
    }

    /// Leading coefficient; panics on the zero polynomial.
    pub fn leading(&self) -> &F::Elem {
        self.coeffs.last().expect("leading coefficient of zero polynomial")
    }

    pub fn coeff(&self, i: usize) -> F::Elem {
        self.coeffs.get(i).cloned().unwrap_or_else(|| self.field.zero())
    }

    fn same_field(&self, other: &Self) -> Result<()> {
        if self.field == other.field {
            Ok(())
        } else {
            Err(Error::FieldMismatch)
        }
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        self.same_field(other)?;
        Ok(self.add_impl(other))
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        self.same_field(other)?;
        Ok(self.sub_impl(other))
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        self.same_field(other)?;
        Ok(self.mul_impl(other))
    }

    fn add_impl(&self, other: &Self) -> Self {
        let f = &self.field;
        let n = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..n)
            .map(|i| match (self.coeffs.get(i), other.coeffs.get(i)) {
                (Some(a), Some(b)) => f.add(a, b),
                (Some(a), None) => a.clone(),
                (None, Some(b)) => b.clone(),
                (None, None) => unreachable!(),
            })
            .collect();
        Self::new(f, coeffs)
    }

    fn sub_impl(&self, other: &Self) -> Self {
        let f = &self.field;
        let n = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..n)
            .map(|i| match (self.coeffs.get(i), other.coeffs.get(i)) {
                (Some(a), Some(b)) => f.sub(a, b),
                (Some(a), None) => a.clone(),
                (None, Some(b)) => f.neg(b),
                (None, None) => unreachable!(),
            })
            .collect();
        Self::new(f, coeffs)
    }

    fn mul_impl(&self, other: &Self) -> Self {
        let f = &self.field;
        if self.is_zero() || other.is_zero() {
            return Self::zero(f);
        }
        let mut out = vec![f.zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if f.is_zero(a) {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                let prod = f.mul(a, b);
                out[i + j] = f.add(&out[i + j], &prod);
            }
        }
        Self::new(f, out)
    }

    pub fn scale(&self, c: &F::Elem) -> Self {
        let f = &self.field;
        Self::new(f, self.coeffs.iter().map(|a| f.mul(a, c)).collect())
    }

    /// Multiplies by `X^k`.
    pub fn shift(&self, k: usize) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let mut coeffs = vec![self.field.zero(); k];
        coeffs.extend(self.coeffs.iter().cloned());
        Self::new(&self.field, coeffs)
    }

    /// Quotient and remainder with `self = q * d + r`, `deg r < deg d`.
    pub fn divmod(&self, d: &Self) -> Result<(Self, Self)> {
        self.same_field(d)?;
        let f = &self.field;
        let dd = d.degree().ok_or(Error::DivisionByZero)?;
        let Some(sd) = self.degree() else {
            return Ok((Self::zero(f), Self::zero(f)));
        };
        if sd < dd {
            return Ok((Self::zero(f), self.clone()));
        }
        let lead_inv = f.inv(d.leading()).expect("nonzero leading coefficient");
        let mut rem = self.coeffs.clone();
        let mut quot = vec![f.zero(); sd - dd + 1];
        for i in (0..=sd - dd).rev() {
            let c = f.mul(&rem[i + dd], &lead_inv);
            if f.is_zero(&c) {
                continue;
            }
            for (j, b) in d.coeffs.iter().enumerate() {
                let prod = f.mul(&c, b);
                rem[i + j] = f.sub(&rem[i + j], &prod);
            }
            quot[i] = c;
        }
        rem.truncate(dd);
        Ok((Self::new(f, quot), Self::new(f, rem)))
    }

    pub fn rem(&self, d: &Self) -> Result<Self> {
        Ok(self.divmod(d)?.1)
    }

    /// `self / d` when the division is exact, `None` otherwise.
    pub fn div_exact(&self, d: &Self) -> Option<Self> {
        let (q, r) = self.divmod(d).ok()?;
        r.is_zero().then_some(q)
    }

    pub fn divides(&self, other: &Self) -> bool {
        !self.is_zero() && other.rem(self).map(|r| r.is_zero()).unwrap_or(false)
    }

    /// Scales to leading coefficient 1; zero stays zero.
    pub fn monic(&self) -> Self {
        match self.coeffs.last() {
            None => self.clone(),
            Some(c) => self.scale(&self.field.inv(c).expect("nonzero")),
        }
    }

    /// Monic gcd; `gcd(0, 0) = 0`.
    pub fn gcd(&self, other: &Self) -> Self {
        assert!(self.field == other.field, "gcd across fields");
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let r = a.rem(&b).expect("nonzero divisor");
            a = b;
            b = r;
        }
        a.monic()
    }

    /// Extended gcd `(g, s, t)` with `s*self + t*other = g`, `g` monic.
    pub fn ext_gcd(&self, other: &Self) -> (Self, Self, Self) {
        let f = &self.field;
        let (mut r0, mut r1) = (self.clone(), other.clone());
        let (mut s0, mut s1) = (Self::one(f), Self::zero(f));
        let (mut t0, mut t1) = (Self::zero(f), Self::one(f));
        while !r1.is_zero() {
            let (q, r) = r0.divmod(&r1).expect("nonzero divisor");
            r0 = std::mem::replace(&mut r1, r);
            let s = &s0 - &(&q * &s1);
            s0 = std::mem::replace(&mut s1, s);
            let t = &t0 - &(&q * &t1);
            t0 = std::mem::replace(&mut t1, t);
        }
        if r0.is_zero() {
            return (r0, s0, t0);
        }
        let inv = f.inv(r0.leading()).expect("nonzero");
        (r0.scale(&inv), s0.scale(&inv), t0.scale(&inv))
    }

    /// Inverse of `self` modulo `m`, when it exists.
    pub fn inv_mod(&self, m: &Self) -> Option<Self> {
        let (g, s, _) = self.ext_gcd(m);
        g.is_one().then(|| s.rem(m).expect("nonzero modulus"))
    }

    /// Formal derivative.
    pub fn derivative(&self) -> Self {
        let f = &self.field;
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, c)| f.mul(c, &f.from_u64(i as u64)))
            .collect();
        Self::new(f, coeffs)
    }

    /// Horner evaluation.
    pub fn eval(&self, x: &F::Elem) -> F::Elem {
        let f = &self.field;
        self.coeffs
            .iter()
            .rev()
            .fold(f.zero(), |acc, c| f.add(&f.mul(&acc, x), c))
    }

    pub fn pow(&self, mut n: u64) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one(&self.field);
        while n > 0 {
            if n & 1 == 1 {
                acc = &acc * &base;
            }
            n >>= 1;
            if n > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    pub fn mulmod(&self, other: &Self, m: &Self) -> Self {
        (self * other).rem(m).expect("nonzero modulus")
    }

    pub fn powmod(&self, mut n: u64, m: &Self) -> Self {
        let mut base = self.rem(m).expect("nonzero modulus");
        let mut acc = Self::one(&self.field).rem(m).expect("nonzero modulus");
        while n > 0 {
            if n & 1 == 1 {
                acc = acc.mulmod(&base, m);
            }
            n >>= 1;
            if n > 0 {
                base = base.mulmod(&base, m);
            }
        }
        acc
    }

    /// `g` with `g^p = self`, when every exponent is divisible by p.
    pub fn pth_root(&self) -> Option<Self> {
        let f = &self.field;
        let p = f.characteristic() as usize;
        if self
            .coeffs
            .iter()
            .enumerate()
            .any(|(i, c)| i % p != 0 && !f.is_zero(c))
        {
            return None;
        }
        let coeffs = self.coeffs.iter().step_by(p).map(|c| f.pth_root(c)).collect();
        Some(Self::new(f, coeffs))
    }

    /// True iff no irreducible `P` has `P^2 | self`. Nonzero constants are
    /// square-free, zero is not.
    pub fn is_squarefree(&self) -> bool {
        if self.is_zero() {
            return false;
        }
        if self.is_constant() {
            return true;
        }
        self.gcd(&self.derivative()).is_constant()
    }

    /// Product of the distinct monic irreducible factors. Zero for zero.
    pub fn radical(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let a = self.monic();
        if a.is_constant() {
            return a;
        }
        let d = a.derivative();
        if d.is_zero() {
            return a.pth_root().expect("zero derivative means p-th power").radical();
        }
        let g = a.gcd(&d);
        // Primes whose multiplicity is prime to p.
        let w = a.div_exact(&g).expect("gcd divides");
        let mut rest = g;
        loop {
            let c = rest.gcd(&w);
            if c.is_constant() {
                break;
            }
            rest = rest.div_exact(&c).expect("gcd divides");
        }
        // The remaining primes all occur with multiplicity divisible by p.
        let tail = if rest.is_constant() {
            rest.monic()
        } else {
            rest.pth_root().expect("p-th power").radical()
        };
        &w * &tail
    }

    /// True iff monic-irreducible up to a unit: nonconstant with no factor of
    /// degree `<= deg/2`, tested via `gcd(self, X^{|F|^i} - X)`.
    pub fn is_irreducible(&self) -> bool {
        let Some(d) = self.degree() else { return false };
        if d == 0 {
            return false;
        }
        if d == 1 {
            return true;
        }
        let g = self.monic();
        let frob = FrobeniusMap::new(&g);
        let x = Self::var(&self.field);
        let mut h = x.rem(&g).expect("nonzero");
        for _ in 1..=d / 2 {
            h = frob.apply_field(&h);
            if !g.gcd(&(&h - &x)).is_one() {
                return false;
            }
        }
        true
    }

    /// Distinct-degree factorization of a square-free polynomial: pairs
    /// `(d, product of all monic irreducible factors of degree d)`, increasing
    /// in `d`, omitting empty degrees. Stops early once every factor of
    /// degree `< max_degree` has been split off, returning the remaining
    /// cofactor under the key `usize::MAX` when `max_degree` cuts it short.
    pub fn distinct_degree(&self, max_degree: Option<usize>) -> Vec<(usize, Self)> {
        let mut out = Vec::new();
        let g = self.monic();
        let Some(n) = g.degree() else { return out };
        if n == 0 {
            return out;
        }
        let frob = FrobeniusMap::new(&g);
        let x = Self::var(&self.field);
        let mut h = x.rem(&g).expect("nonzero");
        let mut rest = g.clone();
        let mut i = 0;
        while let Some(rd) = rest.degree() {
            if rd < 2 * (i + 1) {
                break;
            }
            if max_degree.is_some_and(|m| i + 1 >= m) {
                out.push((usize::MAX, rest.clone()));
                return out;
            }
            i += 1;
            h = frob.apply_field(&h);
            let gi = rest.gcd(&(&h - &x));
            if !gi.is_one() {
                rest = rest.div_exact(&gi).expect("gcd divides");
                out.push((i, gi));
            }
        }
        if let Some(rd) = rest.degree() {
            if rd > 0 {
                if max_degree.is_some_and(|m| rd >= m) {
                    out.push((usize::MAX, rest));
                } else {
                    out.push((rd, rest));
                }
            }
        }
        out
    }

    /// Number of distinct irreducible factors of each degree, as
    /// `(degree, count)` pairs. Requires a square-free input.
    pub fn factor_degree_counts(&self) -> Vec<(usize, usize)> {
        self.distinct_degree(None)
            .into_iter()
            .map(|(d, g)| (d, g.degree().unwrap_or(0) / d))
            .collect()
    }

    /// Number of distinct roots in the field: `deg gcd(self, X^|F| - X)`.
    /// Panics on the zero polynomial.
    pub fn count_distinct_roots(&self) -> usize {
        assert!(!self.is_zero(), "roots of the zero polynomial");
        self.root_part().degree().unwrap_or(0)
    }

    /// `gcd(self, X^|F| - X)`: the product of `X - r` over distinct roots `r`.
    pub fn root_part(&self) -> Self {
        let g = self.monic();
        if g.degree().unwrap_or(0) == 0 {
            return Self::one(&self.field);
        }
        let frob = FrobeniusMap::new(&g);
        let x = Self::var(&self.field);
        let h = frob.apply_field(&x.rem(&g).expect("nonzero"));
        g.gcd(&(&h - &x))
    }

    /// Distinct roots in canonical order, by equal-degree splitting of
    /// `gcd(self, X^|F| - X)`. The result does not depend on `rng`.
    pub fn roots<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<F::Elem> {
        assert!(!self.is_zero(), "roots of the zero polynomial");
        let mut linear = Vec::new();
        split_linear(self.root_part(), rng, &mut linear);
        let f = &self.field;
        let mut roots: Vec<F::Elem> = linear.iter().map(|l| f.neg(&l.coeffs[0])).collect();
        roots.sort();
        roots
    }
}

fn split_linear<F: FiniteField, R: Rng + ?Sized>(g: Poly<F>, rng: &mut R, out: &mut Vec<Poly<F>>) {
    let Some(d) = g.degree() else { return };
    match d {
        0 => {}
        1 => out.push(g.monic()),
        _ => {
            let field = g.field().clone();
            let frob = FrobeniusMap::new(&g);
            let p = field.characteristic();
            let e = field.prime_degree();
            loop {
                let w = Poly::random(&field, d, rng);
                if w.is_constant() {
                    continue;
                }
                let probe = if p == 2 {
                    // Absolute trace w + w^2 + ... + w^(2^(e-1)).
                    let mut acc = w.clone();
                    let mut cur = w;
                    for _ in 1..e {
                        cur = frob.apply(&cur);
                        acc = &acc + &cur;
                    }
                    acc
                } else {
                    // w^((|F|-1)/2) = (w * w^p * ... * w^(p^(e-1)))^((p-1)/2).
                    let mut acc = w.clone();
                    let mut cur = w;
                    for _ in 1..e {
                        cur = frob.apply(&cur);
                        acc = acc.mulmod(&cur, &g);
                    }
                    let b = acc.powmod((p - 1) / 2, &g);
                    &b - &Poly::one(&field)
                };
                let h = g.gcd(&probe);
                let hd = h.degree().unwrap_or(0);
                if hd > 0 && hd < d {
                    let other = g.div_exact(&h).expect("gcd divides");
                    split_linear(h, rng, out);
                    split_linear(other, rng, out);
                    return;
                }
            }
        }
    }
}

/// The p-th power map on `F[X]/(g)`, precomputed as the images `X^{ip}`.
pub(crate) struct FrobeniusMap<F: FiniteField> {
    modulus: Poly<F>,
    rows: Vec<Poly<F>>,
}

impl<F: FiniteField> FrobeniusMap<F> {
    pub(crate) fn new(modulus: &Poly<F>) -> Self {
        let field = modulus.field().clone();
        let n = modulus.degree().expect("nonzero modulus");
        let p = field.characteristic();
        let xp = Poly::var(&field).powmod(p, modulus);
        let mut rows = Vec::with_capacity(n);
        let mut cur = Poly::one(&field).rem(modulus).expect("nonzero");
        for _ in 0..n {
            rows.push(cur.clone());
            cur = cur.mulmod(&xp, modulus);
        }
        FrobeniusMap {
            modulus: modulus.clone(),
            rows,
        }
    }

    /// `h^p mod g` for `h` already reduced modulo `g`.
    pub(crate) fn apply(&self, h: &Poly<F>) -> Poly<F> {
        let field = self.modulus.field();
        let p = field.characteristic();
        let prime = field.prime_degree() == 1;
        let n = self.rows.len();
        let mut out = vec![field.zero(); n];
        for (i, c) in h.coeffs().iter().enumerate() {
            if field.is_zero(c) {
                continue;
            }
            let c = if prime { c.clone() } else { field.pow(c, p) };
            for (j, r) in self.rows[i].coeffs().iter().enumerate() {
                let prod = field.mul(&c, r);
                out[j] = field.add(&out[j], &prod);
            }
        }
        Poly::new(field, out)
    }

    /// `h^|F| mod g`.
    pub(crate) fn apply_field(&self, h: &Poly<F>) -> Poly<F> {
        let mut cur = h.clone();
        for _ in 0..self.modulus.field().prime_degree() {
            cur = self.apply(&cur);
        }
        cur
    }
}

impl<'a, F: FiniteField> Add<&'a Poly<F>> for &'a Poly<F> {
    type Output = Poly<F>;
    fn add(self, other: &'a Poly<F>) -> Poly<F> {
        assert!(self.field == other.field, "field mismatch");
        self.add_impl(other)
    }
}

impl<'a, F: FiniteField> Sub<&'a Poly<F>> for &'a Poly<F> {
    type Output = Poly<F>;
    fn sub(self, other: &'a Poly<F>) -> Poly<F> {
        assert!(self.field == other.field, "field mismatch");
        self.sub_impl(other)
    }
}

impl<'a, F: FiniteField> Mul<&'a Poly<F>> for &'a Poly<F> {
    type Output = Poly<F>;
    fn mul(self, other: &'a Poly<F>) -> Poly<F> {
        assert!(self.field == other.field, "field mismatch");
        self.mul_impl(other)
    }
}

impl<F: FiniteField> Neg for &Poly<F> {
    type Output = Poly<F>;
    fn neg(self) -> Poly<F> {
        let f = &self.field;
        Poly::new(f, self.coeffs.iter().map(|c| f.neg(c)).collect())
    }
}

impl FqPoly {
    /// Builds a polynomial from integer coefficients reduced into the prime
    /// subfield (or, for extension fields, read as integer representatives).
    pub fn from_ints(field: &FieldSpec, coeffs: &[u32]) -> Self {
        let q = field.q();
        Self::new(field, coeffs.iter().map(|&c| if field.e() == 1 { c % q } else { c }).collect())
    }

    /// `q^deg`, the number of residues modulo `self`.
    pub fn norm(&self) -> Option<u128> {
        let d = self.degree()? as u32;
        (self.field().q() as u128).checked_pow(d)
    }

    /// Position of `self` in the canonical enumeration (`sum c_i q^i`).
    pub fn index(&self) -> u128 {
        let q = self.field().q() as u128;
        self.coeffs().iter().rev().fold(0u128, |acc, &c| acc * q + c as u128)
    }

    /// Text rendering in the variable `var`, e.g. `t^3 + 2*t + 1`.
    pub fn render(&self, var: &str) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let field = self.field();
        let mut terms = Vec::new();
        for (i, &c) in self.coeffs().iter().enumerate().rev() {
            if c == 0 {
                continue;
            }
            let mono = match i {
                0 => String::new(),
                1 => var.to_string(),
                _ => format!("{var}^{i}"),
            };
            let coef = field.render(c);
            terms.push(match i {
                0 => coef,
                _ if c == 1 => mono,
                _ if field.in_prime_subfield(c) => format!("{coef}*{mono}"),
                _ => format!("({coef})*{mono}"),
            });
        }
        terms.join(" + ")
    }
}

impl fmt::Display for FqPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render("t"))
    }
}
