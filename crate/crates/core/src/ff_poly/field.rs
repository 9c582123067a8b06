//! Finite fields F_q, q = p^e.
//!
//! Elements of [`FieldSpec`] are `u32` integer representatives in `0..q`. For
//! an extension field the base-p digits of the representative are the
//! coefficients of the element written as a polynomial in the generator `u`
//! (lowest digit = constant term), reduced modulo the configured monic
//! irreducible modulus. The integer representative is also the canonical
//! ordering of field elements.

use std::fmt;
use std::sync::Arc;

use rand::Rng;

use super::poly::Poly;
use crate::error::{Error, Result};

/// Arithmetic interface shared by F_q and by residue fields F_q[t]/(P).
pub trait FiniteField: Clone + fmt::Debug + PartialEq + Send + Sync {
    type Elem: Clone + Eq + Ord + fmt::Debug + Send + Sync;

    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn is_zero(&self, a: &Self::Elem) -> bool;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    /// `None` for zero.
    fn inv(&self, a: &Self::Elem) -> Option<Self::Elem>;
    fn characteristic(&self) -> u64;
    /// The field has `p^prime_degree()` elements.
    fn prime_degree(&self) -> u32;
    /// Image of the integer `n` under Z -> F.
    fn from_u64(&self, n: u64) -> Self::Elem;
    fn random_elem<R: Rng + ?Sized>(&self, rng: &mut R) -> Self::Elem;
    /// Element number `index` in canonical order, for `index < order()`.
    fn element(&self, index: u64) -> Self::Elem;

    fn order(&self) -> Option<u128> {
        (self.characteristic() as u128).checked_pow(self.prime_degree())
    }

    fn is_one(&self, a: &Self::Elem) -> bool {
        *a == self.one()
    }

    fn pow(&self, a: &Self::Elem, mut n: u64) -> Self::Elem {
        let mut base = a.clone();
        let mut acc = self.one();
        while n > 0 {
            if n & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            n >>= 1;
            if n > 0 {
                base = self.mul(&base, &base);
            }
        }
        acc
    }

    /// Inverse Frobenius: the unique `b` with `b^p = a`.
    fn pth_root(&self, a: &Self::Elem) -> Self::Elem {
        let p = self.characteristic();
        let mut b = a.clone();
        for _ in 1..self.prime_degree() {
            b = self.pow(&b, p);
        }
        b
    }
}

/// Built-in moduli for the small extension fields used in experiments,
/// coefficients lowest degree first.
const DEFAULT_MODULI: &[(u32, u32, &[u32])] = &[
    (2, 2, &[1, 1, 1]),       // u^2 + u + 1
    (2, 3, &[1, 1, 0, 1]),    // u^3 + u + 1
    (3, 2, &[1, 0, 1]),       // u^2 + 1
    (2, 4, &[1, 1, 0, 0, 1]), // u^4 + u + 1
    (5, 2, &[2, 0, 1]),       // u^2 + 2
    (3, 3, &[1, 2, 0, 1]),    // u^3 + 2u + 1
];

const MAX_PRIME: u32 = 1 << 31;
const MAX_EXTENSION_ORDER: u64 = 1 << 16;

struct FieldInner {
    p: u32,
    e: u32,
    q: u32,
    modulus: Option<Vec<u32>>,
    // Discrete log tables for extension fields, empty for prime fields.
    exp: Vec<u32>,
    log: Vec<u32>,
}

/// The finite field F_q.
#[derive(Clone)]
pub struct FieldSpec {
    inner: Arc<FieldInner>,
}

impl PartialEq for FieldSpec {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.inner, &other.inner)
            || (self.inner.p == other.inner.p
                && self.inner.e == other.inner.e
                && self.inner.modulus == other.inner.modulus)
    }
}

impl Eq for FieldSpec {}

impl fmt::Debug for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.inner.modulus {
            None => write!(f, "F_{}", self.inner.p),
            Some(m) => write!(f, "F_{} [{}]", self.inner.q, render_modulus(m)),
        }
    }
}

impl fmt::Display for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

fn render_modulus(m: &[u32]) -> String {
    let mut terms = Vec::new();
    for (i, &c) in m.iter().enumerate().rev() {
        if c == 0 {
            continue;
        }
        let mono = match i {
            0 => String::new(),
            1 => "u".to_string(),
            _ => format!("u^{i}"),
        };
        terms.push(match (c, i) {
            (_, 0) => c.to_string(),
            (1, _) => mono,
            _ => format!("{c}*{mono}"),
        });
    }
    terms.join(" + ")
}

pub(crate) fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// Splits `q` as `p^e` with `p` prime.
pub fn prime_power(q: u64) -> Option<(u32, u32)> {
    if q < 2 {
        return None;
    }
    let mut p = 2u64;
    while p * p <= q && !q.is_multiple_of(p) {
        p += 1;
    }
    if !q.is_multiple_of(p) {
        p = q;
    }
    let mut rest = q;
    let mut e = 0u32;
    while rest.is_multiple_of(p) {
        rest /= p;
        e += 1;
    }
    (rest == 1 && p < MAX_PRIME as u64).then_some((p as u32, e))
}

impl FieldSpec {
    /// The prime field F_p.
    pub fn prime(p: u32) -> Result<Self> {
        Self::new(p, 1, None)
    }

    /// F_{p^e}. With `modulus = None` an extension field uses the built-in
    /// modulus when one exists and otherwise the smallest monic irreducible
    /// of degree `e` over F_p in canonical order.
    pub fn new(p: u32, e: u32, modulus: Option<Vec<u32>>) -> Result<Self> {
        if !is_prime_u64(p as u64) || p >= MAX_PRIME {
            return Err(Error::InvalidField(format!("{p} is not a supported prime")));
        }
        if e == 0 {
            return Err(Error::InvalidField("extension degree must be positive".into()));
        }
        if e == 1 {
            if modulus.as_ref().is_some_and(|m| m.len() > 2) {
                return Err(Error::InvalidField("a prime field takes no modulus".into()));
            }
            return Ok(FieldSpec {
                inner: Arc::new(FieldInner {
                    p,
                    e,
                    q: p,
                    modulus: None,
                    exp: Vec::new(),
                    log: Vec::new(),
                }),
            });
        }
        let q = (p as u64)
            .checked_pow(e)
            .filter(|&q| q <= MAX_EXTENSION_ORDER)
            .ok_or_else(|| Error::InvalidField(format!("{p}^{e} exceeds {MAX_EXTENSION_ORDER}")))?;
        let base = FieldSpec::prime(p)?;
        let modulus = match modulus {
            Some(m) => {
                let poly = Poly::new(&base, m.iter().map(|&c| c % p).collect());
                if poly.degree() != Some(e as usize) || !base.is_one(poly.leading()) {
                    return Err(Error::InvalidField(format!(
                        "modulus must be monic of degree {e}"
                    )));
                }
                if !poly.is_irreducible() {
                    return Err(Error::InvalidField(format!(
                        "modulus {} is not irreducible over F_{p}",
                        render_modulus(poly.coeffs())
                    )));
                }
                poly.coeffs().to_vec()
            }
            None => default_modulus(&base, e),
        };
        let (exp, log) = log_tables(&base, &modulus, q as u32);
        Ok(FieldSpec {
            inner: Arc::new(FieldInner {
                p,
                e,
                q: q as u32,
                modulus: Some(modulus),
                exp,
                log,
            }),
        })
    }

    /// F_q for a prime power `q`, using the default modulus.
    pub fn with_order(q: u64) -> Result<Self> {
        let (p, e) =
            prime_power(q).ok_or_else(|| Error::InvalidField(format!("{q} is not a prime power")))?;
        Self::new(p, e, None)
    }

    pub fn p(&self) -> u32 {
        self.inner.p
    }

    pub fn e(&self) -> u32 {
        self.inner.e
    }

    pub fn q(&self) -> u32 {
        self.inner.q
    }

    pub fn modulus(&self) -> Option<&[u32]> {
        self.inner.modulus.as_deref()
    }

    /// The generator `u` of an extension field.
    pub fn generator(&self) -> Option<u32> {
        (self.inner.e > 1).then_some(self.inner.p)
    }

    /// Coefficients over F_p (in `u`) of an element.
    pub fn digits(&self, a: u32) -> Vec<u32> {
        let p = self.inner.p;
        let mut out = Vec::with_capacity(self.inner.e as usize);
        let mut rest = a;
        for _ in 0..self.inner.e {
            out.push(rest % p);
            rest /= p;
        }
        out
    }

    fn from_digits(&self, digits: &[u32]) -> u32 {
        digits.iter().rev().fold(0, |acc, &d| acc * self.inner.p + d)
    }

    /// Text form of an element: an integer for prime fields, a polynomial in
    /// `u` otherwise.
    pub fn render(&self, a: u32) -> String {
        if self.inner.e == 1 {
            return a.to_string();
        }
        if a == 0 {
            return "0".into();
        }
        render_modulus(&self.digits(a))
    }

    /// True when the element lies in the prime subfield.
    pub fn in_prime_subfield(&self, a: u32) -> bool {
        a < self.inner.p
    }
}

fn default_modulus(base: &FieldSpec, e: u32) -> Vec<u32> {
    let p = base.p();
    if let Some((_, _, m)) = DEFAULT_MODULI.iter().find(|(pp, ee, _)| *pp == p && *ee == e) {
        return m.to_vec();
    }
    // Smallest monic irreducible of degree e in canonical order.
    let count = (p as u64).pow(e);
    (0..count)
        .map(|i| {
            let mut c = Vec::with_capacity(e as usize + 1);
            let mut rest = i;
            for _ in 0..e {
                c.push((rest % p as u64) as u32);
                rest /= p as u64;
            }
            c.push(1);
            Poly::new(base, c)
        })
        .find(|f| f.is_irreducible())
        .map(|f| f.coeffs().to_vec())
        .expect("irreducible polynomials exist in every degree")
}

/// exp/log tables w.r.t. a generator of the multiplicative group.
fn log_tables(base: &FieldSpec, modulus: &[u32], q: u32) -> (Vec<u32>, Vec<u32>) {
    let p = base.p();
    let e = modulus.len() - 1;
    let m = Poly::new(base, modulus.to_vec());
    let to_poly = |a: u32| {
        let mut c = Vec::with_capacity(e);
        let mut rest = a;
        for _ in 0..e {
            c.push(rest % p);
            rest /= p;
        }
        Poly::new(base, c)
    };
    let to_int = |f: &Poly<FieldSpec>| f.coeffs().iter().rev().fold(0u32, |acc, &d| acc * p + d);
    let order = q - 1;
    for g in 2..q.max(3) {
        let gp = to_poly(g);
        let mut exp = Vec::with_capacity(order as usize);
        let mut cur = Poly::one(base);
        let mut ok = true;
        for i in 0..order {
            let v = to_int(&cur);
            if i > 0 && v == 1 {
                ok = false;
                break;
            }
            exp.push(v);
            cur = (&cur * &gp).rem(&m).expect("nonzero modulus");
        }
        if ok {
            let mut log = vec![0u32; q as usize];
            for (i, &v) in exp.iter().enumerate() {
                log[v as usize] = i as u32;
            }
            return (exp, log);
        }
    }
    unreachable!("F_q^* is cyclic")
}

impl FiniteField for FieldSpec {
    type Elem = u32;

    fn zero(&self) -> u32 {
        0
    }

    fn one(&self) -> u32 {
        1
    }

    fn is_zero(&self, a: &u32) -> bool {
        *a == 0
    }

    fn add(&self, a: &u32, b: &u32) -> u32 {
        let p = self.inner.p;
        if self.inner.e == 1 {
            return ((*a as u64 + *b as u64) % p as u64) as u32;
        }
        if p == 2 {
            return a ^ b;
        }
        let (mut x, mut y) = (*a, *b);
        let mut out = 0;
        let mut place = 1;
        for _ in 0..self.inner.e {
            out += ((x % p + y % p) % p) * place;
            x /= p;
            y /= p;
            place *= p;
        }
        out
    }

    fn neg(&self, a: &u32) -> u32 {
        let p = self.inner.p;
        if self.inner.e == 1 {
            return if *a == 0 { 0 } else { p - a };
        }
        if p == 2 {
            return *a;
        }
        let d: Vec<u32> = self.digits(*a).into_iter().map(|c| (p - c) % p).collect();
        self.from_digits(&d)
    }

    fn sub(&self, a: &u32, b: &u32) -> u32 {
        self.add(a, &self.neg(b))
    }

    fn mul(&self, a: &u32, b: &u32) -> u32 {
        if self.inner.e == 1 {
            return ((*a as u64 * *b as u64) % self.inner.p as u64) as u32;
        }
        if *a == 0 || *b == 0 {
            return 0;
        }
        let n = self.inner.q - 1;
        let s = (self.inner.log[*a as usize] + self.inner.log[*b as usize]) % n;
        self.inner.exp[s as usize]
    }

    fn inv(&self, a: &u32) -> Option<u32> {
        if *a == 0 {
            return None;
        }
        if self.inner.e == 1 {
            return Some(FiniteField::pow(self, a, self.inner.p as u64 - 2));
        }
        let n = self.inner.q - 1;
        let l = self.inner.log[*a as usize];
        Some(self.inner.exp[((n - l) % n) as usize])
    }

    fn characteristic(&self) -> u64 {
        self.inner.p as u64
    }

    fn prime_degree(&self) -> u32 {
        self.inner.e
    }

    fn from_u64(&self, n: u64) -> u32 {
        (n % self.inner.p as u64) as u32
    }

    fn random_elem<R: Rng + ?Sized>(&self, rng: &mut R) -> u32 {
        rng.gen_range(0..self.inner.q)
    }

    fn element(&self, index: u64) -> u32 {
        debug_assert!(index < self.inner.q as u64);
        index as u32
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute_inverse(f: &FieldSpec, a: u32) -> u32 {
        (1..f.q()).find(|&b| f.mul(&a, &b) == 1).unwrap()
    }

    #[test]
    fn f4_generator_relation() {
        let f = FieldSpec::with_order(4).unwrap();
        let u = f.generator().unwrap();
        // u^2 = u + 1 over the default modulus.
        assert_eq!(f.mul(&u, &u), f.add(&u, &1));
    }

    #[test]
    fn extension_axioms_small_fields() {
        for q in [4u64, 8, 9, 16, 25, 27] {
            let f = FieldSpec::with_order(q).unwrap();
            for a in 0..f.q() {
                assert_eq!(f.add(&a, &f.neg(&a)), 0);
                if a != 0 {
                    assert_eq!(f.inv(&a), Some(brute_inverse(&f, a)));
                }
                for b in 0..f.q() {
                    assert_eq!(f.mul(&a, &b), f.mul(&b, &a));
                }
            }
        }
    }

    #[test]
    fn prime_power_split() {
        assert_eq!(prime_power(9), Some((3, 2)));
        assert_eq!(prime_power(7), Some((7, 1)));
        assert_eq!(prime_power(12), None);
        assert_eq!(prime_power(1), None);
    }

    #[test]
    fn rejects_reducible_modulus() {
        // u^2 + 1 = (u + 1)^2 over F_2.
        assert!(FieldSpec::new(2, 2, Some(vec![1, 0, 1])).is_err());
        assert!(FieldSpec::new(4, 1, None).is_err());
    }

    #[test]
    fn fallback_modulus_is_irreducible() {
        let f = FieldSpec::new(7, 2, None).unwrap();
        assert_eq!(f.q(), 49);
        let base = FieldSpec::prime(7).unwrap();
        assert!(Poly::new(&base, f.modulus().unwrap().to_vec()).is_irreducible());
    }

    #[test]
    fn pth_root_inverts_frobenius() {
        let f = FieldSpec::with_order(9).unwrap();
        for a in 0..9 {
            let r = f.pth_root(&a);
            assert_eq!(FiniteField::pow(&f, &r, 3), a);
        }
    }
}
