use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use rand::Rng;

use crate::error::{Error, Result};
use crate::ff_poly::{FieldSpec, FiniteField, FqPoly};

/// An element of F_q[t][x], stored as coefficients in F_q[t] indexed by the
/// power of `x`. The leading x-coefficient is nonzero; zero has no
/// coefficients.
#[derive(Clone, PartialEq, Eq)]
pub struct BivarPoly {
    field: FieldSpec,
    coeffs: Vec<FqPoly>,
}

impl fmt::Debug for BivarPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BivarPoly({self})")
    }
}

impl fmt::Display for BivarPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut terms = Vec::new();
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let mono = match i {
                0 => String::new(),
                1 => "x".to_string(),
                _ => format!("x^{i}"),
            };
            let rendered = c.render("t");
            let simple = c.coeffs().iter().filter(|&&a| a != 0).count() == 1
                && !rendered.contains('(')
                && !rendered.contains(" + ");
            terms.push(match (i, c.is_one(), simple) {
                (0, _, _) => rendered,
                (_, true, _) => mono,
                (_, false, true) => format!("{rendered}*{mono}"),
                (_, false, false) => format!("({rendered})*{mono}"),
            });
        }
        f.write_str(&terms.join(" + "))
    }
}

impl BivarPoly {
    pub fn new(field: &FieldSpec, mut coeffs: Vec<FqPoly>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        debug_assert!(coeffs.iter().all(|c| c.field() == field));
        BivarPoly {
            field: field.clone(),
            coeffs,
        }
    }

    pub fn zero(field: &FieldSpec) -> Self {
        Self::new(field, Vec::new())
    }

    pub fn one(field: &FieldSpec) -> Self {
        Self::constant(FqPoly::one(field))
    }

    /// A polynomial of x-degree zero.
    pub fn constant(c: FqPoly) -> Self {
        let field = c.field().clone();
        Self::new(&field, vec![c])
    }

    pub fn x(field: &FieldSpec) -> Self {
        Self::new(field, vec![FqPoly::zero(field), FqPoly::one(field)])
    }

    /// `c * x^k`.
    pub fn monomial(c: FqPoly, k: usize) -> Self {
        let field = c.field().clone();
        let mut coeffs = vec![FqPoly::zero(&field); k];
        coeffs.push(c);
        Self::new(&field, coeffs)
    }

    /// Uniformly random with `deg_x <= max_x`, `deg_t <= max_t`.
    pub fn random<R: Rng + ?Sized>(field: &FieldSpec, max_x: usize, max_t: usize, rng: &mut R) -> Self {
        let coeffs = (0..=max_x).map(|_| FqPoly::random(field, max_t + 1, rng)).collect();
        Self::new(field, coeffs)
    }

    pub fn field(&self) -> &FieldSpec {
        &self.field
    }

    pub fn coeffs(&self) -> &[FqPoly] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> FqPoly {
        self.coeffs.get(i).cloned().unwrap_or_else(|| FqPoly::zero(&self.field))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn deg_x(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn deg_t(&self) -> Option<usize> {
        self.coeffs.iter().filter_map(|c| c.degree()).max()
    }

    /// Leading coefficient in x; panics on zero.
    pub fn leading(&self) -> &FqPoly {
        self.coeffs.last().expect("leading coefficient of zero polynomial")
    }

    /// True for elements of F_q (including zero).
    pub fn is_field_constant(&self) -> bool {
        self.coeffs.is_empty() || (self.coeffs.len() == 1 && self.coeffs[0].is_constant())
    }

    pub fn scale(&self, c: &FqPoly) -> Self {
        Self::new(&self.field, self.coeffs.iter().map(|a| a * c).collect())
    }

    pub fn pow(&self, mut n: u32) -> Self {
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

    /// `f(t, a(t))`.
    pub fn eval(&self, a: &FqPoly) -> FqPoly {
        self.coeffs
            .iter()
            .rev()
            .fold(FqPoly::zero(&self.field), |acc, c| &(&acc * a) + c)
    }

    /// `f(t, a(t)) mod m`, reducing after every Horner step.
    pub fn eval_mod(&self, a: &FqPoly, m: &FqPoly) -> FqPoly {
        let a = a.rem(m).expect("nonzero modulus");
        self.coeffs.iter().rev().fold(FqPoly::zero(&self.field), |acc, c| {
            (&(&acc * &a) + c).rem(m).expect("nonzero modulus")
        })
    }

    /// Coefficient-wise reduction modulo `m`.
    pub fn reduce_coeffs(&self, m: &FqPoly) -> Self {
        Self::new(
            &self.field,
            self.coeffs.iter().map(|c| c.rem(m).expect("nonzero modulus")).collect(),
        )
    }

    pub fn partial_x(&self) -> Self {
        let f = &self.field;
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, c)| c.scale(&f.from_u64(i as u64)))
            .collect();
        Self::new(f, coeffs)
    }

    pub fn partial_t(&self) -> Self {
        Self::new(&self.field, self.coeffs.iter().map(|c| c.derivative()).collect())
    }

    /// `(df/dx, df/dt)`.
    pub fn partials(&self) -> (Self, Self) {
        (self.partial_x(), self.partial_t())
    }

    /// `f(t, x + shift)`.
    pub fn shift_x(&self, shift: &FqPoly) -> Self {
        let lin = BivarPoly::new(&self.field, vec![shift.clone(), FqPoly::one(&self.field)]);
        self.coeffs
            .iter()
            .rev()
            .fold(Self::zero(&self.field), |acc, c| &(&acc * &lin) + &Self::constant(c.clone()))
    }

    /// Monic gcd in F_q[t] of the x-coefficients; zero for zero.
    pub fn content(&self) -> FqPoly {
        self.coeffs
            .iter()
            .fold(FqPoly::zero(&self.field), |acc, c| acc.gcd(c))
    }

    /// Divides every coefficient by `c`, if exact.
    pub fn div_t_exact(&self, c: &FqPoly) -> Option<Self> {
        let coeffs = self
            .coeffs
            .iter()
            .map(|a| a.div_exact(c))
            .collect::<Option<Vec<_>>>()?;
        Some(Self::new(&self.field, coeffs))
    }

    /// `f / content(f)`; zero stays zero.
    pub fn primitive_part(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        self.div_t_exact(&self.content()).expect("content divides")
    }

    /// Scales by a unit of F_q so the leading x-coefficient is monic in t.
    pub fn normalized(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let lc = *self.leading().leading();
        let inv = self.field.inv(&lc).expect("nonzero");
        self.scale(&FqPoly::constant(&self.field, inv))
    }

    /// Pseudo-remainder: `lc(b)^(deg a - deg b + 1) * a mod b`.
    pub fn prem(&self, b: &Self) -> Result<Self> {
        let db = b.deg_x().ok_or(Error::DivisionByZero)?;
        let Some(da) = self.deg_x() else { return Ok(self.clone()) };
        if da < db {
            return Ok(self.clone());
        }
        let lb = b.leading().clone();
        let mut r = self.coeffs.clone();
        let mut steps = da - db + 1;
        while r.len() > db && !r.is_empty() {
            let top = r.len() - 1;
            let c = r[top].clone();
            for coeff in r.iter_mut() {
                *coeff = &*coeff * &lb;
            }
            for (j, bj) in b.coeffs.iter().enumerate() {
                r[top - db + j] = &r[top - db + j] - &(&c * bj);
            }
            debug_assert!(r[top].is_zero());
            r.pop();
            while r.last().is_some_and(|c| c.is_zero()) {
                r.pop();
            }
            steps -= 1;
        }
        let rem = Self::new(&self.field, r);
        // Early exits leave fewer multiplications by lc(b) than the convention requires.
        Ok(rem.scale(&lb.pow(steps as u64)))
    }

    /// `self / b` in F_q[t][x] when exact.
    pub fn div_exact(&self, b: &Self) -> Option<Self> {
        let db = b.deg_x()?;
        let Some(da) = self.deg_x() else { return Some(self.clone()) };
        if da < db {
            return None;
        }
        let mut r = self.coeffs.clone();
        let mut quot = vec![FqPoly::zero(&self.field); da - db + 1];
        for i in (0..=da - db).rev() {
            let c = r[i + db].div_exact(b.leading())?;
            if c.is_zero() {
                continue;
            }
            for (j, bj) in b.coeffs.iter().enumerate() {
                r[i + j] = &r[i + j] - &(&c * bj);
            }
            quot[i] = c;
        }
        r.iter().all(|c| c.is_zero()).then(|| Self::new(&self.field, quot))
    }

    /// Gcd in F_q[t][x], normalized so the leading x-coefficient is monic in t.
    /// `gcd(0, 0) = 0`.
    pub fn gcd(&self, other: &Self) -> Self {
        if self.is_zero() {
            return other.normalized();
        }
        if other.is_zero() {
            return self.normalized();
        }
        let c = self.content().gcd(&other.content());
        let (mut a, mut b) = (self.primitive_part(), other.primitive_part());
        if a.deg_x() < b.deg_x() {
            std::mem::swap(&mut a, &mut b);
        }
        loop {
            if b.is_zero() {
                return a.scale(&c).normalized();
            }
            if b.deg_x() == Some(0) {
                return Self::constant(c);
            }
            let r = a.prem(&b).expect("nonzero divisor");
            a = b;
            b = r.primitive_part();
        }
    }

    /// Square-freeness in F_q[t, x]: `gcd(f, df/dx, df/dt)` is a nonzero
    /// constant. Any repeated irreducible factor divides all three, and a
    /// common irreducible factor of all three has both partials zero, hence
    /// is a p-th power.
    pub fn is_squarefree(&self) -> Result<bool> {
        if self.is_zero() {
            return Err(Error::ZeroInput("is_squarefree_bivar"));
        }
        let (fx, ft) = self.partials();
        Ok(self.gcd(&fx).gcd(&ft).is_field_constant())
    }

    /// Splits a square-free `f` as `f_i * f_s`: `f_i = gcd(f, df/dx)` collects
    /// the factors with vanishing x-derivative (the content in t among them)
    /// and is normalized as in [`BivarPoly::gcd`]; `f_s = f / f_i` carries the
    /// leftover unit.
    pub fn split_inseparable(&self) -> Result<(Self, Self)> {
        if !self.is_squarefree()? {
            return Err(Error::NotSquarefree);
        }
        let fx = self.partial_x();
        let fi = if fx.is_zero() {
            self.normalized()
        } else {
            self.gcd(&fx)
        };
        let fs = self.div_exact(&fi).expect("gcd divides");
        Ok((fi, fs))
    }

    /// True when every power of x with a nonzero coefficient is a multiple of p.
    pub fn is_in_x_pth_powers(&self) -> bool {
        let p = self.field.p() as usize;
        self.coeffs
            .iter()
            .enumerate()
            .all(|(i, c)| i % p == 0 || c.is_zero())
    }
}

impl<'a> Add<&'a BivarPoly> for &'a BivarPoly {
    type Output = BivarPoly;
    fn add(self, other: &'a BivarPoly) -> BivarPoly {
        let n = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..n).map(|i| &self.coeff(i) + &other.coeff(i)).collect();
        BivarPoly::new(&self.field, coeffs)
    }
}

impl<'a> Sub<&'a BivarPoly> for &'a BivarPoly {
    type Output = BivarPoly;
    fn sub(self, other: &'a BivarPoly) -> BivarPoly {
        let n = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..n).map(|i| &self.coeff(i) - &other.coeff(i)).collect();
        BivarPoly::new(&self.field, coeffs)
    }
}

impl<'a> Mul<&'a BivarPoly> for &'a BivarPoly {
    type Output = BivarPoly;
    fn mul(self, other: &'a BivarPoly) -> BivarPoly {
        if self.is_zero() || other.is_zero() {
            return BivarPoly::zero(&self.field);
        }
        let mut out = vec![FqPoly::zero(&self.field); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] = &out[i + j] + &(a * b);
            }
        }
        BivarPoly::new(&self.field, out)
    }
}

impl Neg for &BivarPoly {
    type Output = BivarPoly;
    fn neg(self) -> BivarPoly {
        BivarPoly::new(&self.field, self.coeffs.iter().map(|c| -c).collect())
    }
}
