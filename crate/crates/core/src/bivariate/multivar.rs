use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Sub};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::BivarPoly;
use crate::error::{check_budget, Error, Result};
use crate::ff_poly::{FieldSpec, FiniteField, FqPoly};

/// A polynomial in `y_0, ..., y_{nvars-1}` with coefficients in F_q[t],
/// stored sparsely as exponent vector -> nonzero coefficient.
#[derive(Clone, PartialEq, Eq)]
pub struct MultivarPoly {
    field: FieldSpec,
    nvars: usize,
    terms: BTreeMap<Vec<u32>, FqPoly>,
}

impl fmt::Debug for MultivarPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "MultivarPoly({self})")
    }
}

impl fmt::Display for MultivarPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut terms = Vec::new();
        for (exps, c) in self.terms.iter().rev() {
            let mono: Vec<String> = exps
                .iter()
                .enumerate()
                .filter(|(_, &e)| e > 0)
                .map(|(i, &e)| if e == 1 { format!("y{i}") } else { format!("y{i}^{e}") })
                .collect();
            let coeff = c.render("t");
            terms.push(if mono.is_empty() {
                coeff
            } else if c.is_one() {
                mono.join("*")
            } else if c.coeffs().iter().filter(|&&a| a != 0).count() == 1 && !coeff.contains(['(', '+']) {
                format!("{coeff}*{}", mono.join("*"))
            } else {
                format!("({coeff})*{}", mono.join("*"))
            });
        }
        f.write_str(&terms.join(" + "))
    }
}

impl MultivarPoly {
    pub fn zero(field: &FieldSpec, nvars: usize) -> Self {
        MultivarPoly {
            field: field.clone(),
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(c: FqPoly, nvars: usize) -> Self {
        let mut p = Self::zero(c.field(), nvars);
        p.add_term(vec![0; nvars], c);
        p
    }

    /// The variable `y_i`.
    pub fn var(field: &FieldSpec, nvars: usize, i: usize) -> Self {
        assert!(i < nvars);
        let mut exps = vec![0; nvars];
        exps[i] = 1;
        let mut p = Self::zero(field, nvars);
        p.add_term(exps, FqPoly::one(field));
        p
    }

    /// Builds from `(exponents, coefficient)` pairs, merging repeats.
    pub fn from_terms(field: &FieldSpec, nvars: usize, terms: impl IntoIterator<Item = (Vec<u32>, FqPoly)>) -> Self {
        let mut p = Self::zero(field, nvars);
        for (e, c) in terms {
            assert_eq!(e.len(), nvars, "exponent vector length");
            p.add_term(e, c);
        }
        p
    }

    /// Random polynomial with every `deg_{y_i} <= max_y` and `deg_t <= max_t`,
    /// each monomial present with probability one half.
    pub fn random<R: Rng + ?Sized>(field: &FieldSpec, nvars: usize, max_y: u32, max_t: usize, rng: &mut R) -> Self {
        let mut p = Self::zero(field, nvars);
        let count = (max_y as usize + 1).pow(nvars as u32);
        for idx in 0..count {
            if !rng.gen_bool(0.5) {
                continue;
            }
            let mut rest = idx;
            let exps = (0..nvars)
                .map(|_| {
                    let e = rest % (max_y as usize + 1);
                    rest /= max_y as usize + 1;
                    e as u32
                })
                .collect();
            p.add_term(exps, FqPoly::random(field, max_t + 1, rng));
        }
        p
    }

    fn add_term(&mut self, exps: Vec<u32>, c: FqPoly) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(exps);
        match entry {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let s = o.get() + &c;
                if s.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }

    pub fn field(&self) -> &FieldSpec {
        &self.field
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u32>, &FqPoly)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// `deg_{y_i}`; `None` for zero.
    pub fn deg_y(&self, i: usize) -> Option<u32> {
        self.terms.keys().map(|e| e[i]).max()
    }

    /// Largest per-variable degree in the y's.
    pub fn max_var_degree(&self) -> Option<u32> {
        (0..self.nvars).filter_map(|i| self.deg_y(i)).max()
    }

    /// Total degree in the y's.
    pub fn total_y_degree(&self) -> Option<u32> {
        self.terms.keys().map(|e| e.iter().sum()).max()
    }

    pub fn deg_t(&self) -> Option<usize> {
        self.terms.values().filter_map(|c| c.degree()).max()
    }

    pub fn scale(&self, c: &FqPoly) -> Self {
        Self::from_terms(&self.field, self.nvars, self.terms.iter().map(|(e, a)| (e.clone(), a * c)))
    }

    pub fn pow(&self, mut n: u32) -> Self {
        let mut base = self.clone();
        let mut acc = Self::constant(FqPoly::one(&self.field), self.nvars);
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

    /// `d/dt`, with the y's held fixed.
    pub fn partial_t(&self) -> Self {
        Self::from_terms(
            &self.field,
            self.nvars,
            self.terms.iter().map(|(e, c)| (e.clone(), c.derivative())),
        )
    }

    /// `d/dy_i`.
    pub fn partial_y(&self, i: usize) -> Self {
        let f = &self.field;
        Self::from_terms(
            f,
            self.nvars,
            self.terms.iter().filter(|(e, _)| e[i] > 0).map(|(e, c)| {
                let mut e2 = e.clone();
                e2[i] -= 1;
                (e2, c.scale(&f.from_u64(e[i] as u64)))
            }),
        )
    }

    /// Value at `y`, an element of F_q[t].
    pub fn eval(&self, y: &[FqPoly]) -> FqPoly {
        assert_eq!(y.len(), self.nvars);
        let max = self.max_var_degree().unwrap_or(0) as usize;
        let powers: Vec<Vec<FqPoly>> = y.iter().map(|v| power_table(v, max)).collect();
        self.eval_with(&powers)
    }

    fn eval_with(&self, powers: &[Vec<FqPoly>]) -> FqPoly {
        let mut acc = FqPoly::zero(&self.field);
        for (e, c) in &self.terms {
            let mut term = c.clone();
            for (i, &k) in e.iter().enumerate() {
                if k > 0 {
                    term = &term * &powers[i][k as usize];
                    if term.is_zero() {
                        break;
                    }
                }
            }
            acc = &acc + &term;
        }
        acc
    }

    /// Restriction to the line `y = a + b s`, as a polynomial in `s` (stored
    /// in the x slot of a [`BivarPoly`]).
    pub fn restrict_to_line(&self, a: &[FqPoly], b: &[FqPoly]) -> BivarPoly {
        let f = &self.field;
        let max = self.max_var_degree().unwrap_or(0);
        let powers: Vec<Vec<BivarPoly>> = a
            .iter()
            .zip(b)
            .map(|(ai, bi)| {
                let lin = BivarPoly::new(f, vec![ai.clone(), bi.clone()]);
                let mut v = vec![BivarPoly::one(f)];
                for k in 1..=max as usize {
                    v.push(&v[k - 1] * &lin);
                }
                v
            })
            .collect();
        let mut acc = BivarPoly::zero(f);
        for (e, c) in &self.terms {
            let mut term = BivarPoly::constant(c.clone());
            for (i, &k) in e.iter().enumerate() {
                if k > 0 {
                    term = &term * &powers[i][k as usize];
                }
            }
            acc = &acc + &term;
        }
        acc
    }
}

fn power_table(v: &FqPoly, max: usize) -> Vec<FqPoly> {
    let mut out = Vec::with_capacity(max + 1);
    out.push(FqPoly::one(v.field()));
    for k in 1..=max {
        out.push(&out[k - 1] * v);
    }
    out
}

impl<'a> Add<&'a MultivarPoly> for &'a MultivarPoly {
    type Output = MultivarPoly;
    fn add(self, other: &'a MultivarPoly) -> MultivarPoly {
        assert_eq!(self.nvars, other.nvars);
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }
}

impl<'a> Sub<&'a MultivarPoly> for &'a MultivarPoly {
    type Output = MultivarPoly;
    fn sub(self, other: &'a MultivarPoly) -> MultivarPoly {
        assert_eq!(self.nvars, other.nvars);
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), -c);
        }
        out
    }
}

impl<'a> Mul<&'a MultivarPoly> for &'a MultivarPoly {
    type Output = MultivarPoly;
    fn mul(self, other: &'a MultivarPoly) -> MultivarPoly {
        assert_eq!(self.nvars, other.nvars);
        let mut out = MultivarPoly::zero(&self.field, self.nvars);
        for (e1, c1) in &self.terms {
            for (e2, c2) in &other.terms {
                let e: Vec<u32> = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                out.add_term(e, c1 * c2);
            }
        }
        out
    }
}

/// `F(y_0..y_{p-1}) = f(t, y_0^p + t y_1^p + ... + t^{p-1} y_{p-1}^p)` and
/// `G = dF/dt`, for square-free `f`.
pub fn poonen_substitute(f: &BivarPoly) -> Result<(MultivarPoly, MultivarPoly)> {
    if !f.is_squarefree()? {
        return Err(Error::NotSquarefree);
    }
    let field = f.field();
    let p = field.p() as usize;
    let mut lin = MultivarPoly::zero(field, p);
    for i in 0..p {
        let mut e = vec![0; p];
        e[i] = p as u32;
        lin.add_term(e, FqPoly::monomial(field, 1, i));
    }
    let mut big_f = MultivarPoly::zero(field, p);
    for c in f.coeffs().iter().rev() {
        big_f = &(&big_f * &lin) + &MultivarPoly::constant(c.clone(), p);
    }
    let g = big_f.partial_t();
    let k = f.deg_x().unwrap_or(0) as u32;
    let n = f.deg_t().unwrap_or(0);
    for i in 0..p {
        assert!(big_f.deg_y(i).unwrap_or(0) <= p as u32 * k);
    }
    assert!(big_f.deg_t().unwrap_or(0) <= n + p * k as usize);
    Ok((big_f, g))
}

/// Attempts before a certificate search gives up.
const CERTIFY_ATTEMPTS: usize = 12;

/// Random line `y = a + b s` along which `h` keeps its full y-degree:
/// the top-degree form of `h` does not vanish at `b`. Coordinates are drawn
/// from F_q[t]^{<len}.
fn degree_preserving_line<R: Rng>(h: &MultivarPoly, rng: &mut R, len: usize) -> Option<(Vec<FqPoly>, Vec<FqPoly>, BivarPoly)> {
    let field = h.field();
    let total = h.total_y_degree().unwrap_or(0) as usize;
    for _ in 0..64 {
        let a: Vec<FqPoly> = (0..h.nvars()).map(|_| FqPoly::random(field, len, rng)).collect();
        let b: Vec<FqPoly> = (0..h.nvars()).map(|_| FqPoly::random(field, len, rng)).collect();
        let r = h.restrict_to_line(&a, &b);
        if r.deg_x().unwrap_or(0) == total {
            return Some((a, b, r));
        }
    }
    None
}

/// Certifies that `f` and `g` have no common factor of positive degree in
/// F_q[t, y]. Both are restricted to a line `y = a + b s` chosen so that `f`
/// keeps its full y-degree; then every common factor `H` restricts to a
/// common factor of the same y-degree, and a common factor lying in F_q[t]
/// is unchanged. A constant gcd of the restrictions therefore rules out
/// both. Returns the number of lines tried; `NotCoprime` if no line within
/// the attempt limit gives a certificate.
pub fn certify_coprime(f: &MultivarPoly, g: &MultivarPoly, seed: u64) -> Result<usize> {
    if f.is_zero() || g.is_zero() {
        return Err(Error::ZeroInput("certify_coprime"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for attempt in 1..=CERTIFY_ATTEMPTS {
        let Some((a, b, fr)) = degree_preserving_line(f, &mut rng, 2 + attempt / 3) else { continue };
        let gr = g.restrict_to_line(&a, &b);
        if fr.gcd(&gr).is_field_constant() {
            return Ok(attempt);
        }
    }
    Err(Error::NotCoprime)
}

/// Certifies that `f` is square-free in F_q[t, y] by the same line
/// restriction: a repeated factor `H^2 | f` restricts to a repeated factor
/// of the restriction. `NotSquarefree` if no line within the attempt limit
/// gives a certificate.
pub fn certify_squarefree(f: &MultivarPoly, seed: u64) -> Result<usize> {
    if f.is_zero() {
        return Err(Error::ZeroInput("certify_squarefree"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for attempt in 1..=CERTIFY_ATTEMPTS {
        let Some((_, _, fr)) = degree_preserving_line(f, &mut rng, 2 + attempt / 3) else { continue };
        if fr.is_squarefree()? {
            return Ok(attempt);
        }
    }
    Err(Error::NotSquarefree)
}

/// All points of `B_l = (F_q[t]^{<m_p})^{nvars}` in canonical order of the
/// outermost coordinate `y_0`, processed in parallel over `y_0`.
fn scan_box<T, F>(field: &FieldSpec, nvars: usize, m_p: usize, budget: u128, what: &str, visit: F) -> Result<T>
where
    T: Send + std::iter::Sum<T>,
    F: Fn(&[FqPoly]) -> T + Sync + Send,
{
    let q = field.q() as u128;
    let side = q.checked_pow(m_p as u32).ok_or(Error::Overflow("box side"))?;
    let points = side.checked_pow(nvars as u32).ok_or(Error::Overflow("box size"))?;
    check_budget(what, points, budget)?;
    if nvars == 0 {
        return Ok(visit(&[]));
    }
    let total: T = (0..side as u64)
        .into_par_iter()
        .map(|first| {
            let mut y: Vec<FqPoly> = vec![FqPoly::zero(field); nvars];
            y[0] = FqPoly::from_index(field, first as u128, m_p);
            let inner = side.pow(nvars as u32 - 1);
            let mut acc: Vec<T> = Vec::new();
            for idx in 0..inner {
                let mut rest = idx;
                for slot in y.iter_mut().skip(1) {
                    *slot = FqPoly::from_index(field, rest % side, m_p);
                    rest /= side;
                }
                acc.push(visit(&y));
            }
            acc.into_iter().sum::<T>()
        })
        .sum();
    Ok(total)
}

/// `#{y in B_l : h(y) = 0}` with `l + 1 = nvars`, by full scan.
pub fn count_zeros_box(h: &MultivarPoly, m_p: usize, budget: u128) -> Result<u128> {
    if h.is_zero() {
        return Err(Error::ZeroInput("count_zeros_box"));
    }
    let max = h.max_var_degree().unwrap_or(0) as usize;
    scan_box(h.field(), h.nvars(), m_p, budget, "box points", |y| {
        let powers: Vec<Vec<FqPoly>> = y.iter().map(|v| power_table(v, max)).collect();
        u128::from(h.eval_with(&powers).is_zero())
    })
}

/// `k (l + 1) q^{l m_p}` with `k` the largest per-variable degree of `h`.
pub fn box_zero_bound(h: &MultivarPoly, m_p: usize) -> u128 {
    let k = h.max_var_degree().unwrap_or(0) as u128;
    let l = h.nvars() as u32 - 1;
    k * (l as u128 + 1) * (h.field().q() as u128).pow(l * m_p as u32)
}

/// True when some prime of degree `>= m1` divides `v`; every prime divides 0.
pub fn has_large_prime_factor(v: &FqPoly, m1: usize) -> bool {
    if v.is_zero() {
        return true;
    }
    if v.degree().unwrap_or(0) < m1.max(1) {
        return false;
    }
    v.radical()
        .distinct_degree(Some(m1))
        .iter()
        .any(|(d, _)| *d >= m1)
}

/// Number of `y in B_l` such that a prime of degree `>= m1` divides both
/// `f(y)` and `g(y)`, for coprime `f`, `g`.
pub fn count_common_prime_points(
    f: &MultivarPoly,
    g: &MultivarPoly,
    m_p: usize,
    m1: usize,
    budget: u128,
    seed: u64,
) -> Result<u128> {
    assert_eq!(f.nvars(), g.nvars());
    let q = f.field().q() as u128;
    let points = q
        .checked_pow((m_p * f.nvars()) as u32)
        .ok_or(Error::Overflow("box size"))?;
    check_budget("box points", points, budget)?;
    certify_coprime(f, g, seed)?;
    let df = f.max_var_degree().unwrap_or(0) as usize;
    let dg = g.max_var_degree().unwrap_or(0) as usize;
    scan_box(f.field(), f.nvars(), m_p, budget, "box points", |y| {
        let pf: Vec<Vec<FqPoly>> = y.iter().map(|v| power_table(v, df)).collect();
        let pg: Vec<Vec<FqPoly>> = y.iter().map(|v| power_table(v, dg)).collect();
        let v = f.eval_with(&pf).gcd(&g.eval_with(&pg));
        u128::from(has_large_prime_factor(&v, m1))
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tp(f: &FieldSpec, c: &[u32]) -> FqPoly {
        FqPoly::from_ints(f, c)
    }

    fn mv(f: &FieldSpec, nvars: usize, terms: &[(&[u32], &[u32])]) -> MultivarPoly {
        MultivarPoly::from_terms(f, nvars, terms.iter().map(|(e, c)| (e.to_vec(), tp(f, c))))
    }

    fn bv(f: &FieldSpec, cs: &[&[u32]]) -> BivarPoly {
        BivarPoly::new(f, cs.iter().map(|c| tp(f, c)).collect())
    }

    #[test]
    fn poonen_examples() {
        let f2 = FieldSpec::prime(2).unwrap();
        let (big_f, g) = poonen_substitute(&bv(&f2, &[&[], &[1]])).unwrap();
        assert_eq!(big_f, mv(&f2, 2, &[(&[2, 0], &[1]), (&[0, 2], &[0, 1])]));
        assert_eq!(g, mv(&f2, 2, &[(&[0, 2], &[1])]));

        let (big_f, g) = poonen_substitute(&bv(&f2, &[&[0, 1], &[], &[1]])).unwrap();
        assert_eq!(big_f, mv(&f2, 2, &[(&[4, 0], &[1]), (&[0, 4], &[0, 0, 1]), (&[0, 0], &[0, 1])]));
        assert_eq!(g, mv(&f2, 2, &[(&[0, 0], &[1])]));

        let f3 = FieldSpec::prime(3).unwrap();
        let (big_f, g) = poonen_substitute(&bv(&f3, &[&[], &[1]])).unwrap();
        assert_eq!(
            big_f,
            mv(&f3, 3, &[(&[3, 0, 0], &[1]), (&[0, 3, 0], &[0, 1]), (&[0, 0, 3], &[0, 0, 1])])
        );
        assert_eq!(g, mv(&f3, 3, &[(&[0, 3, 0], &[1]), (&[0, 0, 3], &[0, 2])]));
        assert!(poonen_substitute(&bv(&f3, &[&[], &[], &[1]])).is_err());
    }

    #[test]
    fn box_examples() {
        let f2 = FieldSpec::prime(2).unwrap();
        let f3 = FieldSpec::prime(3).unwrap();
        assert_eq!(count_zeros_box(&mv(&f2, 1, &[(&[1], &[1])]), 3, 1 << 24).unwrap(), 1);
        assert_eq!(count_zeros_box(&mv(&f2, 2, &[(&[1, 1], &[1])]), 2, 1 << 24).unwrap(), 7);
        let diag = mv(&f3, 2, &[(&[1, 0], &[1]), (&[0, 1], &[2])]);
        assert_eq!(count_zeros_box(&diag, 2, 1 << 24).unwrap(), 9);
        assert!(matches!(
            count_zeros_box(&diag, 2, 80),
            Err(Error::BudgetExceeded { required: 81, .. })
        ));
    }

    #[test]
    fn common_prime_examples() {
        let f2 = FieldSpec::prime(2).unwrap();
        let y0 = mv(&f2, 1, &[(&[1], &[1])]);
        let y0p1 = mv(&f2, 1, &[(&[1], &[1]), (&[0], &[1])]);
        assert_eq!(count_common_prime_points(&y0, &y0p1, 3, 2, 1 << 24, 0).unwrap(), 0);
        let one = mv(&f2, 1, &[(&[0], &[1])]);
        assert_eq!(count_common_prime_points(&y0, &one, 3, 2, 1 << 24, 0).unwrap(), 0);
        // g = y0 + (t^2 + t + 1): multiples of the prime in deg < 2 is just 0.
        let g = mv(&f2, 1, &[(&[1], &[1]), (&[0], &[1, 1, 1])]);
        assert_eq!(count_common_prime_points(&y0, &g, 2, 2, 1 << 24, 0).unwrap(), 1);
        assert_eq!(count_common_prime_points(&y0, &g, 3, 2, 1 << 24, 0).unwrap(), 2);
        assert!(matches!(
            count_common_prime_points(&y0, &y0, 2, 2, 1 << 24, 0),
            Err(Error::NotCoprime)
        ));
    }

    #[test]
    fn certificates() {
        let f3 = FieldSpec::prime(3).unwrap();
        let a = mv(&f3, 2, &[(&[1, 1], &[1]), (&[0, 0], &[0, 1])]);
        let b = mv(&f3, 2, &[(&[2, 0], &[1]), (&[0, 1], &[1])]);
        assert!(certify_coprime(&a, &b, 1).is_ok());
        assert!(certify_squarefree(&a, 1).is_ok());
        let ab = &a * &b;
        assert!(certify_coprime(&ab, &b, 1).is_err());
        assert!(certify_squarefree(&(&ab * &b), 1).is_err());
        // Common content t.
        let ta = a.scale(&tp(&f3, &[0, 1]));
        let tb = b.scale(&tp(&f3, &[0, 1]));
        assert!(certify_coprime(&ta, &tb, 1).is_err());
    }
}
