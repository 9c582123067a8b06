//! Counting experiments over the box `{a in F_q[t] : deg a < m}`.
//!
//! One scan classifies every value `v = f(a)` by the degrees of the primes
//! whose squares divide it:
//!
//! * `N`: `v` square-free;
//! * `N'`: no `P^2 | v` with `deg P < m0`;
//! * `N''`: some `P^2 | v` with `m0 <= deg P < m1`;
//! * `N'''`: some `P^2 | v` with `deg P >= m1`.
//!
//! The same scan records `j(a)`, the number of primes of degree `< m0` whose
//! square divides `v`, which gives the Brun terms
//! `n_k = sum_a C(j(a), k)` exactly.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rayon::prelude::*;

use crate::bivariate::BivarPoly;
use crate::error::{check_budget, Error, Result};
use crate::ff_poly::{prime_count, FiniteField, FqPoly};
use crate::options::Limits;
use crate::residue::{rho_p2_lift_check, RhoTable};
use crate::singular::{c_f_enclosure, ratio, singular_sum_partial, SingularSeriesResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SieveParams {
    pub m: usize,
    pub m0: usize,
    /// `ceil(m / 2)`.
    pub m1: usize,
    /// `ceil(m / p)`.
    pub mp: usize,
    pub r: usize,
}

impl SieveParams {
    pub fn new(m: usize, m0: usize, r: usize, p: u32) -> Self {
        let p = p as usize;
        SieveParams {
            m,
            m0,
            m1: m.div_ceil(2),
            mp: m.div_ceil(p),
            r,
        }
    }

    /// True when every `D` with `nu(D) <= r` built from primes of degree
    /// `< m0` satisfies `2 deg D <= m`.
    pub fn formula_valid(&self) -> bool {
        2 * self.r * self.m0.saturating_sub(1) <= self.m
    }
}

/// Default Brun truncation: `max(4, ceil(2 v_1))`.
pub fn default_r(v1: &BigRational) -> usize {
    let two_v1 = v1 * BigRational::from_integer(BigInt::from(2));
    let c = two_v1.ceil().to_integer();
    let c: usize = c.try_into().unwrap_or(usize::MAX);
    c.max(4)
}

/// Per-argument classification totals.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ScanCounts {
    pub total: u128,
    pub n: u128,
    pub n_prime: u128,
    pub n_dprime: u128,
    pub n_tprime: u128,
    /// `hist[j]` = number of arguments with exactly `j` primes of degree
    /// `< m0` whose square divides the value.
    pub hist: Vec<u128>,
}

impl ScanCounts {
    fn merge(mut self, other: ScanCounts) -> ScanCounts {
        self.total += other.total;
        self.n += other.n;
        self.n_prime += other.n_prime;
        self.n_dprime += other.n_dprime;
        self.n_tprime += other.n_tprime;
        if self.hist.len() < other.hist.len() {
            self.hist.resize(other.hist.len(), 0);
        }
        for (a, b) in self.hist.iter_mut().zip(other.hist) {
            *a += b;
        }
        self
    }

    fn record(&mut self, j: usize, sf: bool, none_small: bool, mid: bool, large: bool) {
        self.total += 1;
        self.n += u128::from(sf);
        self.n_prime += u128::from(none_small);
        self.n_dprime += u128::from(mid);
        self.n_tprime += u128::from(large);
        if self.hist.len() <= j {
            self.hist.resize(j + 1, 0);
        }
        self.hist[j] += 1;
    }

    /// `n_k = sum_j hist[j] C(j, k)`.
    pub fn n_k(&self, k: usize) -> u128 {
        self.hist
            .iter()
            .enumerate()
            .map(|(j, &c)| c * binomial(j as u128, k as u128))
            .sum()
    }
}

fn binomial(n: u128, k: u128) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc * (n - i) / (i + 1))
}

/// `q^m`, checked against the argument budget.
fn box_size(field_q: u32, m: usize, limits: &Limits) -> Result<u128> {
    let total = (field_q as u128)
        .checked_pow(m as u32)
        .ok_or(Error::Overflow("argument count"))?;
    check_budget(format!("arguments of degree < {m}"), total, limits.arguments)?;
    Ok(total)
}

/// Number of primes of degree `< m0`.
fn small_prime_count(q: u32, m0: usize) -> usize {
    (1..m0).map(|d| prime_count(q as u64, d as u32) as usize).sum()
}

fn classify(v: &FqPoly, params: &SieveParams, small_primes: usize, out: &mut ScanCounts) {
    if v.is_zero() {
        // Every prime square divides 0.
        out.record(
            small_primes,
            false,
            params.m0 <= 1,
            params.m0.max(1) < params.m1,
            true,
        );
        return;
    }
    if v.is_squarefree() {
        out.record(0, true, true, false, false);
        return;
    }
    let monic = v.monic();
    let square_part = monic.div_exact(&monic.radical()).expect("radical divides");
    let (mut small, mut mid, mut large) = (0usize, false, false);
    for (d, part) in square_part.radical().distinct_degree(Some(params.m1)) {
        if d < params.m0 {
            small += part.degree().unwrap_or(0) / d;
        } else if d < params.m1 {
            mid = true;
        } else {
            large = true;
        }
    }
    out.record(small, false, small == 0, mid, large);
}

/// `#{a : deg a < m, f(a) square-free}` by full scan.
pub fn count_squarefree_values(f: &BivarPoly, m: usize, limits: &Limits) -> Result<u128> {
    let field = f.field().clone();
    let total = box_size(field.q(), m, limits)?;
    Ok((0..total as u64)
        .into_par_iter()
        .filter(|&i| f.eval(&FqPoly::from_index(&field, i as u128, m)).is_squarefree())
        .count() as u128)
}

/// `N, N', N'', N'''` and the `j(a)` histogram in one scan.
pub fn count_sieve_sets(f: &BivarPoly, params: &SieveParams, limits: &Limits) -> Result<ScanCounts> {
    let field = f.field().clone();
    let total = box_size(field.q(), params.m, limits)?;
    let small = small_prime_count(field.q(), params.m0);
    let counts = (0..total as u64)
        .into_par_iter()
        .fold(ScanCounts::default, |mut acc, i| {
            let a = FqPoly::from_index(&field, i as u128, params.m);
            classify(&f.eval(&a), params, small, &mut acc);
            acc
        })
        .reduce(ScanCounts::default, ScanCounts::merge);
    Ok(counts)
}

/// Brun terms and partial sums.
#[derive(Debug, Clone, PartialEq)]
pub struct BrunSums {
    /// `n_k` for `k = 0..=r` from the scan.
    pub n_k_scan: Vec<u128>,
    /// `n_k = sum_{nu(D)=k} rho(D^2) q^{m - 2 deg D}`, present for `k` with
    /// `2 k (m0 - 1) <= m`, which bounds `2 deg D` for every such `D` so the
    /// box is a union of full residue classes mod `D^2`.
    pub n_k_formula: Vec<Option<u128>>,
    /// `N_r = sum_{k <= r} (-1)^k n_k` from the scan terms, for `r = 0..=params.r`.
    pub partial_sums: Vec<i128>,
    /// `v_k = sum_{nu(D)=k} rho(D^2)/||D||^2`, `k = 0..=r`.
    pub v: Vec<BigRational>,
    /// `U(r, m0) = sum_{k <= r} (-1)^k v_k`.
    pub u: BigRational,
    pub tables: Vec<RhoTable>,
}

/// Elementary symmetric functions of `w_P = rho(P^2)/||P||^2` up to order `r`.
fn elementary(tables: &[RhoTable], r: usize) -> Vec<BigRational> {
    let mut e = vec![BigRational::zero(); r + 1];
    e[0] = BigRational::one();
    for t in tables {
        let w = ratio(t.rho_p2, t.prime.norm() * t.prime.norm());
        for k in (1..=r).rev() {
            let add = &e[k - 1] * &w;
            e[k] += add;
        }
    }
    e
}

pub fn brun_sums(f: &BivarPoly, params: &SieveParams, scan: &ScanCounts, limits: &Limits) -> Result<BrunSums> {
    let (_, tables) = singular_sum_partial(f, params.m0, limits)?;
    let v = elementary(&tables, params.r);
    let qm = BigRational::from_integer(num_traits::pow(BigInt::from(f.field().q()), params.m));
    let n_k_scan: Vec<u128> = (0..=params.r).map(|k| scan.n_k(k)).collect();
    let n_k_formula = (0..=params.r)
        .map(|k| {
            if 2 * k * params.m0.saturating_sub(1) > params.m {
                return None;
            }
            let val = &v[k] * &qm;
            assert!(val.is_integer(), "rho(D^2) q^(m - 2 deg D) is an integer");
            Some(u128::try_from(val.to_integer()).expect("fits u128"))
        })
        .collect();
    let mut partial_sums = Vec::with_capacity(params.r + 1);
    let mut acc: i128 = 0;
    for (k, &nk) in n_k_scan.iter().enumerate() {
        acc += if k % 2 == 0 { nk as i128 } else { -(nk as i128) };
        partial_sums.push(acc);
    }
    let u = v
        .iter()
        .enumerate()
        .fold(BigRational::zero(), |acc, (k, vk)| if k % 2 == 0 { acc + vk } else { acc - vk });
    Ok(BrunSums {
        n_k_scan,
        n_k_formula,
        partial_sums,
        v,
        u,
        tables,
    })
}

/// A named pass/fail check attached to a report.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SieveReport {
    pub kind: &'static str,
    pub f: BivarPoly,
    pub params: SieveParams,
    pub counts: ScanCounts,
    pub brun: BrunSums,
    pub enclosure: Option<SingularSeriesResult>,
    pub checks: Vec<Check>,
}

impl SieveReport {
    /// `N / q^m`.
    pub fn density(&self) -> BigRational {
        ratio(self.counts.n, self.counts.total)
    }

    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

/// Sandwich `N <= N' <= N + N'' + N'''`.
pub fn sandwich_holds(c: &ScanCounts) -> bool {
    c.n <= c.n_prime && c.n_prime <= c.n + c.n_dprime + c.n_tprime
}

/// `N_r >= N'` for even `r`, `N_r <= N'` for odd `r`.
pub fn alternation_holds(c: &ScanCounts, b: &BrunSums) -> bool {
    b.partial_sums.iter().enumerate().all(|(r, &nr)| {
        let np = c.n_prime as i128;
        if r % 2 == 0 {
            nr >= np
        } else {
            nr <= np
        }
    })
}

/// Formula and scan values of `n_k` agree wherever the formula applies.
pub fn formula_agrees(b: &BrunSums) -> bool {
    b.n_k_formula
        .iter()
        .zip(&b.n_k_scan)
        .all(|(f, s)| f.is_none_or(|f| f == *s))
}

/// `v_k <= v_1^k / k!`.
pub fn vk_bound_holds(b: &BrunSums) -> bool {
    if b.v.len() < 2 {
        return true;
    }
    let v1 = &b.v[1];
    let mut bound = BigRational::one();
    for (k, vk) in b.v.iter().enumerate().skip(1) {
        bound = bound * v1 / BigRational::from_integer(BigInt::from(k));
        if vk > &bound {
            return false;
        }
    }
    true
}

/// Full experiment on `f` over the box of degree `< params.m`: counts, Brun
/// sums with their checks, and optionally the `c_f` enclosure at `m0`.
pub fn sieve_report(f: &BivarPoly, params: &SieveParams, with_enclosure: bool, limits: &Limits) -> Result<SieveReport> {
    sieve_report_kind("count", f, params, with_enclosure, limits)
}

fn sieve_report_kind(
    kind: &'static str,
    f: &BivarPoly,
    params: &SieveParams,
    with_enclosure: bool,
    limits: &Limits,
) -> Result<SieveReport> {
    if f.is_zero() {
        return Err(Error::ZeroInput("sieve of the zero polynomial"));
    }
    let counts = count_sieve_sets(f, params, limits)?;
    let brun = brun_sums(f, params, &counts, limits)?;
    let enclosure = if with_enclosure {
        match c_f_enclosure(f, params.m0, limits) {
            Ok(e) => Some(e),
            Err(Error::NotSquarefree) => None,
            Err(e) => return Err(e),
        }
    } else {
        None
    };
    let checks = vec![
        Check {
            name: "sandwich",
            passed: sandwich_holds(&counts),
        },
        Check {
            name: "alternation",
            passed: alternation_holds(&counts, &brun),
        },
        Check {
            name: "formula_agreement",
            passed: formula_agrees(&brun),
        },
        Check {
            name: "vk_bound",
            passed: vk_bound_holds(&brun),
        },
    ];
    Ok(SieveReport {
        kind,
        f: f.clone(),
        params: *params,
        counts,
        brun,
        enclosure,
        checks,
    })
}

/// True when `a` is a p-th power in F_q[t].
fn is_pth_power(a: &FqPoly) -> bool {
    a.is_zero() || a.pth_root().is_some()
}

/// `f = N - x^k`; square-free unless `N` is a p-th power and `p | k`.
pub fn representation_poly(target: &FqPoly, k: u32) -> Result<BivarPoly> {
    let field = target.field();
    if k == 0 {
        return Err(Error::PrecondViolated("k must be positive".into()));
    }
    if k.is_multiple_of(field.p()) && is_pth_power(target) {
        return Err(Error::PthPowerDegenerate);
    }
    let mut coeffs = vec![FqPoly::zero(field); k as usize + 1];
    coeffs[0] = target.clone();
    coeffs[k as usize] = FqPoly::constant(field, field.neg(&1));
    let f = BivarPoly::new(field, coeffs);
    if !f.is_squarefree()? {
        return Err(Error::NotSquarefree);
    }
    Ok(f)
}

/// Representations `N = x^k + r` with `r` square-free and
/// `deg x < ceil(deg N / k)`: the count is `N` of the report for
/// `f = N - x^k` with `m = ceil(deg N / k)`.
pub fn count_representations(target: &FqPoly, k: u32, m0: usize, r: Option<usize>, limits: &Limits) -> Result<SieveReport> {
    let f = representation_poly(target, k)?;
    let n = target.degree().unwrap_or(0);
    let m = n.div_ceil(k as usize);
    let r = match r {
        Some(r) => r,
        None => default_r(&singular_sum_partial(&f, m0, limits)?.0),
    };
    let params = SieveParams::new(m, m0, r, target.field().p());
    sieve_report_kind("represent", &f, &params, true, limits)
}

/// Primes of degree `<= max_degree` at which `rho_f(P^2) != rho_g(P^2)`.
pub fn translation_mismatches(f: &BivarPoly, g: &BivarPoly, max_degree: usize, seed: u64) -> Vec<String> {
    (1..=max_degree)
        .flat_map(|d| crate::ff_poly::enumerate_primes(f.field(), d))
        .filter(|p| rho_p2_lift_check(f, p, seed) != rho_p2_lift_check(g, p, seed))
        .map(|p| p.to_string())
        .collect()
}

/// Square-free values of `g` on the interval `{N + a : deg a < m}`, via
/// `f(x) = g(t, N + x)`, with a translation-invariance check of
/// `rho(P^2)` over primes of degree `<= check_degree`.
pub fn short_interval_count(
    g: &BivarPoly,
    target: &FqPoly,
    params: &SieveParams,
    check_degree: usize,
    limits: &Limits,
) -> Result<SieveReport> {
    if !g.is_squarefree()? {
        return Err(Error::NotSquarefree);
    }
    let f = g.shift_x(target);
    let mut report = sieve_report_kind("interval", &f, params, true, limits)?;
    let mismatches = translation_mismatches(&f, g, check_degree, limits.seed);
    report.checks.push(Check {
        name: "translation_invariance",
        passed: mismatches.is_empty(),
    });
    Ok(report)
}

/// One rung of a density ladder.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityRow {
    pub m: usize,
    /// Degree of the interval centre for interval ladders.
    pub n: Option<usize>,
    pub count: u128,
    pub total: u128,
    pub c_lo: BigRational,
    pub c_hi: BigRational,
}

impl DensityRow {
    pub fn density(&self) -> BigRational {
        ratio(self.count, self.total)
    }
}

fn enclosure_or_zero(f: &BivarPoly, m0: usize, limits: &Limits) -> Result<(BigRational, BigRational)> {
    match c_f_enclosure(f, m0, limits) {
        Ok(e) => Ok((e.c_lo, e.c_hi)),
        // Repeated factors: the density tends to 0, c_f itself is not defined by the product.
        Err(Error::NotSquarefree) => Ok((BigRational::zero(), BigRational::zero())),
        Err(e) => Err(e),
    }
}

/// Square-free density of `f` for each `m` in `ms`, next to the `c_f` enclosure at `m0`.
pub fn density_experiment(f: &BivarPoly, ms: &[usize], m0: usize, limits: &Limits) -> Result<Vec<DensityRow>> {
    let (c_lo, c_hi) = enclosure_or_zero(f, m0, limits)?;
    ms.iter()
        .map(|&m| {
            Ok(DensityRow {
                m,
                n: None,
                count: count_squarefree_values(f, m, limits)?,
                total: box_size(f.field().q(), m, limits)?,
                c_lo: c_lo.clone(),
                c_hi: c_hi.clone(),
            })
        })
        .collect()
}

/// Interval densities of `g` around each target in `targets` at fixed `m`.
pub fn interval_ladder(g: &BivarPoly, targets: &[FqPoly], m: usize, m0: usize, limits: &Limits) -> Result<Vec<DensityRow>> {
    let (c_lo, c_hi) = enclosure_or_zero(g, m0, limits)?;
    targets
        .iter()
        .map(|n| {
            let f = g.shift_x(n);
            Ok(DensityRow {
                m,
                n: n.degree(),
                count: count_squarefree_values(&f, m, limits)?,
                total: box_size(g.field().q(), m, limits)?,
                c_lo: c_lo.clone(),
                c_hi: c_hi.clone(),
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ff_poly::FieldSpec;

    fn bv(f: &FieldSpec, cs: &[&[u32]]) -> BivarPoly {
        BivarPoly::new(f, cs.iter().map(|c| FqPoly::from_ints(f, c)).collect())
    }

    #[test]
    fn squarefree_counts() {
        let f3 = FieldSpec::prime(3).unwrap();
        let lim = Limits::default();
        assert_eq!(count_squarefree_values(&bv(&f3, &[&[], &[1]]), 5, &lim).unwrap(), 164);
        assert_eq!(count_squarefree_values(&bv(&f3, &[&[1]]), 4, &lim).unwrap(), 81);
        assert_eq!(count_squarefree_values(&bv(&f3, &[&[], &[], &[1]]), 4, &lim).unwrap(), 2);
        let small = Limits {
            arguments: 100,
            ..Limits::default()
        };
        assert!(matches!(
            count_squarefree_values(&bv(&f3, &[&[], &[1]]), 5, &small),
            Err(Error::BudgetExceeded { required: 243, .. })
        ));
    }

    #[test]
    fn sieve_set_examples() {
        let f2 = FieldSpec::prime(2).unwrap();
        let lim = Limits::default();
        let x = bv(&f2, &[&[], &[1]]);
        let c = count_sieve_sets(&x, &SieveParams::new(4, 1, 2, 2), &lim).unwrap();
        assert_eq!(c.n_prime, 16);
        // m0 = 2: a not divisible by t^2 or (t+1)^2; 16 - 4 - 4 + 1 (only a = 0 is divisible by both).
        let c = count_sieve_sets(&x, &SieveParams::new(4, 2, 2, 2), &lim).unwrap();
        assert_eq!(c.n_prime, 9);
        let p = SieveParams::new(6, 3, 2, 2);
        assert_eq!(p.m1, 3);
        let c = count_sieve_sets(&x, &p, &lim).unwrap();
        assert_eq!(c.n_dprime, 0);
    }

    #[test]
    fn brun_example() {
        let f2 = FieldSpec::prime(2).unwrap();
        let lim = Limits::default();
        let x = bv(&f2, &[&[], &[1]]);
        let p = SieveParams::new(6, 2, 2, 2);
        let rep = sieve_report(&x, &p, false, &lim).unwrap();
        assert_eq!(rep.brun.n_k_scan, vec![64, 32, 4]);
        assert_eq!(rep.brun.n_k_formula, vec![Some(64), Some(32), Some(4)]);
        assert_eq!(rep.brun.partial_sums, vec![64, 32, 36]);
        assert!(rep.all_passed());
        let p0 = SieveParams::new(6, 2, 0, 2);
        let rep = sieve_report(&x, &p0, false, &lim).unwrap();
        assert_eq!(rep.brun.partial_sums, vec![64]);
    }

    #[test]
    fn representation_examples() {
        let f3 = FieldSpec::prime(3).unwrap();
        let lim = Limits::default();
        // N = t^2 + t, k = 2: x in {0, 1, 2}; values t^2 + t, t^2 + t - 1 (twice).
        let n = FqPoly::from_ints(&f3, &[0, 1, 1]);
        let rep = count_representations(&n, 2, 1, Some(2), &lim).unwrap();
        let direct = (0..3u32)
            .filter(|&c| (&n - &FqPoly::from_ints(&f3, &[c * c % 3])).is_squarefree())
            .count() as u128;
        assert_eq!(rep.counts.n, direct);
        let t3 = FqPoly::from_ints(&f3, &[0, 0, 0, 1]);
        assert!(matches!(count_representations(&t3, 3, 1, None, &lim), Err(Error::PthPowerDegenerate)));
    }

    #[test]
    fn interval_reduces_to_box_at_zero() {
        let f3 = FieldSpec::prime(3).unwrap();
        let lim = Limits::default();
        let x = bv(&f3, &[&[], &[1]]);
        let p = SieveParams::new(4, 2, 4, 3);
        let rep = short_interval_count(&x, &FqPoly::zero(&f3), &p, 2, &lim).unwrap();
        assert_eq!(rep.counts.n, count_squarefree_values(&x, 4, &lim).unwrap());
        assert!(rep.all_passed());
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(5, 2), 10);
        assert_eq!(binomial(3, 4), 0);
        assert_eq!(binomial(14, 7), 3432);
    }
}
