//! Square-free integers in `[x, x + H)` by a segmented sieve with prime
//! squares.

use num_bigint::BigUint;
use num_traits::ToPrimitive;
use rayon::prelude::*;

use crate::error::{check_budget, Error, Result};

/// Segment length for the parallel sieve.
const SEGMENT: u128 = 1 << 18;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntervalSpec {
    pub x: BigUint,
    pub h: u64,
    /// Cutoff for [`count_small_square_free`]: only primes `p < small_bound` are sieved.
    pub small_bound: u64,
}

/// Budgets for the integer sieve.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IntervalLimits {
    /// Largest interval length.
    pub length: u128,
    /// Largest sieving bound `sqrt(x + H)`.
    pub sqrt_bound: u128,
}

impl Default for IntervalLimits {
    fn default() -> Self {
        IntervalLimits {
            length: 1 << 30,
            sqrt_bound: 100_000_000,
        }
    }
}

impl IntervalSpec {
    pub fn new(x: impl Into<BigUint>, h: u64) -> Self {
        IntervalSpec {
            x: x.into(),
            h,
            small_bound: h,
        }
    }

    /// `(x, x + H - 1)` as `u128`, validating `x >= 1`, `H >= 1`.
    fn bounds(&self) -> Result<(u128, u128)> {
        let x = self
            .x
            .to_u128()
            .filter(|&x| x < 1u128 << 120)
            .ok_or(Error::Overflow("interval start"))?;
        if x == 0 || self.h == 0 {
            return Err(Error::PrecondViolated("need x >= 1 and H >= 1".into()));
        }
        Ok((x, x + self.h as u128 - 1))
    }
}

/// `floor(sqrt(n))`.
pub fn isqrt(n: u128) -> u128 {
    if n < 2 {
        return n;
    }
    let mut r = (n as f64).sqrt() as u128;
    while r * r > n {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= n {
        r += 1;
    }
    r
}

/// Primes up to `n` by a segmented sieve of Eratosthenes.
pub fn primes_up_to(n: u64) -> Vec<u64> {
    if n < 2 {
        return Vec::new();
    }
    let root = isqrt(n as u128) as u64;
    let mut small = vec![true; root as usize + 1];
    let mut base = Vec::new();
    for i in 2..=root {
        if small[i as usize] {
            base.push(i);
            let mut j = i * i;
            while j <= root {
                small[j as usize] = false;
                j += i;
            }
        }
    }
    let mut out = Vec::new();
    let block = 1u64 << 18;
    let mut lo = 2u64;
    while lo <= n {
        let hi = (lo + block - 1).min(n);
        let mut mark = vec![true; (hi - lo + 1) as usize];
        for &p in &base {
            if p * p > hi {
                break;
            }
            let mut j = (p * p).max(lo.div_ceil(p) * p);
            while j <= hi {
                mark[(j - lo) as usize] = false;
                j += p;
            }
        }
        out.extend(mark.iter().enumerate().filter(|(_, &b)| b).map(|(i, _)| lo + i as u64));
        lo = hi + 1;
    }
    out
}

/// Count of `n` in `[lo, hi]` divisible by no `p^2` with `p` in `primes`.
fn sieve_count(lo: u128, hi: u128, primes: &[u64]) -> u128 {
    let len = hi - lo + 1;
    let segments = len.div_ceil(SEGMENT);
    (0..segments as u64)
        .into_par_iter()
        .map(|s| {
            let a = lo + s as u128 * SEGMENT;
            let b = (a + SEGMENT - 1).min(hi);
            let mut free = vec![true; (b - a + 1) as usize];
            for &p in primes {
                let sq = p as u128 * p as u128;
                if sq > b {
                    break;
                }
                let mut j = a.div_ceil(sq) * sq;
                while j <= b {
                    free[(j - a) as usize] = false;
                    j += sq;
                }
            }
            free.iter().filter(|&&f| f).count() as u128
        })
        .sum()
}

/// Exact number of square-free integers in `[x, x + H)`.
pub fn count_squarefree_z(spec: &IntervalSpec, limits: &IntervalLimits) -> Result<u128> {
    let (lo, hi) = spec.bounds()?;
    check_budget("interval length", spec.h as u128, limits.length)?;
    let root = isqrt(hi);
    check_budget("sieving bound sqrt(x + H)", root, limits.sqrt_bound)?;
    Ok(sieve_count(lo, hi, &primes_up_to(root as u64)))
}

/// Number of `n` in `[x, x + H)` with `p^2 ∤ n` for every prime `p < small_bound`.
pub fn count_small_square_free(spec: &IntervalSpec, limits: &IntervalLimits) -> Result<u128> {
    let (lo, hi) = spec.bounds()?;
    check_budget("interval length", spec.h as u128, limits.length)?;
    let cutoff = (spec.small_bound.saturating_sub(1) as u128).min(isqrt(hi));
    check_budget("sieving bound", cutoff, limits.sqrt_bound)?;
    Ok(sieve_count(lo, hi, &primes_up_to(cutoff as u64)))
}

/// The same count as [`count_small_square_free`] by inclusion-exclusion over
/// subsets of the primes below `bound`: `sum_S (-1)^{|S|} #{n : prod(S)^2 | n}`.
/// At most 20 primes.
pub fn inclusion_exclusion_count(spec: &IntervalSpec, bound: u64) -> Result<u128> {
    let (lo, hi) = spec.bounds()?;
    let primes: Vec<u64> = primes_up_to(bound.saturating_sub(1));
    if primes.len() > 20 {
        return Err(Error::PrecondViolated(format!(
            "{} primes below {bound}; at most 20 supported",
            primes.len()
        )));
    }
    let multiples = |m: u128| hi / m - (lo - 1) / m;
    let mut total: i128 = 0;
    for mask in 0u32..(1 << primes.len()) {
        let mut d: u128 = 1;
        let mut overflow = false;
        for (i, &p) in primes.iter().enumerate() {
            if mask >> i & 1 == 1 {
                match d.checked_mul(p as u128 * p as u128) {
                    Some(v) => d = v,
                    None => overflow = true,
                }
            }
        }
        if overflow || d > hi {
            continue;
        }
        let c = multiples(d) as i128;
        total += if mask.count_ones() % 2 == 0 { c } else { -c };
    }
    Ok(total as u128)
}

/// Primes `p` with `p < log(H) / 2` (natural log), as the exclusive bound for
/// [`inclusion_exclusion_count`].
pub fn half_log_bound(h: u64) -> u64 {
    let b = 0.5 * (h as f64).ln();
    // Smallest integer B with every prime p < b satisfying p < B.
    b.ceil() as u64
}

/// `6/pi^2`.
pub const SQUAREFREE_DENSITY: f64 = 6.0 / (std::f64::consts::PI * std::f64::consts::PI);

/// One CSV row: `(x, H, count, 6/pi^2 H, relative error)`.
#[derive(Debug, Clone, PartialEq)]
pub struct IntervalRow {
    pub x: BigUint,
    pub h: u64,
    pub count: u128,
    pub expected: f64,
    pub rel_err: f64,
}

impl IntervalRow {
    pub fn new(spec: &IntervalSpec, count: u128) -> Self {
        let expected = SQUAREFREE_DENSITY * spec.h as f64;
        IntervalRow {
            x: spec.x.clone(),
            h: spec.h,
            count,
            expected,
            rel_err: (count as f64 - expected) / expected,
        }
    }

    pub const CSV_HEADER: &'static str = "x,H,count,expected,rel_err";

    pub fn to_csv(&self) -> String {
        format!("{},{},{},{:.6},{:.6}", self.x, self.h, self.count, self.expected, self.rel_err)
    }
}
