//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

use std::time::{Duration, Instant};

use num_bigint::BigUint;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use sqfree_cli::execute;
use sqfree_core::bivariate::{
    box_zero_bound, certify_coprime, certify_squarefree, compute_r, count_zeros_box, poonen_substitute,
};
use sqfree_core::ff_poly::{enumerate_primes, prime_count, primes_below_degree, PrimePoly};
use sqfree_core::interval_z::{
    count_squarefree_z, half_log_bound, inclusion_exclusion_count, IntervalLimits, IntervalSpec, SQUAREFREE_DENSITY,
};
use sqfree_core::residue::{rho_p2_hensel, rho_prime_power_exhaustive};
use sqfree_core::sieve::{count_representations, count_squarefree_values, short_interval_count, sieve_report, SieveParams};
use sqfree_core::singular::c_f_enclosure;
use sqfree_core::{BivarPoly, Error, FieldSpec, FqPoly, Limits, MultivarPoly};

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        passed,
        detail: detail.into(),
    }
}

fn field(q: u64) -> FieldSpec {
    FieldSpec::with_order(q).unwrap()
}

fn random_squarefree(f: &FieldSpec, max_x: usize, max_t: usize, rng: &mut ChaCha8Rng) -> BivarPoly {
    loop {
        let g = BivarPoly::random(f, max_x, max_t, rng);
        if g.deg_x().unwrap_or(0) >= 1 && g.is_squarefree().unwrap() {
            return g;
        }
    }
}

/// Square-freeness by trial division with `P^2` for every prime `P` of
/// degree `<= deg(v) / 2`; `primes` must list all of them.
fn squarefree_by_trial(v: &FqPoly, primes: &[PrimePoly]) -> bool {
    if v.is_zero() {
        return false;
    }
    let half = v.degree().unwrap() / 2;
    primes
        .iter()
        .filter(|p| p.degree() <= half)
        .all(|p| !(p.poly() * p.poly()).divides(v))
}

fn criterion_1() -> Outcome {
    let lim = Limits::default();
    let f3 = field(3);
    let x = BivarPoly::x(&f3);
    let primes = primes_below_degree(&f3, 3);
    let scan5 = (0..243u128)
        .filter(|&i| squarefree_by_trial(&FqPoly::from_index(&f3, i, 5), &primes))
        .count() as u128;
    let c5 = count_squarefree_values(&x, 5, &lim).unwrap();
    let c10 = count_squarefree_values(&x, 10, &lim).unwrap();
    let closed = 2 * (3u128.pow(9) + 1);
    let e = c_f_enclosure(&x, 4, &lim).unwrap();
    let density = BigRational::new(c10.into(), 59049.into());
    let two_thirds = BigRational::new(2.into(), 3.into());
    outcome(
        scan5 == 164 && c5 == 164 && c10 == 39368 && c10 == closed && e.contains(&density) && e.contains(&two_thirds),
        format!(
            "m=5 scan {scan5}, m=10 count {c10} (closed form {closed}), c_f in [{:.6}, {:.6}]",
            e.c_lo_f64(),
            e.c_hi_f64()
        ),
    )
}

fn criterion_2() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let (mut compared, mut bad) = (0, 0);
    for q in [2u64, 3] {
        let f = field(q);
        let primes = primes_below_degree(&f, 4);
        for _ in 0..30 {
            let g = random_squarefree(&f, 3, 4, &mut rng);
            let r = compute_r(&g).unwrap();
            for p in primes.iter().filter(|p| !p.poly().divides(&r)) {
                let h = rho_p2_hensel(&g, p, &r, 0).unwrap();
                let s = rho_prime_power_exhaustive(&g, p, 2, 1 << 20).unwrap();
                compared += 1;
                bad += usize::from(h != s);
            }
        }
    }
    outcome(bad == 0, format!("{compared} (f, P) pairs, {bad} mismatches"))
}

/// Criteria 3 and 4 share their runs.
fn criteria_3_4() -> (Outcome, Outcome) {
    let lim = Limits::default();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let (mut alternation_bad, mut formula_bad, mut formula_compared, mut sandwich_bad) = (0, 0, 0, 0);
    for i in 0..50 {
        let f = field(if i % 2 == 0 { 2 } else { 3 });
        let g = random_squarefree(&f, 3, 4, &mut rng);
        let params = SieveParams::new(8, 2, 6, f.p());
        let rep = sieve_report(&g, &params, false, &lim).unwrap();
        let c = &rep.counts;
        for (r, &nr) in rep.brun.partial_sums.iter().enumerate() {
            let n1 = c.n_prime as i128;
            let ok = if r % 2 == 0 { n1 <= nr } else { n1 >= nr };
            alternation_bad += usize::from(!ok);
            if 2 * params.m0 * r <= params.m {
                formula_compared += 1;
                formula_bad += usize::from(rep.brun.n_k_formula[r] != Some(rep.brun.n_k_scan[r]));
            }
        }
        sandwich_bad += usize::from(!(c.n <= c.n_prime && c.n_prime <= c.n + c.n_dprime + c.n_tprime));
    }
    (
        outcome(
            alternation_bad == 0 && formula_bad == 0,
            format!(
                "50 runs x r=0..6: {alternation_bad} alternation violations, {formula_bad}/{formula_compared} formula mismatches"
            ),
        ),
        outcome(sandwich_bad == 0, format!("50 runs, {sandwich_bad} sandwich violations")),
    )
}

fn criterion_5() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut failures = Vec::new();
    for q in [2u64, 3] {
        let f = field(q);
        for i in 0..20 {
            let g = random_squarefree(&f, 2, 2, &mut rng);
            let (big_f, big_g) = poonen_substitute(&g).unwrap();
            if certify_squarefree(&big_f, i).is_err() {
                failures.push(format!("F not certified square-free for {g}"));
            }
            if certify_coprime(&big_f, &big_g, i).is_err() {
                failures.push(format!("gcd(F, G) not certified constant for {g}"));
            }
            for _ in 0..100 {
                let y: Vec<FqPoly> = (0..big_f.nvars()).map(|_| FqPoly::random(&f, 4, &mut rng)).collect();
                if big_g.eval(&y) != big_f.eval(&y).derivative() {
                    failures.push(format!("G(y) != dF(y)/dt for {g}"));
                    break;
                }
            }
        }
    }
    let mut boxes = 0;
    while boxes < 20 {
        let f = field(if boxes % 2 == 0 { 2 } else { 3 });
        let nvars = rng.gen_range(1..=3);
        let m_p = rng.gen_range(1..=3);
        let h = MultivarPoly::random(&f, nvars, 2, 2, &mut rng);
        if h.is_zero() {
            continue;
        }
        let zeros = count_zeros_box(&h, m_p, 1 << 24).unwrap();
        if zeros > box_zero_bound(&h, m_p) {
            failures.push(format!("box bound exceeded for {h}"));
        }
        boxes += 1;
    }
    outcome(
        failures.is_empty(),
        if failures.is_empty() {
            "40 substitutions x 100 points, 20 box counts within bound".to_string()
        } else {
            failures.join("; ")
        },
    )
}

fn criterion_6() -> Outcome {
    let mut bad = Vec::new();
    for q in [2u64, 3, 4, 5] {
        let f = field(q);
        for d in 1..=8 {
            let n = enumerate_primes(&f, d).len() as u128;
            if n != prime_count(q, d as u32) {
                bad.push(format!("q={q} d={d}: {n}"));
            }
        }
    }
    let q2d3 = enumerate_primes(&field(2), 3).len();
    outcome(
        bad.is_empty() && q2d3 == 2,
        if bad.is_empty() {
            format!("all 32 (q, d) counts match, q=2 d=3 gives {q2d3}")
        } else {
            bad.join("; ")
        },
    )
}

fn criterion_7() -> Outcome {
    let lim = Limits::default();
    let f3 = field(3);
    let x = BivarPoly::x(&f3);
    let n = FqPoly::monomial(&f3, 1, 10);
    let primes = primes_below_degree(&f3, 6);
    let mut details = Vec::new();
    let mut ok = true;
    for m in [4usize, 6, 8] {
        let params = SieveParams::new(m, 2, 4, 3);
        let rep = short_interval_count(&x, &n, &params, 3, &lim).unwrap();
        let direct = (0..3u128.pow(m as u32))
            .filter(|&i| squarefree_by_trial(&(&n + &FqPoly::from_index(&f3, i, m)), &primes))
            .count() as u128;
        ok &= rep.counts.n == direct && rep.all_passed();
        details.push(format!("m={m}: {} vs {direct}", rep.counts.n));
    }
    let shifted = x.shift_x(&n);
    let mut invariance_bad = 0;
    for p in primes_below_degree(&f3, 4) {
        let a = rho_prime_power_exhaustive(&shifted, &p, 2, 1 << 20).unwrap();
        let b = rho_prime_power_exhaustive(&x, &p, 2, 1 << 20).unwrap();
        invariance_bad += usize::from(a != b);
    }
    ok &= invariance_bad == 0;
    outcome(
        ok,
        format!("{}; {invariance_bad} translation mismatches", details.join(", ")),
    )
}

fn criterion_8() -> Outcome {
    let lim = Limits::default();
    let f2 = field(2);
    let primes = primes_below_degree(&f2, 5);
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let (mut done, mut bad) = (0, 0);
    while done < 10 {
        let mut c: Vec<u32> = (0..8).map(|_| rng.gen_range(0..2)).collect();
        c.push(1);
        let n = FqPoly::from_ints(&f2, &c);
        if n.pth_root().is_some() {
            continue;
        }
        let rep = count_representations(&n, 2, 2, None, &lim).unwrap();
        let direct = (0..16u128)
            .filter(|&i| {
                let a = FqPoly::from_index(&f2, i, 4);
                squarefree_by_trial(&(&n - &(&a * &a)), &primes)
            })
            .count() as u128;
        bad += usize::from(rep.counts.n != direct);
        done += 1;
    }
    let square = FqPoly::from_ints(&f2, &[1, 0, 0, 0, 1, 0, 0, 0, 1]);
    let degenerate = matches!(count_representations(&square, 2, 2, None, &lim), Err(Error::PthPowerDegenerate));
    outcome(
        bad == 0 && degenerate,
        format!("10 targets, {bad} mismatches; square target rejected: {degenerate}"),
    )
}

fn criterion_9() -> Outcome {
    let lim = IntervalLimits::default();
    let x = 1_000_000u64;
    let window = count_squarefree_z(&IntervalSpec::new(x, 10_000), &lim).unwrap();
    let expected = SQUAREFREE_DENSITY * 10_000.0;
    let rel = (window as f64 - expected).abs() / expected;
    let small = count_squarefree_z(&IntervalSpec::new(1u32, 10), &lim).unwrap();
    let bound = half_log_bound(1000);
    let ie = inclusion_exclusion_count(&IntervalSpec::new(x, 1000), bound).unwrap();
    let small_primes: Vec<u64> = (2..bound).filter(|p| (2..*p).all(|d| p % d != 0)).collect();
    let direct = (x..x + 1000)
        .filter(|n| small_primes.iter().all(|p| n % (p * p) != 0))
        .count() as u128;
    let big = count_squarefree_z(&IntervalSpec::new(BigUint::from(x), 10_000), &lim).unwrap();
    outcome(
        rel < 0.01 && small == 7 && ie == direct && big == window,
        format!(
            "[1e6, 1e6+1e4): {window} vs {expected:.1} (rel {rel:.5}); [1,11): {small}; inclusion-exclusion over primes < {bound}: {ie} vs {direct}"
        ),
    )
}

fn criterion_10() -> Outcome {
    let experiments: Vec<Vec<&str>> = vec![
        vec!["count", "-q", "3", "-f", "x^2 - t", "-m", "6,7"],
        vec!["brun", "-q", "2", "-f", "x^3 + t*x + t^2 + 1", "-m", "8", "--m0", "2", "-r", "4"],
        vec!["interval", "-q", "3", "-N", "t^10", "-m", "6"],
        vec!["represent", "-q", "2", "-N", "t^8 + t^5 + t + 1", "-k", "2"],
        vec!["cfactor", "-q", "4", "-f", "x^2 + u*t", "--m0", "3"],
        vec!["rho", "-q", "3", "-f", "x^3 - t*x + 1", "--degree", "3"],
        vec!["poonen-check", "-q", "3", "-f", "x^2 - t", "-m", "3"],
        vec!["count", "-q", "3", "-f", "x", "-m", "4,5,6", "--format", "csv"],
    ];
    let mut mismatched = Vec::new();
    for exp in &experiments {
        let mut reference: Option<String> = None;
        for workers in ["1", "2", "3", "8", "1"] {
            let mut args = vec!["sqfree"];
            args.extend_from_slice(exp);
            args.extend_from_slice(&["--seed", "11", "--workers", workers]);
            let text = execute(args).map(|o| o.text).unwrap_or_else(|e| format!("error: {e}"));
            match &reference {
                None => reference = Some(text),
                Some(r) if *r != text => {
                    mismatched.push(exp[0].to_string());
                    break;
                }
                Some(_) => {}
            }
        }
    }
    outcome(
        mismatched.is_empty(),
        format!(
            "{} experiments x workers 1,2,3,8,1: {} differing",
            experiments.len(),
            if mismatched.is_empty() { "none".to_string() } else { mismatched.join(", ") }
        ),
    )
}

fn timed(f: impl FnOnce() -> Outcome, limit: Option<Duration>) -> (Outcome, Duration) {
    let start = Instant::now();
    let mut o = f();
    let elapsed = start.elapsed();
    if let Some(limit) = limit {
        if elapsed > limit {
            o.passed = false;
            o.detail.push_str(&format!("; exceeded {} s", limit.as_secs()));
        }
    }
    (o, elapsed)
}

fn main() {
    let secs = |s| Some(Duration::from_secs(s));
    let mut results: Vec<(u32, Outcome, Option<Duration>)> = Vec::new();
    let (o, t) = timed(criterion_1, secs(10));
    results.push((1, o, Some(t)));
    let (o, t) = timed(criterion_2, secs(30));
    results.push((2, o, Some(t)));
    let (c3, c4) = criteria_3_4();
    results.push((3, c3, None));
    results.push((4, c4, None));
    results.push((5, criterion_5(), None));
    let (o, t) = timed(criterion_6, secs(5));
    results.push((6, o, Some(t)));
    results.push((7, criterion_7(), None));
    results.push((8, criterion_8(), None));
    let (o, t) = timed(criterion_9, secs(5));
    results.push((9, o, Some(t)));
    results.push((10, criterion_10(), None));

    let mut failed = 0;
    for (n, o, t) in &results {
        let time = t.map(|t| format!(" [{:.2} s]", t.as_secs_f64())).unwrap_or_default();
        println!(
            "criterion {n:>2}: {}{time} {}",
            if o.passed { "PASS" } else { "FAIL" },
            o.detail
        );
        failed += usize::from(!o.passed);
    }
    println!("acceptance: {}/{} criteria passed", results.len() - failed, results.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
