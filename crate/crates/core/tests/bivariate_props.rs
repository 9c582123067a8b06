mod common;

use common::{bv, field, random_squarefree, tp};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sqfree_core::bivariate::{compute_r, resultant_x};
use sqfree_core::residue::{count_roots_mod_p, rho_p2_lift_check, rho_prime_power_exhaustive, ResidueField};
use sqfree_core::{ff_poly::primes_below_degree, BivarPoly, FieldSpec, FiniteField, FqPoly};

/// Determinant by permutation expansion.
fn leibniz(m: &[Vec<FqPoly>], field: &FieldSpec) -> FqPoly {
    let n = m.len();
    let mut perm: Vec<usize> = (0..n).collect();
    let mut total = FqPoly::zero(field);
    permute(&mut perm, 0, m, &mut total);
    total
}

fn permute(perm: &mut Vec<usize>, i: usize, m: &[Vec<FqPoly>], total: &mut FqPoly) {
    let n = perm.len();
    if i == n {
        let field = total.field().clone();
        let mut prod = FqPoly::one(&field);
        for (r, &c) in perm.iter().enumerate() {
            prod = &prod * &m[r][c];
        }
        let mut inversions = 0;
        for a in 0..n {
            for b in a + 1..n {
                if perm[a] > perm[b] {
                    inversions += 1;
                }
            }
        }
        *total = if inversions % 2 == 0 { &*total + &prod } else { &*total - &prod };
        return;
    }
    for j in i..n {
        perm.swap(i, j);
        permute(perm, i + 1, m, total);
        perm.swap(i, j);
    }
}

fn sylvester(f: &BivarPoly, g: &BivarPoly) -> Vec<Vec<FqPoly>> {
    let field = f.field();
    let (m, n) = (f.deg_x().unwrap(), g.deg_x().unwrap());
    let size = m + n;
    let mut rows = Vec::new();
    for i in 0..n {
        let mut row = vec![FqPoly::zero(field); size];
        for j in 0..=m {
            row[i + j] = f.coeff(m - j);
        }
        rows.push(row);
    }
    for i in 0..m {
        let mut row = vec![FqPoly::zero(field); size];
        for j in 0..=n {
            row[i + j] = g.coeff(n - j);
        }
        rows.push(row);
    }
    rows
}

#[test]
fn worked_examples() {
    let f3 = field(3);
    let f2 = field(2);
    assert_eq!(bv(&f3, &[&[], &[1]]).eval(&tp(&f3, &[1, 0, 1])), tp(&f3, &[1, 0, 1]));
    assert_eq!(bv(&f3, &[&[0, 2], &[], &[1]]).eval(&tp(&f3, &[0, 1])), tp(&f3, &[0, 2, 1]));
    // (t + 1) x + t^3 at x = t + 2
    assert_eq!(bv(&f3, &[&[0, 0, 0, 1], &[1, 1]]).eval(&tp(&f3, &[2, 1])), tp(&f3, &[2, 0, 1, 1]));

    assert!(bv(&f3, &[&[], &[], &[], &[1]]).partial_x().is_zero());
    let (fx, ft) = bv(&f3, &[&[0, 2], &[], &[1]]).partials();
    assert_eq!(fx, bv(&f3, &[&[], &[2]]));
    assert_eq!(ft, bv(&f3, &[&[2]]));
    let (fx, ft) = bv(&f2, &[&[], &[], &[], &[0, 1]]).partials();
    assert_eq!(fx, bv(&f2, &[&[], &[], &[0, 1]]));
    assert_eq!(ft, bv(&f2, &[&[], &[], &[], &[1]]));

    assert!(bv(&f2, &[&[0, 1], &[], &[1]]).is_squarefree().unwrap());
    let xmt = bv(&f3, &[&[0, 2], &[1]]);
    assert!(!(&xmt * &xmt).is_squarefree().unwrap());
    assert!(!bv(&f3, &[&[0, 0, 1], &[0, 0, 1]]).is_squarefree().unwrap());
    assert!(BivarPoly::zero(&f3).is_squarefree().is_err());

    let g = bv(&f2, &[&[0, 1], &[], &[1]]);
    assert_eq!(g.split_inseparable().unwrap(), (g.clone(), BivarPoly::one(&f2)));
    let g = bv(&f3, &[&[0, 2], &[], &[1]]);
    assert_eq!(g.split_inseparable().unwrap(), (BivarPoly::one(&f3), g.clone()));
    let a = bv(&f2, &[&[0, 1], &[], &[1]]);
    let b = bv(&f2, &[&[1], &[1]]);
    assert_eq!((&a * &b).split_inseparable().unwrap(), (a, b));
}

#[test]
fn resultant_matches_sylvester_determinant() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for q in [2u64, 3, 4, 5] {
        let f = field(q);
        for _ in 0..40 {
            let a = BivarPoly::random(&f, 3, 2, &mut rng);
            let b = BivarPoly::random(&f, 3, 2, &mut rng);
            if a.deg_x().unwrap_or(0) < 1 || b.deg_x().unwrap_or(0) < 1 {
                continue;
            }
            let det = leibniz(&sylvester(&a, &b), &f);
            assert_eq!(resultant_x(&a, &b).unwrap(), det, "q={q} a={a} b={b}");
        }
    }
}

#[test]
fn resultant_vanishes_on_common_factor() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let f = field(3);
    for _ in 0..30 {
        let h = BivarPoly::random(&f, 2, 2, &mut rng);
        if h.deg_x().unwrap_or(0) < 1 {
            continue;
        }
        let a = &BivarPoly::random(&f, 2, 2, &mut rng) * &h;
        let b = &BivarPoly::random(&f, 2, 2, &mut rng) * &h;
        if a.is_zero() || b.is_zero() {
            continue;
        }
        assert!(resultant_x(&a, &b).unwrap().is_zero());
    }
}

#[test]
fn split_and_r_properties() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for q in [2u64, 3, 4] {
        let f = field(q);
        for _ in 0..25 {
            let g = random_squarefree(&f, 4, 3, &mut rng);
            let (fi, fs) = g.split_inseparable().unwrap();
            let prod = &fi * &fs;
            // Equal up to a unit of F_q.
            let unit = f.mul(g.leading().leading(), &f.inv(prod.leading().leading()).unwrap());
            assert_eq!(prod.scale(&FqPoly::constant(&f, unit)), g);
            assert!(fi.is_in_x_pth_powers());
            assert!(fs.gcd(&fs.partial_x()).is_field_constant(), "g={g}");
            let r = compute_r(&g).unwrap();
            assert!(!r.is_zero());
            assert!(r.degree().unwrap_or(0) <= 4 * g.deg_x().unwrap() * g.deg_t().unwrap_or(0));
        }
    }
}

#[test]
fn root_count_bounds() {
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    for q in [2u64, 3] {
        let f = field(q);
        let primes = primes_below_degree(&f, 4);
        for _ in 0..15 {
            let g = random_squarefree(&f, 3, 4, &mut rng);
            let k = g.deg_x().unwrap() as u128;
            let r = compute_r(&g).unwrap();
            for p in &primes {
                let rf = ResidueField::new(p);
                let rho = count_roots_mod_p(&g, p);
                if !rf.reduce_bivar(&g).is_zero() {
                    assert!(rho <= k.min(p.norm()));
                }
                if p.poly().divides(&r) && p.norm().pow(2) <= 1 << 16 {
                    let rho2 = rho_prime_power_exhaustive(&g, p, 2, 1 << 16).unwrap();
                    assert!(rho2 <= k * p.norm());
                    assert_eq!(rho_p2_lift_check(&g, p, 0), rho2);
                }
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn eval_commutes_with_reduction(seed in any::<u64>(), q in prop::sample::select(vec![2u64, 3, 4])) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = field(q);
        let g = BivarPoly::random(&f, 3, 3, &mut rng);
        let a = FqPoly::random(&f, 5, &mut rng);
        for p in primes_below_degree(&f, 3) {
            let rf = ResidueField::new(&p);
            let lhs = rf.reduce(&g.eval(&a));
            let rhs = rf.reduce_bivar(&g).eval(&rf.reduce(&a));
            prop_assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn gcd_divides_both(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = field(3);
        let h = BivarPoly::random(&f, 2, 2, &mut rng);
        let a = &BivarPoly::random(&f, 2, 2, &mut rng) * &h;
        let b = &BivarPoly::random(&f, 2, 2, &mut rng) * &h;
        let g = a.gcd(&b);
        if !g.is_zero() {
            prop_assert!(a.div_exact(&g).is_some());
            prop_assert!(b.div_exact(&g).is_some());
            if !h.is_zero() && !a.is_zero() && !b.is_zero() {
                prop_assert!(g.div_exact(&h.primitive_part()).is_some());
            }
        }
    }
}
