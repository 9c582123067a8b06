mod common;

use common::{bv, field, random_squarefree};
use num_rational::BigRational;
use num_traits::Zero;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sqfree_core::bivariate::compute_r;
use sqfree_core::ff_poly::prime_count;
use sqfree_core::singular::{c_f_enclosure, ratio, singular_sum_partial};
use sqfree_core::Limits;

#[test]
fn enclosures_nest_as_m0_grows() {
    let lim = Limits::default();
    let f3 = field(3);
    let g = bv(&f3, &[&[0, 2], &[], &[1]]);
    let mut prev = c_f_enclosure(&g, 2, &lim).unwrap();
    for m0 in 3..=4 {
        let cur = c_f_enclosure(&g, m0, &lim).unwrap();
        assert!(cur.c_lo >= prev.c_lo && cur.c_hi <= prev.c_hi, "m0 = {m0}");
        assert!(&cur.c_hi - &cur.c_lo < &prev.c_hi - &prev.c_lo);
        prev = cur;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(41);
    for q in [2u64, 3] {
        let f = field(q);
        for _ in 0..8 {
            let g = random_squarefree(&f, 2, 3, &mut rng);
            let mut prev = c_f_enclosure(&g, 1, &lim).unwrap();
            for m0 in 2..=4 {
                let cur = c_f_enclosure(&g, m0, &lim).unwrap();
                assert!(cur.c_lo >= prev.c_lo && cur.c_hi <= prev.c_hi, "f = {g} m0 = {m0}");
                prev = cur;
            }
        }
    }
}

#[test]
fn partial_sum_below_two_piece_majorant() {
    let lim = Limits::default();
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    for q in [2u64, 3] {
        let f = field(q);
        for _ in 0..10 {
            let g = random_squarefree(&f, 3, 3, &mut rng);
            let k = g.deg_x().unwrap() as u128;
            let r = compute_r(&g).unwrap();
            let m0 = 4;
            let (v1, _) = singular_sum_partial(&g, m0, &lim).unwrap();
            let mut bound = BigRational::zero();
            for d in 1..m0 {
                bound += ratio(k * prime_count(q, d as u32), (q as u128).pow(2 * d as u32));
            }
            for (d, part) in r.radical().distinct_degree(None) {
                if d < m0 {
                    bound += ratio(k * (part.degree().unwrap() / d) as u128, (q as u128).pow(d as u32));
                }
            }
            assert!(v1 <= bound, "f = {g}");
        }
    }
}

#[test]
fn unobstructed_lower_end_is_positive() {
    let lim = Limits::default();
    let f3 = field(3);
    for g in [bv(&f3, &[&[], &[1]]), bv(&f3, &[&[0, 2], &[], &[1]])] {
        let e = c_f_enclosure(&g, 5, &lim).unwrap();
        assert!(e.obstruction.is_none());
        assert!(e.c_lo > BigRational::zero(), "f = {g}");
    }
}

#[test]
fn zeta_value_and_scan_density_inside() {
    let lim = Limits::default();
    let f3 = field(3);
    let e = c_f_enclosure(&bv(&f3, &[&[], &[1]]), 4, &lim).unwrap();
    assert!(e.contains(&ratio(2, 3)));
    assert!(e.contains(&ratio(39368, 59049)));
    assert!(e.c_lo_f64() <= 2.0 / 3.0 && 2.0 / 3.0 <= e.c_hi_f64());
}
