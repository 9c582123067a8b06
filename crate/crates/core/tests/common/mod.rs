#![allow(dead_code)]

use rand::Rng;
use sqfree_core::{BivarPoly, FieldSpec, FqPoly};

pub fn field(q: u64) -> FieldSpec {
    FieldSpec::with_order(q).unwrap()
}

pub fn tp(f: &FieldSpec, c: &[u32]) -> FqPoly {
    FqPoly::from_ints(f, c)
}

/// `sum_i c_i(t) x^i` from t-coefficient lists.
pub fn bv(f: &FieldSpec, cs: &[&[u32]]) -> BivarPoly {
    BivarPoly::new(f, cs.iter().map(|c| tp(f, c)).collect())
}

/// Random square-free `f` with `1 <= deg_x <= max_x`, `deg_t <= max_t`.
pub fn random_squarefree<R: Rng>(f: &FieldSpec, max_x: usize, max_t: usize, rng: &mut R) -> BivarPoly {
    loop {
        let g = BivarPoly::random(f, rng.gen_range(1..=max_x), max_t, rng);
        if g.deg_x().unwrap_or(0) >= 1 && g.is_squarefree().unwrap() {
            return g;
        }
    }
}
