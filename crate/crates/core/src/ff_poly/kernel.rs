//! Allocation-light routines on raw coefficient slices over F_q, used by the
//! enumeration hot loops. Same algorithms as the `Poly` methods.

use super::field::{FieldSpec, FiniteField};

fn trim(v: &mut Vec<u32>) {
    while v.last() == Some(&0) {
        v.pop();
    }
}

/// `a mod m` in place, `m` monic.
fn rem_monic(field: &FieldSpec, a: &mut Vec<u32>, m: &[u32]) {
    trim(a);
    let dm = m.len() - 1;
    while a.len() > dm {
        let top = a.len() - 1;
        let c = a[top];
        if c != 0 {
            let shift = top - dm;
            for (j, &b) in m.iter().enumerate() {
                if b != 0 {
                    a[shift + j] = field.sub(&a[shift + j], &field.mul(&c, &b));
                }
            }
        }
        a.pop();
        trim(a);
    }
}

fn mulmod(field: &FieldSpec, a: &[u32], b: &[u32], m: &[u32], out: &mut Vec<u32>) {
    out.clear();
    if a.is_empty() || b.is_empty() {
        return;
    }
    out.resize(a.len() + b.len() - 1, 0);
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            if y != 0 {
                out[i + j] = field.add(&out[i + j], &field.mul(&x, &y));
            }
        }
    }
    rem_monic(field, out, m);
}

/// True when `gcd(a, b) = 1`, destroying both inputs.
fn coprime(field: &FieldSpec, a: &mut Vec<u32>, b: &mut Vec<u32>) -> bool {
    trim(a);
    trim(b);
    loop {
        if b.is_empty() {
            return a.len() == 1;
        }
        if b.len() == 1 {
            return true;
        }
        let inv = field.inv(b.last().unwrap()).unwrap();
        for c in b.iter_mut() {
            *c = field.mul(c, &inv);
        }
        rem_monic(field, a, b);
        std::mem::swap(a, b);
    }
}

/// Irreducibility of the monic `f` (lowest coefficient first) over F_q.
pub(crate) fn is_irreducible_monic(field: &FieldSpec, f: &[u32]) -> bool {
    let d = f.len() - 1;
    if d <= 1 {
        return d == 1;
    }
    let q = field.q() as u64;
    // X^q mod f by square-and-multiply.
    let mut xq = vec![1u32];
    let mut base = vec![0u32, 1];
    rem_monic(field, &mut base, f);
    let mut scratch = Vec::with_capacity(2 * d);
    let mut n = q;
    while n > 0 {
        if n & 1 == 1 {
            mulmod(field, &xq, &base, f, &mut scratch);
            std::mem::swap(&mut xq, &mut scratch);
        }
        n >>= 1;
        if n > 0 {
            mulmod(field, &base, &base, f, &mut scratch);
            std::mem::swap(&mut base, &mut scratch);
        }
    }
    // rows[i] = X^{iq} mod f; h -> h^q is linear over F_q.
    let mut rows: Vec<Vec<u32>> = Vec::with_capacity(d);
    let mut cur = vec![1u32];
    for _ in 0..d {
        rows.push(cur.clone());
        mulmod(field, &cur, &xq, f, &mut scratch);
        std::mem::swap(&mut cur, &mut scratch);
    }
    let mut h = xq;
    let mut next = vec![0u32; d];
    let mut a = Vec::with_capacity(d + 1);
    let mut b = Vec::with_capacity(d + 1);
    for i in 1..=d / 2 {
        if i > 1 {
            next.iter_mut().for_each(|c| *c = 0);
            for (k, &c) in h.iter().enumerate() {
                if c == 0 {
                    continue;
                }
                for (j, &r) in rows[k].iter().enumerate() {
                    next[j] = field.add(&next[j], &field.mul(&c, &r));
                }
            }
            h.clear();
            h.extend_from_slice(&next);
            trim(&mut h);
        }
        // gcd(f, h - X)
        a.clear();
        a.extend_from_slice(f);
        b.clear();
        b.extend_from_slice(&h);
        if b.len() < 2 {
            b.resize(2, 0);
        }
        b[1] = field.sub(&b[1], &1);
        if !coprime(field, &mut a, &mut b) {
            return false;
        }
    }
    true
}
