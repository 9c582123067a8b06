use super::BivarPoly;
use crate::error::{Error, Result};
use crate::ff_poly::FqPoly;

/// `Res_x(f, g)` in F_q[t], by the subresultant chain.
///
/// Conventions for x-degree zero: `Res_x(c, g) = c^{deg_x g}` and
/// `Res_x(f, c) = c^{deg_x f}`; in particular `Res_x(c, 0) = 1` for a nonzero
/// constant `c`, and `Res_x(f, 0) = 0` when `deg_x f >= 1`.
pub fn resultant_x(f: &BivarPoly, g: &BivarPoly) -> Result<FqPoly> {
    let field = f.field();
    if f.is_zero() && g.is_zero() {
        return Err(Error::ZeroInput("resultant of two zero polynomials"));
    }
    let one = FqPoly::one(field);
    match (f.deg_x(), g.deg_x()) {
        (None, Some(0)) => return Ok(one),
        (Some(0), None) => return Ok(one),
        (None, _) | (_, None) => return Ok(FqPoly::zero(field)),
        (Some(0), Some(dg)) => return Ok(f.leading().pow(dg as u64)),
        (Some(df), Some(0)) => return Ok(g.leading().pow(df as u64)),
        _ => {}
    }

    let ca = f.content();
    let cb = g.content();
    let mut a = f.primitive_part();
    let mut b = g.primitive_part();
    let (da, db) = (a.deg_x().unwrap(), b.deg_x().unwrap());
    let scale = &ca.pow(db as u64) * &cb.pow(da as u64);
    let mut negate = false;
    if da < db {
        std::mem::swap(&mut a, &mut b);
        if da % 2 == 1 && db % 2 == 1 {
            negate = true;
        }
    }
    let mut gg = one.clone();
    let mut h = one.clone();
    loop {
        let (da, db) = (a.deg_x().unwrap(), b.deg_x().unwrap());
        let delta = (da - db) as u64;
        if da % 2 == 1 && db % 2 == 1 {
            negate = !negate;
        }
        let r = a.prem(&b)?;
        a = b;
        let divisor = &gg * &h.pow(delta);
        b = r.div_t_exact(&divisor).expect("subresultant division is exact");
        gg = a.leading().clone();
        // h <- h^(1 - delta) g^delta
        h = if delta == 0 {
            h
        } else {
            gg.pow(delta)
                .div_exact(&h.pow(delta - 1))
                .expect("subresultant division is exact")
        };
        match b.deg_x() {
            Some(d) if d > 0 => continue,
            _ => break,
        }
    }
    let da = a.deg_x().unwrap() as u64;
    let last = if b.is_zero() {
        FqPoly::zero(field)
    } else {
        b.leading()
            .pow(da)
            .div_exact(&h.pow(da - 1))
            .expect("subresultant division is exact")
    };
    let mut res = &scale * &last;
    if negate {
        res = -&res;
    }
    Ok(res)
}

/// `R(t) = Res_x(f_i, df/dt) * Res_x(f_s, df/dx)` for square-free `f`.
/// Nonzero, with `deg R <= 4 deg_x(f) deg_t(f)`.
pub fn compute_r(f: &BivarPoly) -> Result<FqPoly> {
    let (fi, fs) = f.split_inseparable()?;
    let (fx, ft) = f.partials();
    let r1 = resultant_x(&fi, &ft)?;
    let r2 = resultant_x(&fs, &fx)?;
    let r = &r1 * &r2;
    if r.is_zero() {
        return Err(Error::NotSquarefree);
    }
    let k = f.deg_x().unwrap_or(0);
    let n = f.deg_t().unwrap_or(0);
    let d = r.degree().unwrap_or(0);
    assert!(d <= 4 * k * n, "deg R = {d} exceeds 4kn = {}", 4 * k * n);
    Ok(r)
}
