//! Polynomials in F_q[t][x] and in several variables `y_0..y_l` over F_q[t].

mod multivar;
mod poly;
mod resultant;

pub use multivar::{
    box_zero_bound, certify_coprime, certify_squarefree, count_common_prime_points, count_zeros_box,
    has_large_prime_factor, poonen_substitute, MultivarPoly,
};
pub use poly::BivarPoly;
pub use resultant::{compute_r, resultant_x};
