//! Arithmetic in F_q and F_q[t].

mod field;
mod kernel;
mod poly;
mod primes;

pub use field::{prime_power, FieldSpec, FiniteField};
#[allow(unused_imports)]
pub(crate) use poly::FrobeniusMap;
pub use poly::{FqPoly, Poly};
pub use primes::{enumerate_primes, mobius_int, mobius_nu, prime_count, primes_below_degree, PrimePoly};
