//! Exact arithmetic over F_q[t] for studying square-free values of
//! polynomials `f(t, x)`: root counts modulo prime squares, the singular
//! series, Brun-sieve decompositions of the square-free count, and
//! exhaustive counting experiments.

pub mod bivariate;
pub mod error;
pub mod ff_poly;
pub mod interval_z;
pub mod options;
pub mod residue;
pub mod sieve;
pub mod singular;

pub use bivariate::{BivarPoly, MultivarPoly};
pub use error::{Error, Result};
pub use ff_poly::{FieldSpec, FiniteField, FqPoly, Poly, PrimePoly};
pub use options::Limits;
