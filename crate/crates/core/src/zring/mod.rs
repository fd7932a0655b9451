//! Exact integer polynomial arithmetic and finite-rank quotient rings.

pub mod dense;
pub mod linalg;
pub mod poly;
pub mod quotient;

pub use dense::{determinant, hnf, identity, inverse_unimodular, mat_mul, mat_vec, smith_invariants, transpose, Matrix};
pub use poly::{Monomial, Poly, Var, VarSet, VarTag};
pub use quotient::{build_quotient, MonomialFilter, QuotientRing, QuotientSpec, RingElement, DEFAULT_MONOMIAL_CAP};
