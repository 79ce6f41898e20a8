//! Exact arithmetic in the equivariant base ring `Z[u_1^±, ..., u_n^±, q^±, p^±]`
//! and its fraction field, one-parameter-subgroup limits, and Newton polytopes.

mod gcd;
pub mod linalg;
mod limit;
pub mod lp;
mod mono;
mod poly;
mod polytope;
mod rf;

pub use gcd::{gcd, gcd_cofactors};
pub use limit::{limit_along, LimitResult, OneParamSubgroup};
pub use mono::{Mono, MAX_VARS};
pub use poly::{p_index, q_index, LaurentPoly};
pub use polytope::{a_projection, is_bounded_by_polytope, newton_polytope_a, polytope_contains, polytope_contains_eps, NewtonPolytopeA, RatVec};
pub use rf::RationalFunction;

use thiserror::Error;

/// Errors raised by ring operations on invalid input.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RingError {
    #[error("zero denominator")]
    ZeroDenominator,
    #[error("the zero polynomial has no Newton polytope")]
    ZeroPolytope,
    #[error("subgroup is not inside A: exponent of q is {0}")]
    NotInA(i64),
    #[error("dimension mismatch: {0} vs {1}")]
    Dimension(usize, usize),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("the denominator vanishes identically along the subgroup")]
    DegenerateSubgroup,
}
