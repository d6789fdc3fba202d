//! Exact arithmetic: rationals, sparse (Laurent) polynomials and linear
//! solving.

mod linsolve;
mod poly;
mod scalar;

pub use linsolve::{
    rank, solve_exact, sparse_rank, InconsistencyWitness, LinearRow, LinearSystem, SolveOutcome,
};
pub use poly::{ExponentVector, Family, PolyRecord, SparsePoly, TermRecord};
pub use scalar::{
    binomial, display_scalar, factorial, falling_factorial, format_scalar, int, one, parse_scalar,
    pow_scalar, ratio, zero, Scalar,
};
