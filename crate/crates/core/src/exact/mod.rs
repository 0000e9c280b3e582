//! Exact arithmetic: rationals, multivariate polynomials, normalized
//! rational functions, linear solving and rational-root factoring.

pub mod expr;
pub mod factor;
mod heugcd;
pub mod interp;
pub mod linsolve;
pub mod modular;
pub mod poly;
pub mod ratfunc;
pub mod rational;

pub use expr::{parse_poly, parse_ratfunc};
pub use factor::{factor_linear_rational, LinearFactorization};
pub use linsolve::{solve_linear_system, Field, LinearSolution};
pub use poly::{MultiPoly, Var};
pub use ratfunc::{ratfunc_equal, ratfunc_normalize, RatFunc};
pub use rational::{int, parse_rational, ratio, ExactRational};
