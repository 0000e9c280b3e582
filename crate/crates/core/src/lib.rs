//! Two-term hypergeometric recursions and the series accelerations they
//! induce, computed in exact arithmetic.
//!
//! A bivariate hypergeometric term `F(n, k)` with a creative-telescoping
//! certificate `(R, p1, p2, r)`, i.e.
//!
//! ```text
//! p1(n) F(n + r, k) + p2(n) F(n, k) = G(n, k + 1) - G(n, k),   G = R F,
//! ```
//!
//! yields `f(n) = g1(n) + g2(n) f(n + r)` for `f(n) = sum_k F(n, k)`.
//! Unrolling the recursion gives a geometrically convergent series for
//! `f(n)` whose rate is the limit of `g2` along the shifts.
//!
//! Modules, bottom up:
//!
//! - [`exact`]: rationals, polynomials, rational functions, linear solving
//! - [`hyperterm`]: Pochhammer-structured terms and their shift quotients
//! - [`certify`]: certificate verification, discovery, and recursion derivation
//! - [`accelerate`]: partial sums, convergence rates, canonical series forms
//! - [`refconst`]: independent high-precision reference constants
//! - [`catalog`]: the built-in families and identities, and the text format

pub mod accelerate;
pub mod catalog;
pub mod certify;
pub mod error;
pub mod exact;
pub mod hyperterm;
pub mod refconst;

pub use error::{Error, Result};
pub use exact::{ExactRational, MultiPoly, RatFunc, Var};
