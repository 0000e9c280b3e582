//! Exact Gaussian elimination.

use num_traits::{One, Zero};

use super::ratfunc::RatFunc;
use super::rational::ExactRational;

/// The operations Gaussian elimination needs from its scalars.
pub trait Field: Clone {
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn add(&self, other: &Self) -> Self;
    fn sub(&self, other: &Self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    /// `other` is never zero.
    fn div(&self, other: &Self) -> Self;
    /// Size estimate used to pick small pivots.
    fn weight(&self) -> usize {
        0
    }
}

impl Field for ExactRational {
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn div(&self, o: &Self) -> Self {
        self / o
    }
    fn weight(&self) -> usize {
        (self.numer().bits() + self.denom().bits()) as usize
    }
}

impl Field for RatFunc {
    fn zero() -> Self {
        RatFunc::zero()
    }
    fn one() -> Self {
        RatFunc::one()
    }
    fn is_zero(&self) -> bool {
        RatFunc::is_zero(self)
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn div(&self, o: &Self) -> Self {
        self / o
    }
    fn weight(&self) -> usize {
        self.num().num_terms() + self.den().num_terms()
    }
}

/// Outcome of [`solve_linear_system`].
#[derive(Debug, Clone, PartialEq)]
pub enum LinearSolution<F> {
    /// One solution, with every free variable set to zero.
    Solved(Vec<F>),
    /// Some equation reduces to `0 = c` with `c != 0`.
    Inconsistent { row: usize },
}

impl<F> LinearSolution<F> {
    pub fn solution(self) -> Option<Vec<F>> {
        match self {
            LinearSolution::Solved(v) => Some(v),
            LinearSolution::Inconsistent { .. } => None,
        }
    }
}

/// Solves `A x = b` exactly. Rows of `a` are equations.
pub fn solve_linear_system<F: Field>(a: &[Vec<F>], b: &[F]) -> LinearSolution<F> {
    assert_eq!(a.len(), b.len(), "one right-hand side per equation");
    let cols = a.first().map_or(0, |r| r.len());
    let mut m: Vec<Vec<F>> = a
        .iter()
        .zip(b)
        .map(|(row, rhs)| {
            assert_eq!(row.len(), cols, "rectangular matrix");
            let mut r = row.clone();
            r.push(rhs.clone());
            r
        })
        .collect();

    let mut pivots = Vec::new();
    let mut rank = 0;
    for col in 0..cols {
        let pick = (rank..m.len())
            .filter(|&r| !m[r][col].is_zero())
            .min_by_key(|&r| m[r][col].weight());
        let Some(p) = pick else { continue };
        m.swap(rank, p);
        let inv_row: Vec<F> = {
            let piv = m[rank][col].clone();
            m[rank].iter().map(|x| x.div(&piv)).collect()
        };
        m[rank] = inv_row;
        for r in 0..m.len() {
            if r == rank || m[r][col].is_zero() {
                continue;
            }
            let factor = m[r][col].clone();
            for c in col..=cols {
                if !m[rank][c].is_zero() {
                    let t = m[r][c].sub(&factor.mul(&m[rank][c]));
                    m[r][c] = t;
                }
            }
        }
        pivots.push(col);
        rank += 1;
        if rank == m.len() {
            break;
        }
    }
    for (r, row) in m.iter().enumerate().skip(rank) {
        if !row[cols].is_zero() {
            return LinearSolution::Inconsistent { row: r };
        }
    }
    let mut x = vec![F::zero(); cols];
    for (r, &c) in pivots.iter().enumerate() {
        x[c] = m[r][cols].clone();
    }
    LinearSolution::Solved(x)
}
