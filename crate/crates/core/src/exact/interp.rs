//! Determinants and black-box multivariate interpolation.

use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::poly::{MultiPoly, Var, NVARS};
use super::rational::ExactRational;

/// Determinant of a square matrix by elimination.
pub fn determinant(m: &[Vec<ExactRational>]) -> ExactRational {
    let n = m.len();
    let mut a: Vec<Vec<ExactRational>> = m.to_vec();
    let mut det = ExactRational::one();
    for col in 0..n {
        let Some(p) = (col..n).find(|&r| !a[r][col].is_zero()) else {
            return ExactRational::zero();
        };
        if p != col {
            a.swap(p, col);
            det = -det;
        }
        let piv = a[col][col].clone();
        det *= &piv;
        for r in col + 1..n {
            if a[r][col].is_zero() {
                continue;
            }
            let f = &a[r][col] / &piv;
            for c in col..n {
                let t = &f * &a[col][c];
                a[r][c] -= t;
            }
        }
    }
    det
}

/// `[det M, det M_0, .., det M_{n-1}]` where `M_j` is `M` with column `j`
/// replaced by `rhs`, for integer data, by fraction-free elimination.
/// Falls back to separate determinants when `M` is singular.
pub fn cramer_integer(m: &[Vec<BigInt>], rhs: &[BigInt]) -> Vec<BigInt> {
    let n = m.len();
    let mut a: Vec<Vec<BigInt>> = m
        .iter()
        .zip(rhs)
        .map(|(row, b)| {
            let mut r = row.clone();
            r.push(b.clone());
            r
        })
        .collect();
    let mut sign = false;
    let mut prev = BigInt::one();
    for col in 0..n {
        let Some(p) = (col..n).find(|&r| !a[r][col].is_zero()) else {
            return singular_cramer(m, rhs);
        };
        if p != col {
            a.swap(p, col);
            sign = !sign;
        }
        for r in col + 1..n {
            for c in col + 1..=n {
                let t = &a[col][col] * &a[r][c] - &a[r][col] * &a[col][c];
                a[r][c] = t / &prev;
            }
            a[r][col] = BigInt::zero();
        }
        prev = a[col][col].clone();
    }
    let det = a[n - 1][n - 1].clone();
    // det * x_j by back substitution; every division is exact
    let mut dx = vec![BigInt::zero(); n];
    for j in (0..n).rev() {
        let mut acc = &det * &a[j][n];
        for k in j + 1..n {
            acc -= &a[j][k] * &dx[k];
        }
        dx[j] = acc / &a[j][j];
    }
    let mut out = Vec::with_capacity(n + 1);
    out.push(det);
    out.extend(dx);
    if sign {
        for v in &mut out {
            *v = -&*v;
        }
    }
    out
}

fn singular_cramer(m: &[Vec<BigInt>], rhs: &[BigInt]) -> Vec<BigInt> {
    let q = |m: &[Vec<BigInt>]| -> Vec<Vec<ExactRational>> {
        m.iter()
            .map(|r| r.iter().map(|x| ExactRational::from_integer(x.clone())).collect())
            .collect()
    };
    let mut out = vec![determinant(&q(m)).to_integer()];
    for j in 0..m.len() {
        let mut mj = m.to_vec();
        for (row, b) in mj.iter_mut().zip(rhs) {
            row[j] = b.clone();
        }
        out.push(determinant(&q(&mj)).to_integer());
    }
    out
}

/// An integer-coefficient polynomial flattened for repeated evaluation at
/// integer points.
#[derive(Clone, Debug)]
pub struct IntPoly {
    terms: Vec<([u32; NVARS], BigInt)>,
}

impl IntPoly {
    /// `None` unless every coefficient is an integer.
    pub fn new(p: &MultiPoly) -> Option<IntPoly> {
        let terms = p
            .terms()
            .map(|(e, c)| c.is_integer().then(|| (*e, c.to_integer())))
            .collect::<Option<Vec<_>>>()?;
        Some(IntPoly { terms })
    }

    /// The coefficients reduced mod `p`.
    pub fn residues(&self, p: u64) -> super::modular::ModPoly {
        super::modular::ModPoly::new(self.terms.iter().map(|(e, c)| (e, c)), p)
    }

    pub fn max_degree(&self, v: Var) -> u32 {
        self.terms.iter().map(|(e, _)| e[v.index()]).max().unwrap_or(0)
    }

    /// `powers[v][d]` must hold the value of variable `v` to the `d`.
    pub fn eval(&self, powers: &[Vec<BigInt>; NVARS]) -> BigInt {
        let mut acc = BigInt::zero();
        for (e, c) in &self.terms {
            let mut t = c.clone();
            for (i, &d) in e.iter().enumerate() {
                if d > 0 {
                    t *= &powers[i][d as usize];
                }
            }
            acc += t;
        }
        acc
    }
}

/// Power table for [`IntPoly::eval`]; unbound variables read as zero.
pub fn power_table(pt: &Point, max_deg: &[u32; NVARS]) -> [Vec<BigInt>; NVARS] {
    std::array::from_fn(|i| {
        let x = pt[i].as_ref().map(|q| q.to_integer()).unwrap_or_default();
        let mut v = Vec::with_capacity(max_deg[i] as usize + 1);
        v.push(BigInt::one());
        for d in 1..=max_deg[i] as usize {
            let next = &v[d - 1] * &x;
            v.push(next);
        }
        v
    })
}

/// Point type shared with [`MultiPoly::eval`].
pub type Point = [Option<ExactRational>; NVARS];

/// Newton node sequence; spread out so structured factors rarely vanish on it.
pub fn node(m: usize) -> ExactRational {
    ExactRational::from_integer((1009 + 97 * m as i64).into())
}

/// Interpolates a vector of polynomials in `vars` from evaluations.
///
/// Each variable is handled by Newton interpolation that stops once
/// `stable` consecutive new nodes are reproduced by the current
/// interpolant, or gives up past `max_degree`. The result is a heuristic
/// reconstruction; callers must verify it. `eval` may return `None` to
/// abandon the whole reconstruction.
pub fn interpolate(
    vars: &[Var],
    width: usize,
    max_degree: usize,
    stable: usize,
    eval: &dyn Fn(&Point) -> Option<Vec<ExactRational>>,
) -> Option<Vec<MultiPoly>> {
    let mut point: Point = Default::default();
    rec(vars, width, max_degree, stable, eval, &mut point)
}

fn rec(
    vars: &[Var],
    width: usize,
    max_degree: usize,
    stable: usize,
    eval: &dyn Fn(&Point) -> Option<Vec<ExactRational>>,
    point: &mut Point,
) -> Option<Vec<MultiPoly>> {
    let Some((&v, rest)) = vars.split_first() else {
        return Some(eval(point)?.into_iter().map(MultiPoly::constant).collect());
    };
    let mut nodes: Vec<ExactRational> = Vec::new();
    let mut coeffs: Vec<Vec<MultiPoly>> = Vec::new();
    let mut zeros = 0;
    for m in 0..=max_degree + stable {
        let t = node(m);
        point[v.index()] = Some(t.clone());
        let Some(mut d) = rec(rest, width, max_degree, stable, eval, point) else {
            point[v.index()] = None;
            return None;
        };
        for (tj, cj) in nodes.iter().zip(&coeffs) {
            let inv = (&t - tj).recip();
            for (di, ci) in d.iter_mut().zip(cj) {
                *di = (&*di - ci).scale(&inv);
            }
        }
        nodes.push(t);
        let all_zero = d.iter().all(|p| p.is_zero());
        coeffs.push(d);
        if all_zero {
            zeros += 1;
            if zeros >= stable {
                break;
            }
        } else {
            zeros = 0;
        }
        if m == max_degree + stable {
            point[v.index()] = None;
            return None;
        }
    }
    point[v.index()] = None;
    // drop the trailing zero differences, then expand the Newton form
    coeffs.truncate(coeffs.len() - zeros);
    let mut acc = vec![MultiPoly::zero(); width];
    for (j, cj) in coeffs.iter().enumerate().rev() {
        let lin = MultiPoly::linear(v, -&nodes[j]);
        for (ai, ci) in acc.iter_mut().zip(cj) {
            *ai = &(&*ai * &lin) + ci;
        }
    }
    Some(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{int, parse_poly};

    #[test]
    fn small_determinants() {
        assert_eq!(determinant(&[vec![int(2), int(1)], vec![int(7), int(4)]]), int(1));
        assert_eq!(determinant(&[vec![int(0), int(1)], vec![int(1), int(0)]]), int(-1));
        assert_eq!(determinant(&[vec![int(1), int(2)], vec![int(2), int(4)]]), int(0));
    }

    #[test]
    fn cramer_matches_determinants() {
        let m = vec![
            vec![BigInt::from(0), BigInt::from(2), BigInt::from(1)],
            vec![BigInt::from(3), BigInt::from(-1), BigInt::from(4)],
            vec![BigInt::from(5), BigInt::from(7), BigInt::from(-2)],
        ];
        let b = vec![BigInt::from(1), BigInt::from(-6), BigInt::from(9)];
        assert_eq!(cramer_integer(&m, &b), singular_cramer(&m, &b));
        let s = vec![vec![BigInt::from(1), BigInt::from(2)], vec![BigInt::from(2), BigInt::from(4)]];
        let b = vec![BigInt::from(1), BigInt::from(3)];
        assert_eq!(cramer_integer(&s, &b), singular_cramer(&s, &b));
    }

    #[test]
    fn recovers_polynomials() {
        let p = parse_poly("3 n^4 a - 2 a^3 b + 7 n b^2 - 1").unwrap();
        let q = parse_poly("(n - a)^2 (b + 5)").unwrap();
        let got = interpolate(&[Var::N, Var::A, Var::B], 2, 10, 2, &|pt| {
            Some(vec![p.eval(&full(pt)).unwrap(), q.eval(&full(pt)).unwrap()])
        })
        .unwrap();
        assert_eq!(got, vec![p, q]);
    }

    fn full(pt: &Point) -> Point {
        let mut out = pt.clone();
        for v in out.iter_mut() {
            if v.is_none() {
                *v = Some(int(0));
            }
        }
        out
    }
}
