//! Arithmetic modulo word-sized primes: dense univariate polynomials,
//! rational-function reconstruction, Newton interpolation in several
//! variables, and lifting back to the rationals.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::poly::{MultiPoly, Var, NVARS};
use super::rational::ExactRational;

/// Primes just below 2^62.
pub const PRIMES: [u64; 12] = [
    4611686018427387847,
    4611686018427387817,
    4611686018427387787,
    4611686018427387761,
    4611686018427387751,
    4611686018427387737,
    4611686018427387733,
    4611686018427387709,
    4611686018427387701,
    4611686018427387631,
    4611686018427387617,
    4611686018427387587,
];

#[inline]
pub fn add(a: u64, b: u64, p: u64) -> u64 {
    let s = a + b;
    if s >= p {
        s - p
    } else {
        s
    }
}

#[inline]
pub fn sub(a: u64, b: u64, p: u64) -> u64 {
    if a >= b {
        a - b
    } else {
        a + p - b
    }
}

#[inline]
pub fn mul(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

pub fn pow(mut a: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1;
    while e > 0 {
        if e & 1 == 1 {
            r = mul(r, a, p);
        }
        a = mul(a, a, p);
        e >>= 1;
    }
    r
}

/// Inverse of a nonzero residue.
pub fn inv(a: u64, p: u64) -> u64 {
    debug_assert!(a != 0);
    pow(a, p - 2, p)
}

pub fn reduce(x: &BigInt, p: u64) -> u64 {
    x.mod_floor(&BigInt::from(p)).to_u64().expect("residue fits")
}

/// `x mod p`, or `None` when `p` divides the denominator.
pub fn reduce_rational(x: &ExactRational, p: u64) -> Option<u64> {
    let d = reduce(x.denom(), p);
    (d != 0).then(|| mul(reduce(x.numer(), p), inv(d, p), p))
}

/// Deterministic well-spread residues.
pub fn scatter(seed: u64, p: u64) -> u64 {
    let mut z = seed.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^= z >> 31;
    z % p
}

/// Integer polynomial with coefficients reduced mod `p`.
#[derive(Clone, Debug)]
pub struct ModPoly {
    terms: Vec<([u32; NVARS], u64)>,
}

impl ModPoly {
    pub fn new<'a>(terms: impl Iterator<Item = (&'a [u32; NVARS], &'a BigInt)>, p: u64) -> ModPoly {
        let terms = terms
            .map(|(e, c)| (*e, reduce(c, p)))
            .filter(|(_, c)| *c != 0)
            .collect();
        ModPoly { terms }
    }

    /// `powers[v][d]` holds the value of variable `v` to the `d`.
    pub fn eval(&self, powers: &[Vec<u64>; NVARS], p: u64) -> u64 {
        self.terms.iter().fold(0, |acc, (e, c)| {
            let t = e
                .iter()
                .enumerate()
                .filter(|(_, &d)| d > 0)
                .fold(*c, |t, (i, &d)| mul(t, powers[i][d as usize], p));
            add(acc, t, p)
        })
    }
}

/// Power table for [`ModPoly::eval`]; unbound variables read as zero.
pub fn power_table(pt: &PointP, max_deg: &[u32; NVARS], p: u64) -> [Vec<u64>; NVARS] {
    std::array::from_fn(|i| {
        let x = pt[i].unwrap_or(0);
        let mut v = vec![1u64];
        for d in 1..=max_deg[i] as usize {
            v.push(mul(v[d - 1], x, p));
        }
        v
    })
}

/// Solves a square system; `None` when singular.
pub fn solve(mut a: Vec<Vec<u64>>, mut b: Vec<u64>, p: u64) -> Option<Vec<u64>> {
    let n = a.len();
    for col in 0..n {
        let piv = (col..n).find(|&r| a[r][col] != 0)?;
        a.swap(piv, col);
        b.swap(piv, col);
        let iv = inv(a[col][col], p);
        for c in col..n {
            a[col][c] = mul(a[col][c], iv, p);
        }
        b[col] = mul(b[col], iv, p);
        for r in 0..n {
            if r == col || a[r][col] == 0 {
                continue;
            }
            let f = a[r][col];
            for c in col..n {
                let t = mul(f, a[col][c], p);
                a[r][c] = sub(a[r][c], t, p);
            }
            let t = mul(f, b[col], p);
            b[r] = sub(b[r], t, p);
        }
    }
    Some(b)
}

/// Dense univariate polynomial mod `p`, ascending, no trailing zeros.
pub type UPolyP = Vec<u64>;

fn trim(mut v: UPolyP) -> UPolyP {
    while v.last() == Some(&0) {
        v.pop();
    }
    v
}

pub fn eval_u(f: &UPolyP, x: u64, p: u64) -> u64 {
    f.iter().rev().fold(0, |acc, &c| add(mul(acc, x, p), c, p))
}

fn sub_u(f: &UPolyP, g: &UPolyP, p: u64) -> UPolyP {
    let n = f.len().max(g.len());
    trim((0..n)
        .map(|i| sub(*f.get(i).unwrap_or(&0), *g.get(i).unwrap_or(&0), p))
        .collect())
}

fn mul_u(f: &UPolyP, g: &UPolyP, p: u64) -> UPolyP {
    if f.is_empty() || g.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0; f.len() + g.len() - 1];
    for (i, &a) in f.iter().enumerate() {
        if a == 0 {
            continue;
        }
        for (j, &b) in g.iter().enumerate() {
            out[i + j] = add(out[i + j], mul(a, b, p), p);
        }
    }
    trim(out)
}

fn divrem_u(f: &UPolyP, d: &UPolyP, p: u64) -> (UPolyP, UPolyP) {
    let dd = d.len() - 1;
    let il = inv(d[dd], p);
    let mut r = f.clone();
    if r.len() <= dd {
        return (Vec::new(), r);
    }
    let mut q = vec![0; r.len() - dd];
    while r.len() > dd {
        let top = r.len() - 1;
        let c = mul(r[top], il, p);
        let shift = top - dd;
        for (i, &di) in d.iter().enumerate() {
            r[shift + i] = sub(r[shift + i], mul(c, di, p), p);
        }
        q[shift] = c;
        r = trim(r);
    }
    (trim(q), r)
}

fn monic_u(f: &UPolyP, p: u64) -> UPolyP {
    match f.last() {
        Some(&l) => {
            let il = inv(l, p);
            f.iter().map(|&c| mul(c, il, p)).collect()
        }
        None => Vec::new(),
    }
}

/// Newton interpolant in monomial form.
pub fn interpolate_u(xs: &[u64], ys: &[u64], p: u64) -> UPolyP {
    let mut dd = ys.to_vec();
    for level in 1..xs.len() {
        for i in (level..xs.len()).rev() {
            let num = sub(dd[i], dd[i - 1], p);
            dd[i] = mul(num, inv(sub(xs[i], xs[i - level], p), p), p);
        }
    }
    let mut acc: UPolyP = Vec::new();
    for (j, &c) in dd.iter().enumerate().rev() {
        acc = mul_u(&acc, &vec![sub(0, xs[j], p), 1], p);
        acc = sub_u(&acc, &vec![sub(0, c, p)], p);
    }
    acc
}

fn node_poly(xs: &[u64], p: u64) -> UPolyP {
    xs.iter().fold(vec![1], |acc, &t| mul_u(&acc, &vec![sub(0, t, p), 1], p))
}

/// Denominator `s` (monic) of a rational function through the samples,
/// taken at the first remainder of degree at most `max_num`, or the first
/// one reproducing `checks` when `max_num` is `None`.
fn denominator(
    xs: &[u64],
    ys: &[u64],
    max_num: Option<usize>,
    checks: &[(u64, u64)],
    p: u64,
) -> Option<UPolyP> {
    let u = interpolate_u(xs, ys, p);
    let (mut r0, mut r1) = (node_poly(xs, p), u);
    let (mut s0, mut s1): (UPolyP, UPolyP) = (Vec::new(), vec![1]);
    loop {
        let stop = match max_num {
            Some(d) => r1.len() <= d + 1,
            None => checks.iter().all(|&(x, v)| {
                let den = eval_u(&s1, x, p);
                den != 0 && mul(eval_u(&r1, x, p), inv(den, p), p) == v
            }),
        };
        if stop {
            return (!s1.is_empty() && xs.iter().all(|&x| eval_u(&s1, x, p) != 0)).then(|| monic_u(&s1, p));
        }
        if r1.is_empty() {
            return None;
        }
        let (q, r) = divrem_u(&r0, &r1, p);
        let s = sub_u(&s0, &mul_u(&q, &s1, p), p);
        r0 = std::mem::replace(&mut r1, r);
        s0 = std::mem::replace(&mut s1, s);
    }
}

fn combine(y: &[u64], p: u64) -> u64 {
    y.iter()
        .enumerate()
        .fold(0, |acc, (j, &v)| add(acc, mul(v, (j * j + 3 * j + 7) as u64, p), p))
}

/// Numerators over `q`, each reproduced on the last `stable` samples.
fn numerators(xs: &[u64], ys: &[Vec<u64>], q: &UPolyP, stable: usize, p: u64) -> Option<Vec<UPolyP>> {
    let fit = xs.len() - stable;
    let qv: Vec<u64> = xs.iter().map(|&x| eval_u(q, x, p)).collect();
    (0..ys[0].len())
        .map(|j| {
            let vals: Vec<u64> = ys.iter().zip(&qv).map(|(y, &d)| mul(y[j], d, p)).collect();
            let f = interpolate_u(&xs[..fit], &vals[..fit], p);
            xs[fit..]
                .iter()
                .zip(&vals[fit..])
                .all(|(&x, &v)| eval_u(&f, x, p) == v)
                .then_some(f)
        })
        .collect()
}

/// A vector of rational functions of one variable over a common
/// denominator, sampled at `node(0), node(1), ..` through `f`.
///
/// With `known = Some((degs, dq))` exactly enough points are sampled for
/// numerators of degrees `degs` and a denominator of degree `dq`;
/// otherwise sampling grows until `stable` extra points agree. Returns the
/// numerators followed by the monic denominator.
pub fn reconstruct_vector(
    f: &mut dyn FnMut(u64) -> Option<Vec<u64>>,
    node: &dyn Fn(usize) -> u64,
    known: Option<(&[usize], usize)>,
    stable: usize,
    max_points: usize,
    p: u64,
) -> Option<Vec<UPolyP>> {
    let mut xs: Vec<u64> = Vec::new();
    let mut ys: Vec<Vec<u64>> = Vec::new();
    let mut m = match known {
        Some((degs, dq)) => degs.iter().copied().max().unwrap_or(0) + dq + 1,
        None => 2,
    };
    loop {
        if m + stable > max_points {
            return None;
        }
        while xs.len() < m + stable {
            let x = node(xs.len());
            let y = f(x)?;
            if ys.first().is_some_and(|y0| y0.len() != y.len()) {
                return None;
            }
            xs.push(x);
            ys.push(y);
        }
        let z: Vec<u64> = ys.iter().map(|y| combine(y, p)).collect();
        let q = match known {
            Some((degs, _)) => denominator(&xs[..m], &z[..m], degs.iter().copied().max(), &[], p),
            None => {
                let checks: Vec<(u64, u64)> = xs[m..].iter().copied().zip(z[m..].iter().copied()).collect();
                denominator(&xs[..m], &z[..m], None, &checks, p)
            }
        };
        if let Some(q) = q {
            if let Some(mut out) = numerators(&xs, &ys, &q, stable, p) {
                if let Some((degs, dq)) = known {
                    if q.len() != dq + 1 || out.iter().zip(degs).any(|(f, &d)| f.len() > d + 1) {
                        return None;
                    }
                }
                out.push(q);
                return Some(out);
            }
        }
        if known.is_some() {
            return None;
        }
        m += (m / 4).max(2);
    }
}

/// Sparse polynomial mod `p`.
pub type SparseP = BTreeMap<[u32; NVARS], u64>;

/// Evaluation point mod `p`; unbound variables are `None`.
pub type PointP = [Option<u64>; NVARS];

/// Newton interpolation over `vars`, as [`super::interp::interpolate`] but
/// mod `p` with nodes from `node(var, m)`.
pub fn interpolate(
    vars: &[Var],
    width: usize,
    max_degree: usize,
    stable: usize,
    node: &dyn Fn(Var, usize) -> u64,
    eval: &dyn Fn(&PointP) -> Option<Vec<u64>>,
    p: u64,
) -> Option<Vec<SparseP>> {
    let mut point: PointP = [None; NVARS];
    rec(vars, width, max_degree, stable, node, eval, &mut point, p)
}

#[allow(clippy::too_many_arguments)]
fn rec(
    vars: &[Var],
    width: usize,
    max_degree: usize,
    stable: usize,
    node: &dyn Fn(Var, usize) -> u64,
    eval: &dyn Fn(&PointP) -> Option<Vec<u64>>,
    point: &mut PointP,
    p: u64,
) -> Option<Vec<SparseP>> {
    let Some((&v, rest)) = vars.split_first() else {
        let vals = eval(point)?;
        return Some(
            vals.into_iter()
                .map(|c| {
                    let mut m = SparseP::new();
                    if c != 0 {
                        m.insert([0; NVARS], c);
                    }
                    m
                })
                .collect(),
        );
    };
    let mut nodes: Vec<u64> = Vec::new();
    let mut coeffs: Vec<Vec<SparseP>> = Vec::new();
    let mut zeros = 0;
    let mut m = 0;
    loop {
        if m > max_degree + stable {
            point[v.index()] = None;
            return None;
        }
        let t = node(v, m);
        point[v.index()] = Some(t);
        let mut d = match rec(rest, width, max_degree, stable, node, eval, point, p) {
            Some(d) => d,
            None => {
                point[v.index()] = None;
                return None;
            }
        };
        for (tj, cj) in nodes.iter().zip(&coeffs) {
            let iv = inv(sub(t, *tj, p), p);
            for (di, ci) in d.iter_mut().zip(cj) {
                let mut out = SparseP::new();
                for (e, &c) in di.iter() {
                    out.insert(*e, c);
                }
                for (e, &c) in ci {
                    let cur = out.get(e).copied().unwrap_or(0);
                    out.insert(*e, sub(cur, c, p));
                }
                out.retain(|_, c| {
                    *c = mul(*c, iv, p);
                    *c != 0
                });
                *di = out;
            }
        }
        nodes.push(t);
        let all_zero = d.iter().all(|x| x.is_empty());
        coeffs.push(d);
        m += 1;
        if all_zero {
            zeros += 1;
            if zeros >= stable {
                break;
            }
        } else {
            zeros = 0;
        }
    }
    point[v.index()] = None;
    coeffs.truncate(coeffs.len() - zeros);
    let mut acc: Vec<SparseP> = vec![SparseP::new(); width];
    for (j, cj) in coeffs.iter().enumerate().rev() {
        for (ai, ci) in acc.iter_mut().zip(cj) {
            // ai * (v - t_j) + ci
            let mut out = SparseP::new();
            let neg_t = sub(0, nodes[j], p);
            for (e, &c) in ai.iter() {
                let mut up = *e;
                up[v.index()] += 1;
                let cur = out.get(&up).copied().unwrap_or(0);
                out.insert(up, add(cur, c, p));
                let cur = out.get(e).copied().unwrap_or(0);
                out.insert(*e, add(cur, mul(c, neg_t, p), p));
            }
            for (e, &c) in ci {
                let cur = out.get(e).copied().unwrap_or(0);
                out.insert(*e, add(cur, c, p));
            }
            out.retain(|_, c| *c != 0);
            *ai = out;
        }
    }
    Some(acc)
}

/// `a / b` with `|a|, |b| <= sqrt(m / 2)` and `a / b = u (mod m)`.
pub fn rational_reconstruct(u: &BigInt, m: &BigInt) -> Option<ExactRational> {
    let bound = (m / 2u32).sqrt();
    let (mut r0, mut r1) = (m.clone(), u.mod_floor(m));
    let (mut t0, mut t1) = (BigInt::zero(), BigInt::one());
    while r1 > bound {
        let q = &r0 / &r1;
        let r2 = &r0 - &q * &r1;
        let t2 = &t0 - &q * &t1;
        r0 = std::mem::replace(&mut r1, r2);
        t0 = std::mem::replace(&mut t1, t2);
    }
    if t1.is_zero() || t1.abs() > bound || !r1.gcd(&t1).is_one() {
        return None;
    }
    Some(ExactRational::new(r1, t1))
}

/// Images of a vector of polynomials under several primes, combined by
/// the Chinese remainder theorem.
#[derive(Debug, Default)]
pub struct Lifter {
    modulus: BigInt,
    images: Vec<BTreeMap<[u32; NVARS], BigInt>>,
}

impl Lifter {
    pub fn new() -> Lifter {
        Lifter { modulus: BigInt::one(), images: Vec::new() }
    }

    /// Adds the image mod `p`; supports of different primes may differ.
    pub fn add(&mut self, polys: &[SparseP], p: u64) {
        if self.images.is_empty() {
            self.images = vec![BTreeMap::new(); polys.len()];
        }
        let pb = BigInt::from(p);
        let m_mod_p = reduce(&self.modulus, p);
        let m_inv = inv(m_mod_p, p);
        for (acc, img) in self.images.iter_mut().zip(polys) {
            let keys: std::collections::BTreeSet<[u32; NVARS]> = acc.keys().chain(img.keys()).copied().collect();
            for e in keys {
                let old = acc.get(&e).cloned().unwrap_or_default();
                let new = img.get(&e).copied().unwrap_or(0);
                // x = old + M * ((new - old) / M mod p)
                let delta = mul(sub(new, reduce(&old, p), p), m_inv, p);
                let x = &old + &self.modulus * BigInt::from(delta);
                acc.insert(e, x);
            }
        }
        self.modulus *= pb;
    }

    /// Rational lift of every coefficient, or `None` if any fails.
    pub fn lift(&self) -> Option<Vec<MultiPoly>> {
        self.images
            .iter()
            .map(|img| {
                let mut out = MultiPoly::zero();
                for (e, x) in img {
                    if x.is_zero() {
                        continue;
                    }
                    let c = rational_reconstruct(x, &self.modulus)?;
                    out = &out + &MultiPoly::monomial(*e, c);
                }
                Some(out)
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{parse_poly, ratio};

    const P: u64 = PRIMES[0];

    #[test]
    fn inverse_and_solve() {
        assert_eq!(mul(inv(12345, P), 12345, P), 1);
        let x = solve(vec![vec![2, 1], vec![1, 3]], vec![5, 10], P).unwrap();
        assert_eq!(x, vec![1, 3]);
        assert!(solve(vec![vec![1, 2], vec![2, 4]], vec![1, 1], P).is_none());
    }

    #[test]
    fn lifts_fraction() {
        let m = BigInt::from(P);
        let u = BigInt::from(mul(reduce(&BigInt::from(-7), P), inv(12, P), P));
        assert_eq!(rational_reconstruct(&u, &m), Some(ratio(-7, 12)));
    }

    #[test]
    fn slice_reconstruction() {
        // (x^2 + 5) / (x - 1)(x + 4) and 1
        let mut f = |x: u64| {
            let num = add(mul(x, x, P), 5, P);
            let den = mul(sub(x, 1, P), add(x, 4, P), P);
            Some(vec![mul(num, inv(den, P), P), 1])
        };
        let node = |m: usize| scatter(m as u64, P);
        let got = reconstruct_vector(&mut f, &node, None, 2, 50, P).unwrap();
        let den = vec![sub(0, 4, P), 3, 1];
        assert_eq!(got, vec![vec![5, 0, 1], den.clone(), den.clone()]);
        let again = reconstruct_vector(&mut f, &node, Some((&[2, 2], 2)), 1, 50, P).unwrap();
        assert_eq!(again, got);
    }

    #[test]
    fn interpolates_and_lifts() {
        let target = parse_poly("3/4 n^3 a - 2 a^2 b + 7/5 b - 11").unwrap();
        let mut lifter = Lifter::new();
        for &p in &PRIMES[..2] {
            let node_p = |v: Var, m: usize| scatter((v.index() * 1000 + m) as u64, p);
            let eval = |pt: &PointP| {
                let mut q: [Option<ExactRational>; NVARS] = Default::default();
                for (i, x) in pt.iter().enumerate() {
                    q[i] = Some(ExactRational::from_integer(BigInt::from(x.unwrap_or(0))));
                }
                Some(vec![reduce_rational(&target.eval(&q).unwrap(), p).unwrap()])
            };
            let img = interpolate(&[Var::N, Var::A, Var::B], 1, 10, 2, &node_p, &eval, p).unwrap();
            lifter.add(&img, p);
        }
        assert_eq!(lifter.lift().unwrap(), vec![target]);
    }
}
