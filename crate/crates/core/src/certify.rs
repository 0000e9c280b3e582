//! Creative-telescoping certificates and the two-term recursions they give.
//!
//! A certificate `(R, p1, p2, r)` for `F` asserts
//! `p1 F(n + r, k) + p2 F(n, k) = G(n, k + 1) - G(n, k)` with `G = R F`.
//! Dividing by `F(n, k)` turns this into an identity of rational functions,
//! which is what gets checked.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::exact::poly::{gcd as poly_gcd, NVARS};
use crate::exact::rational::denominator_lcm;
use crate::exact::{
    interp, modular, solve_linear_system, ExactRational, LinearSolution, MultiPoly, RatFunc, Var,
};
use crate::hyperterm::{shift_ratio, term_at_k0, HyperTerm, Shift};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Certificate {
    /// `G(n, k) = R(n, k) F(n, k)`.
    pub r_fn: RatFunc,
    pub p1: MultiPoly,
    pub p2: MultiPoly,
    pub r: u32,
}

/// `f(n) = g1(n) + g2(n) f(n + r)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Recursion {
    pub g1: RatFunc,
    pub g2: RatFunc,
    pub r: u32,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerifyReport {
    pub holds: bool,
    /// `p1 rho_n + p2 - (R(k + 1) rho_k - R(k))`, normalized.
    pub residual: RatFunc,
}

impl fmt::Display for Certificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "r = {}, R = {}, p1 = {}, p2 = {}", self.r, self.r_fn, self.p1, self.p2)
    }
}

pub fn verify_certificate(f: &HyperTerm, c: &Certificate) -> VerifyReport {
    let rho_k = shift_ratio(f, Shift::K);
    let rho_n = shift_ratio(f, Shift::N(c.r));
    let lhs = &(&RatFunc::from_poly(c.p1.clone()) * &rho_n) + &RatFunc::from_poly(c.p2.clone());
    let r_next = c.r_fn.shift(Var::K, &ExactRational::one());
    let rhs = &(&r_next * &rho_k) - &c.r_fn;
    let residual = &lhs - &rhs;
    VerifyReport {
        holds: residual.is_zero(),
        residual,
    }
}

/// `g2 = -p1/p2`, `g1 = -R(n, 0) F(n, 0) / p2`.
pub fn derive_recursion(f: &HyperTerm, c: &Certificate) -> Result<Recursion> {
    if c.p2.is_zero() {
        return Err(Error::ZeroP2);
    }
    let p2 = RatFunc::from_poly(c.p2.clone());
    let g2 = -(&RatFunc::from_poly(c.p1.clone()) / &p2);
    let g0 = c.r_fn.eval_var(Var::K, &ExactRational::zero())?;
    let g1 = -(&(&g0 * &term_at_k0(f)) / &p2);
    Ok(Recursion { g1, g2, r: c.r })
}

pub fn match_published_recursion(derived: &Recursion, published: &Recursion) -> bool {
    derived.r == published.r
        && derived.g1.equals(&published.g1)
        && derived.g2.equals(&published.g2)
}

/// Searches for a certificate by undetermined coefficients.
///
/// `R = N(k) / D(k)` where `D` is the product of the distinct linear
/// k-factors in the denominators of both shift quotients (and of the
/// prefactor), and `N` is a polynomial in `k` whose coefficients, like `p1`,
/// range over rational functions of `n, a, b`. With `p2 = 1` the identity
/// is linear in the unknowns; clearing denominators and equating powers of
/// `k` gives a system over `Q(n, a, b)`. The degree of `N` in `k` is
/// raised from 0 to `degree_bound`; the first solvable system wins. If
/// nothing is found, the search is repeated with `D` carrying the full
/// multiplicities of those factors.
pub fn find_certificate(f: &HyperTerm, r: u32, degree_bound: u32) -> Option<Certificate> {
    let rho_k = shift_ratio(f, Shift::K);
    let rho_n = shift_ratio(f, Shift::N(r));
    let distinct = denominator_ansatz(f, r, &rho_k, &rho_n);
    if let Some(c) = search(f, r, degree_bound, &rho_k, &rho_n, &distinct) {
        return Some(c);
    }
    // repeated factors: the full k-dependent denominators
    let full = lcm(&lcm(&k_part(rho_k.den()), &k_part(rho_n.den())), &distinct);
    if full == distinct {
        return None;
    }
    search(f, r, degree_bound, &rho_k, &rho_n, &full)
}

fn k_part(p: &MultiPoly) -> MultiPoly {
    let c = p.content_in(Var::K);
    primitive(&p.div_exact(&c).expect("content divides"))
}

/// Point at which solvability over `Q(n, a, b)` is screened.
fn screen_point() -> [Option<ExactRational>; crate::exact::poly::NVARS] {
    let mut p: [Option<ExactRational>; crate::exact::poly::NVARS] = Default::default();
    p[Var::N.index()] = Some(ExactRational::new(1009.into(), 7.into()));
    p[Var::A.index()] = Some(ExactRational::new(2003.into(), 11.into()));
    p[Var::B.index()] = Some(ExactRational::new((-3001).into(), 13.into()));
    p
}

fn search(
    f: &HyperTerm,
    r: u32,
    degree_bound: u32,
    rho_k: &RatFunc,
    rho_n: &RatFunc,
    d: &MultiPoly,
) -> Option<Certificate> {
    let d_next = d.shift(Var::K, &ExactRational::one());
    // L = lcm(den rho_n, den rho_k * D(k + 1) * D(k))
    let big = &(rho_k.den() * &d_next) * d;
    let l = lcm(rho_n.den(), &big);
    let l_rho_n = &l.div_exact(rho_n.den()).expect("lcm") * rho_n.num();
    let l_over_kstep = l.div_exact(&(rho_k.den() * &d_next)).expect("lcm");
    let l_over_d = l.div_exact(d).expect("lcm");
    let k = MultiPoly::var(Var::K);
    let k1 = &k + &MultiPoly::one();
    let point = screen_point();

    for deg in 0..=degree_bound {
        // columns: p1, c_0 .. c_deg; right-hand side carries -p2 = -L
        let mut cols: Vec<MultiPoly> = vec![l_rho_n.clone()];
        for i in 0..=deg {
            let a = &(&k1.pow(i) * rho_k.num()) * &l_over_kstep;
            let b = &k.pow(i) * &l_over_d;
            // coefficient of c_i in p1 rho_n + p2 - (R(k+1) rho_k - R(k)), times L
            cols.push(&b - &a);
        }
        let rhs_poly = -&l;
        let rows = cols
            .iter()
            .chain(std::iter::once(&rhs_poly))
            .map(|p| p.degree_in(Var::K))
            .max()
            .unwrap_or(0) as usize
            + 1;
        let split: Vec<Vec<MultiPoly>> = cols.iter().map(|p| pad(p.coefficients_in(Var::K), rows)).collect();
        let rhs_split = pad(rhs_poly.coefficients_in(Var::K), rows);
        let a: Vec<Vec<MultiPoly>> = (0..rows).map(|m| split.iter().map(|c| c[m].clone()).collect()).collect();

        // a generic specialization decides solvability cheaply
        let ev = |p: &MultiPoly| p.eval(&point).expect("only n, a, b remain");
        let a_num: Vec<Vec<ExactRational>> = a.iter().map(|row| row.iter().map(ev).collect()).collect();
        let b_num: Vec<ExactRational> = rhs_split.iter().map(ev).collect();
        let Some((prow, pcol)) = pivots(&a_num, &b_num) else {
            continue;
        };

        let block = IntBlock::new(&a, &rhs_split, &prow, &pcol, cols.len());
        if let Some(polys) = block.by_slices() {
            let cert = finish(polys, d, r);
            if verify_certificate(f, &cert).holds {
                return Some(cert);
            }
        }
        if let Some(polys) = block.by_determinants() {
            let cert = finish(polys, d, r);
            if verify_certificate(f, &cert).holds {
                return Some(cert);
            }
        }
        // slow path: elimination over Q(n, a, b)
        let sa: Vec<Vec<RatFunc>> = a
            .iter()
            .map(|row| row.iter().map(|p| RatFunc::from_poly(p.clone())).collect())
            .collect();
        let sb: Vec<RatFunc> = rhs_split.iter().map(|p| RatFunc::from_poly(p.clone())).collect();
        if let LinearSolution::Solved(x) = solve_linear_system(&sa, &sb) {
            let cert = finish(clear_denominators(&x), d, r);
            if verify_certificate(f, &cert).holds {
                return Some(cert);
            }
        }
    }
    None
}

/// Rows and columns carrying the pivots of `[A | b]`, or `None` when
/// inconsistent.
fn pivots(a: &[Vec<ExactRational>], b: &[ExactRational]) -> Option<(Vec<usize>, Vec<usize>)> {
    let cols = a.first().map_or(0, |r| r.len());
    let mut m: Vec<(usize, Vec<ExactRational>)> = a
        .iter()
        .zip(b)
        .enumerate()
        .map(|(i, (row, rhs))| {
            let mut r = row.clone();
            r.push(rhs.clone());
            (i, r)
        })
        .collect();
    let mut rank = 0;
    let mut pcols = Vec::new();
    for col in 0..cols {
        let Some(p) = (rank..m.len()).find(|&r| !m[r].1[col].is_zero()) else {
            continue;
        };
        pcols.push(col);
        m.swap(rank, p);
        let piv = m[rank].1[col].clone();
        for r in rank + 1..m.len() {
            if m[r].1[col].is_zero() {
                continue;
            }
            let factor = &m[r].1[col] / &piv;
            for c in col..=cols {
                let t = &factor * &m[rank].1[c];
                m[r].1[c] -= t;
            }
        }
        rank += 1;
    }
    if m[rank..].iter().any(|(_, row)| !row[cols].is_zero()) {
        return None;
    }
    let mut rows: Vec<usize> = m[..rank].iter().map(|(i, _)| *i).collect();
    rows.sort_unstable();
    Some((rows, pcols))
}

/// The pivot block of the coefficient system as integer polynomials, each
/// row divided by its polynomial content.
struct IntBlock {
    rows: Vec<(Vec<interp::IntPoly>, interp::IntPoly)>,
    max_deg: [u32; NVARS],
    vars: Vec<Var>,
    pcol: Vec<usize>,
    ncols: usize,
}

impl IntBlock {
    fn new(a: &[Vec<MultiPoly>], b: &[MultiPoly], prow: &[usize], pcol: &[usize], ncols: usize) -> IntBlock {
        let mut present = [false; NVARS];
        for p in a.iter().flatten().chain(b) {
            for (i, &x) in p.vars().iter().enumerate() {
                present[i] |= x;
            }
        }
        let vars: Vec<Var> = Var::ALL.into_iter().filter(|v| present[v.index()]).collect();
        let rows: Vec<(Vec<interp::IntPoly>, interp::IntPoly)> = prow
            .iter()
            .map(|&i| {
                let mut entries: Vec<MultiPoly> = pcol.iter().map(|&j| a[i][j].clone()).collect();
                entries.push(b[i].clone());
                let mut g = MultiPoly::zero();
                for e in &entries {
                    if !e.is_zero() {
                        g = if g.is_zero() { e.clone() } else { poly_gcd(&g, e) };
                    }
                }
                let g = primitive(&g);
                let reduced: Vec<MultiPoly> =
                    entries.iter().map(|e| e.div_exact(&g).expect("content divides")).collect();
                let den = denominator_lcm(reduced.iter().flat_map(|p| p.terms().map(|(_, c)| c)));
                let s = ExactRational::from_integer(den);
                let mut ints: Vec<interp::IntPoly> = reduced
                    .iter()
                    .map(|e| interp::IntPoly::new(&e.scale(&s)).expect("integral"))
                    .collect();
                let rhs = ints.pop().expect("rhs");
                (ints, rhs)
            })
            .collect();
        let max_deg: [u32; NVARS] = std::array::from_fn(|i| {
            rows.iter()
                .flat_map(|(r, b)| r.iter().chain(std::iter::once(b)))
                .map(|p| p.max_degree(Var::ALL[i]))
                .max()
                .unwrap_or(0)
        });
        IntBlock { rows, max_deg, vars, pcol: pcol.to_vec(), ncols }
    }

    /// `[det, det_0, ..]` of the block at an integer point.
    fn cramer(&self, pt: &interp::Point) -> Vec<BigInt> {
        let pw = interp::power_table(pt, &self.max_deg);
        let m: Vec<Vec<BigInt>> = self.rows.iter().map(|(r, _)| r.iter().map(|p| p.eval(&pw)).collect()).collect();
        let rhs: Vec<BigInt> = self.rows.iter().map(|(_, b)| b.eval(&pw)).collect();
        interp::cramer_integer(&m, &rhs)
    }

    /// Spreads `[x_pivot .., p2]` over all `ncols` columns plus `p2`.
    fn assemble(&self, sol: &[MultiPoly]) -> Vec<MultiPoly> {
        let mut polys = vec![MultiPoly::zero(); self.ncols];
        for (c, &j) in self.pcol.iter().enumerate() {
            polys[j] = sol[c].clone();
        }
        polys.push(sol[self.pcol.len()].clone());
        polys
    }

    /// Solves the block modulo word-sized primes and lifts the result.
    ///
    /// With the parameters other than `n` fixed, the solution is a vector
    /// of rational functions of `n`; it is rebuilt over its monic common
    /// denominator and the coefficients are interpolated in the remaining
    /// parameters. That is only valid when the denominator's leading
    /// coefficient in `n` is constant, so callers verify. Coefficients are
    /// lifted once two successive prime sets agree.
    fn by_slices(&self) -> Option<Vec<MultiPoly>> {
        if !self.vars.contains(&Var::N) {
            return None;
        }
        let outer: Vec<Var> = self.vars.iter().copied().filter(|&v| v != Var::N).collect();
        let mut shape: Option<(Vec<usize>, usize)> = None;
        let mut lifter = modular::Lifter::new();
        let mut previous: Option<Vec<MultiPoly>> = None;
        for &p in &modular::PRIMES {
            let Some(image) = self.slice_image(&outer, &mut shape, p) else {
                continue;
            };
            lifter.add(&image, p);
            let lifted = lifter.lift();
            if lifted.is_some() && lifted == previous {
                return lifted.map(|l| self.assemble(&l));
            }
            previous = lifted;
        }
        None
    }

    fn slice_image(
        &self,
        outer: &[Var],
        shape: &mut Option<(Vec<usize>, usize)>,
        p: u64,
    ) -> Option<Vec<modular::SparseP>> {
        let rows: Vec<(Vec<modular::ModPoly>, modular::ModPoly)> = self
            .rows
            .iter()
            .map(|(r, b)| (r.iter().map(|q| q.residues(p)).collect(), b.residues(p)))
            .collect();
        let rows = &rows;
        let sampler = |pt: &modular::PointP| {
            let mut pt = *pt;
            move |x: u64| {
                pt[Var::N.index()] = Some(x);
                let pw = modular::power_table(&pt, &self.max_deg, p);
                let m: Vec<Vec<u64>> = rows.iter().map(|(r, _)| r.iter().map(|q| q.eval(&pw, p)).collect()).collect();
                let rhs: Vec<u64> = rows.iter().map(|(_, b)| b.eval(&pw, p)).collect();
                let mut v = modular::solve(m, rhs, p)?;
                v.push(1);
                Some(v)
            }
        };
        let node = |v: Var, m: usize| modular::scatter((v.index() as u64) << 32 | m as u64, p);
        let n_node = |m: usize| node(Var::N, m);
        if shape.is_none() {
            let mut first: modular::PointP = [None; NVARS];
            for &v in outer {
                first[v.index()] = Some(node(v, 0));
            }
            let mut parts = modular::reconstruct_vector(&mut sampler(&first), &n_node, None, 3, 400, p)?;
            let dq = parts.pop()?.len().checked_sub(1)?;
            *shape = Some((parts.iter().map(|q| q.len().saturating_sub(1)).collect(), dq));
        }
        let (degs, dq) = shape.as_ref().expect("set above");
        let widths: Vec<usize> = degs.iter().map(|d| d + 1).collect();
        let total: usize = widths.iter().sum();
        let eval = |pt: &modular::PointP| -> Option<Vec<u64>> {
            let mut parts = modular::reconstruct_vector(&mut sampler(pt), &n_node, Some((degs, *dq)), 1, 400, p)?;
            parts.pop();
            let mut flat = Vec::with_capacity(total);
            for (q, &w) in parts.iter().zip(&widths) {
                flat.extend(q.iter().copied());
                flat.resize(flat.len() + w - q.len(), 0);
            }
            Some(flat)
        };
        let coeffs = modular::interpolate(outer, total, 60, 3, &node, &eval, p)?;
        let mut it = coeffs.into_iter();
        let mut out = Vec::with_capacity(widths.len());
        for &w in &widths {
            let mut poly = modular::SparseP::new();
            for (i, c) in it.by_ref().take(w).enumerate() {
                for (mut e, v) in c {
                    e[Var::N.index()] = i as u32;
                    poly.insert(e, v);
                }
            }
            out.push(poly);
        }
        Some(out)
    }

    /// Cramer's rule with every determinant interpolated as a polynomial
    /// in the parameters. Returns the solution scaled by the block
    /// determinant.
    fn by_determinants(&self) -> Option<Vec<MultiPoly>> {
        let eval = |pt: &interp::Point| -> Option<Vec<ExactRational>> {
            Some(self.cramer(pt).into_iter().map(ExactRational::from_integer).collect())
        };
        // highest degree innermost: Newton steps there work on scalars
        let mut vars = self.vars.clone();
        vars.sort_by_key(|v| self.max_deg[v.index()]);
        let dets = interp::interpolate(&vars, self.pcol.len() + 1, 400, 3, &eval)?;
        if dets[0].is_zero() {
            return None;
        }
        let mut sol: Vec<MultiPoly> = dets[1..].to_vec();
        sol.push(dets[0].clone());
        Some(self.assemble(&sol))
    }
}

/// `[x .., 1]` over `Q(n, a, b)` to polynomials with the same ratios.
fn clear_denominators(x: &[RatFunc]) -> Vec<MultiPoly> {
    let mut l = MultiPoly::one();
    for v in x {
        l = lcm(&l, v.den());
    }
    let mut polys: Vec<MultiPoly> = x
        .iter()
        .map(|v| &l.div_exact(v.den()).expect("lcm") * v.num())
        .collect();
    polys.push(l);
    polys
}

fn pad(mut v: Vec<MultiPoly>, len: usize) -> Vec<MultiPoly> {
    v.resize(len, MultiPoly::zero());
    v
}

fn lcm(x: &MultiPoly, y: &MultiPoly) -> MultiPoly {
    let g = poly_gcd(x, y);
    &x.div_exact(&g).expect("gcd divides") * y
}

/// `[p1, c_0 .., p2]` to a certificate: strips the common polynomial
/// content and makes everything integral with `p2` leading positive.
fn finish(mut polys: Vec<MultiPoly>, d: &MultiPoly, r: u32) -> Certificate {
    let mut g = MultiPoly::zero();
    for p in &polys {
        if !p.is_zero() {
            g = if g.is_zero() { p.clone() } else { poly_gcd(&g, p) };
        }
    }
    if !g.is_constant() {
        polys = polys.iter().map(|p| p.div_exact(&g).expect("gcd divides")).collect();
    }
    let mut p2 = polys.pop().unwrap();
    let mut p1 = polys[0].clone();
    let mut coeffs = polys[1..].to_vec();
    // integer, primitive, p2 with positive leading coefficient
    let all: Vec<ExactRational> = std::iter::once(&p1)
        .chain(coeffs.iter())
        .chain(std::iter::once(&p2))
        .flat_map(|p| p.terms().map(|(_, c)| c.clone()))
        .collect();
    let lcm_den = crate::exact::rational::denominator_lcm(all.iter());
    let scaled: Vec<ExactRational> = all
        .iter()
        .map(|c| c * ExactRational::from_integer(lcm_den.clone()))
        .collect();
    let content = crate::exact::rational::numerator_gcd(scaled.iter());
    let mut s = ExactRational::new(lcm_den, content);
    if p2.leading_coeff().is_negative() {
        s = -s;
    }
    p1 = p1.scale(&s);
    p2 = p2.scale(&s);
    for c in &mut coeffs {
        *c = c.scale(&s);
    }
    let n = MultiPoly::from_coefficients_in(Var::K, &coeffs);
    let r_fn = RatFunc::normalize(n, d.clone()).expect("nonzero ansatz denominator");
    Certificate { r_fn, p1, p2, r }
}

/// Distinct k-dependent linear factors of the shift-quotient denominators.
fn denominator_ansatz(f: &HyperTerm, r: u32, rho_k: &RatFunc, rho_n: &RatFunc) -> MultiPoly {
    let k = MultiPoly::var(Var::K);
    let mut candidates: Vec<MultiPoly> = Vec::new();
    for p in &f.poch {
        let span = (p.n_step().unsigned_abs() * r as u64) as i64 + 1;
        for i in -span..=span {
            candidates.push(&(&p.base + &k) + &MultiPoly::from_int(i));
        }
    }
    let mut factors: Vec<MultiPoly> = Vec::new();
    for c in candidates {
        let c = primitive(&c);
        if factors.contains(&c) {
            continue;
        }
        if rho_k.den().div_exact(&c).is_some() || rho_n.den().div_exact(&c).is_some() {
            factors.push(c);
        }
    }
    let mut d = factors.iter().fold(MultiPoly::one(), |acc, c| &acc * c);
    // prefactor denominators that depend on k enter whole
    let pre_den = f.prefactor.den();
    if pre_den.contains(Var::K) {
        for q in [
            pre_den.clone(),
            pre_den.shift(Var::K, &ExactRational::one()),
            pre_den.shift(Var::N, &ExactRational::from_integer(r.into())),
        ] {
            let q = primitive(&q);
            let g = poly_gcd(&d, &q);
            d = &d * &q.div_exact(&g).expect("gcd divides");
        }
    }
    d
}

fn primitive(p: &MultiPoly) -> MultiPoly {
    RatFunc::from_poly(p.clone()).num().clone()
}
