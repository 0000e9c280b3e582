//! Heuristic polynomial gcd over the integers.
//!
//! Evaluates one symbol at a large integer, recurses on the image, and
//! lifts the result back through its balanced base-`x` digits. A candidate
//! is accepted only after trial division, so a wrong guess costs time, not
//! correctness. Returns `None` after a few failed points.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::poly::{MultiPoly, Var, NVARS};
use super::rational::{denominator_lcm, numerator_gcd, ExactRational};

/// Scales to an integer polynomial with unit content and positive leading
/// coefficient.
pub(crate) fn primitive_integer(p: &MultiPoly) -> MultiPoly {
    if p.is_zero() {
        return p.clone();
    }
    let lcm = denominator_lcm(p.terms().map(|(_, c)| c));
    let scaled = p.scale(&ExactRational::from_integer(lcm));
    let content = numerator_gcd(scaled.terms().map(|(_, c)| c));
    let mut s = ExactRational::new(BigInt::one(), content);
    if scaled.leading_coeff().is_negative() {
        s = -s;
    }
    scaled.scale(&s)
}

fn int_content(p: &MultiPoly) -> BigInt {
    numerator_gcd(p.terms().map(|(_, c)| c))
}

fn max_norm(p: &MultiPoly) -> BigInt {
    p.terms()
        .map(|(_, c)| c.numer().abs())
        .max()
        .unwrap_or_else(BigInt::zero)
}

/// gcd of two integer-coefficient polynomials, positive leading coefficient.
pub(crate) fn heu_gcd(f: &MultiPoly, g: &MultiPoly) -> Option<MultiPoly> {
    if f.is_zero() {
        return Some(primitive_sign(g.clone()));
    }
    if g.is_zero() {
        return Some(primitive_sign(f.clone()));
    }
    let cf = int_content(f);
    let cg = int_content(g);
    let c = cf.gcd(&cg);
    if f.is_constant() || g.is_constant() {
        return Some(MultiPoly::constant(ExactRational::from_integer(c)));
    }
    let (vf, vg) = (f.vars(), g.vars());
    let v = Var::ALL
        .into_iter()
        .find(|v| vf[v.index()] || vg[v.index()])
        .expect("non-constant");
    let f = f.scale(&ExactRational::new(BigInt::one(), cf));
    let g = g.scale(&ExactRational::new(BigInt::one(), cg));

    let nf = max_norm(&f);
    let ng = max_norm(&g);
    let b: BigInt = BigInt::from(2) * nf.clone().min(ng.clone()) + 29;
    let lf = f.leading_coeff().numer().abs();
    let lg = g.leading_coeff().numer().abs();
    let alt: BigInt = BigInt::from(2) * (&nf / &lf).min(&ng / &lg) + 2;
    let mut x = b.clone().min(BigInt::from(99) * b.sqrt()).max(alt);

    for _ in 0..6 {
        let xq = ExactRational::from_integer(x.clone());
        let ff = f.eval_var(v, &xq);
        let gg = g.eval_var(v, &xq);
        if !ff.is_zero() && !gg.is_zero() {
            if let Some(h) = heu_gcd(&ff, &gg) {
                let cand = primitive_integer(&interpolate(&h, &x, v));
                if !cand.is_zero()
                    && f.div_exact(&cand).is_some()
                    && g.div_exact(&cand).is_some()
                {
                    return Some(cand.scale(&ExactRational::from_integer(c)));
                }
            }
        }
        x = BigInt::from(73794) * &x * x.sqrt().sqrt() / BigInt::from(27011);
    }
    None
}

fn primitive_sign(p: MultiPoly) -> MultiPoly {
    if p.leading_coeff().is_negative() {
        -p
    } else {
        p
    }
}

/// Rebuilds a polynomial in `v` from its image at `v = x`.
fn interpolate(h: &MultiPoly, x: &BigInt, v: Var) -> MultiPoly {
    let half = x / 2;
    let xq = ExactRational::from_integer(x.clone());
    let mut rest = h.clone();
    let mut out = MultiPoly::zero();
    let mut i = 0u32;
    while !rest.is_zero() {
        let mut digit = MultiPoly::zero();
        for (e, c) in rest.terms() {
            let mut r = c.numer().mod_floor(x);
            if r > half {
                r -= x;
            }
            if !r.is_zero() {
                digit = &digit + &MultiPoly::monomial(*e, ExactRational::from_integer(r));
            }
        }
        if !digit.is_zero() {
            let mut ex = [0u32; NVARS];
            ex[v.index()] = i;
            out = &out + &(&digit * &MultiPoly::monomial(ex, ExactRational::one()));
        }
        rest = (&rest - &digit).scale(&xq.recip());
        i += 1;
    }
    out
}
