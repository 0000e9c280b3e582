//! Rational-root splitting of univariate polynomials.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::poly::{MultiPoly, Var};
use super::rational::{denominator_lcm, ExactRational};

/// `p = constant * prod (v - root)^mult * remainder`, where `remainder` is
/// monic and has no rational roots.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearFactorization {
    pub constant: ExactRational,
    /// Roots in ascending order with multiplicities.
    pub roots: Vec<(ExactRational, u32)>,
    pub remainder: MultiPoly,
}

impl LinearFactorization {
    /// True when every factor is linear.
    pub fn is_complete(&self) -> bool {
        self.remainder.is_constant()
    }

    /// Multiplies the factorization back out.
    pub fn expand(&self, v: Var) -> MultiPoly {
        let mut acc = self.remainder.scale(&self.constant);
        for (r, m) in &self.roots {
            acc = &acc * &MultiPoly::linear(v, -r).pow(*m);
        }
        acc
    }
}

/// Splits off every rational linear factor of a nonzero univariate
/// polynomial in `v`. Candidate roots are `±p/q` with `p` dividing the
/// trailing and `q` the leading coefficient of the integer-primitive form;
/// repeated roots come from repeated synthetic division.
pub fn factor_linear_rational(p: &MultiPoly, v: Var) -> LinearFactorization {
    assert!(!p.is_zero(), "cannot factor the zero polynomial");
    let mut coeffs = p
        .univariate_coeffs(v)
        .expect("factor_linear_rational needs a univariate polynomial");
    let constant = coeffs.last().unwrap().clone();
    let mut roots: Vec<(ExactRational, u32)> = Vec::new();

    let zeros = coeffs.iter().take_while(|c| c.is_zero()).count();
    if zeros > 0 {
        roots.push((ExactRational::zero(), zeros as u32));
        coeffs.drain(..zeros);
    }

    if coeffs.len() > 1 {
        let lcm = denominator_lcm(coeffs.iter());
        let ints: Vec<BigInt> = coeffs
            .iter()
            .map(|c| (c * ExactRational::from_integer(lcm.clone())).to_integer())
            .collect();
        let lead = ints.last().unwrap().abs();
        let trail = ints[0].abs();
        let ps = divisors(&trail);
        let qs = divisors(&lead);
        let mut approx = float_coeffs(&coeffs);
        for num in &ps {
            for den in qs.iter().filter(|d| num.gcd(d).is_one()) {
                let x = num.to_f64().unwrap_or(f64::NAN) / den.to_f64().unwrap_or(f64::NAN);
                for sign in [1.0, -1.0] {
                    if coeffs.len() <= 1 || !maybe_root(&approx, sign * x) {
                        continue;
                    }
                    let mut c = ExactRational::new(num.clone(), den.clone());
                    if sign < 0.0 {
                        c = -c;
                    }
                    let mut mult = 0;
                    while coeffs.len() > 1 {
                        match synthetic_division(&coeffs, &c) {
                            Some(q) => {
                                coeffs = q;
                                mult += 1;
                            }
                            None => break,
                        }
                    }
                    if mult > 0 {
                        roots.push((c, mult));
                        approx = float_coeffs(&coeffs);
                    }
                }
            }
        }
    }
    roots.sort_by(|x, y| x.0.cmp(&y.0));
    let lc = coeffs.last().unwrap().clone();
    let monic: Vec<ExactRational> = coeffs.iter().map(|c| c / &lc).collect();
    LinearFactorization {
        constant,
        roots,
        remainder: MultiPoly::from_univariate(v, &monic),
    }
}

fn float_coeffs(coeffs: &[ExactRational]) -> Vec<f64> {
    coeffs.iter().map(|c| c.to_f64().unwrap_or(f64::NAN)).collect()
}

/// Cheap floating-point screen: false only when `x` is clearly not a root.
fn maybe_root(coeffs: &[f64], x: f64) -> bool {
    let mut val = 0.0f64;
    let mut mag = 0.0f64;
    for &c in coeffs.iter().rev() {
        val = val * x + c;
        mag = mag * x.abs() + c.abs();
    }
    if !(val.is_finite() && mag.is_finite()) {
        return true;
    }
    val.abs() <= 1e-9 * mag
}

/// Divides by `(v - r)` when `r` is a root.
fn synthetic_division(coeffs: &[ExactRational], r: &ExactRational) -> Option<Vec<ExactRational>> {
    let d = coeffs.len() - 1;
    let mut out = vec![ExactRational::zero(); d];
    let mut carry = ExactRational::zero();
    for i in (1..=d).rev() {
        carry = &coeffs[i] + &carry * r;
        out[i - 1] = carry.clone();
    }
    let rem = &coeffs[0] + &carry * r;
    rem.is_zero().then_some(out)
}

/// Positive divisors by trial division.
fn divisors(n: &BigInt) -> Vec<BigInt> {
    if n.is_zero() {
        return vec![BigInt::one()];
    }
    let mut primes: Vec<(BigInt, u32)> = Vec::new();
    let mut m = n.abs();
    let mut p = BigInt::from(2);
    while &p * &p <= m {
        let mut e = 0;
        while m.mod_floor(&p).is_zero() {
            m /= &p;
            e += 1;
        }
        if e > 0 {
            primes.push((p.clone(), e));
        }
        p += if p == BigInt::from(2) { 1 } else { 2 };
    }
    if m > BigInt::one() {
        primes.push((m, 1));
    }
    let mut out = vec![BigInt::one()];
    for (p, e) in primes {
        let mut next = Vec::with_capacity(out.len() * (e as usize + 1));
        for d in &out {
            let mut pe = BigInt::one();
            for _ in 0..=e {
                next.push(d * &pe);
                pe *= &p;
            }
        }
        out = next;
    }
    out.sort();
    out
}
