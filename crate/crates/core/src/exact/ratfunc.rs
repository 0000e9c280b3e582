use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use super::poly::{MultiPoly, Var, NVARS};
use super::rational::{denominator_lcm, numerator_gcd, ExactRational};
use crate::error::{Error, Result};

/// A quotient of polynomials in normal form.
///
/// Normal form: `gcd(num, den)` is a unit, both sides have integer
/// coefficients with no common integer content, and the lex-leading
/// coefficient of `den` is positive. Equal functions therefore have
/// identical representations.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RatFunc {
    num: MultiPoly,
    den: MultiPoly,
}

impl RatFunc {
    pub fn normalize(num: MultiPoly, den: MultiPoly) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::DivisionByZero);
        }
        if num.is_zero() {
            return Ok(Self::zero());
        }
        let (num, den) = if den.is_constant() || num.is_constant() {
            (num, den)
        } else {
            let g = num.gcd(&den);
            if g.is_constant() {
                (num, den)
            } else {
                (
                    num.div_exact(&g).expect("gcd divides numerator"),
                    den.div_exact(&g).expect("gcd divides denominator"),
                )
            }
        };
        Ok(Self::fix_scale(num, den))
    }

    /// Rescales by a rational so both sides are primitive integer
    /// polynomials and the denominator's leading coefficient is positive.
    fn fix_scale(num: MultiPoly, den: MultiPoly) -> Self {
        let coeffs = || num.terms().chain(den.terms()).map(|(_, c)| c);
        let lcm = denominator_lcm(coeffs());
        let content = numerator_gcd(coeffs().map(|c| c * ExactRational::from_integer(lcm.clone())).collect::<Vec<_>>().iter());
        let mut factor = ExactRational::new(lcm, content);
        if den.leading_coeff().is_negative() {
            factor = -factor;
        }
        if factor.is_one() {
            return Self { num, den };
        }
        Self {
            num: num.scale(&factor),
            den: den.scale(&factor),
        }
    }

    pub fn zero() -> Self {
        Self {
            num: MultiPoly::zero(),
            den: MultiPoly::one(),
        }
    }

    pub fn one() -> Self {
        Self::from_poly(MultiPoly::one())
    }

    pub fn constant(c: ExactRational) -> Self {
        Self::from_poly(MultiPoly::constant(c))
    }

    pub fn from_int(c: i64) -> Self {
        Self::from_poly(MultiPoly::from_int(c))
    }

    pub fn var(v: Var) -> Self {
        Self::from_poly(MultiPoly::var(v))
    }

    pub fn from_poly(p: MultiPoly) -> Self {
        if p.is_zero() {
            return Self::zero();
        }
        Self::fix_scale(p, MultiPoly::one())
    }

    pub fn num(&self) -> &MultiPoly {
        &self.num
    }

    pub fn den(&self) -> &MultiPoly {
        &self.den
    }

    pub fn into_parts(self) -> (MultiPoly, MultiPoly) {
        (self.num, self.den)
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.is_constant()
    }

    /// The polynomial `num/den` when the denominator is constant.
    pub fn as_polynomial(&self) -> Option<MultiPoly> {
        let d = self.den.constant_value()?;
        Some(self.num.scale(&d.recip()))
    }

    pub fn constant_value(&self) -> Option<ExactRational> {
        Some(self.num.constant_value()? / self.den.constant_value()?)
    }

    pub fn contains(&self, v: Var) -> bool {
        self.num.contains(v) || self.den.contains(v)
    }

    pub fn recip(&self) -> Result<Self> {
        Self::normalize(self.den.clone(), self.num.clone())
    }

    pub fn pow(&self, e: i32) -> Result<Self> {
        let base = if e < 0 { self.recip()? } else { self.clone() };
        let e = e.unsigned_abs();
        Ok(Self::fix_scale(base.num.pow(e), base.den.pow(e)))
    }

    /// Substitutes rational functions for symbols, simultaneously.
    ///
    /// Bound symbols must not occur in the substituted values unless bound
    /// to themselves.
    pub fn substitute(&self, bindings: &BTreeMap<Var, RatFunc>) -> Result<Self> {
        let (nn, nd) = substitute_poly(&self.num, bindings);
        let (dn, dd) = substitute_poly(&self.den, bindings);
        if dn.is_zero() {
            return Err(Error::PoleEncountered(format!(
                "denominator {} vanishes under substitution",
                self.den
            )));
        }
        Self::normalize(&nn * &dd, &nd * &dn)
    }

    /// Single-symbol convenience form of [`substitute`](Self::substitute).
    pub fn subs(&self, v: Var, value: &RatFunc) -> Result<Self> {
        let mut b = BTreeMap::new();
        b.insert(v, value.clone());
        self.substitute(&b)
    }

    /// Substitutes a rational constant for `v`.
    pub fn eval_var(&self, v: Var, value: &ExactRational) -> Result<Self> {
        let den = self.den.eval_var(v, value);
        if den.is_zero() {
            return Err(Error::pole_at_value(&format!("denominator {}", self.den), value));
        }
        Self::normalize(self.num.eval_var(v, value), den)
    }

    /// `v -> v + shift`.
    pub fn shift(&self, v: Var, shift: &ExactRational) -> Self {
        // A shift is invertible and preserves coprimality and the leading term.
        Self::fix_scale(self.num.shift(v, shift), self.den.shift(v, shift))
    }

    pub fn rename(&self, from: Var, to: Var) -> Self {
        Self::normalize(self.num.rename(from, to), self.den.rename(from, to))
            .expect("renaming keeps a nonzero denominator")
    }

    /// Evaluates at a full point.
    pub fn eval(&self, point: &[Option<ExactRational>; NVARS]) -> Result<ExactRational> {
        let d = self
            .den
            .eval(point)
            .ok_or_else(|| Error::PoleEncountered("unbound symbol in denominator".into()))?;
        if d.is_zero() {
            return Err(Error::PoleEncountered(format!("denominator {} vanishes", self.den)));
        }
        let n = self
            .num
            .eval(point)
            .ok_or_else(|| Error::PoleEncountered("unbound symbol in numerator".into()))?;
        Ok(n / d)
    }

    /// Evaluates a rational function of `v` alone.
    pub fn eval_univariate(&self, v: Var, x: &ExactRational) -> Result<ExactRational> {
        let mut point: [Option<ExactRational>; NVARS] = Default::default();
        point[v.index()] = Some(x.clone());
        self.eval(&point)
    }

    /// Cross-multiplication equality, independent of normalization.
    pub fn equals(&self, other: &RatFunc) -> bool {
        ratfunc_equal(self, other)
    }
}

fn substitute_poly(p: &MultiPoly, bindings: &BTreeMap<Var, RatFunc>) -> (MultiPoly, MultiPoly) {
    let mut num = p.clone();
    let mut den = MultiPoly::one();
    for (&v, value) in bindings {
        if !num.contains(v) {
            continue;
        }
        // num(v = N/D) = sum_e c_e N^e D^(d-e) / D^d
        let d = num.degree_in(v);
        let coeffs = num.coefficients_in(v);
        let mut acc = MultiPoly::zero();
        let mut npow = MultiPoly::one();
        let dpows: Vec<MultiPoly> = (0..=d).map(|i| value.den.pow(i)).collect();
        for (e, c) in coeffs.iter().enumerate() {
            if !c.is_zero() {
                acc = &acc + &(&(c * &npow) * &dpows[(d as usize) - e]);
            }
            npow = &npow * &value.num;
        }
        num = acc;
        den = &den * &dpows[d as usize];
    }
    (num, den)
}

/// `f == g` as rational functions: `f.num * g.den - g.num * f.den == 0`.
pub fn ratfunc_equal(f: &RatFunc, g: &RatFunc) -> bool {
    (&f.num * &g.den - &g.num * &f.den).is_zero()
}

/// Normalizes `num/den`. Fails with [`Error::DivisionByZero`] on a zero denominator.
pub fn ratfunc_normalize(num: MultiPoly, den: MultiPoly) -> Result<RatFunc> {
    RatFunc::normalize(num, den)
}

impl Add for &RatFunc {
    type Output = RatFunc;
    fn add(self, rhs: &RatFunc) -> RatFunc {
        if self.is_zero() {
            return rhs.clone();
        }
        if rhs.is_zero() {
            return self.clone();
        }
        if self.den == rhs.den {
            return RatFunc::normalize(&self.num + &rhs.num, self.den.clone()).unwrap();
        }
        RatFunc::normalize(
            &(&self.num * &rhs.den) + &(&rhs.num * &self.den),
            &self.den * &rhs.den,
        )
        .unwrap()
    }
}

impl Sub for &RatFunc {
    type Output = RatFunc;
    fn sub(self, rhs: &RatFunc) -> RatFunc {
        self + &(-rhs)
    }
}

impl Neg for &RatFunc {
    type Output = RatFunc;
    fn neg(self) -> RatFunc {
        RatFunc {
            num: -&self.num,
            den: self.den.clone(),
        }
    }
}

impl Mul for &RatFunc {
    type Output = RatFunc;
    fn mul(self, rhs: &RatFunc) -> RatFunc {
        if self.is_zero() || rhs.is_zero() {
            return RatFunc::zero();
        }
        // Cross-cancel first so the gcds involved stay small.
        let g1 = self.num.gcd(&rhs.den);
        let g2 = rhs.num.gcd(&self.den);
        let (n1, d2) = (self.num.div_exact(&g1).unwrap(), rhs.den.div_exact(&g1).unwrap());
        let (n2, d1) = (rhs.num.div_exact(&g2).unwrap(), self.den.div_exact(&g2).unwrap());
        RatFunc::fix_scale(&n1 * &n2, &d1 * &d2)
    }
}

impl Div for &RatFunc {
    type Output = RatFunc;
    /// Panics when dividing by zero; use [`RatFunc::recip`] to handle that case.
    fn div(self, rhs: &RatFunc) -> RatFunc {
        self * &rhs.recip().expect("division by zero rational function")
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for RatFunc {
            type Output = RatFunc;
            fn $m(self, rhs: RatFunc) -> RatFunc {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);
forward_owned!(Div, div);

impl Neg for RatFunc {
    type Output = RatFunc;
    fn neg(self) -> RatFunc {
        -&self
    }
}

impl From<MultiPoly> for RatFunc {
    fn from(p: MultiPoly) -> Self {
        RatFunc::from_poly(p)
    }
}

impl From<ExactRational> for RatFunc {
    fn from(c: ExactRational) -> Self {
        RatFunc::constant(c)
    }
}

impl From<BigInt> for RatFunc {
    fn from(c: BigInt) -> Self {
        RatFunc::constant(ExactRational::from_integer(c))
    }
}

impl fmt::Display for RatFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one_poly() {
            return write!(f, "{}", self.num);
        }
        let num = if self.num.num_terms() > 1 {
            format!("({})", self.num)
        } else {
            self.num.to_string()
        };
        // a bare denominator must be a single factor
        let bare = self.den.is_constant()
            || (self.den.num_terms() == 1
                && self.den.leading_coeff().is_one()
                && self.den.vars().iter().filter(|&&x| x).count() == 1);
        if bare {
            write!(f, "{num}/{}", self.den)
        } else {
            write!(f, "{num}/({})", self.den)
        }
    }
}

impl fmt::Debug for RatFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RatFunc({self})")
    }
}

impl MultiPoly {
    fn is_one_poly(&self) -> bool {
        self.constant_value().is_some_and(|c| c.is_one())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rational::{int, ratio};

    fn n() -> MultiPoly {
        MultiPoly::var(Var::N)
    }
    fn k() -> MultiPoly {
        MultiPoly::var(Var::K)
    }

    #[test]
    fn cancels_common_factor() {
        let f = ratfunc_normalize(&n().pow(2) - &MultiPoly::one(), &n() - &MultiPoly::one()).unwrap();
        assert_eq!(f.num(), &(&n() + &MultiPoly::one()));
        assert_eq!(f.den(), &MultiPoly::one());
    }

    #[test]
    fn canonical_zero() {
        let f = ratfunc_normalize(MultiPoly::zero(), n().pow(3)).unwrap();
        assert!(f.is_zero());
        assert_eq!(f.den(), &MultiPoly::one());
    }

    #[test]
    fn content_extraction() {
        let num = (&n() + &k()).scale(&int(2));
        let f = ratfunc_normalize(num, MultiPoly::from_int(4)).unwrap();
        assert_eq!(f.num(), &(&n() + &k()));
        assert_eq!(f.den(), &MultiPoly::from_int(2));
    }

    #[test]
    fn negative_leading_denominator_flips() {
        let f = ratfunc_normalize(MultiPoly::one(), &MultiPoly::one() - &n()).unwrap();
        assert_eq!(f.to_string(), "-1/(n - 1)");
        let g = ratfunc_normalize(n().scale(&ratio(1, 2)), n().scale(&ratio(-3, 4))).unwrap();
        assert_eq!(g.to_string(), "-2/3");
    }

    #[test]
    fn zero_denominator_rejected() {
        assert_eq!(ratfunc_normalize(n(), MultiPoly::zero()), Err(Error::DivisionByZero));
    }

    #[test]
    fn scaled_representatives_are_equal() {
        let f = ratfunc_normalize(n(), &n() + &MultiPoly::one()).unwrap();
        let np1 = &n() + &MultiPoly::one();
        let g = RatFunc { num: &n().pow(2) + &n(), den: np1.pow(2) };
        assert!(ratfunc_equal(&f, &g));
        assert!(ratfunc_equal(&f, &f));
        assert!(!ratfunc_equal(&f, &RatFunc::one()));
    }

    #[test]
    fn substitute_shift() {
        let f = RatFunc::from_poly(n().pow(2));
        let g = f.subs(Var::N, &RatFunc::from_poly(&n() + &MultiPoly::one())).unwrap();
        assert_eq!(g.to_string(), "n^2 + 2*n + 1");
    }

    #[test]
    fn substitute_reports_pole() {
        let f = ratfunc_normalize(MultiPoly::one(), &n() - &MultiPoly::from_int(2)).unwrap();
        assert!(matches!(f.eval_var(Var::N, &int(2)), Err(Error::PoleEncountered(_))));
        let mut b = BTreeMap::new();
        b.insert(Var::N, RatFunc::from_int(2));
        assert!(matches!(f.substitute(&b), Err(Error::PoleEncountered(_))));
    }
}
