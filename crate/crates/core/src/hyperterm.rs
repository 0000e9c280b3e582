//! Bivariate hypergeometric terms built from Pochhammer symbols.

use std::fmt;

use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::exact::{ExactRational, MultiPoly, RatFunc, Var};

/// Rising factorial `(x)_m = x (x + 1) ... (x + m - 1)`.
pub fn pochhammer(x: &ExactRational, m: u32) -> ExactRational {
    let mut acc = ExactRational::one();
    let mut t = x.clone();
    for _ in 0..m {
        if t.is_zero() {
            return ExactRational::zero();
        }
        acc *= &t;
        t += ExactRational::one();
    }
    acc
}

/// `(base)_k ^ exponent`; negative exponents sit in the denominator.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PochFactor {
    pub base: MultiPoly,
    pub exponent: i32,
}

impl PochFactor {
    pub fn new(base: MultiPoly, exponent: i32) -> Result<Self> {
        if exponent == 0 {
            return Err(Error::ValidationError {
                id: base.to_string(),
                message: "Pochhammer exponent must be nonzero".into(),
            });
        }
        if base.contains(Var::K) || base.contains(Var::J) {
            return Err(Error::ValidationError {
                id: base.to_string(),
                message: "Pochhammer base may only involve n, a, b".into(),
            });
        }
        for v in [Var::N, Var::A, Var::B] {
            if base.degree_in(v) > 1 {
                return Err(Error::ValidationError {
                    id: base.to_string(),
                    message: format!("Pochhammer base must be linear in {}", v.name()),
                });
            }
        }
        if base.total_degree() > 1 {
            return Err(Error::ValidationError {
                id: base.to_string(),
                message: "Pochhammer base must be linear".into(),
            });
        }
        if !n_coefficient(&base).is_integer() {
            return Err(Error::ValidationError {
                id: base.to_string(),
                message: "coefficient of n in a Pochhammer base must be an integer".into(),
            });
        }
        Ok(Self { base, exponent })
    }

    /// Integer coefficient of `n` in the base.
    pub fn n_step(&self) -> i64 {
        n_coefficient(&self.base).to_integer().to_i64().expect("small n coefficient")
    }
}

fn n_coefficient(base: &MultiPoly) -> ExactRational {
    let mut e = [0u32; crate::exact::poly::NVARS];
    e[Var::N.index()] = 1;
    base.coeff(&e)
}

/// `F(n, k) = prefactor(n, k) * power_base^k * prod (base_i)_k ^ exp_i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HyperTerm {
    pub poch: Vec<PochFactor>,
    pub power_base: ExactRational,
    pub prefactor: RatFunc,
}

/// Values of the free symbols.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Assignment {
    pub a: ExactRational,
    pub b: ExactRational,
    pub n: ExactRational,
}

impl Assignment {
    pub fn new(a: ExactRational, b: ExactRational, n: ExactRational) -> Self {
        Self { a, b, n }
    }

    /// The same parameters with `n` moved by `dn`.
    pub fn shifted(&self, dn: &ExactRational) -> Self {
        Self {
            a: self.a.clone(),
            b: self.b.clone(),
            n: &self.n + dn,
        }
    }

    pub fn point(&self) -> [Option<ExactRational>; crate::exact::poly::NVARS] {
        let mut p: [Option<ExactRational>; crate::exact::poly::NVARS] = Default::default();
        p[Var::N.index()] = Some(self.n.clone());
        p[Var::A.index()] = Some(self.a.clone());
        p[Var::B.index()] = Some(self.b.clone());
        p
    }

    /// Binds `a`, `b`, `n` in `f`, leaving the other symbols free.
    pub fn bind(&self, f: &RatFunc) -> Result<RatFunc> {
        f.eval_var(Var::N, &self.n)?
            .eval_var(Var::A, &self.a)?
            .eval_var(Var::B, &self.b)
    }
}

impl fmt::Display for Assignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(a, b, n) = ({}, {}, {})", self.a, self.b, self.n)
    }
}

/// Which quotient [`shift_ratio`] forms.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Shift {
    /// `F(n, k + 1) / F(n, k)`
    K,
    /// `F(n + r, k) / F(n, k)`
    N(u32),
}

impl HyperTerm {
    pub fn new(poch: Vec<PochFactor>, power_base: ExactRational, prefactor: RatFunc) -> Self {
        Self {
            poch,
            power_base,
            prefactor,
        }
    }

    /// A pure Pochhammer quotient with `power_base^k` and no prefactor.
    pub fn pochhammer_quotient(poch: Vec<PochFactor>, power_base: ExactRational) -> Self {
        Self::new(poch, power_base, RatFunc::one())
    }

    /// Heuristic admissibility notes; violations are reported, not fatal.
    pub fn admissibility_warnings(&self) -> Vec<String> {
        let mut out = Vec::new();
        let lower: i64 = self
            .poch
            .iter()
            .filter(|p| p.exponent < 0 && p.n_step() != 0)
            .map(|p| -p.exponent as i64)
            .sum();
        let upper: i64 = self
            .poch
            .iter()
            .filter(|p| p.exponent > 0 && p.n_step() != 0)
            .map(|p| p.exponent as i64)
            .sum();
        if lower == 0 {
            out.push("no lower Pochhammer symbol involves n".to_string());
        }
        if lower - upper < 2 {
            out.push(format!(
                "lower minus upper n-Pochhammer count is {}, expected at least 2",
                lower - upper
            ));
        }
        if self.power_base.is_zero() {
            out.push("power base is zero".to_string());
        }
        out
    }

    /// Incremental evaluator for `F(n0, 0), F(n0, 1), ...`.
    pub fn terms(&self, asg: &Assignment) -> Result<TermIter> {
        let bases = self
            .poch
            .iter()
            .map(|p| {
                let x = p.base.eval(&asg.point()).expect("base only involves n, a, b");
                (x, p.exponent, p.base.clone())
            })
            .collect();
        let prefactor = asg.bind(&self.prefactor)?;
        Ok(TermIter {
            bases,
            power: self.power_base.clone(),
            prefactor,
            running: ExactRational::one(),
            k: 0,
            failed: false,
        })
    }
}

/// Yields successive `F(n0, k)` with one multiplication per factor.
pub struct TermIter {
    bases: Vec<(ExactRational, i32, MultiPoly)>,
    power: ExactRational,
    prefactor: RatFunc,
    /// `power^k * prod (x_i)_k ^ e_i` for the current `k`.
    running: ExactRational,
    k: u64,
    failed: bool,
}

impl TermIter {
    fn prefactor_at(&self, k: u64) -> Result<ExactRational> {
        self.prefactor
            .eval_univariate(Var::K, &ExactRational::from_integer(k.into()))
            .map_err(|_| Error::PoleEncountered(format!("prefactor {} has a pole at k = {k}", self.prefactor)))
    }
}

impl Iterator for TermIter {
    type Item = Result<ExactRational>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.failed {
            return None;
        }
        let k = self.k;
        if k > 0 {
            // advance running from k - 1 to k
            let km1 = ExactRational::from_integer((k - 1).into());
            let mut step = self.power.clone();
            for (x, e, base) in &self.bases {
                let f = x + &km1;
                if f.is_zero() {
                    if *e < 0 {
                        self.failed = true;
                        return Some(Err(Error::PoleEncountered(format!(
                            "lower Pochhammer ({base})_k at {x} has a pole at k = {}",
                            k - 1
                        ))));
                    }
                    step = ExactRational::zero();
                    continue;
                }
                if *e > 0 {
                    step *= f.pow(*e);
                } else {
                    step /= f.pow(-*e);
                }
            }
            self.running *= step;
        }
        self.k += 1;
        let v = match self.prefactor_at(k) {
            Ok(p) => p * &self.running,
            Err(e) => {
                self.failed = true;
                return Some(Err(e));
            }
        };
        Some(Ok(v))
    }
}

/// Exact `F(n, k)` at an assignment.
pub fn term_value(f: &HyperTerm, asg: &Assignment, k: u64) -> Result<ExactRational> {
    let point = asg.point();
    let kq = ExactRational::from_integer(k.into());
    let mut acc = f.power_base.pow(k as i32);
    if k > 0 && f.power_base.is_zero() {
        return Ok(ExactRational::zero());
    }
    for p in &f.poch {
        let x = p.base.eval(&point).expect("base only involves n, a, b");
        if p.exponent < 0 && x <= ExactRational::zero() && x.is_integer() {
            let i = -x.to_integer().to_i64().unwrap_or(i64::MAX);
            if (i as u64) < k {
                return Err(Error::PoleEncountered(format!(
                    "lower Pochhammer ({}) at {x} has a pole at k = {i}",
                    p.base
                )));
            }
        }
        let v = pochhammer(&x, k as u32);
        if p.exponent > 0 {
            acc *= v.pow(p.exponent);
        } else {
            acc /= v.pow(-p.exponent);
        }
    }
    let mut full = point;
    full[Var::K.index()] = Some(kq);
    let pre = f
        .prefactor
        .eval(&full)
        .map_err(|_| Error::PoleEncountered(format!("prefactor {} has a pole at k = {k}", f.prefactor)))?;
    Ok(acc * pre)
}

/// `F(n, k + 1) / F(n, k)` or `F(n + r, k) / F(n, k)` as a rational function.
pub fn shift_ratio(f: &HyperTerm, dir: Shift) -> RatFunc {
    let k = MultiPoly::var(Var::K);
    let mut num = MultiPoly::one();
    let mut den = MultiPoly::one();
    let mut mul = |p: MultiPoly, e: i32| {
        if e > 0 {
            num = &num * &p.pow(e as u32);
        } else {
            den = &den * &p.pow((-e) as u32);
        }
    };
    match dir {
        Shift::K => {
            for p in &f.poch {
                mul(&p.base + &k, p.exponent);
            }
            mul(MultiPoly::constant(f.power_base.clone()), 1);
            let ratio = RatFunc::normalize(num, den).expect("nonzero Pochhammer denominators");
            let pre = &f.prefactor.shift(Var::K, &ExactRational::one()) / &f.prefactor;
            &ratio * &pre
        }
        Shift::N(r) => {
            for p in &f.poch {
                // (x + m)_k / (x)_k with m = step * r
                let m = p.n_step() * r as i64;
                for i in 0..m.unsigned_abs() {
                    let i = ExactRational::from_integer(i.into());
                    if m > 0 {
                        let top = &(&p.base + &k) + &MultiPoly::constant(i.clone());
                        let bot = &p.base + &MultiPoly::constant(i);
                        mul(top, p.exponent);
                        mul(bot, -p.exponent);
                    } else {
                        // (y)_k / (y + |m|)_k with y = x + m
                        let y = &p.base + &MultiPoly::from_int(m);
                        mul(&y + &MultiPoly::constant(i.clone()), p.exponent);
                        mul(&(&y + &k) + &MultiPoly::constant(i), -p.exponent);
                    }
                }
            }
            let ratio = RatFunc::normalize(num, den).expect("nonzero Pochhammer denominators");
            let shift = ExactRational::from_integer(r.into());
            let pre = &f.prefactor.shift(Var::N, &shift) / &f.prefactor;
            &ratio * &pre
        }
    }
}

/// `F(n, 0)`, i.e. the prefactor at `k = 0`.
pub fn term_at_k0(f: &HyperTerm) -> RatFunc {
    f.prefactor
        .eval_var(Var::K, &ExactRational::zero())
        .expect("prefactor is finite at k = 0")
}

impl fmt::Display for HyperTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        if !self.prefactor.constant_value().is_some_and(|c| c.is_one()) {
            parts.push(format!("({})", self.prefactor));
        }
        if !self.power_base.is_one() {
            if self.power_base.is_negative() || !self.power_base.is_integer() {
                parts.push(format!("({})^k", self.power_base));
            } else {
                parts.push(format!("{}^k", self.power_base));
            }
        }
        for p in &self.poch {
            parts.push(format!("({})_k^{}", p.base, p.exponent));
        }
        if parts.is_empty() {
            return write!(f, "1");
        }
        write!(f, "{}", parts.join(" * "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{parse_poly, parse_ratfunc, ratio};

    fn pf(base: &str, e: i32) -> PochFactor {
        PochFactor::new(parse_poly(base).unwrap(), e).unwrap()
    }

    fn nn() -> HyperTerm {
        HyperTerm::pochhammer_quotient(vec![pf("a", 1), pf("b", 1), pf("n", -2)], ratio(1, 1))
    }

    fn half_half(n: ExactRational) -> Assignment {
        Assignment::new(ratio(1, 2), ratio(1, 2), n)
    }

    #[test]
    fn pochhammer_examples() {
        assert_eq!(pochhammer(&ratio(7, 3), 0), ratio(1, 1));
        assert_eq!(pochhammer(&ratio(1, 2), 3), ratio(15, 8));
        assert_eq!(pochhammer(&ratio(-2, 1), 4), ratio(0, 1));
    }

    #[test]
    fn term_value_examples() {
        let f = nn();
        assert_eq!(term_value(&f, &half_half(ratio(2, 1)), 1).unwrap(), ratio(1, 16));
        assert_eq!(term_value(&f, &half_half(ratio(2, 1)), 0).unwrap(), ratio(1, 1));
        assert!(matches!(
            term_value(&f, &half_half(ratio(0, 1)), 1),
            Err(Error::PoleEncountered(_))
        ));
    }

    #[test]
    fn iterator_matches_direct() {
        let f = HyperTerm::new(
            vec![pf("a", 1), pf("b", 1), pf("n", -2)],
            ratio(-1, 3),
            parse_ratfunc("1/(k + n)").unwrap(),
        );
        let asg = Assignment::new(ratio(1, 3), ratio(5, 4), ratio(3, 2));
        for (k, t) in f.terms(&asg).unwrap().take(12).enumerate() {
            assert_eq!(t.unwrap(), term_value(&f, &asg, k as u64).unwrap());
        }
    }

    #[test]
    fn iterator_reports_pole_index() {
        let f = HyperTerm::pochhammer_quotient(vec![pf("a", 1), pf("n", -1)], ratio(1, 1));
        let asg = Assignment::new(ratio(1, 2), ratio(0, 1), ratio(-3, 1));
        let err = f.terms(&asg).unwrap().find_map(|t| t.err()).unwrap();
        assert!(err.to_string().contains("k = 3"), "{err}");
    }

    #[test]
    fn shift_ratio_examples() {
        let f = nn();
        assert_eq!(
            shift_ratio(&f, Shift::K),
            parse_ratfunc("(a + k)(b + k)/(n + k)^2").unwrap()
        );
        assert_eq!(shift_ratio(&f, Shift::N(1)), parse_ratfunc("n^2/(n + k)^2").unwrap());
        let alt = HyperTerm::pochhammer_quotient(
            vec![pf("a", 1), pf("b", 1), pf("a + n + 1", -1), pf("b + n + 1", -1)],
            ratio(-1, 1),
        );
        assert_eq!(
            shift_ratio(&alt, Shift::K),
            parse_ratfunc("-(a + k)(b + k)/((a + n + 1 + k)(b + n + 1 + k))").unwrap()
        );
    }

    #[test]
    fn n_shift_with_step_two() {
        let f = HyperTerm::pochhammer_quotient(vec![pf("a", 1), pf("2 n", -1)], ratio(1, 1));
        assert_eq!(
            shift_ratio(&f, Shift::N(1)),
            parse_ratfunc("2 n (2 n + 1)/((2 n + k)(2 n + k + 1))").unwrap()
        );
    }

    #[test]
    fn value_at_k0() {
        assert_eq!(term_at_k0(&nn()), RatFunc::one());
        let f = HyperTerm::new(vec![], ratio(1, 1), parse_ratfunc("1/(k + n)").unwrap());
        assert_eq!(term_at_k0(&f), parse_ratfunc("1/n").unwrap());
        let g = HyperTerm::new(vec![], ratio(1, 1), parse_ratfunc("(n + k)/(n + 2 k)").unwrap());
        assert_eq!(term_at_k0(&g), RatFunc::one());
    }

    #[test]
    fn admissibility() {
        assert!(nn().admissibility_warnings().is_empty());
        let f = HyperTerm::pochhammer_quotient(vec![pf("a", 1), pf("n", -1)], ratio(1, 1));
        assert_eq!(f.admissibility_warnings().len(), 1);
    }
}
