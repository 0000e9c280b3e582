//! Naive and accelerated partial sums, convergence rates, and the
//! canonical rate/Pochhammer/summand form of an accelerated series.

use std::fmt;

use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::catalog::TransformFamily;
use crate::certify::Recursion;
use crate::error::{Error, Result};
use crate::exact::{factor_linear_rational, ExactRational, MultiPoly, RatFunc, Var};
use crate::hyperterm::{pochhammer, Assignment};

// ---------------------------------------------------------------------------
// Constants

/// Named constants a closed form may be built from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Atom {
    Pi,
    PiSquared,
    Ln2,
    Zeta3,
    Catalan,
    Sqrt2,
    Sqrt3,
    Cbrt2,
}

impl Atom {
    pub const ALL: [Atom; 8] = [
        Atom::Pi,
        Atom::PiSquared,
        Atom::Ln2,
        Atom::Zeta3,
        Atom::Catalan,
        Atom::Sqrt2,
        Atom::Sqrt3,
        Atom::Cbrt2,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Atom::Pi => "pi",
            Atom::PiSquared => "pisq",
            Atom::Ln2 => "ln2",
            Atom::Zeta3 => "zeta3",
            Atom::Catalan => "catalan",
            Atom::Sqrt2 => "sqrt2",
            Atom::Sqrt3 => "sqrt3",
            Atom::Cbrt2 => "cbrt2",
        }
    }

    pub fn parse(s: &str) -> Result<Atom> {
        Atom::ALL
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| Error::UnknownAtom(s.to_string()))
    }
}

/// `coefficient * prod atom^exponent`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ConstantTerm {
    pub coefficient: ExactRational,
    /// Sorted by atom, exponents nonzero, each atom at most once.
    pub atoms: Vec<(Atom, i32)>,
}

impl ConstantTerm {
    pub fn new(coefficient: ExactRational, atoms: Vec<(Atom, i32)>) -> Self {
        let mut merged: Vec<(Atom, i32)> = Vec::new();
        let mut atoms = atoms;
        atoms.sort();
        for (a, e) in atoms {
            match merged.last_mut() {
                Some((b, f)) if *b == a => *f += e,
                _ => merged.push((a, e)),
            }
        }
        merged.retain(|(_, e)| *e != 0);
        Self {
            coefficient,
            atoms: merged,
        }
    }

    pub fn rational(c: ExactRational) -> Self {
        Self::new(c, Vec::new())
    }
}

/// A closed form: a sum of [`ConstantTerm`]s.
///
/// Most targets are a single term such as `768/pi`; a few need a short
/// sum, e.g. `60 pi - 149`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ConstantExpr {
    pub terms: Vec<ConstantTerm>,
}

impl ConstantExpr {
    pub fn term(coefficient: ExactRational, atoms: Vec<(Atom, i32)>) -> Self {
        Self {
            terms: vec![ConstantTerm::new(coefficient, atoms)],
        }
    }

    /// Rescales every term.
    pub fn scaled(&self, c: &ExactRational) -> Self {
        Self {
            terms: self
                .terms
                .iter()
                .map(|t| ConstantTerm::new(&t.coefficient * c, t.atoms.clone()))
                .collect(),
        }
    }

    /// Parses the form printed by `Display`: terms joined by `+`/`-`, each a
    /// `*`/`/` chain of rationals and atom names with optional `^int`.
    pub fn parse(src: &str) -> Result<Self> {
        let err = |column: usize, message: String| Error::ParseError {
            line: 1,
            column,
            message,
        };
        let chars: Vec<char> = src.chars().collect();
        let mut i = 0;
        let skip_ws = |i: &mut usize| {
            while *i < chars.len() && chars[*i].is_whitespace() {
                *i += 1;
            }
        };
        let mut terms = Vec::new();
        let mut first = true;
        loop {
            skip_ws(&mut i);
            if i >= chars.len() {
                if first {
                    return Err(err(i + 1, "empty constant".into()));
                }
                break;
            }
            let mut sign = 1;
            if chars[i] == '+' || chars[i] == '-' {
                if chars[i] == '-' {
                    sign = -1;
                }
                i += 1;
                skip_ws(&mut i);
            } else if !first {
                return Err(err(i + 1, format!("expected `+` or `-`, found `{}`", chars[i])));
            }
            first = false;
            let mut coefficient = ExactRational::from_integer(sign.into());
            let mut atoms = Vec::new();
            let mut divide = false;
            loop {
                skip_ws(&mut i);
                let start = i;
                if i < chars.len() && chars[i].is_ascii_digit() {
                    while i < chars.len() && chars[i].is_ascii_digit() {
                        i += 1;
                    }
                    let s: String = chars[start..i].iter().collect();
                    let v = ExactRational::from_integer(s.parse().expect("digits"));
                    if divide {
                        coefficient /= v;
                    } else {
                        coefficient *= v;
                    }
                } else if i < chars.len() && chars[i].is_ascii_alphabetic() {
                    while i < chars.len() && chars[i].is_ascii_alphanumeric() {
                        i += 1;
                    }
                    let s: String = chars[start..i].iter().collect();
                    let atom = Atom::parse(&s)?;
                    let mut e: i32 = 1;
                    if i < chars.len() && chars[i] == '^' {
                        i += 1;
                        let es = i;
                        if i < chars.len() && chars[i] == '-' {
                            i += 1;
                        }
                        while i < chars.len() && chars[i].is_ascii_digit() {
                            i += 1;
                        }
                        let s: String = chars[es..i].iter().collect();
                        e = s.parse().map_err(|_| err(es + 1, "bad exponent".into()))?;
                    }
                    atoms.push((atom, if divide { -e } else { e }));
                } else if i < chars.len() {
                    return Err(err(i + 1, format!("unexpected `{}`", chars[i])));
                } else {
                    return Err(err(i + 1, "unexpected end of constant".into()));
                }
                skip_ws(&mut i);
                match chars.get(i) {
                    Some('*') => divide = false,
                    Some('/') => divide = true,
                    _ => break,
                }
                i += 1;
            }
            if coefficient.is_zero() && !atoms.is_empty() {
                return Err(err(i + 1, "zero coefficient".into()));
            }
            terms.push(ConstantTerm::new(coefficient, atoms));
        }
        Ok(Self { terms })
    }
}

impl fmt::Display for ConstantTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        if self.atoms.is_empty() || !self.coefficient.abs().is_one() {
            parts.push(self.coefficient.abs().to_string());
        }
        for (a, e) in &self.atoms {
            if *e == 1 {
                parts.push(a.name().to_string());
            } else {
                parts.push(format!("{}^{e}", a.name()));
            }
        }
        write!(f, "{}", parts.join("*"))
    }
}

impl fmt::Display for ConstantExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, t) in self.terms.iter().enumerate() {
            let neg = t.coefficient.is_negative();
            match (i, neg) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            write!(f, "{t}")?;
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// Instances and sums

/// A family at a concrete `(a, b, n0)`.
#[derive(Debug, Clone)]
pub struct SeriesInstance<'a> {
    pub family: &'a TransformFamily,
    pub assignment: Assignment,
    /// First index of the emitted display. Sums always start at zero; a
    /// nonzero start only relabels the emitted series.
    pub start_index: u32,
}

impl<'a> SeriesInstance<'a> {
    pub fn new(family: &'a TransformFamily, assignment: Assignment) -> Self {
        Self {
            family,
            assignment,
            start_index: 0,
        }
    }

    /// `g1`, `g2` with `a`, `b` bound: functions of `n` only.
    pub fn bound_recursion(&self) -> Result<(RatFunc, RatFunc)> {
        let bind = |f: &RatFunc| -> Result<RatFunc> {
            f.eval_var(Var::A, &self.assignment.a)?
                .eval_var(Var::B, &self.assignment.b)
        };
        let rec = &self.family.recursion;
        Ok((bind(&rec.g1)?, bind(&rec.g2)?))
    }
}

pub struct AcceleratedTerms {
    g1: RatFunc,
    g2: RatFunc,
    n: ExactRational,
    step: ExactRational,
    product: ExactRational,
    j: u64,
    /// A `g2` pole found while stepping past the previous term.
    pending: Option<Error>,
    failed: bool,
}

impl AcceleratedTerms {
    fn at(&self, g: &RatFunc, name: &str) -> Result<ExactRational> {
        g.eval_univariate(Var::N, &self.n).map_err(|_| {
            Error::PoleEncountered(format!("{name} at shift index {} (n = {})", self.j, self.n))
        })
    }
}

impl Iterator for AcceleratedTerms {
    type Item = Result<ExactRational>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.failed {
            return None;
        }
        if let Some(e) = self.pending.take() {
            self.failed = true;
            return Some(Err(e));
        }
        let term = match self.at(&self.g1, "g1") {
            Ok(g1) => &self.product * &g1,
            Err(e) => {
                self.failed = true;
                return Some(Err(e));
            }
        };
        match self.at(&self.g2, "g2") {
            Ok(g2) => self.product *= g2,
            Err(e) => self.pending = Some(e),
        }
        self.n += &self.step;
        self.j += 1;
        Some(Ok(term))
    }
}

impl<'a> SeriesInstance<'a> {
    /// Successive accelerated terms `prod_{i<j} g2(n0 + r i) g1(n0 + r j)`.
    pub fn accelerated_terms(&self) -> Result<AcceleratedTerms> {
        let (g1, g2) = self.bound_recursion()?;
        Ok(AcceleratedTerms {
            g1,
            g2,
            n: self.assignment.n.clone(),
            step: ExactRational::from_integer(self.family.recursion.r.into()),
            product: ExactRational::one(),
            j: 0,
            pending: None,
            failed: false,
        })
    }
}

fn sum_first(iter: impl Iterator<Item = Result<ExactRational>>, count: usize) -> Result<ExactRational> {
    let mut acc = ExactRational::zero();
    for t in iter.take(count) {
        acc += t?;
    }
    Ok(acc)
}

/// `sum_{k<K} F(n0, k)`.
pub fn naive_partial_sum(inst: &SeriesInstance, k_terms: usize) -> Result<ExactRational> {
    if k_terms == 0 {
        return Ok(ExactRational::zero());
    }
    sum_first(inst.family.term.terms(&inst.assignment)?, k_terms)
}

/// `sum_{j<J} prod_{i<j} g2(n0 + r i) g1(n0 + r j)`.
pub fn accelerated_partial_sum(inst: &SeriesInstance, j_terms: usize) -> Result<ExactRational> {
    if j_terms == 0 {
        return Ok(ExactRational::zero());
    }
    sum_first(inst.accelerated_terms()?, j_terms)
}

/// Limit of `g2(n + r i)` as `i -> oo`: the ratio of leading `n`-coefficients.
pub fn rate_of(rec: &Recursion) -> Result<ExactRational> {
    let (num, den) = (rec.g2.num(), rec.g2.den());
    let (dn, dd) = (num.degree_in(Var::N), den.degree_in(Var::N));
    if dn != dd {
        return Err(Error::DegreeMismatch { num: dn, den: dd });
    }
    let ratio = RatFunc::normalize(num.lc_in(Var::N), den.lc_in(Var::N))?;
    ratio
        .constant_value()
        .ok_or_else(|| Error::ParameterDependentRate(ratio.to_string()))
}

pub fn convergence_rate(family: &TransformFamily) -> Result<ExactRational> {
    rate_of(&family.recursion)
}

// ---------------------------------------------------------------------------
// Displayed form

/// `sum_{j >= start} rate^j prod (u)_j / prod (l)_j * summand(j)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChuSeries {
    pub rate: ExactRational,
    pub uppers: Vec<ExactRational>,
    pub lowers: Vec<ExactRational>,
    /// A rational function of `j`.
    pub summand: RatFunc,
    pub start_index: u32,
    pub target: Option<ConstantExpr>,
}

impl ChuSeries {
    /// Terms from `j = start_index` on, by running product.
    pub fn terms(&self) -> Result<ChuTerms<'_>> {
        let mut product = ExactRational::one();
        for j in 0..self.start_index {
            product = self.advance(product, j)?;
        }
        Ok(ChuTerms {
            series: self,
            product,
            j: self.start_index,
            failed: false,
        })
    }

    /// Moves the Pochhammer product from `j` to `j + 1`.
    fn advance(&self, mut product: ExactRational, j: u32) -> Result<ExactRational> {
        let jq = ExactRational::from_integer(j.into());
        product *= &self.rate;
        for u in &self.uppers {
            product *= u + &jq;
        }
        for l in &self.lowers {
            let f = l + &jq;
            if f.is_zero() {
                return Err(Error::PoleEncountered(format!(
                    "lower parameter {l} vanishes at j = {}",
                    j + 1
                )));
            }
            product /= f;
        }
        Ok(product)
    }

    /// Parameters differing by an integer, as `(upper, lower)` pairs.
    pub fn integer_pairs(&self) -> Vec<(ExactRational, ExactRational)> {
        let mut out = Vec::new();
        for u in &self.uppers {
            for l in &self.lowers {
                if (u - l).is_integer() {
                    out.push((u.clone(), l.clone()));
                }
            }
        }
        out
    }
}

pub struct ChuTerms<'a> {
    series: &'a ChuSeries,
    product: ExactRational,
    j: u32,
    failed: bool,
}

impl Iterator for ChuTerms<'_> {
    type Item = Result<ExactRational>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.failed {
            return None;
        }
        let j = self.j;
        let value = self
            .series
            .summand
            .eval_univariate(Var::J, &ExactRational::from_integer(j.into()))
            .map_err(|_| {
                Error::PoleEncountered(format!("summand {} at j = {j}", self.series.summand))
            })
            .map(|s| s * &self.product);
        let advanced = value
            .and_then(|v| Ok((v, self.series.advance(std::mem::take(&mut self.product), j)?)));
        match advanced {
            Ok((v, p)) => {
                self.product = p;
                self.j += 1;
                Some(Ok(v))
            }
            Err(e) => {
                self.failed = true;
                Some(Err(e))
            }
        }
    }
}

fn fmt_params(v: &[ExactRational]) -> String {
    if v.is_empty() {
        return "-".into();
    }
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", ")
}

impl fmt::Display for ChuSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(t) = &self.target {
            write!(f, "{t} = ")?;
        }
        write!(
            f,
            "sum_{{j>={}}} ({})^j [{}; {}]_j ({})",
            self.start_index,
            self.rate,
            fmt_params(&self.uppers),
            fmt_params(&self.lowers),
            self.summand
        )
    }
}

/// `sum_{start <= j < start + J}` of the displayed terms.
pub fn evaluate_chu_series(s: &ChuSeries, j_terms: usize) -> Result<ExactRational> {
    if j_terms == 0 {
        return Ok(ExactRational::zero());
    }
    sum_first(s.terms()?, j_terms)
}

/// Rewrites the accelerated series of an instance as
/// `rate^j (alpha)_j / (beta)_j * summand(j)`.
///
/// `g2(n0 + r j)` is split into rational linear factors in `j`; each
/// `j + alpha` in the product over `i < j` becomes `(alpha)_j`. Upper and
/// lower parameters an integer apart are traded for rational factors of
/// the summand, and parameters are sorted.
pub fn emit_chu_style(inst: &SeriesInstance) -> Result<ChuSeries> {
    let (g1, g2) = inst.bound_recursion()?;
    let r = ExactRational::from_integer(inst.family.recursion.r.into());
    let along = RatFunc::from_poly(
        &MultiPoly::var(Var::J).scale(&r) + &MultiPoly::constant(inst.assignment.n.clone()),
    );
    let g2j = g2.subs(Var::N, &along)?;
    if g2j.is_zero() {
        return Err(Error::NonLinearFactor("g2 vanishes identically".into()));
    }
    let split = |p: &MultiPoly| -> Result<(ExactRational, Vec<ExactRational>)> {
        let fz = factor_linear_rational(p, Var::J);
        if !fz.is_complete() {
            return Err(Error::NonLinearFactor(fz.remainder.to_string()));
        }
        let mut params = Vec::new();
        for (root, m) in &fz.roots {
            for _ in 0..*m {
                params.push(-root);
            }
        }
        Ok((fz.constant, params))
    };
    let (cn, mut uppers) = split(g2j.num())?;
    let (cd, mut lowers) = split(g2j.den())?;
    let rate = cn / cd;
    let mut summand = g1.subs(Var::N, &along)?;

    uppers.sort();
    lowers.sort();
    let j = MultiPoly::var(Var::J);
    let mut kept_uppers = Vec::new();
    for u in uppers {
        let pos = lowers
            .iter()
            .position(|l| (&u - l).is_integer() && cancellable(&u, l));
        let Some(pos) = pos else {
            kept_uppers.push(u);
            continue;
        };
        let l = lowers.remove(pos);
        let d = (&u - &l).to_integer().to_i64().expect("small parameter gap");
        let mut num = MultiPoly::one();
        let mut den = MultiPoly::one();
        if d > 0 {
            // (l + d)_j / (l)_j = prod_{t<d} (j + l + t) / (l + t)
            for t in 0..d {
                let c = &l + ExactRational::from_integer(t.into());
                num = &num * &(&j + &MultiPoly::constant(c.clone()));
                den = &den * &MultiPoly::constant(c);
            }
        } else {
            // (u)_j / (u + e)_j = prod_{t<e} (u + t) / (j + u + t)
            for t in 0..-d {
                let c = &u + ExactRational::from_integer(t.into());
                num = &num * &MultiPoly::constant(c.clone());
                den = &den * &(&j + &MultiPoly::constant(c));
            }
        }
        summand = &summand * &RatFunc::normalize(num, den)?;
    }
    let mut uppers = kept_uppers;
    uppers.sort();
    lowers.sort();

    let mut series = ChuSeries {
        rate,
        uppers,
        lowers,
        summand,
        start_index: 0,
        target: None,
    };
    if inst.start_index > 0 {
        series = reindexed(&series, inst.start_index)?;
    }
    Ok(series)
}

/// Whether trading the pair for rational factors avoids dividing by zero.
fn cancellable(u: &ExactRational, l: &ExactRational) -> bool {
    let bad = |x: &ExactRational| x.is_integer() && !x.is_positive();
    !bad(u) && !bad(l)
}

/// The same sequence of terms displayed from `j = s`: `j -> j - s`.
///
/// `(x)_{j-s} = (x - s)_j / (x - s)_s`, so parameters move down by `s` and
/// the constants are folded into the summand.
pub fn reindexed(series: &ChuSeries, s: u32) -> Result<ChuSeries> {
    let sq = ExactRational::from_integer(s.into());
    let shift = |v: &[ExactRational]| -> Vec<ExactRational> { v.iter().map(|x| x - &sq).collect() };
    let uppers = shift(&series.uppers);
    let lowers = shift(&series.lowers);
    let mut c = ExactRational::one();
    for l in &lowers {
        c *= pochhammer(l, s);
    }
    if c.is_zero() {
        return Err(Error::PoleEncountered(format!(
            "reindexing by {s} moves a lower parameter onto a pole"
        )));
    }
    let mut d = series.rate.pow(s as i32);
    for u in &uppers {
        d *= pochhammer(u, s);
    }
    if d.is_zero() {
        return Err(Error::PoleEncountered(format!("reindexing by {s} divides by zero")));
    }
    let summand = &series.summand.shift(Var::J, &-sq) * &RatFunc::constant(c / d);
    Ok(ChuSeries {
        rate: series.rate.clone(),
        uppers,
        lowers,
        summand,
        start_index: series.start_index + s,
        target: series.target.clone(),
    })
}

// ---------------------------------------------------------------------------
// Term counts

/// Terms needed for `digits` decimal digits at geometric rate `rate`:
/// `ceil((digits + 5) / -log10 |rate|) + 5`.
pub fn term_count(rate: &ExactRational, digits: u32) -> usize {
    let x = rate.abs().to_f64().unwrap_or(0.0);
    if !(x > 0.0 && x < 1.0) {
        return (digits as usize + 5) * 4 + 5;
    }
    let per_term = -x.log10();
    ((digits as f64 + 5.0) / per_term).ceil() as usize + 5
}

/// Sums `iter` for [`term_count`] terms, then keeps going until the last
/// term is below `10^(-digits-5)` relative to the sum. Returns the sum and
/// the number of terms used.
pub fn sum_to_digits(
    iter: impl Iterator<Item = Result<ExactRational>>,
    rate: &ExactRational,
    digits: u32,
    max_terms: usize,
) -> Result<(ExactRational, usize)> {
    let mut acc = ExactRational::zero();
    let mut used = 0;
    let floor = crate::exact::rational::pow10_rational(-(digits as i64) - 5);
    let base = term_count(rate, digits).min(max_terms);
    for t in iter {
        let t = t?;
        acc += &t;
        used += 1;
        if used >= max_terms {
            break;
        }
        if used >= base && t.abs() <= &floor * acc.abs() {
            break;
        }
    }
    Ok((acc, used))
}

/// The `f64` nearest an exact rational (0 on underflow).
pub fn approx(q: &ExactRational) -> f64 {
    q.to_f64().unwrap_or(0.0)
}

// ---------------------------------------------------------------------------
// Probes

/// Result of [`check_tail_vanishing`].
#[derive(Debug, Clone, PartialEq)]
pub struct TailReport {
    /// `|prod_{i<=m} g2(n0 + r i) * f(n0 + r (m + 1))|` for `m = 0..=M`,
    /// with `f` replaced by a naive partial sum.
    pub values: Vec<f64>,
    /// Strictly decreasing over the final half.
    pub decreasing: bool,
}

/// Probes the remainder `prod_{i<=m} g2(n0 + r i) f(n0 + r (m + 1))`
/// which must vanish for the accelerated series to sum to `f(n0)`. Each
/// `f` is approximated by `4 M + 40` naive terms. Empirical, not a proof.
pub fn check_tail_vanishing(inst: &SeriesInstance, m_max: usize) -> Result<TailReport> {
    let (_, g2) = inst.bound_recursion()?;
    let r = ExactRational::from_integer(inst.family.recursion.r.into());
    let naive_terms = 4 * m_max + 40;
    let mut product = ExactRational::one();
    let mut n = inst.assignment.n.clone();
    let mut values = Vec::with_capacity(m_max + 1);
    for m in 0..=m_max {
        product *= g2
            .eval_univariate(Var::N, &n)
            .map_err(|_| Error::PoleEncountered(format!("g2 at shift index {m} (n = {n})")))?;
        n += &r;
        let shifted = SeriesInstance::new(inst.family, Assignment::new(
            inst.assignment.a.clone(),
            inst.assignment.b.clone(),
            n.clone(),
        ));
        let f = naive_partial_sum(&shifted, naive_terms)?;
        values.push(approx(&(&product * f).abs()));
    }
    let half = values.len() / 2;
    let decreasing = values[half..].windows(2).all(|w| w[1] < w[0]);
    Ok(TailReport { values, decreasing })
}

/// A certified bound on `sum_{k >= K} |F(n0, k)|`, or `None` when the
/// tests below cannot establish one.
///
/// With `rho(k) = P(k) / Q(k)` the exact term ratio at the assignment:
/// - `|rho| -> L < 1`: a geometric bound `|F_K| / (1 - q)` once
///   `|rho(k)| <= q` is shown for all `k >= K`;
/// - `rho -> -1`: terms alternate, and `|F_K|` bounds the tail once
///   `|rho(k)| <= 1` for all `k >= K`;
/// - `rho -> 1` with `rho(k) = 1 - sigma/k + ...`, `sigma > 1`: the
///   Raabe-type bound `F_K (1 + K/(s - 1))` once
///   `rho(k) <= k / (k + s)` for all `k >= K`, `1 < s < sigma`.
///
/// "For all `k >= K`" is shown by substituting `k = K + x` and checking
/// that every coefficient in `x` is nonnegative.
pub fn naive_tail_bound(inst: &SeriesInstance, k_terms: u64) -> Result<Option<ExactRational>> {
    let rho = inst
        .assignment
        .bind(&crate::hyperterm::shift_ratio(&inst.family.term, crate::hyperterm::Shift::K))?;
    let p = rho.num().clone();
    let q = rho.den().clone();
    let kq = ExactRational::from_integer(k_terms.into());
    let at = |m: &MultiPoly| m.shift(Var::K, &kq);
    let (pk, qk) = (at(&p), at(&q));
    let f_k = crate::hyperterm::term_value(&inst.family.term, &inst.assignment, k_terms)?;
    if f_k.is_zero() && pk.is_zero() {
        return Ok(Some(ExactRational::zero()));
    }
    let dp = p.degree_in(Var::K);
    let dq = q.degree_in(Var::K);
    if dp > dq {
        return Ok(None);
    }
    let lim = if dp < dq {
        ExactRational::zero()
    } else {
        p.lc_in(Var::K).constant_value().unwrap() / q.lc_in(Var::K).constant_value().unwrap()
    };
    let sq = |m: &MultiPoly| m * m;
    if lim.abs() < ExactRational::one() {
        // try q_bound from loose to... first one that certifies
        let one = ExactRational::one();
        let mut gap = (&one - lim.abs()) / ExactRational::from_integer(2.into());
        for _ in 0..12 {
            let bound = &one - &gap;
            let poly = &sq(&qk).scale(&(&bound * &bound)) - &sq(&pk);
            if nonnegative_in_k(&poly) {
                return Ok(Some(f_k.abs() / gap));
            }
            gap /= ExactRational::from_integer(2.into());
        }
        return Ok(None);
    }
    if lim == -ExactRational::one() {
        let poly = &sq(&qk) - &sq(&pk);
        return Ok(nonnegative_in_k(&poly).then(|| f_k.abs()));
    }
    if lim.is_one() {
        // sigma from rho = 1 - sigma/k + O(1/k^2)
        let pc = p.univariate_coeffs(Var::K);
        let qc = q.univariate_coeffs(Var::K);
        let (Some(pc), Some(qc)) = (pc, qc) else { return Ok(None) };
        let d = pc.len() - 1;
        let sigma = &qc[d - 1] / &qc[d] - &pc[d - 1] / &pc[d];
        let one = ExactRational::one();
        if sigma <= one {
            return Ok(None);
        }
        let k = MultiPoly::var(Var::K);
        // positivity of P and Q, and Q k - P (k + s) >= 0 on k >= K
        if !nonnegative_in_k(&pk) && !nonnegative_in_k(&-pk.clone()) {
            return Ok(None);
        }
        let (pk, qk) = if pk.leading_coeff().is_negative() { (-pk, -qk) } else { (pk, qk) };
        if !nonnegative_in_k(&pk) || !nonnegative_in_k(&qk) {
            return Ok(None);
        }
        let mut s = (&one + &sigma) / ExactRational::from_integer(2.into());
        let kk = at(&k);
        for _ in 0..12 {
            let lhs = &(&qk * &kk) - &(&pk * &(&kk + &MultiPoly::constant(s.clone())));
            if nonnegative_in_k(&lhs) && kq.is_positive() {
                let bound = f_k.abs() * (&one + &kq / (&s - &one));
                return Ok(Some(bound));
            }
            s = (&s + &one) / ExactRational::from_integer(2.into());
        }
        return Ok(None);
    }
    Ok(None)
}

/// Every coefficient of the polynomial in `k` is nonnegative.
fn nonnegative_in_k(p: &MultiPoly) -> bool {
    p.terms().all(|(_, c)| !c.is_negative())
}

/// Estimates `lim t_{j+1}/t_j` from the accelerated terms at
/// `j = J/8, J/4, J/2, J` by cubic extrapolation in `1/j`, plus the raw
/// ratio at `j = J`.
pub fn ratio_limit(inst: &SeriesInstance, j_max: usize) -> Result<(f64, f64)> {
    let terms: Vec<ExactRational> = inst
        .accelerated_terms()?
        .take(j_max + 2)
        .collect::<Result<_>>()?;
    let ratio = |j: usize| -> Option<ExactRational> {
        (!terms[j].is_zero()).then(|| &terms[j + 1] / &terms[j])
    };
    let raw = ratio(j_max).map(|q| approx(&q)).unwrap_or(f64::NAN);
    let nodes: Vec<usize> = [8, 4, 2, 1].iter().map(|d| j_max / d).filter(|j| *j > 0).collect();
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for &j in &nodes {
        let Some(y) = ratio(j) else { return Ok((raw, raw)) };
        xs.push(ExactRational::new(1.into(), (j as i64).into()));
        ys.push(y);
    }
    // Lagrange value at x = 0
    let mut limit = ExactRational::zero();
    for i in 0..xs.len() {
        let mut w = ys[i].clone();
        for m in 0..xs.len() {
            if m != i {
                w *= &xs[m] / (&xs[m] - &xs[i]);
            }
        }
        limit += w;
    }
    Ok((approx(&limit), raw))
}
