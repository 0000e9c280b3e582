use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Arbitrary-precision signed rational. Always kept in lowest terms with a
/// positive denominator (the canonical zero is `0/1`).
pub type ExactRational = BigRational;

/// Shorthand for an integer-valued rational.
pub fn int(v: i64) -> ExactRational {
    ExactRational::from_integer(BigInt::from(v))
}

/// Shorthand for `num/den`. Panics on a zero denominator.
pub fn ratio(num: i64, den: i64) -> ExactRational {
    ExactRational::new(BigInt::from(num), BigInt::from(den))
}

/// Parses `p`, `-p`, or `p/q`.
pub fn parse_rational(s: &str) -> Option<ExactRational> {
    let s = s.trim();
    let (num, den) = match s.split_once('/') {
        Some((p, q)) => (p.trim(), q.trim()),
        None => (s, "1"),
    };
    let num: BigInt = num.parse().ok()?;
    let den: BigInt = den.parse().ok()?;
    if den.is_zero() {
        return None;
    }
    Some(ExactRational::new(num, den))
}

/// `10^e` as a big integer.
pub fn pow10(e: u32) -> BigInt {
    num_traits::pow(BigInt::from(10u32), e as usize)
}

/// Renders `q` as a decimal string with `digits` places after the point,
/// rounded half away from zero.
pub fn to_decimal(q: &ExactRational, digits: u32) -> String {
    let scaled = q * ExactRational::from_integer(pow10(digits));
    let rounded = scaled.round().to_integer();
    format_scaled(&rounded, digits)
}

/// Formats `m * 10^-scale` as a plain decimal string.
pub fn format_scaled(m: &BigInt, scale: u32) -> String {
    let neg = m.sign() == Sign::Minus;
    let mut s = m.abs().to_string();
    let scale = scale as usize;
    if scale > 0 {
        if s.len() <= scale {
            s = "0".repeat(scale + 1 - s.len()) + &s;
        }
        s.insert(s.len() - scale, '.');
    }
    if neg {
        s.insert(0, '-');
    }
    s
}

/// Integer `floor(log10(|q|))` for nonzero `q`.
pub fn floor_log10(q: &ExactRational) -> i64 {
    assert!(!q.is_zero(), "floor_log10 of zero");
    let q = q.abs();
    let (num, den) = (q.numer().clone(), q.denom().clone());
    // Start from the digit-count estimate and correct by at most one.
    let mut e = num.to_string().len() as i64 - den.to_string().len() as i64;
    loop {
        let lower = pow10_rational(e);
        if q < lower {
            e -= 1;
            continue;
        }
        if q >= pow10_rational(e + 1) {
            e += 1;
            continue;
        }
        return e;
    }
}

/// `10^e` for any integer `e`.
pub fn pow10_rational(e: i64) -> ExactRational {
    if e >= 0 {
        ExactRational::from_integer(pow10(e as u32))
    } else {
        ExactRational::new(BigInt::one(), pow10((-e) as u32))
    }
}

/// Least common multiple of the denominators of `values`.
pub fn denominator_lcm<'a>(values: impl IntoIterator<Item = &'a ExactRational>) -> BigInt {
    values
        .into_iter()
        .fold(BigInt::one(), |acc, q| acc.lcm(q.denom()))
}

/// Greatest common divisor of the numerators of `values` (zero if all are zero).
pub fn numerator_gcd<'a>(values: impl IntoIterator<Item = &'a ExactRational>) -> BigInt {
    values
        .into_iter()
        .fold(BigInt::zero(), |acc, q| acc.gcd(q.numer()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_forms() {
        assert_eq!(parse_rational("3"), Some(int(3)));
        assert_eq!(parse_rational("-6/4"), Some(ratio(-3, 2)));
        assert_eq!(parse_rational(" 1 / 3 "), Some(ratio(1, 3)));
        assert_eq!(parse_rational("1/0"), None);
        assert_eq!(parse_rational("x"), None);
    }

    #[test]
    fn canonical_zero() {
        let z = ratio(0, 7);
        assert_eq!(z.numer(), &BigInt::zero());
        assert_eq!(z.denom(), &BigInt::one());
    }

    #[test]
    fn decimal_rendering() {
        assert_eq!(to_decimal(&ratio(22, 7), 6), "3.142857");
        assert_eq!(to_decimal(&ratio(-1, 8), 2), "-0.13");
        assert_eq!(to_decimal(&ratio(1, 200), 2), "0.01");
        assert_eq!(to_decimal(&int(5), 0), "5");
    }

    #[test]
    fn log10_floor() {
        assert_eq!(floor_log10(&int(1)), 0);
        assert_eq!(floor_log10(&int(999)), 2);
        assert_eq!(floor_log10(&int(1000)), 3);
        assert_eq!(floor_log10(&ratio(1, 1000)), -3);
        assert_eq!(floor_log10(&ratio(-22, 7)), 0);
        assert_eq!(floor_log10(&ratio(99, 1000)), -2);
    }
}
