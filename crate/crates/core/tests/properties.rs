use hyperaccel::accelerate::{
    accelerated_partial_sum, emit_chu_style, evaluate_chu_series, reindexed, Atom, ChuSeries,
    ConstantExpr, ConstantTerm, SeriesInstance,
};
use hyperaccel::catalog::builtin_catalog;
use hyperaccel::exact::{parse_poly, parse_ratfunc, ratio, ExactRational, MultiPoly, RatFunc, Var};
use hyperaccel::hyperterm::{pochhammer, Assignment};
use hyperaccel::refconst::{digits_agree, reference_value, FixedDecimal};
use num_bigint::BigInt;
use num_traits::Zero;
use proptest::prelude::*;

fn small_q() -> impl Strategy<Value = ExactRational> {
    (-30i64..=30, 1i64..=12).prop_map(|(p, q)| ratio(p, q))
}

fn pos_q() -> impl Strategy<Value = ExactRational> {
    (1i64..=40, 1i64..=12).prop_map(|(p, q)| ratio(p, q))
}

/// Polynomials in n, k, a of total degree <= 3.
fn poly() -> impl Strategy<Value = MultiPoly> {
    prop::collection::vec((small_q(), 0u32..=2, 0u32..=2, 0u32..=1), 0..5).prop_map(|ts| {
        let mut p = MultiPoly::zero();
        for (c, en, ek, ea) in ts {
            let mut m = MultiPoly::constant(c);
            for (v, e) in [(Var::N, en), (Var::K, ek), (Var::A, ea)] {
                for _ in 0..e {
                    m = &m * &MultiPoly::var(v);
                }
            }
            p = &p + &m;
        }
        p
    })
}

fn nonzero_poly() -> impl Strategy<Value = MultiPoly> {
    poly().prop_filter("nonzero", |p| !p.is_zero())
}

fn constant_term() -> impl Strategy<Value = ConstantTerm> {
    let atoms = prop::collection::vec((0usize..Atom::ALL.len(), -2i32..=2), 0..3)
        .prop_map(|v| v.into_iter().map(|(i, e)| (Atom::ALL[i], e)).collect::<Vec<_>>());
    (small_q().prop_filter("nonzero", |q| !q.is_zero()), atoms)
        .prop_map(|(c, a)| ConstantTerm::new(c, a))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn poly_display_parses_back(p in poly()) {
        prop_assert_eq!(parse_poly(&p.to_string()).unwrap(), p);
    }

    #[test]
    fn ratfunc_display_parses_back(n in poly(), d in nonzero_poly()) {
        let f = RatFunc::normalize(n, d).unwrap();
        prop_assert_eq!(parse_ratfunc(&f.to_string()).unwrap(), f);
    }

    #[test]
    fn normalize_cancels_common_factors(n in poly(), d in nonzero_poly(), c in nonzero_poly()) {
        let f = RatFunc::normalize(n.clone(), d.clone()).unwrap();
        let g = RatFunc::normalize(&n * &c, &d * &c).unwrap();
        prop_assert_eq!(&g, &f);
        // idempotent
        let (gn, gd) = g.into_parts();
        prop_assert_eq!(RatFunc::normalize(gn, gd).unwrap(), f);
    }

    #[test]
    fn ratfunc_arithmetic_agrees_pointwise(
        n1 in poly(), d1 in nonzero_poly(), n2 in poly(), d2 in nonzero_poly(),
        x in small_q(), y in small_q(), z in small_q(),
    ) {
        let f = RatFunc::normalize(n1, d1).unwrap();
        let g = RatFunc::normalize(n2, d2).unwrap();
        let mut pt: [Option<ExactRational>; 5] = Default::default();
        pt[Var::N.index()] = Some(x);
        pt[Var::K.index()] = Some(y);
        pt[Var::A.index()] = Some(z);
        let (Ok(fv), Ok(gv)) = (f.eval(&pt), g.eval(&pt)) else { return Ok(()) };
        if let Ok(s) = (&f + &g).eval(&pt) {
            prop_assert_eq!(s, &fv + &gv);
        }
        if let Ok(m) = (&f * &g).eval(&pt) {
            prop_assert_eq!(m, &fv * &gv);
        }
    }

    #[test]
    fn constant_expr_display_parses_back(ts in prop::collection::vec(constant_term(), 1..4)) {
        let c = ConstantExpr { terms: ts };
        let back = ConstantExpr::parse(&c.to_string()).unwrap();
        prop_assert_eq!(back.to_string(), c.to_string());
    }

    #[test]
    fn pochhammer_splits(x in small_q(), m in 0u32..6, k in 0u32..6) {
        let lhs = pochhammer(&x, m + k);
        let rhs = pochhammer(&x, m) * pochhammer(&(&x + ExactRational::from_integer(m.into())), k);
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn reindexing_keeps_the_terms(
        rate in small_q().prop_filter("nonzero", |q| !q.is_zero()),
        uppers in prop::collection::vec(pos_q(), 1..3),
        lowers in prop::collection::vec(pos_q(), 1..3),
        c0 in small_q(), c1 in small_q(),
        s in 0u32..4,
    ) {
        let summand = RatFunc::from_poly(
            &MultiPoly::constant(c0) + &(&MultiPoly::constant(c1) * &MultiPoly::var(Var::J)),
        );
        let series = ChuSeries { rate, uppers, lowers, summand, start_index: 0, target: None };
        // a lower parameter pushed onto a pole is rejected, not an error here
        let Ok(moved) = reindexed(&series, s) else { return Ok(()) };
        prop_assert_eq!(moved.start_index, s);
        let a: Vec<_> = series.terms().unwrap().take(8).map(|t| t.unwrap()).collect();
        let b: Vec<_> = moved.terms().unwrap().take(8).map(|t| t.unwrap()).collect();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn reference_truncation_is_stable(c in 1i64..2000, d in 5u32..40, extra in 1u32..10) {
        let e = ConstantExpr::term(ratio(c, 7), vec![(Atom::Pi, 1), (Atom::Sqrt2, -1)]);
        let short = reference_value(&e, d).unwrap();
        let long = reference_value(&e, d + extra).unwrap();
        let cut = long.mantissa.clone() / BigInt::from(10u32).pow(extra);
        prop_assert_eq!(short.mantissa, cut);
        // a value agrees with its own truncation to about as many digits as it has
        let q = long.to_rational();
        let dig = digits_agree(&q, &FixedDecimal::from_rational(&q, d)).unwrap();
        prop_assert!(dig + 1 >= d, "{} < {}", dig, d);
    }
}

proptest! {
    // emission is the expensive part; keep the case count small
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn emitted_series_sums_like_the_recursion(
        a in 1i64..=6, b in 1i64..=6, n in 2i64..=8, den in prop::sample::select(vec![1i64, 2, 3, 4, 6]),
    ) {
        let fam = builtin_catalog().family("nn").unwrap();
        let asg = Assignment::new(ratio(a, den), ratio(b, den), ratio(n, 2));
        let inst = SeriesInstance::new(fam, asg);
        // integer parameters can put g1 or g2 on a pole; those have no series
        let Ok(direct) = accelerated_partial_sum(&inst, 12) else { return Ok(()) };
        let emitted = emit_chu_style(&inst).unwrap();
        prop_assert_eq!(evaluate_chu_series(&emitted, 12).unwrap(), direct);
    }
}
