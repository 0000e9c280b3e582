use hyperaccel::accelerate::{Atom, ConstantExpr};
use hyperaccel::catalog::{
    builtin_catalog, check_display, load_catalog, serialize_catalog, validate_entry, Catalog, HEADER,
};
use hyperaccel::exact::{parse_ratfunc, ratio};
use hyperaccel::Error;

const TABLE_RATES: [(&str, (i64, i64)); 9] = [
    ("nn", (1, 4)),
    ("n2n", (4, 27)),
    ("n3n", (27, 256)),
    ("2n3n", (108, 3125)),
    ("nan", (1, 4)),
    ("na2n", (4, 27)),
    ("2nan", (4, 27)),
    ("alt", (-1, 4)),
    ("cubed", (-1, 27)),
];

fn cat() -> &'static Catalog {
    builtin_catalog()
}

#[test]
fn builtin_shape() {
    let c = cat();
    for (id, (p, q)) in TABLE_RATES {
        let f = c.family(id).unwrap_or_else(|| panic!("family {id}"));
        assert_eq!(f.rate, ratio(p, q), "{id}");
    }
    // the nine rate families plus the 1/(k + n) variant of nn
    assert_eq!(c.families.len(), 10);
    assert!(c.entries.len() >= 38);
    let numeric = c.entries.iter().filter(|e| e.numeric_only).count();
    assert_eq!(numeric, 11);
    assert!(c.entries.iter().all(|e| e.numeric_only == e.family.is_none()));
}

#[test]
fn known_entries() {
    let e = cat().entry("n2n-768-over-pi").unwrap();
    assert_eq!(e.target, ConstantExpr::term(ratio(768, 1), vec![(Atom::Pi, -1)]));
    let d = e.displayed.as_ref().unwrap();
    assert_eq!(d.rate, ratio(4, 27));
    assert_eq!(d.summand, parse_ratfunc("368 j^3 + 952 j^2 + 810 j + 225").unwrap());

    let e = cat().entry("cubed-567-zeta3").unwrap();
    assert_eq!(e.target, ConstantExpr::term(ratio(567, 1), vec![(Atom::Zeta3, 1)]));
    let d = e.displayed.as_ref().unwrap();
    assert_eq!(d.rate, ratio(-1, 27));
    assert_eq!(d.summand.num().total_degree(), 5);

    let e = cat().entry("chu-60pi-minus-149").unwrap();
    assert_eq!(e.target.to_string(), "60*pi - 149");
    assert_eq!(e.displayed.as_ref().unwrap().start_index, 1);
}

#[test]
fn round_trip() {
    let text = serialize_catalog(cat());
    let back = load_catalog(&text).unwrap();
    assert_eq!(&back, cat());
    assert_eq!(serialize_catalog(&back), text);
}

fn entry_doc(body: &str) -> String {
    format!("{HEADER}\n\n[entry probe]\ntarget = pi\n{body}\nflags = numeric-only\n")
}

#[test]
fn zero_p2_rejected() {
    let doc = format!(
        "{HEADER}\n[family z]\nupper = a\nlower = n\nr = 1\nR = 1\np1 = 1\np2 = 0\n"
    );
    match load_catalog(&doc) {
        Err(Error::ValidationError { id, message }) => {
            assert_eq!(id, "z");
            assert!(message.contains("p2"), "{message}");
        }
        other => panic!("{other:?}"),
    }
}

#[test]
fn lower_pole_rejected() {
    let doc = entry_doc("rate = 1/4\nupper = 1/2\nlower = -3\nsummand = 1");
    match load_catalog(&doc) {
        Err(Error::ValidationError { id, message }) => {
            assert_eq!(id, "probe");
            assert!(message.contains("k=3"), "{message}");
        }
        other => panic!("{other:?}"),
    }
}

#[test]
fn family_lower_pole_rejected() {
    let c = cat();
    let mut e = c.entry("ramanujan-4-over-pi").unwrap().clone();
    e.assignment.as_mut().unwrap().n = ratio(-2, 1);
    match c.check_entry(&e) {
        Err(Error::ValidationError { message, .. }) => assert!(message.contains("k=2"), "{message}"),
        other => panic!("{other:?}"),
    }
}

#[test]
fn parse_errors_carry_positions() {
    let doc = entry_doc("rate = 1/4\nupper = 1/2, x/3\nlower = 1\nsummand = 1");
    match load_catalog(&doc) {
        Err(Error::ParseError { line, column, .. }) => assert_eq!((line, column), (6, 14)),
        other => panic!("{other:?}"),
    }
    let doc = entry_doc("rate = 1/4\nupper = 1/2\nlower = 1\nsummand = 2 j +\n    * 3");
    match load_catalog(&doc) {
        Err(Error::ParseError { line, .. }) => assert_eq!(line, 9),
        other => panic!("{other:?}"),
    }
    assert!(matches!(
        load_catalog("hyperaccel-catalog v2\n"),
        Err(Error::ParseError { line: 1, .. })
    ));
    let doc = entry_doc("colour = red");
    assert!(matches!(load_catalog(&doc), Err(Error::ParseError { line: 5, .. })));
}

#[test]
fn unknown_family_rejected() {
    let doc = format!("{HEADER}\n[entry e]\nfamily = nope\na = 1\nb = 1\nn = 1\ntarget = pi\n");
    assert!(matches!(load_catalog(&doc), Err(Error::ValidationError { .. })));
}

#[test]
fn validation_budgets() {
    let c = cat();
    let r = validate_entry(c, c.entry("ramanujan-4-over-pi").unwrap(), 30).unwrap();
    assert!(r.pass && r.digits >= 30, "{r:?}");
    assert!(r.terms <= 65, "{}", r.terms);

    let r = validate_entry(c, c.entry("n3n-33554432-sqrt2-over-pi").unwrap(), 30).unwrap();
    assert!(r.pass, "{r:?}");
    assert!(r.terms <= 45, "{}", r.terms);
}

#[test]
fn wrong_constant_detected() {
    let c = cat();
    let mut e = c.entry("n2n-768-over-pi").unwrap().clone();
    e.target = ConstantExpr::term(ratio(769, 1), vec![(Atom::Pi, -1)]);
    let r = validate_entry(c, &e, 30).unwrap();
    assert!(!r.pass);
    assert!(r.digits <= 4, "{}", r.digits);
}

#[test]
fn family_backed_without_display_uses_recursion() {
    let c = cat();
    let mut e = c.entry("guillera-pi-squared").unwrap().clone();
    // the emitted series sums to f(n0) = (1/2) * display
    e.displayed = None;
    e.target = e.target.scaled(&ratio(1, 2));
    let r = validate_entry(c, &e, 30).unwrap();
    assert!(r.pass, "{r:?}");
}

#[test]
fn displays_agree_with_emission() {
    let c = cat();
    for e in c.entries.iter().filter(|e| e.family.is_some()) {
        let m = check_display(c, e, 21)
            .unwrap_or_else(|err| panic!("{}: {err}", e.id))
            .expect("family-backed")
            .unwrap_or_else(|| panic!("{}: display does not match emission", e.id));
        assert_eq!(m.shift != 0, e.display_shifted, "{}: shift {}", e.id, m.shift);
    }
}

#[test]
fn family_value_reference_matches_accelerated_sum() {
    use hyperaccel::accelerate::sum_to_digits;
    use hyperaccel::catalog::family_value_reference;
    use hyperaccel::refconst::{digits_agree, FixedDecimal};
    let c = cat();
    for id in ["ramanujan-4-over-pi", "guillera-pi-squared", "n2n-768-over-pi", "cubed-567-zeta3"] {
        let e = c.entry(id).unwrap();
        let f = family_value_reference(c, e, 50).unwrap().unwrap();
        let inst = c.instance(e).unwrap();
        let (v, _) = sum_to_digits(inst.accelerated_terms().unwrap(), &inst.family.rate, 40, 2000).unwrap();
        let d = digits_agree(&v, &FixedDecimal::from_rational(&f, 50)).unwrap();
        assert!(d >= 38, "{id}: {d}");
    }
    assert!(family_value_reference(c, c.entry("zeta3-binomial-3n2n").unwrap(), 40)
        .unwrap()
        .is_none());
}

#[test]
fn fixed_term_validation() {
    use hyperaccel::catalog::validate_entry_with_terms;
    let c = cat();
    let e = c.entry("ramanujan-4-over-pi").unwrap();
    let few = validate_entry_with_terms(c, e, 30, Some(10)).unwrap();
    assert_eq!(few.terms, 10);
    assert!(!few.pass && few.digits >= 4 && few.digits < 30, "{few:?}");
}
