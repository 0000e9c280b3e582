//! Runs certificate discovery for the families stored without a stated
//! certificate and prints them as catalog sections.
//!
//! cargo run --release -p hyperaccel --example discover

use std::time::Instant;

use hyperaccel::catalog::{serialize_catalog, Catalog, TransformFamily};
use hyperaccel::certify::find_certificate;
use hyperaccel::exact::{parse_poly, parse_ratfunc, ratio};
use hyperaccel::hyperterm::{HyperTerm, PochFactor};

fn pf(base: &str, e: i32) -> PochFactor {
    PochFactor::new(parse_poly(base).unwrap(), e).unwrap()
}

fn main() {
    let specs: Vec<(&str, &str, HyperTerm, u32, u32)> = vec![
        ("nnk", "(a)_k (b)_k / ((k + n) (n)_k^2)",
            HyperTerm::new(vec![pf("a", 1), pf("b", 1), pf("n", -2)], ratio(1, 1), parse_ratfunc("1/(k + n)").unwrap()), 4, 1),
        ("n3n", "(a)_k (b)_k / ((n)_k (3n)_k)",
            HyperTerm::pochhammer_quotient(vec![pf("a", 1), pf("b", 1), pf("n", -1), pf("3 n", -1)], ratio(1, 1)), 8, 1),
        ("2n3n", "(a)_k (b)_k / ((2n)_k (3n)_k)",
            HyperTerm::pochhammer_quotient(vec![pf("a", 1), pf("b", 1), pf("2 n", -1), pf("3 n", -1)], ratio(1, 1)), 8, 1),
        ("2nan", "(a)_k (b)_k / ((2n)_k (a + n)_k)",
            HyperTerm::pochhammer_quotient(vec![pf("a", 1), pf("b", 1), pf("2 n", -1), pf("a + n", -1)], ratio(1, 1)), 8, 1),
        ("cubed", "(a)_k^3 / (n)_k^3",
            HyperTerm::pochhammer_quotient(vec![pf("a", 3), pf("n", -3)], ratio(1, 1)), 8, 2),
    ];
    let mut families = Vec::new();
    for (id, section, term, bound, r) in specs {
        let t = Instant::now();
        let c = find_certificate(&term, r, bound).unwrap_or_else(|| panic!("{id}: no certificate"));
        eprintln!("{id}: {:.2?}", t.elapsed());
        families.push(TransformFamily::new(id, term, c, section, None).unwrap());
    }
    let cat = Catalog { families, entries: Vec::new() };
    print!("{}", serialize_catalog(&cat));
}
