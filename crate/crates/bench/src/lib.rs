//! Benchmarks for the series evaluators; see `benches/`.
//!
//! Shared fixtures live here so the bench targets stay short.

use hyperaccel::accelerate::{sum_to_digits, SeriesInstance};
use hyperaccel::catalog::{builtin_catalog, CatalogEntry};
use hyperaccel::ExactRational;

/// Entries with one family each from the slowest and fastest rates.
pub const SAMPLE_ENTRIES: [&str; 4] = [
    "ramanujan-4-over-pi",
    "n2n-768-over-pi",
    "2n3n-14175pi-over-8",
    "cubed-567-zeta3",
];

pub fn entry(id: &str) -> &'static CatalogEntry {
    builtin_catalog()
        .entry(id)
        .unwrap_or_else(|| panic!("no entry `{id}`"))
}

pub fn instance(id: &str) -> SeriesInstance<'static> {
    builtin_catalog().instance(entry(id)).expect("family-backed entry")
}

/// The accelerated series of `id` summed to `digits` digits.
pub fn accelerated_to_digits(id: &str, digits: u32) -> (ExactRational, usize) {
    let inst = instance(id);
    let rate = inst.family.rate.clone();
    sum_to_digits(inst.accelerated_terms().unwrap(), &rate, digits, 10_000).unwrap()
}
