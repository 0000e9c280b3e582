use hyperaccel_bench::{accelerated_to_digits, instance, SAMPLE_ENTRIES};

#[test]
fn sample_entries_resolve_and_converge() {
    for id in SAMPLE_ENTRIES {
        let inst = instance(id);
        let (_, terms) = accelerated_to_digits(id, 30);
        assert!(terms > 10 && terms < 80, "{id}: {terms}");
        assert!(!inst.family.rate.numer().to_string().is_empty());
    }
}
