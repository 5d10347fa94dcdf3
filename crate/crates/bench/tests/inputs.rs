use valdef_bench::{alternating, mixed, towers};
use valdef_core::decide::{analyze, DEFAULT_PRIMES};

#[test]
fn bench_inputs_are_well_formed() {
    assert_eq!(alternating(5).rank(), Some(5));
    assert!(!mixed(6).is_finite());
    for (name, t) in towers() {
        assert_eq!(t.describe(), name);
        assert!(analyze(&t, &DEFAULT_PRIMES).overall().is_some(), "{name}");
    }
}
