mod common;

use common::{brute_force_mismatch, equiv_case, word};
use proptest::prelude::*;
use smealy::automata::Equivalence;
use smealy::bench::{make_lower_bound, make_worked_example};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn symbolic_agrees_with_exhaustive_search(seed in any::<u64>()) {
        equiv_case(seed);
    }
}

#[test]
fn lower_bound_family_members_differ() {
    let a = make_lower_bound(2, 2).unwrap();
    let b = make_lower_bound(2, 3).unwrap();
    let Equivalence::Mismatch(w) = a.symbolic_equiv(&b).unwrap() else {
        panic!("expected a mismatch")
    };
    assert_ne!(a.run(&w).unwrap(), b.run(&w).unwrap());
    let chars: Vec<_> = word(&[0, 10, 20, 30]);
    assert!(brute_force_mismatch(&a, &b, &chars, 6).is_some());
}

#[test]
fn worked_example_is_self_equivalent() {
    let m = make_worked_example();
    assert_eq!(m.symbolic_equiv(&m.clone()).unwrap(), Equivalence::Equal);
    assert!(brute_force_mismatch(&m, &m, &word(&[0, 10, 20]), 8).is_none());
}
