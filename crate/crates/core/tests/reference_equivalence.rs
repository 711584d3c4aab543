mod support;

use proptest::prelude::*;
use support::reference::{compare_on_random_network, reference_avalanche};

#[test]
fn thousand_small_networks_match_reference() {
    let mut events = 0;
    for seed in 0..1000 {
        events += compare_on_random_network(seed).unwrap_or_else(|e| panic!("{e}"));
    }
    assert!(events >= 1000);
}

#[test]
fn reference_reproduces_hand_traces() {
    // Chain: firm 2 supplies 1, firm 1 supplies 0.
    let chain = vec![vec![1], vec![2], vec![]];
    let out = reference_avalanche(&chain, &[0, 0, 0], 0);
    assert_eq!(out.total, 3);
    assert_eq!(out.levels, vec![0, 0, 0]);

    // Triangle: 1 supplies 0, 2 supplies 1, 0 supplies 2.
    let triangle = vec![vec![1], vec![2], vec![0]];
    let out = reference_avalanche(&triangle, &[0, 0, 0], 0);
    assert_eq!(out.total, 3);
    assert_eq!(out.involved.len(), 3);
}

proptest! {
    #[test]
    fn arbitrary_seeds_match_reference(seed in any::<u64>()) {
        prop_assert!(compare_on_random_network(seed).is_ok(), "{:?}", compare_on_random_network(seed));
    }
}
