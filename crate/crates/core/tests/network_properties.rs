use std::io::Cursor;

use avalanche_core::network::{
    assign_industries, generate_random_directed, generate_scale_free, read_edge_list,
    uniform_weights, write_edge_list, write_labels,
};
use avalanche_core::stats::hill_mle;
use avalanche_core::{Degree, FirmNetwork};
use proptest::prelude::*;

fn max_total_degree(net: &FirmNetwork) -> usize {
    net.firms()
        .map(|f| net.degree(f, Degree::Total))
        .max()
        .unwrap()
}

fn round_trip(net: &FirmNetwork) -> FirmNetwork {
    let mut edges = Vec::new();
    write_edge_list(net, &mut edges).unwrap();
    let mut labels = Vec::new();
    write_labels(net, &mut labels).unwrap();
    read_edge_list(
        Cursor::new(edges),
        "edges",
        Some((Cursor::new(labels), "labels".to_string())),
    )
    .unwrap()
}

fn assert_same(a: &FirmNetwork, b: &FirmNetwork) {
    assert_eq!(a.firm_count(), b.firm_count());
    assert_eq!(a.links().collect::<Vec<_>>(), b.links().collect::<Vec<_>>());
    for f in a.firms() {
        assert_eq!(a.label(f), b.label(f));
        assert_eq!(a.industry_code(f), b.industry_code(f));
    }
}

#[test]
fn scale_free_max_degree_grows_with_size() {
    let mean_max = |n: usize| {
        (0..10u64)
            .map(|seed| max_total_degree(&generate_scale_free(n, 3, seed).unwrap()) as f64)
            .sum::<f64>()
            / 10.0
    };
    let (small, medium, large) = (mean_max(1_000), mean_max(10_000), mean_max(100_000));
    assert!(small < medium && medium < large, "{small} {medium} {large}");
}

#[test]
fn scale_free_degree_tail_exponent_is_near_three() {
    let net = generate_scale_free(100_000, 5, 2024).unwrap();
    let degrees: Vec<f64> = net
        .firms()
        .map(|f| net.degree(f, Degree::Total) as f64)
        .collect();
    // The continuous estimator is biased on small integer degrees; well above
    // m the discreteness correction is negligible.
    let alpha = hill_mle(&degrees, 30.0).unwrap();
    assert!((2.5..=3.5).contains(&alpha), "alpha {alpha}");
}

#[test]
fn adjacency_is_consistent_in_both_directions() {
    let net = generate_scale_free(2_000, 4, 3).unwrap();
    for f in net.firms() {
        assert_eq!(net.supplier_count(f), net.suppliers_of(f).len());
        for &g in net.suppliers_of(f) {
            assert!(net.clients_of(g).contains(&f));
        }
        for &c in net.clients_of(f) {
            assert!(net.suppliers_of(c).contains(&f));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn generated_networks_survive_round_trip(n in 2usize..300, p in 0.0f64..0.2, seed in any::<u64>()) {
        let net = generate_random_directed(n, p, seed).unwrap();
        let net = assign_industries(net, &uniform_weights(5), seed ^ 1).unwrap();
        assert_same(&net, &round_trip(&net));
    }

    #[test]
    fn scale_free_networks_survive_round_trip(n in 5usize..300, seed in any::<u64>()) {
        let net = generate_scale_free(n, 3, seed).unwrap();
        assert_same(&net, &round_trip(&net));
    }

    #[test]
    fn degree_ccdf_is_monotone_and_bounded(n in 2usize..200, p in 0.0f64..0.3, seed in any::<u64>()) {
        let net = generate_random_directed(n, p, seed).unwrap();
        for kind in [Degree::In, Degree::Out, Degree::Total] {
            let points = net.degree_ccdf(kind);
            for w in points.windows(2) {
                prop_assert!(w[0].0 < w[1].0);
                prop_assert!(w[0].1 >= w[1].1);
            }
            prop_assert!(points.iter().all(|&(_, q)| q > 0.0 && q <= 1.0));
        }
    }
}
