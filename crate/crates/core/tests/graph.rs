mod common;

use std::collections::BTreeSet;

use common::Sets;
use congest_mst::graph::{
    generate_complete, generate_grid, generate_path_like, generate_random_connected, hop_diameter,
    hop_diameter_with_threshold, parse_graph, serialize_graph,
};
use congest_mst::{FloatGraph, Graph, Port, WeightedGraph, Weight};
use proptest::prelude::*;

fn check_invariants<W: Weight>(g: &WeightedGraph<W>) -> Result<(), TestCaseError> {
    for x in 0..g.n() {
        for p in 1..=g.degree(x) {
            let p = Port(p as u32);
            let (y, q) = g.across(x, p);
            prop_assert_eq!(g.across(y, q), (x, p));
            prop_assert_eq!(g.edge_at(x, p), g.edge_at(y, q));
        }
    }
    let keys: BTreeSet<_> = (0..g.m()).map(|e| g.key(e)).collect();
    prop_assert_eq!(keys.len(), g.m());
    let mut sets = Sets::new(g.n());
    let mut parts = g.n();
    for e in g.edges() {
        if sets.join(e.a, e.b) {
            parts -= 1;
        }
    }
    prop_assert_eq!(parts, 1);
    Ok(())
}

/// Neighbour id and weight per port, per node id.
fn port_view<W: Weight>(g: &WeightedGraph<W>) -> Vec<(u64, Vec<(u64, W)>)> {
    let mut out: Vec<_> = (0..g.n())
        .map(|x| {
            let ports = (0..g.degree(x))
                .map(|i| {
                    let e = g.edge_at(x, Port::from_index(i));
                    (g.id(g.edge(e).other(x)).0, g.edge(e).weight)
                })
                .collect();
            (g.id(x).0, ports)
        })
        .collect();
    out.sort_by_key(|v| v.0);
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn random_graphs_are_well_formed(n in 1usize..60, extra in 0usize..100, seed in any::<u64>()) {
        let m = (n.saturating_sub(1) + extra).min(n * (n - 1) / 2);
        let g: Graph = generate_random_connected(n, m, seed).unwrap();
        prop_assert_eq!(g.m(), m);
        check_invariants(&g)?;
    }

    #[test]
    fn structured_graphs_are_well_formed(n in 2usize..40, seed in any::<u64>()) {
        check_invariants(&generate_path_like::<u64>(n, n / 3, seed).unwrap())?;
        check_invariants(&generate_grid::<u64>(n / 4 + 1, 3, seed).unwrap())?;
        check_invariants(&generate_complete::<u64>(n.min(12), seed).unwrap())?;
    }

    #[test]
    fn serialization_round_trip(n in 1usize..50, extra in 0usize..60, seed in any::<u64>()) {
        let m = (n.saturating_sub(1) + extra).min(n * (n - 1) / 2);
        let g: Graph = generate_random_connected(n, m, seed).unwrap();
        let back: Graph = parse_graph(&serialize_graph(&g)).unwrap();
        prop_assert_eq!(port_view(&back), port_view(&g));
    }

    #[test]
    fn float_round_trip(n in 2usize..30, seed in any::<u64>()) {
        let g: FloatGraph = generate_random_connected(n, (n + 3).min(n * (n - 1) / 2), seed).unwrap();
        let back: FloatGraph = parse_graph(&serialize_graph(&g)).unwrap();
        prop_assert_eq!(port_view(&back), port_view(&g));
    }

    #[test]
    fn sampled_diameter_brackets_exact(n in 2usize..80, seed in any::<u64>()) {
        let g: Graph = generate_path_like(n, n / 5, seed).unwrap();
        let exact = hop_diameter(&g).unwrap();
        let sampled = hop_diameter_with_threshold(&g, 0).unwrap();
        prop_assert!(exact.exact && !sampled.exact);
        prop_assert!(sampled.value <= exact.value && exact.value <= 2 * sampled.value);
    }
}

#[test]
fn rejects_duplicate_keys_and_disconnection() {
    use congest_mst::NodeId;
    let dup = Graph::from_edges(2, &[(NodeId(0), NodeId(1), 1), (NodeId(1), NodeId(0), 1)]);
    assert!(dup.is_err());
    let split = Graph::from_edges(4, &[(NodeId(0), NodeId(1), 1), (NodeId(2), NodeId(3), 2)]);
    assert!(split.is_err());
}
