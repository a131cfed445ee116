use congest_mst::ghs::ghs_classic;
use congest_mst::graph::{generate_path, generate_random_connected, generate_star};
use congest_mst::oracle::{kruskal, prim, verify_spanning_tree};
use congest_mst::{Error, Graph, NodeId};
use proptest::prelude::*;

fn k3() -> Graph {
    Graph::from_edges(3, &[(NodeId(0), NodeId(1), 1), (NodeId(1), NodeId(2), 2), (NodeId(0), NodeId(2), 3)]).unwrap()
}

#[test]
fn kruskal_equals_prim_on_200_instances() {
    for seed in 0..200u64 {
        let n = 2 + (seed as usize * 7) % 150;
        let m = (n - 1 + (seed as usize * 13) % (3 * n)).min(n * (n - 1) / 2);
        let g: Graph = generate_random_connected(n, m, seed).unwrap();
        assert_eq!(kruskal(&g).unwrap().edges, prim(&g).unwrap().edges, "seed {seed}");
    }
    let g: Graph = generate_random_connected(128, 512, 2).unwrap();
    assert_eq!(kruskal(&g).unwrap().edges, prim(&g).unwrap().edges);
}

#[test]
fn tree_inputs_keep_every_edge() {
    for g in [generate_path::<u64>(30).unwrap(), generate_star(12).unwrap()] {
        assert_eq!(kruskal(&g).unwrap().edges, (0..g.m()).collect::<Vec<_>>());
        let (mst, metrics) = ghs_classic(&g, 3).unwrap();
        assert_eq!(mst.edges.len(), g.m());
        assert!(metrics.messages_total >= 2 * g.m() as u64);
    }
}

#[test]
fn triangle() {
    let g = k3();
    let k = kruskal(&g).unwrap();
    assert_eq!((k.edges.clone(), k.total_weight), (vec![0, 1], 3.0));
    assert_eq!(ghs_classic(&g, 0).unwrap().0.edges, vec![0, 1]);
}

#[test]
fn disconnected_input_is_structural_error() {
    // from_edges refuses disconnected graphs, so split a valid graph's edge list
    let g = k3();
    let lonely = congest_mst::WeightedGraph::<u64>::from_edges(1, &[]).unwrap();
    assert!(kruskal(&lonely).is_ok());
    assert!(matches!(
        Graph::from_edges(3, &g.edge_list()[..1]),
        Err(Error::Structural(_)) | Err(Error::Parameter(_))
    ));
}

#[test]
fn verifier_reports() {
    let g: Graph = generate_random_connected(40, 90, 8).unwrap();
    let mst = kruskal(&g).unwrap().edges;
    assert!(verify_spanning_tree(&mst, &g, true).passed());
    let r = verify_spanning_tree(&mst[1..], &g, true);
    assert!(!r.connected && !r.passed());
    let extra = (0..g.m()).find(|e| !mst.contains(e)).unwrap();
    let mut more = mst.clone();
    more.push(extra);
    let r = verify_spanning_tree(&more, &g, false);
    assert!(!r.acyclic && !r.passed());
    assert_eq!(r.matches_oracle, None);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn classic_ghs_equals_kruskal(n in 1usize..90, extra in 0usize..200, seed in any::<u64>()) {
        let m = (n - 1 + extra).min(n * (n - 1) / 2);
        let g: Graph = generate_random_connected(n, m, seed).unwrap();
        let (mst, _) = ghs_classic(&g, seed).unwrap();
        prop_assert_eq!(mst.edges, kruskal(&g).unwrap().edges);
    }
}
