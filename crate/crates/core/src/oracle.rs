//! Sequential reference algorithms and spanning-tree checks.

use std::cmp::Reverse;
use std::collections::{BTreeSet, BinaryHeap};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{EdgeKey, WeightedGraph};
use crate::weight::Weight;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Provenance {
    Oracle,
    Ghs,
    Opt,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MstResult {
    /// Edge indices into the graph, sorted.
    pub edges: Vec<usize>,
    pub total_weight: f64,
    pub provenance: Provenance,
}

impl MstResult {
    pub fn new<W: Weight>(g: &WeightedGraph<W>, mut edges: Vec<usize>, provenance: Provenance) -> Self {
        edges.sort_unstable();
        edges.dedup();
        let total_weight = g.total_weight(&edges);
        MstResult {
            edges,
            total_weight,
            provenance,
        }
    }

    pub fn edge_set(&self) -> BTreeSet<usize> {
        self.edges.iter().copied().collect()
    }
}

/// Disjoint-set forest with path halving and union by size.
#[derive(Debug, Clone)]
pub struct UnionFind {
    parent: Vec<usize>,
    size: Vec<usize>,
    sets: usize,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
            size: vec![1; n],
            sets: n,
        }
    }

    pub fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// Returns `false` if already joined.
    pub fn union(&mut self, a: usize, b: usize) -> bool {
        let (mut a, mut b) = (self.find(a), self.find(b));
        if a == b {
            return false;
        }
        if self.size[a] < self.size[b] {
            std::mem::swap(&mut a, &mut b);
        }
        self.parent[b] = a;
        self.size[a] += self.size[b];
        self.sets -= 1;
        true
    }

    pub fn sets(&self) -> usize {
        self.sets
    }
}

pub fn kruskal<W: Weight>(g: &WeightedGraph<W>) -> Result<MstResult> {
    let mut order: Vec<usize> = (0..g.m()).collect();
    order.sort_by_key(|&e| g.key(e));
    let mut uf = UnionFind::new(g.n());
    let mut edges = Vec::with_capacity(g.n().saturating_sub(1));
    for e in order {
        let edge = g.edge(e);
        if uf.union(edge.a, edge.b) {
            edges.push(e);
        }
    }
    if uf.sets() > 1 {
        return Err(Error::Structural("graph is disconnected".into()));
    }
    Ok(MstResult::new(g, edges, Provenance::Oracle))
}

pub fn prim<W: Weight>(g: &WeightedGraph<W>) -> Result<MstResult> {
    let n = g.n();
    let mut in_tree = vec![false; n];
    let mut heap: BinaryHeap<Reverse<(EdgeKey<W>, usize)>> = BinaryHeap::new();
    let mut edges = Vec::with_capacity(n.saturating_sub(1));
    let push = |x: usize, heap: &mut BinaryHeap<_>| {
        for &e in g.incident(x) {
            heap.push(Reverse((g.key(e), e)));
        }
    };
    in_tree[0] = true;
    push(0, &mut heap);
    while let Some(Reverse((_, e))) = heap.pop() {
        let edge = g.edge(e);
        let next = match (in_tree[edge.a], in_tree[edge.b]) {
            (true, false) => edge.b,
            (false, true) => edge.a,
            _ => continue,
        };
        in_tree[next] = true;
        edges.push(e);
        push(next, &mut heap);
    }
    if edges.len() + 1 != n {
        return Err(Error::Structural("graph is disconnected".into()));
    }
    Ok(MstResult::new(g, edges, Provenance::Oracle))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TreeReport {
    pub edge_count_ok: bool,
    pub acyclic: bool,
    pub connected: bool,
    /// `None` when the oracle comparison was not requested.
    pub matches_oracle: Option<bool>,
}

impl TreeReport {
    pub fn passed(&self) -> bool {
        self.edge_count_ok && self.acyclic && self.connected && self.matches_oracle != Some(false)
    }
}

pub fn verify_spanning_tree<W: Weight>(
    edges: &[usize],
    g: &WeightedGraph<W>,
    compare_oracle: bool,
) -> TreeReport {
    let mut uf = UnionFind::new(g.n());
    let mut acyclic = true;
    for &e in edges {
        let edge = g.edge(e);
        if !uf.union(edge.a, edge.b) {
            acyclic = false;
        }
    }
    let matches_oracle = compare_oracle.then(|| {
        let mine: BTreeSet<usize> = edges.iter().copied().collect();
        kruskal(g).map(|k| k.edge_set() == mine).unwrap_or(false)
    });
    TreeReport {
        edge_count_ok: edges.len() + 1 == g.n(),
        acyclic,
        connected: uf.sets() == 1,
        matches_oracle,
    }
}

/// Lightest edge with exactly one endpoint in `component` (node indices).
/// `None` when no edge leaves it, meaning the forest is complete.
pub fn lightest_outgoing_edge<W: Weight>(g: &WeightedGraph<W>, component: &[usize]) -> Option<usize> {
    let mut inside = vec![false; g.n()];
    for &x in component {
        inside[x] = true;
    }
    component
        .iter()
        .flat_map(|&x| g.incident(x).iter().copied())
        .filter(|&e| {
            let edge = g.edge(e);
            inside[edge.a] != inside[edge.b]
        })
        .min_by_key(|&e| g.key(e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{generate_random_connected, NodeId};

    fn k3() -> WeightedGraph<u64> {
        WeightedGraph::from_edges(
            3,
            &[(NodeId(0), NodeId(1), 1), (NodeId(1), NodeId(2), 2), (NodeId(0), NodeId(2), 3)],
        )
        .unwrap()
    }

    #[test]
    fn triangle() {
        let r = kruskal(&k3()).unwrap();
        assert_eq!(r.edges, vec![0, 1]);
        assert_eq!(r.total_weight, 3.0);
    }

    #[test]
    fn kruskal_matches_prim() {
        let g = generate_random_connected::<u64>(128, 512, 2).unwrap();
        assert_eq!(kruskal(&g).unwrap().edges, prim(&g).unwrap().edges);
    }

    #[test]
    fn verifier_catches_missing_and_extra() {
        let g = generate_random_connected::<u64>(20, 40, 3).unwrap();
        let mst = kruskal(&g).unwrap();
        assert!(verify_spanning_tree(&mst.edges, &g, true).passed());
        let short = &mst.edges[1..];
        let r = verify_spanning_tree(short, &g, false);
        assert!(!r.connected && r.acyclic);
        let extra = (0..g.m()).find(|e| !mst.edges.contains(e)).unwrap();
        let mut more = mst.edges.clone();
        more.push(extra);
        assert!(!verify_spanning_tree(&more, &g, false).acyclic);
    }

    #[test]
    fn loe_of_singleton_and_whole() {
        let g = WeightedGraph::<u64>::from_edges(
            4,
            &[(NodeId(0), NodeId(1), 5), (NodeId(0), NodeId(2), 2), (NodeId(0), NodeId(3), 9)],
        )
        .unwrap();
        let loe = lightest_outgoing_edge(&g, &[0]).unwrap();
        assert_eq!(g.edge(loe).weight, 2);
        assert_eq!(lightest_outgoing_edge(&g, &[0, 1, 2, 3]), None);
    }
}
