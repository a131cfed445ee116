//! Weighted undirected networks with per-node port numbering.

mod diameter;
mod generate;
mod io;

use std::cmp::Ordering;
use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::weight::Weight;

pub use diameter::{bfs_distances, hop_diameter, hop_diameter_with_threshold, Diameter};
pub use generate::{
    generate_complete, generate_grid, generate_path, generate_path_like, generate_random_connected, generate_star,
    shuffled_weights,
};
pub use io::{parse_graph, read_graph, serialize_graph, write_graph};

/// Globally unique node identifier. Fits in one message word.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct NodeId(pub u64);

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Local port number, `1..=degree`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Port(pub u32);

impl Port {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize - 1
    }

    #[inline]
    pub fn from_index(i: usize) -> Self {
        Port(i as u32 + 1)
    }
}

impl fmt::Display for Port {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Totally ordered edge weight: the numeric weight, tie-broken by the sorted
/// endpoint id pair. Distinct for distinct edges, so the MST is unique.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EdgeKey<W> {
    pub weight: W,
    pub lo: NodeId,
    pub hi: NodeId,
}

impl<W: Weight> EdgeKey<W> {
    pub fn new(weight: W, a: NodeId, b: NodeId) -> Self {
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        EdgeKey { weight, lo, hi }
    }

    pub fn words(&self) -> [u64; 3] {
        [self.weight.to_word(), self.lo.0, self.hi.0]
    }

    pub fn from_words(words: &[u64]) -> Self {
        EdgeKey {
            weight: W::from_word(words[0]),
            lo: NodeId(words[1]),
            hi: NodeId(words[2]),
        }
    }

    pub fn other(&self, end: NodeId) -> NodeId {
        if end == self.lo {
            self.hi
        } else {
            self.lo
        }
    }
}

impl<W: Weight> Eq for EdgeKey<W> {}

impl<W: Weight> PartialOrd for EdgeKey<W> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl<W: Weight> Ord for EdgeKey<W> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.weight
            .total_cmp(&other.weight)
            .then(self.lo.cmp(&other.lo))
            .then(self.hi.cmp(&other.hi))
    }
}

impl<W: Weight> std::hash::Hash for EdgeKey<W> {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.weight.to_word().hash(state);
        self.lo.hash(state);
        self.hi.hash(state);
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightedEdge<W> {
    /// Node index (not id) of the first listed endpoint.
    pub a: usize,
    pub b: usize,
    pub weight: W,
    pub port_a: Port,
    pub port_b: Port,
}

impl<W> WeightedEdge<W> {
    pub fn other(&self, x: usize) -> usize {
        if x == self.a {
            self.b
        } else {
            self.a
        }
    }

    pub fn port_at(&self, x: usize) -> Port {
        if x == self.a {
            self.port_a
        } else {
            self.port_b
        }
    }
}

/// Immutable connected network. Node indices are dense `0..n`; node ids are
/// arbitrary unique integers. Ports at each node are numbered by the order in
/// which incident edges were supplied.
#[derive(Debug, Clone)]
pub struct WeightedGraph<W> {
    ids: Vec<NodeId>,
    index: HashMap<NodeId, usize>,
    edges: Vec<WeightedEdge<W>>,
    adjacency: Vec<Vec<usize>>,
}

impl<W: Weight> WeightedGraph<W> {
    /// Builds a graph from an edge list. Node order is order of first
    /// appearance; a graph with `n == 1` and no edges gets the single id 0.
    pub fn from_edges(n: usize, edges: &[(NodeId, NodeId, W)]) -> Result<Self> {
        if n == 0 {
            return Err(Error::Parameter("graph must have at least one node".into()));
        }
        let mut ids = Vec::with_capacity(n);
        let mut index = HashMap::with_capacity(n);
        for &(u, v, _) in edges {
            for x in [u, v] {
                if !index.contains_key(&x) {
                    index.insert(x, ids.len());
                    ids.push(x);
                }
            }
        }
        if ids.is_empty() {
            ids.push(NodeId(0));
            index.insert(NodeId(0), 0);
        }
        if ids.len() != n {
            return Err(Error::Structural(format!(
                "expected {n} nodes but edges mention {}",
                ids.len()
            )));
        }
        Self::assemble(ids, index, edges)
    }

    /// Builds a graph with an explicit node order; every id must be listed.
    pub fn with_nodes(node_ids: &[NodeId], edges: &[(NodeId, NodeId, W)]) -> Result<Self> {
        if node_ids.is_empty() {
            return Err(Error::Parameter("graph must have at least one node".into()));
        }
        let mut index = HashMap::with_capacity(node_ids.len());
        for (i, &x) in node_ids.iter().enumerate() {
            if index.insert(x, i).is_some() {
                return Err(Error::Structural(format!("duplicate node id {x}")));
            }
        }
        Self::assemble(node_ids.to_vec(), index, edges)
    }

    fn assemble(
        ids: Vec<NodeId>,
        index: HashMap<NodeId, usize>,
        raw: &[(NodeId, NodeId, W)],
    ) -> Result<Self> {
        let n = ids.len();
        let mut adjacency = vec![Vec::new(); n];
        let mut edges = Vec::with_capacity(raw.len());
        let mut seen = HashSet::with_capacity(raw.len());
        for &(u, v, w) in raw {
            if u == v {
                return Err(Error::Structural(format!("self-loop at node {u}")));
            }
            if !w.is_valid() {
                return Err(Error::Structural(format!("invalid weight on edge {u}-{v}")));
            }
            let a = *index
                .get(&u)
                .ok_or_else(|| Error::Structural(format!("unknown node {u}")))?;
            let b = *index
                .get(&v)
                .ok_or_else(|| Error::Structural(format!("unknown node {v}")))?;
            if !seen.insert((a.min(b), a.max(b))) {
                return Err(Error::Structural(format!("parallel edge {u}-{v}")));
            }
            let e = edges.len();
            adjacency[a].push(e);
            adjacency[b].push(e);
            edges.push(WeightedEdge {
                a,
                b,
                weight: w,
                port_a: Port(adjacency[a].len() as u32),
                port_b: Port(adjacency[b].len() as u32),
            });
        }
        let g = WeightedGraph {
            ids,
            index,
            edges,
            adjacency,
        };
        if !g.is_connected() {
            return Err(Error::Structural("graph is not connected".into()));
        }
        Ok(g)
    }

    fn is_connected(&self) -> bool {
        let n = self.n();
        let mut seen = vec![false; n];
        let mut queue = VecDeque::from([0usize]);
        seen[0] = true;
        let mut count = 1;
        while let Some(x) = queue.pop_front() {
            for &e in &self.adjacency[x] {
                let y = self.edges[e].other(x);
                if !seen[y] {
                    seen[y] = true;
                    count += 1;
                    queue.push_back(y);
                }
            }
        }
        count == n
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.ids.len()
    }

    #[inline]
    pub fn m(&self) -> usize {
        self.edges.len()
    }

    #[inline]
    pub fn id(&self, x: usize) -> NodeId {
        self.ids[x]
    }

    pub fn ids(&self) -> &[NodeId] {
        &self.ids
    }

    pub fn index_of(&self, id: NodeId) -> Option<usize> {
        self.index.get(&id).copied()
    }

    #[inline]
    pub fn degree(&self, x: usize) -> usize {
        self.adjacency[x].len()
    }

    /// Edge indices incident to `x`, in port order.
    pub fn incident(&self, x: usize) -> &[usize] {
        &self.adjacency[x]
    }

    pub fn edges(&self) -> &[WeightedEdge<W>] {
        &self.edges
    }

    pub fn edge(&self, e: usize) -> &WeightedEdge<W> {
        &self.edges[e]
    }

    /// Moves edge `e` to port `port` at node `x`, shifting the others.
    pub fn set_port(&mut self, x: usize, e: usize, port: Port) -> Result<()> {
        let pos = self.adjacency[x]
            .iter()
            .position(|&f| f == e)
            .ok_or_else(|| Error::Structural(format!("edge {e} is not incident to node {x}")))?;
        if port.0 == 0 || port.index() >= self.adjacency[x].len() {
            return Err(Error::Parameter(format!("port {} out of range at node {x}", port.0)));
        }
        let e = self.adjacency[x].remove(pos);
        self.adjacency[x].insert(port.index(), e);
        for (i, &f) in self.adjacency[x].iter().enumerate() {
            let edge = &mut self.edges[f];
            if edge.a == x {
                edge.port_a = Port::from_index(i);
            } else {
                edge.port_b = Port::from_index(i);
            }
        }
        Ok(())
    }

    /// Edge index behind `port` at node `x`.
    pub fn edge_at(&self, x: usize, port: Port) -> usize {
        self.adjacency[x][port.index()]
    }

    /// The node at the far end of `port` together with the arrival port there.
    pub fn across(&self, x: usize, port: Port) -> (usize, Port) {
        let e = &self.edges[self.edge_at(x, port)];
        let y = e.other(x);
        (y, e.port_at(y))
    }

    pub fn key(&self, e: usize) -> EdgeKey<W> {
        let edge = &self.edges[e];
        EdgeKey::new(edge.weight, self.ids[edge.a], self.ids[edge.b])
    }

    pub fn neighbors(&self, x: usize) -> impl Iterator<Item = usize> + '_ {
        self.adjacency[x].iter().map(move |&e| self.edges[e].other(x))
    }

    /// Looks up the edge index for a key, if present.
    pub fn find_edge(&self, key: &EdgeKey<W>) -> Option<usize> {
        let a = self.index_of(key.lo)?;
        let b = self.index_of(key.hi)?;
        self.adjacency[a]
            .iter()
            .copied()
            .find(|&e| self.edges[e].other(a) == b)
    }

    /// Edge list in storage order, by node id.
    pub fn edge_list(&self) -> Vec<(NodeId, NodeId, W)> {
        self.edges
            .iter()
            .map(|e| (self.ids[e.a], self.ids[e.b], e.weight))
            .collect()
    }

    pub fn total_weight(&self, edges: &[usize]) -> f64 {
        edges
            .iter()
            .map(|&e| num_traits::cast::<W, f64>(self.edges[e].weight).unwrap_or(f64::NAN))
            .fold(0.0, |a, b| a + b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tri() -> WeightedGraph<u64> {
        WeightedGraph::from_edges(
            3,
            &[
                (NodeId(5), NodeId(7), 1),
                (NodeId(7), NodeId(9), 2),
                (NodeId(9), NodeId(5), 3),
            ],
        )
        .unwrap()
    }

    #[test]
    fn ports_follow_incidence_order() {
        let g = tri();
        let x = g.index_of(NodeId(5)).unwrap();
        assert_eq!(g.degree(x), 2);
        let (y, back) = g.across(x, Port(1));
        assert_eq!(g.id(y), NodeId(7));
        assert_eq!(back, Port(1));
        let (z, back) = g.across(x, Port(2));
        assert_eq!(g.id(z), NodeId(9));
        assert_eq!(back, Port(2));
    }

    #[test]
    fn rejects_disconnected_and_parallel() {
        let r = WeightedGraph::from_edges(
            4,
            &[(NodeId(0), NodeId(1), 1u64), (NodeId(2), NodeId(3), 2)],
        );
        assert!(matches!(r, Err(Error::Structural(_))));
        let r = WeightedGraph::from_edges(
            2,
            &[(NodeId(0), NodeId(1), 1u64), (NodeId(1), NodeId(0), 2)],
        );
        assert!(matches!(r, Err(Error::Structural(_))));
    }

    #[test]
    fn rejects_nan() {
        let r = WeightedGraph::from_edges(2, &[(NodeId(0), NodeId(1), f64::NAN)]);
        assert!(r.is_err());
    }

    #[test]
    fn equal_numeric_weights_get_distinct_keys() {
        let g = WeightedGraph::from_edges(
            3,
            &[(NodeId(0), NodeId(1), 4u64), (NodeId(1), NodeId(2), 4)],
        )
        .unwrap();
        assert!(g.key(0) < g.key(1));
    }

    #[test]
    fn single_node() {
        let g = WeightedGraph::<u64>::from_edges(1, &[]).unwrap();
        assert_eq!((g.n(), g.m()), (1, 0));
        assert_eq!(g.id(0), NodeId(0));
    }
}
