//! Hard instances: `p` slow paths and one highway between terminals `s`
//! and `t`, with the middle highway edge rerouted through a random regular
//! core whose edges are the switch edges.
//!
//! Node ids: `s = 0`, `t = 1`, highway node `k` (for `0 < k < D`) is
//! `1 + k`, slow path `j` node `l` (for `1 <= l <= L`) is
//! `D + 1 + j·L + (l - 1)`, and core node `c` follows after all slow paths.
//! Slow-path node `l` also has a heavy spoke to highway node
//! `floor(l·D / (L + 1))` when that node is interior.

use std::collections::{HashSet, VecDeque};

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{NodeId, Port, WeightedGraph};
use crate::weight::Weight;

/// Core diameter must be at most `CORE_DIAMETER_FACTOR·log2(core size) + 2`.
pub const CORE_DIAMETER_FACTOR: u32 = 2;
const CORE_ATTEMPTS: usize = 200;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "lowercase")]
pub enum WeightMode {
    Unit,
    Disjointness { x: Vec<bool>, y: Vec<bool> },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LowerBoundParams {
    /// Number of slow paths.
    pub p: usize,
    /// Interior nodes per slow path. The hop diameter is at least
    /// `d_target` only when `slow_len + 1 >= d_target`.
    pub slow_len: usize,
    /// Highway length.
    pub d_target: usize,
    pub d_core: usize,
    pub core_size: usize,
    pub weight_mode: WeightMode,
    pub seed: u64,
}

impl LowerBoundParams {
    /// `p = L = ceil(sqrt(size))`, highway `d`, a 4-regular core of
    /// `size` nodes, unit weights.
    pub fn square(size: usize, d: usize, seed: u64) -> Self {
        let side = (size as f64).sqrt().ceil() as usize;
        LowerBoundParams {
            p: side,
            slow_len: side.max(d),
            d_target: d,
            d_core: 4,
            core_size: size.max(5),
            weight_mode: WeightMode::Unit,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Parameter(m));
        if self.p == 0 || self.slow_len == 0 || self.d_target == 0 {
            return bad("p, slow path length and highway length must be positive".into());
        }
        if self.d_core < 3 || self.d_core >= self.core_size {
            return bad(format!("core degree {} needs 3 <= d < {}", self.d_core, self.core_size));
        }
        if (self.d_core * self.core_size) % 2 == 1 {
            return bad("core degree times core size must be even".into());
        }
        if let WeightMode::Disjointness { x, y } = &self.weight_mode {
            if x.len() != self.p || y.len() != self.p {
                return bad(format!("X and Y need exactly p = {} bits", self.p));
            }
        }
        Ok(())
    }

    pub fn node_count(&self) -> usize {
        2 + (self.d_target - 1) + self.p * self.slow_len + self.core_size
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

#[derive(Debug, Clone)]
pub struct HardGraph<W> {
    pub graph: WeightedGraph<W>,
    pub s: NodeId,
    pub t: NodeId,
    /// Edge indices of the core (switch edges).
    pub core_edges: Vec<usize>,
    pub params: LowerBoundParams,
}

fn weight<W: Weight>(w: u64) -> Result<W> {
    num_traits::cast(w).ok_or_else(|| Error::Parameter(format!("weight {w} does not fit the scalar type")))
}

fn diameter_of(n: usize, edges: &[(usize, usize)]) -> Option<u32> {
    let mut adj = vec![Vec::new(); n];
    for &(a, b) in edges {
        adj[a].push(b);
        adj[b].push(a);
    }
    let mut best = 0;
    for src in 0..n {
        let mut dist = vec![u32::MAX; n];
        dist[src] = 0;
        let mut queue = VecDeque::from([src]);
        let mut reached = 1;
        while let Some(x) = queue.pop_front() {
            for &y in &adj[x] {
                if dist[y] == u32::MAX {
                    dist[y] = dist[x] + 1;
                    best = best.max(dist[y]);
                    reached += 1;
                    queue.push_back(y);
                }
            }
        }
        if reached < n {
            return None;
        }
    }
    Some(best)
}

/// Random `d`-regular graph on `size` nodes: a circulant start followed by
/// random double-edge swaps, repeated until the diameter is logarithmic.
pub fn random_regular(size: usize, d: usize, rng: &mut impl Rng) -> Result<Vec<(usize, usize)>> {
    let mut edges = Vec::with_capacity(size * d / 2);
    for i in 0..size {
        for k in 1..=d / 2 {
            edges.push((i, (i + k) % size));
        }
        if d % 2 == 1 && i < size / 2 {
            edges.push((i, i + size / 2));
        }
    }
    let norm = |a: usize, b: usize| (a.min(b), a.max(b));
    let mut present: HashSet<(usize, usize)> = edges.iter().map(|&(a, b)| norm(a, b)).collect();
    let limit = CORE_DIAMETER_FACTOR * (usize::BITS - size.leading_zeros()) + 2;
    for _ in 0..CORE_ATTEMPTS {
        for _ in 0..10 * edges.len() {
            let i = rng.random_range(0..edges.len());
            let j = rng.random_range(0..edges.len());
            let ((a, b), (c, e)) = (edges[i], edges[j]);
            let (x, y) = if rng.random() { ((a, c), (b, e)) } else { ((a, e), (b, c)) };
            if x.0 == x.1 || y.0 == y.1 || norm(x.0, x.1) == norm(y.0, y.1) {
                continue;
            }
            if present.contains(&norm(x.0, x.1)) || present.contains(&norm(y.0, y.1)) {
                continue;
            }
            present.remove(&norm(a, b));
            present.remove(&norm(c, e));
            present.insert(norm(x.0, x.1));
            present.insert(norm(y.0, y.1));
            edges[i] = x;
            edges[j] = y;
        }
        if diameter_of(size, &edges).is_some_and(|dm| dm <= limit) {
            return Ok(edges);
        }
    }
    Err(Error::Parameter(format!(
        "no {d}-regular core on {size} nodes with diameter <= {limit}"
    )))
}

pub fn build_hard_graph<W: Weight>(params: &LowerBoundParams) -> Result<HardGraph<W>> {
    params.validate()?;
    let (p, l, d) = (params.p, params.slow_len, params.d_target);
    let n = params.node_count();
    let nn = n as u64;
    let heavy = nn.saturating_pow(4);
    let hw = |k: usize| -> u64 {
        match k {
            0 => 0,
            k if k == d => 1,
            k => 1 + k as u64,
        }
    };
    let slow = |j: usize, i: usize| (d + 1 + j * l + (i - 1)) as u64;
    let core_base = (d + 1 + p * l) as u64;
    let (x_bits, y_bits) = match &params.weight_mode {
        WeightMode::Unit => (vec![false; p], vec![false; p]),
        WeightMode::Disjointness { x, y } => (x.clone(), y.clone()),
    };
    let spoke = |bit: bool| if bit { nn } else { 1 };

    let mut raw: Vec<(u64, u64, u64)> = Vec::new();
    let cut = d / 2;
    for k in 0..d {
        if k != cut {
            raw.push((hw(k), hw(k + 1), 1));
        }
    }
    raw.push((hw(cut), core_base, 1));
    raw.push((hw(cut + 1), core_base + (params.core_size / 2) as u64, 1));
    for j in 0..p {
        raw.push((0, slow(j, 1), spoke(x_bits[j])));
        for i in 1..l {
            raw.push((slow(j, i), slow(j, i + 1), 1));
        }
        raw.push((slow(j, l), 1, spoke(y_bits[j])));
    }
    for j in 0..p {
        for i in 1..=l {
            let k = i * d / (l + 1);
            if k >= 1 && k < d {
                raw.push((slow(j, i), hw(k), heavy));
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let core = random_regular(params.core_size, params.d_core, &mut rng)?;
    let first_core = raw.len();
    for (a, b) in core {
        raw.push((core_base + a as u64, core_base + b as u64, 1));
    }
    let core_edges = (first_core..raw.len()).collect();
    let ids: Vec<NodeId> = (0..nn).map(NodeId).collect();
    let edges = raw
        .into_iter()
        .map(|(a, b, w)| Ok((NodeId(a), NodeId(b), weight::<W>(w)?)))
        .collect::<Result<Vec<_>>>()?;
    Ok(HardGraph {
        graph: WeightedGraph::with_nodes(&ids, &edges)?,
        s: NodeId(0),
        t: NodeId(1),
        core_edges,
        params: params.clone(),
    })
}

/// A graph with one switch edge removed, leaving two open stubs.
#[derive(Debug, Clone)]
pub struct OpenGraph<W> {
    pub graph: WeightedGraph<W>,
    /// Endpoints and weight of the removed edge.
    pub removed: (NodeId, NodeId, W),
    /// Each stub is a node and the port the removed edge used there.
    pub stubs: [(NodeId, Port); 2],
}

impl<W: Weight> OpenGraph<W> {
    pub fn open(g: &WeightedGraph<W>, e: usize) -> Result<Self> {
        if e >= g.m() {
            return Err(Error::Parameter(format!("edge {e} out of range")));
        }
        let edge = g.edge(e);
        let mut list = g.edge_list();
        let removed = list.remove(e);
        Ok(OpenGraph {
            graph: WeightedGraph::with_nodes(g.ids(), &list)?,
            removed,
            stubs: [(g.id(edge.a), edge.port_a), (g.id(edge.b), edge.port_b)],
        })
    }

    /// Same open graph with every id shifted by `offset`.
    pub fn shifted(&self, offset: u64) -> Result<Self> {
        let sh = |x: NodeId| NodeId(x.0 + offset);
        let ids: Vec<NodeId> = self.graph.ids().iter().map(|&x| sh(x)).collect();
        let list: Vec<_> = self.graph.edge_list().into_iter().map(|(a, b, w)| (sh(a), sh(b), w)).collect();
        Ok(OpenGraph {
            graph: WeightedGraph::with_nodes(&ids, &list)?,
            removed: (sh(self.removed.0), sh(self.removed.1), self.removed.2),
            stubs: [(sh(self.stubs[0].0), self.stubs[0].1), (sh(self.stubs[1].0), self.stubs[1].1)],
        })
    }
}

/// Up to `limit` open graphs, each missing a different switch edge.
pub fn enumerate_open_graphs<W: Weight>(hg: &HardGraph<W>, limit: usize, seed: u64) -> Result<Vec<OpenGraph<W>>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let k = limit.min(hg.core_edges.len());
    let mut picks: Vec<usize> = sample(&mut rng, hg.core_edges.len(), k).into_iter().collect();
    picks.sort_unstable();
    picks.into_iter().map(|i| OpenGraph::open(&hg.graph, hg.core_edges[i])).collect()
}

/// Joins two open graphs by bridging stub to stub. The bridges take the
/// removed edges' weights and ports.
pub fn dumbbell<W: Weight>(g1: &OpenGraph<W>, g2: &OpenGraph<W>) -> Result<WeightedGraph<W>> {
    let first: HashSet<NodeId> = g1.graph.ids().iter().copied().collect();
    if g2.graph.ids().iter().any(|x| first.contains(x)) {
        return Err(Error::Parameter("open graphs share node ids".into()));
    }
    let ids: Vec<NodeId> = g1.graph.ids().iter().chain(g2.graph.ids()).copied().collect();
    let mut list = g1.graph.edge_list();
    list.extend(g2.graph.edge_list());
    let bridges = [
        (g1.stubs[0].0, g2.stubs[0].0, g1.removed.2),
        (g1.stubs[1].0, g2.stubs[1].0, g2.removed.2),
    ];
    let base = list.len();
    list.extend(bridges);
    let mut g = WeightedGraph::with_nodes(&ids, &list)?;
    for (b, (a, c, _)) in bridges.iter().enumerate() {
        let e = base + b;
        let (pa, pc) = (g1.stubs[b].1, g2.stubs[b].1);
        let (xa, xc) = (g.index_of(*a).unwrap(), g.index_of(*c).unwrap());
        g.set_port(xa, e, pa)?;
        g.set_port(xc, e, pc)?;
    }
    Ok(g)
}
