//! Sparse neighbourhood covers.
//!
//! A level with radius `W` is built from `2κ` independent rounds of
//! exponentially shifted region growing (`κ = ⌈log2 n⌉`). Each round
//! partitions the graph into shortest-path trees of depth at most `2Wκ`; a
//! node's `W`-ball lands inside one of its clusters in each round with
//! probability at least one half. The level is checked by [`verify_cover`]
//! and rebuilt on failure.

mod protocol;

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{NodeId, Port, WeightedGraph};
use crate::node::Membership;
use crate::sim::{default_round_limit, Network, RunMetrics};
use crate::weight::Weight;

pub use protocol::{WaveState, Waves};

pub const TAG: &str = "cover";

/// Cluster depth is at most `C_DEPTH·W·κ`.
pub const C_DEPTH: f64 = 2.0;
/// Memberships per node are at most `C_SPARSE·κ·n^{1/κ}·log2 n`.
pub const C_SPARSE: f64 = 1.0;
/// Construction messages are at most `C_COVER·m·κ·n^{1/κ}·log2 n`.
pub const C_COVER: f64 = 2.0;
pub const MAX_ATTEMPTS: u32 = 32;

pub fn kappa(n: usize) -> u32 {
    (usize::BITS - n.saturating_sub(1).leading_zeros()).max(1)
}

pub fn repetitions(n: usize) -> u32 {
    2 * kappa(n)
}

fn log2n(n: usize) -> f64 {
    (n as f64).log2().max(1.0)
}

fn spread(n: usize) -> f64 {
    let k = kappa(n) as f64;
    k * (n as f64).powf(1.0 / k) * log2n(n)
}

pub fn depth_bound(radius: u64, kappa: u32) -> u64 {
    (C_DEPTH * radius as f64 * kappa as f64).ceil() as u64
}

pub fn sparsity_bound(n: usize) -> f64 {
    C_SPARSE * spread(n)
}

pub fn message_bound(n: usize, m: usize) -> f64 {
    C_COVER * m as f64 * spread(n)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClusterMember {
    /// Node index.
    pub node: usize,
    pub parent: Option<Port>,
    pub children: Vec<Port>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClusterTree {
    /// `(round, center id)`.
    pub id: (u32, u64),
    pub root: NodeId,
    pub depth: u32,
    pub members: Vec<ClusterMember>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Cover {
    pub radius: u64,
    pub kappa: u32,
    pub clusters: Vec<ClusterTree>,
    /// Cluster indices per node index.
    pub membership: Vec<Vec<usize>>,
}

impl Cover {
    /// Assembles the global view from what each node stores locally.
    pub fn from_memberships<W: Weight>(g: &WeightedGraph<W>, radius: u64, local: &[Vec<Membership>]) -> Cover {
        let mut by_id: BTreeMap<(u32, u64), Vec<ClusterMember>> = BTreeMap::new();
        for (x, list) in local.iter().enumerate() {
            for mem in list {
                by_id.entry(mem.cluster).or_default().push(ClusterMember {
                    node: x,
                    parent: mem.parent,
                    children: mem.children.clone(),
                });
            }
        }
        let mut membership = vec![Vec::new(); g.n()];
        let clusters = by_id
            .into_iter()
            .enumerate()
            .map(|(c, (id, members))| {
                for mm in &members {
                    membership[mm.node].push(c);
                }
                let root = members
                    .iter()
                    .find(|mm| mm.parent.is_none())
                    .map_or(NodeId(id.1), |mm| g.id(mm.node));
                let depth = tree_depth(g, &members).unwrap_or(u32::MAX);
                ClusterTree {
                    id,
                    root,
                    depth,
                    members,
                }
            })
            .collect();
        Cover {
            radius,
            kappa: kappa(g.n()),
            clusters,
            membership,
        }
    }

    pub fn max_membership(&self) -> usize {
        self.membership.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

/// Depth of the tree spanned by child ports from the unique root, or
/// `None` if the members do not form such a tree.
fn tree_depth<W: Weight>(g: &WeightedGraph<W>, members: &[ClusterMember]) -> Option<u32> {
    let index: BTreeMap<usize, &ClusterMember> = members.iter().map(|mm| (mm.node, mm)).collect();
    let mut roots = members.iter().filter(|mm| mm.parent.is_none());
    let root = roots.next()?;
    if roots.next().is_some() {
        return None;
    }
    for mm in members {
        if let Some(p) = mm.parent {
            let (y, back) = g.across(mm.node, p);
            if !index.get(&y).is_some_and(|py| py.children.contains(&back)) {
                return None;
            }
        }
    }
    let mut depth = 0;
    let mut seen = BTreeSet::from([root.node]);
    let mut queue = VecDeque::from([(root.node, 0u32)]);
    while let Some((x, d)) = queue.pop_front() {
        depth = depth.max(d);
        for &c in &index[&x].children {
            let (y, _) = g.across(x, c);
            if !index.contains_key(&y) || !seen.insert(y) {
                return None;
            }
            queue.push_back((y, d + 1));
        }
    }
    (seen.len() == members.len()).then_some(depth)
}

fn ball<W: Weight>(g: &WeightedGraph<W>, v: usize, radius: u64) -> Vec<usize> {
    let mut dist = BTreeMap::from([(v, 0u64)]);
    let mut queue = VecDeque::from([v]);
    while let Some(x) = queue.pop_front() {
        let d = dist[&x];
        if d == radius {
            continue;
        }
        for y in g.neighbors(x) {
            if let std::collections::btree_map::Entry::Vacant(e) = dist.entry(y) {
                e.insert(d + 1);
                queue.push_back(y);
            }
        }
    }
    dist.into_keys().collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoverReport {
    pub trees_ok: bool,
    pub tree_witness: Option<(u32, u64)>,
    pub depth_ok: bool,
    pub max_depth: u32,
    pub depth_bound: u64,
    pub depth_witness: Option<(u32, u64)>,
    pub sparsity_ok: bool,
    pub max_membership: usize,
    pub sparsity_bound: f64,
    pub sparsity_witness: Option<NodeId>,
    pub neighborhood_ok: bool,
    pub neighborhood_witness: Option<NodeId>,
}

impl CoverReport {
    pub fn passed(&self) -> bool {
        self.trees_ok && self.depth_ok && self.sparsity_ok && self.neighborhood_ok
    }
}

pub fn verify_cover<W: Weight>(cover: &Cover, g: &WeightedGraph<W>) -> CoverReport {
    let n = g.n();
    let bound = depth_bound(cover.radius, cover.kappa);
    let mut tree_witness = None;
    let mut max_depth = 0;
    let mut depth_witness = None;
    let mut sets = Vec::with_capacity(cover.clusters.len());
    for c in &cover.clusters {
        match tree_depth(g, &c.members) {
            None => {
                tree_witness.get_or_insert(c.id);
            }
            Some(d) => {
                if d > max_depth {
                    max_depth = d;
                    if d as u64 > bound {
                        depth_witness = Some(c.id);
                    }
                }
            }
        }
        sets.push(c.members.iter().map(|mm| mm.node).collect::<BTreeSet<usize>>());
    }
    let mut membership = vec![Vec::new(); n];
    for (ci, s) in sets.iter().enumerate() {
        for &x in s {
            membership[x].push(ci);
        }
    }
    let sparsity_bound = sparsity_bound(n);
    let worst = (0..n).max_by_key(|&x| (membership[x].len(), std::cmp::Reverse(x)));
    let max_membership = worst.map_or(0, |x| membership[x].len());
    let sparsity_ok = max_membership as f64 <= sparsity_bound;
    let neighborhood_witness = (0..n).find(|&v| {
        let b = ball(g, v, cover.radius);
        !membership[v].iter().any(|&ci| b.iter().all(|u| sets[ci].contains(u)))
    });
    CoverReport {
        trees_ok: tree_witness.is_none(),
        tree_witness,
        depth_ok: depth_witness.is_none() && tree_witness.is_none(),
        max_depth,
        depth_bound: bound,
        depth_witness,
        sparsity_ok,
        max_membership,
        sparsity_bound,
        sparsity_witness: (!sparsity_ok).then(|| g.id(worst.unwrap())),
        neighborhood_ok: neighborhood_witness.is_none(),
        neighborhood_witness: neighborhood_witness.map(|v| g.id(v)),
    }
}

/// Runs the construction for one radius on `net`. Returns each node's local
/// memberships and the assembled cover. With `check`, failed levels are
/// rebuilt up to [`MAX_ATTEMPTS`] times.
pub fn compute_level<W: Weight>(
    net: &mut Network<'_, W>,
    radius: u64,
    check: bool,
) -> Result<(Vec<Vec<Membership>>, Cover)> {
    let g = net.graph();
    let n = g.n();
    let k = kappa(n);
    let cap = 2 * radius.max(1) * k as u64;
    let waves = Waves {
        rate: (n.max(2) as f64).ln() / cap as f64,
        cap,
    };
    let limit = default_round_limit(n).max(2 * cap + 16);
    for _ in 0..MAX_ATTEMPTS {
        let mut local: Vec<Vec<Membership>> = vec![Vec::new(); n];
        for rep in 0..repetitions(n) {
            let mut states = net.init_states(&waves);
            net.run(TAG, &waves, &mut states, limit)?;
            for (x, s) in states.into_iter().enumerate() {
                local[x].push(Membership {
                    cluster: (rep, s.center.unwrap_or(s.id)),
                    parent: s.parent,
                    children: s.children,
                });
            }
        }
        let cover = Cover::from_memberships(g, radius, &local);
        if !check || verify_cover(&cover, g).passed() {
            return Ok((local, cover));
        }
    }
    Err(Error::Invariant(format!(
        "no valid cover of radius {radius} after {MAX_ATTEMPTS} attempts"
    )))
}

pub fn compute_cover<W: Weight>(g: &WeightedGraph<W>, radius: u64, seed: u64) -> Result<(Cover, RunMetrics)> {
    if radius == 0 {
        return Err(Error::Parameter("cover radius must be at least 1".into()));
    }
    let mut net = Network::new(g, seed);
    let (_, cover) = compute_level(&mut net, radius, true)?;
    Ok((cover, net.into_metrics()))
}

/// The BFS tree from the largest id as a single-cluster cover. Valid for
/// any radius at least the hop diameter.
pub fn bfs_tree_cover<W: Weight>(g: &WeightedGraph<W>, radius: u64) -> Cover {
    let n = g.n();
    let root = (0..n).max_by_key(|&x| g.id(x)).unwrap_or(0);
    let mut local = vec![Vec::new(); n];
    let mut parent = vec![None; n];
    let mut children = vec![Vec::new(); n];
    let mut seen = vec![false; n];
    seen[root] = true;
    let mut queue = VecDeque::from([root]);
    while let Some(x) = queue.pop_front() {
        for i in 0..g.degree(x) {
            let p = Port::from_index(i);
            let (y, back) = g.across(x, p);
            if !seen[y] {
                seen[y] = true;
                parent[y] = Some(back);
                children[x].push(p);
                queue.push_back(y);
            }
        }
    }
    for x in 0..n {
        local[x].push(Membership {
            cluster: (0, g.id(root).0),
            parent: parent[x],
            children: std::mem::take(&mut children[x]),
        });
    }
    Cover::from_memberships(g, radius, &local)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{generate_path, generate_random_connected};

    #[test]
    fn kappa_values() {
        assert_eq!(kappa(1), 1);
        assert_eq!(kappa(2), 1);
        assert_eq!(kappa(9), 4);
        assert_eq!(kappa(1024), 10);
    }

    #[test]
    fn bfs_tree_is_a_cover_for_large_radius() {
        let g = generate_random_connected::<u64>(40, 80, 1).unwrap();
        let r = verify_cover(&bfs_tree_cover(&g, 40), &g);
        assert!(r.passed(), "{r:?}");
    }

    #[test]
    fn deleting_a_cluster_names_a_witness() {
        let g = generate_path::<u64>(9).unwrap();
        let mut cover = bfs_tree_cover(&g, 8);
        cover.clusters.clear();
        let r = verify_cover(&cover, &g);
        assert!(!r.neighborhood_ok);
        assert!(r.neighborhood_witness.is_some());
    }

    #[test]
    fn path_of_nine() {
        let g = generate_path::<u64>(9).unwrap();
        let (cover, _) = compute_cover(&g, 2, 0).unwrap();
        assert!(verify_cover(&cover, &g).passed());
    }

    #[test]
    fn deterministic_given_seed() {
        let g = generate_random_connected::<u64>(64, 128, 5).unwrap();
        let a = compute_cover(&g, 4, 9).unwrap();
        let b = compute_cover(&g, 4, 9).unwrap();
        assert_eq!(a.0, b.0);
        assert_eq!(a.1.messages_total, b.1.messages_total);
    }
}
