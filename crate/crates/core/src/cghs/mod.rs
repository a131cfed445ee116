//! Controlled GHS: Borůvka-style merging where only small fragments propose
//! and proposals are thinned by a maximal matching, so fragment diameter at
//! most roughly doubles per iteration.

mod protocol;

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use crate::error::Result;
use crate::graph::{NodeId, WeightedGraph};
use crate::matching::{cv_reduce, cv_schedule, free_color, maximal_matching, LeaderComm};
use crate::node::{
    Broadcast, Convergecast, Exchange, ExchangeField, LeaderMail, MailDirection, NodeMemory,
};
use crate::oracle::UnionFind;
use crate::sim::{default_round_limit, Driver, Handler, Network, RunMetrics};
use crate::weight::Weight;

pub use protocol::{LoeAgg, LoeCast};
use protocol::{Bfs, Candidate, Flood, MarkCast};

pub const TAG: &str = "cghs";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Fragment {
    pub id: u64,
    pub leader: NodeId,
    /// Node indices, sorted.
    pub members: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MstForest {
    pub fragments: Vec<Fragment>,
    /// Edge indices of fragment edges, sorted.
    pub edges: Vec<usize>,
}

impl MstForest {
    /// Reads the forest off the nodes' final memories.
    pub fn from_states<W: Weight>(g: &WeightedGraph<W>, states: &[NodeMemory<W>]) -> Self {
        let mut groups: BTreeMap<u64, Vec<usize>> = BTreeMap::new();
        for (x, s) in states.iter().enumerate() {
            groups.entry(s.frag).or_default().push(x);
        }
        let fragments = groups
            .into_iter()
            .map(|(id, members)| Fragment {
                id,
                leader: NodeId(id),
                members,
            })
            .collect();
        MstForest {
            fragments,
            edges: tree_edges(g, states),
        }
    }

    pub fn len(&self) -> usize {
        self.fragments.len()
    }

    pub fn is_empty(&self) -> bool {
        self.fragments.is_empty()
    }

    /// Hop diameter of each fragment's induced subgraph.
    pub fn strong_diameters<W: Weight>(&self, g: &WeightedGraph<W>) -> Vec<u32> {
        self.fragments
            .iter()
            .map(|f| induced_diameter(g, &f.members))
            .collect()
    }
}

/// Edge indices marked as tree edges at either endpoint.
pub fn tree_edges<W: Weight>(g: &WeightedGraph<W>, states: &[NodeMemory<W>]) -> Vec<usize> {
    let set: BTreeSet<usize> = states
        .iter()
        .enumerate()
        .flat_map(|(x, s)| s.tree.iter().map(move |&p| g.edge_at(x, p)))
        .collect();
    set.into_iter().collect()
}

fn induced_diameter<W: Weight>(g: &WeightedGraph<W>, members: &[usize]) -> u32 {
    let mut inside = vec![false; g.n()];
    for &x in members {
        inside[x] = true;
    }
    let mut best = 0;
    let mut dist = vec![u32::MAX; g.n()];
    for &src in members {
        for &x in members {
            dist[x] = u32::MAX;
        }
        dist[src] = 0;
        let mut queue = VecDeque::from([src]);
        while let Some(x) = queue.pop_front() {
            for y in g.neighbors(x) {
                if inside[y] && dist[y] == u32::MAX {
                    dist[y] = dist[x] + 1;
                    best = best.max(dist[y]);
                    queue.push_back(y);
                }
            }
        }
    }
    best
}

/// Number of iterations after which every fragment exceeds `sqrt(n)` nodes.
pub fn last_iteration(n: usize) -> u32 {
    let mut i = 0;
    while (1u64 << (2 * i)) < n as u64 {
        i += 1;
    }
    i
}

pub(crate) fn run<W: Weight, H: Handler<W, NodeMemory<W>>>(
    net: &mut Network<'_, W>,
    tag: &str,
    handler: H,
    states: &mut [NodeMemory<W>],
    round_limit: u64,
) -> Result<u64> {
    for s in states.iter_mut() {
        s.reset_scratch();
    }
    net.run(tag, &Driver::new(handler), states, round_limit)
}

/// Leader mail across fragment-adjacent edges.
struct EdgeComm<'a, 'g, W> {
    net: &'a mut Network<'g, W>,
    tag: &'a str,
    round_limit: u64,
}

impl<W: Weight> LeaderComm<W> for EdgeComm<'_, '_, W> {
    fn mail(&mut self, states: &mut [NodeMemory<W>], to_children: bool) -> Result<()> {
        let dir = if to_children {
            MailDirection::ToChildren
        } else {
            MailDirection::ToParent
        };
        run(self.net, self.tag, Broadcast(LeaderMail(dir)), states, self.round_limit)?;
        Ok(())
    }
}

/// Runs controlled GHS on fresh node memories. Returns the number of
/// iterations executed.
pub fn run_controlled_ghs<W: Weight>(
    net: &mut Network<'_, W>,
    states: &mut [NodeMemory<W>],
    round_limit: u64,
) -> Result<u32> {
    let n = states.len();
    if n <= 1 {
        return Ok(0);
    }
    run(net, TAG, Exchange(ExchangeField::Id), states, round_limit)?;
    for s in states.iter_mut() {
        s.nbr_frag = s.nbr.clone();
    }
    let last = last_iteration(n);
    let mut executed = 0;
    for i in 0..=last {
        for s in states.iter_mut() {
            s.cand_in.clear();
            s.lead = Default::default();
            s.frag_loe = None;
            s.frag_active = false;
        }
        run(net, TAG, Convergecast(LoeAgg::FRAGMENT), states, round_limit)?;
        let mut any = false;
        for s in states.iter_mut().filter(|s| s.leader) {
            s.lead.active = s.lead.loe.is_some() && s.lead.size <= 1 << i;
            any |= s.lead.loe.is_some();
        }
        if !any {
            break;
        }
        executed += 1;
        run(net, TAG, Broadcast(LoeCast), states, round_limit)?;
        run(net, TAG, Candidate, states, round_limit)?;
        maximal_matching(
            &mut EdgeComm {
                net,
                tag: TAG,
                round_limit,
            },
            states,
        )?;
        for s in states.iter_mut().filter(|s| s.leader) {
            let own = s.id.0;
            s.lead.decide_merge(own);
        }
        run(net, TAG, Broadcast(MarkCast), states, round_limit)?;
        run(net, TAG, Flood, states, round_limit)?;
        run(net, TAG, Bfs, states, round_limit)?;
        for s in states.iter_mut() {
            let parent = s.scratch.parent;
            let children = std::mem::take(&mut s.scratch.children);
            s.set_base_tree(parent, children);
        }
    }
    Ok(executed)
}

/// Controlled GHS on `g` in a fresh simulator.
pub fn controlled_ghs<W: Weight>(g: &WeightedGraph<W>, seed: u64) -> Result<(MstForest, RunMetrics)> {
    let mut net = Network::new(g, seed);
    let mut states: Vec<NodeMemory<W>> = (0..g.n()).map(|x| net.node_info(x).into()).collect();
    run_controlled_ghs(&mut net, &mut states, default_round_limit(g.n()))?;
    Ok((MstForest::from_states(g, &states), net.into_metrics()))
}

/// Lightest edge leaving `component`, or `None` once the forest is complete.
pub fn lightest_outgoing_edge_of_component<W: Weight>(
    component: &[usize],
    g: &WeightedGraph<W>,
) -> Option<usize> {
    crate::oracle::lightest_outgoing_edge(g, component)
}

/// Sequential form of one matching-and-merge step. `candidates` maps each
/// proposing component to the target of its lightest outgoing edge; every
/// other member of `components` is passive. Returns the merged groups.
pub fn matching_merge_step(
    candidates: &BTreeMap<u64, u64>,
    components: &BTreeSet<u64>,
) -> Vec<BTreeSet<u64>> {
    let parent: BTreeMap<u64, u64> = candidates
        .iter()
        .filter(|(&a, &b)| {
            candidates.contains_key(&b) && !(candidates.get(&b) == Some(&a) && a > b)
        })
        .map(|(&a, &b)| (a, b))
        .collect();
    let children = |v: u64| parent.iter().filter(move |(_, &p)| p == v).map(|(&c, _)| c);

    let mut color: BTreeMap<u64, u64> = candidates.keys().map(|&a| (a, a)).collect();
    for _ in cv_schedule() {
        let prev = color.clone();
        for (a, c) in color.iter_mut() {
            *c = cv_reduce(prev[a], parent.get(a).map(|p| prev[p]));
        }
    }
    for target in [5, 4, 3] {
        let old = color.clone();
        for (a, c) in color.iter_mut() {
            *c = match parent.get(a) {
                Some(p) => old[p],
                None => free_color(Some(old[a]), None),
            };
        }
        let shifted = color.clone();
        for (a, c) in color.iter_mut() {
            if *c == target {
                *c = free_color(parent.get(a).map(|p| shifted[p]), Some(old[a]));
            }
        }
    }
    let mut matched: BTreeMap<u64, u64> = BTreeMap::new();
    for class in 0..3 {
        let mut accepted = Vec::new();
        for (&v, _) in candidates.iter() {
            if matched.contains_key(&v) {
                continue;
            }
            let best = children(v)
                .filter(|c| color[c] == class && !matched.contains_key(c))
                .min();
            if let Some(c) = best {
                accepted.push((v, c));
            }
        }
        for (v, c) in accepted {
            matched.insert(v, c);
            matched.insert(c, v);
        }
    }

    let ids: Vec<u64> = components.iter().copied().collect();
    let index: BTreeMap<u64, usize> = ids.iter().enumerate().map(|(i, &c)| (c, i)).collect();
    let mut uf = UnionFind::new(ids.len());
    for (&a, &b) in candidates {
        if !matched.contains_key(&a) {
            if let (Some(&x), Some(&y)) = (index.get(&a), index.get(&b)) {
                uf.union(x, y);
            }
        }
    }
    for (&a, &b) in &matched {
        if let (Some(&x), Some(&y)) = (index.get(&a), index.get(&b)) {
            uf.union(x, y);
        }
    }
    let mut groups: BTreeMap<usize, BTreeSet<u64>> = BTreeMap::new();
    for (i, &c) in ids.iter().enumerate() {
        groups.entry(uf.find(i)).or_default().insert(c);
    }
    groups.into_values().collect()
}
