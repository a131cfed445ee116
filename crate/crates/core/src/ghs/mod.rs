//! Synchronous GHS baseline: plain Borůvka merging over fragment trees with
//! no control on fragment growth.

mod protocol;

use crate::cghs::{tree_edges, LoeAgg};
use crate::error::Result;
use crate::graph::WeightedGraph;
use crate::node::{Broadcast, BroadcastSource, Convergecast, Exchange, ExchangeField, NodeMemory};
use crate::oracle::{MstResult, Provenance};
use crate::sim::{default_round_limit, Driver, Handler, Network, NodeContext, RunMetrics};
use crate::weight::Weight;

use protocol::{Connect, TreeFlood};

pub const TAG: &str = "ghs";

struct Announce;

impl<W: Weight> BroadcastSource<W> for Announce {
    fn root_value(&self, mem: &NodeMemory<W>) -> Option<Vec<u64>> {
        mem.lead.loe.map(|k| k.words().to_vec())
    }

    fn deliver(&self, mem: &mut NodeMemory<W>, _ctx: &mut NodeContext<'_, W>, value: &[u64]) {
        mem.frag_loe = crate::node::decode_key(value);
    }
}

fn run<W: Weight, H: Handler<W, NodeMemory<W>>>(
    net: &mut Network<'_, W>,
    handler: H,
    states: &mut [NodeMemory<W>],
    limit: u64,
) -> Result<u64> {
    for s in states.iter_mut() {
        s.reset_scratch();
    }
    net.run(TAG, &Driver::new(handler), states, limit)
}

pub fn ghs_classic<W: Weight>(g: &WeightedGraph<W>, seed: u64) -> Result<(MstResult, RunMetrics)> {
    let n = g.n();
    let limit = default_round_limit(n);
    let mut net = Network::new(g, seed);
    let mut states: Vec<NodeMemory<W>> = (0..n).map(|x| net.node_info(x).into()).collect();
    if n > 1 {
        run(&mut net, Exchange(ExchangeField::Id), &mut states, limit)?;
        for s in states.iter_mut() {
            s.nbr_frag = s.nbr.clone();
        }
        loop {
            for s in states.iter_mut() {
                s.lead = Default::default();
                s.frag_loe = None;
            }
            run(&mut net, Convergecast(LoeAgg::FRAGMENT), &mut states, limit)?;
            if !states.iter().any(|s| s.leader && s.lead.loe.is_some()) {
                break;
            }
            run(&mut net, Broadcast(Announce), &mut states, limit)?;
            run(&mut net, Connect, &mut states, limit)?;
            for s in states.iter_mut() {
                s.leader = s.scratch.seen;
            }
            run(&mut net, TreeFlood, &mut states, limit)?;
            for s in states.iter_mut() {
                let parent = s.scratch.parent;
                let children = std::mem::take(&mut s.scratch.children);
                s.set_base_tree(parent, children);
            }
            run(&mut net, Exchange(ExchangeField::Frag), &mut states, limit)?;
        }
    }
    let result = MstResult::new(g, tree_edges(g, &states), Provenance::Ghs);
    Ok((result, net.into_metrics()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{generate_path, generate_random_connected, NodeId};
    use crate::oracle::kruskal;

    #[test]
    fn triangle() {
        let g = WeightedGraph::<u64>::from_edges(
            3,
            &[(NodeId(0), NodeId(1), 1), (NodeId(1), NodeId(2), 2), (NodeId(0), NodeId(2), 3)],
        )
        .unwrap();
        assert_eq!(ghs_classic(&g, 0).unwrap().0.edges, vec![0, 1]);
    }

    #[test]
    fn tree_input_handshake_lower_bound() {
        let g = generate_path::<u64>(10).unwrap();
        let (r, m) = ghs_classic(&g, 0).unwrap();
        assert_eq!(r.edges.len(), 9);
        assert!(m.messages_total >= 2 * g.m() as u64);
    }

    #[test]
    fn matches_oracle() {
        for seed in 0..5 {
            let g = generate_random_connected::<u64>(60, 150, seed).unwrap();
            assert_eq!(ghs_classic(&g, seed).unwrap().0.edges, kruskal(&g).unwrap().edges);
        }
    }
}
