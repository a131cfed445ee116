use crate::graph::{NodeId, Port};
use crate::node::{
    decode_key, encode_key, kind, route_up, Aggregate, BroadcastSource, MarkAcross, NodeMemory,
    NONE_WORD,
};
use crate::sim::{Handler, Message, NodeContext};
use crate::weight::Weight;

/// Lightest edge to a node with a different fragment id (or label) plus a
/// member count. Payload `[w, lo, hi, target, size]`.
pub struct LoeAgg {
    by_label: bool,
}

impl LoeAgg {
    pub const FRAGMENT: LoeAgg = LoeAgg { by_label: false };
    pub const LABEL: LoeAgg = LoeAgg { by_label: true };
}

impl<W: Weight> Aggregate<W> for LoeAgg {
    fn identity(&self) -> Vec<u64> {
        vec![0, NONE_WORD, NONE_WORD, NONE_WORD, 0]
    }

    fn input(&self, mem: &NodeMemory<W>, ctx: &NodeContext<'_, W>) -> Vec<u64> {
        let mine = if self.by_label { mem.label } else { mem.frag };
        let best = ctx
            .ports()
            .filter(|p| mem.nbr_frag[p.index()] != mine)
            .map(|p| (mem.edge_key(p, ctx.weight(p)), mem.nbr_frag[p.index()]))
            .min_by(|a, b| a.0.cmp(&b.0));
        let mut v = encode_key(best.map(|b| b.0)).to_vec();
        v.push(best.map_or(NONE_WORD, |b| b.1));
        v.push(1);
        v
    }

    fn combine(&self, acc: &mut Vec<u64>, other: &[u64]) {
        let size = acc[4] + other[4];
        let a = decode_key::<W>(&acc[..3]);
        let b = decode_key::<W>(&other[..3]);
        let take_other = match (a, b) {
            (_, None) => false,
            (None, Some(_)) => true,
            (Some(a), Some(b)) => b < a,
        };
        if take_other {
            acc[..4].copy_from_slice(&other[..4]);
        }
        acc[4] = size;
    }

    fn at_root(&self, mem: &mut NodeMemory<W>, result: Vec<u64>) {
        mem.lead.loe = decode_key(&result[..3]);
        mem.lead.target = result[3];
        mem.lead.size = result[4];
    }
}

/// Leader announces its LOE and activity. Payload `[w, lo, hi, active]`.
pub struct LoeCast;

impl<W: Weight> BroadcastSource<W> for LoeCast {
    fn root_value(&self, mem: &NodeMemory<W>) -> Option<Vec<u64>> {
        let mut v = encode_key(mem.lead.loe).to_vec();
        v.push(mem.lead.active as u64);
        Some(v)
    }

    fn deliver(&self, mem: &mut NodeMemory<W>, _ctx: &mut NodeContext<'_, W>, value: &[u64]) {
        mem.frag_loe = decode_key(&value[..3]);
        mem.frag_active = value[3] == 1;
    }
}

/// The endpoint of an active fragment's LOE proposes across the edge; the
/// far side answers with its own activity and whether the LOE is shared.
/// The answer is routed to the proposing leader.
pub struct Candidate;

impl Candidate {
    fn up<W: Weight>(mem: &mut NodeMemory<W>, ctx: &mut NodeContext<'_, W>, key: (u64, u32), body: [u64; 3]) {
        match route_up(mem, key) {
            Some((k, p)) => ctx.send(
                p,
                Message::new(vec![kind::STATUS_UP, k.0, k.1 as u64, body[0], body[1], body[2]]),
            ),
            None => {
                let (target_active, mutual) = (body[0] == 1, body[1] == 1);
                let lead = &mut mem.lead;
                lead.target_active = target_active;
                lead.cv_parent = (lead.active
                    && target_active
                    && !(mutual && mem.id.0 > lead.target))
                    .then_some(lead.target);
            }
        }
    }
}

impl<W: Weight> Handler<W, NodeMemory<W>> for Candidate {
    fn start(&self, mem: &mut NodeMemory<W>, ctx: &mut NodeContext<'_, W>) {
        if !mem.frag_active {
            return;
        }
        let Some(p) = mem.frag_loe.as_ref().and_then(|k| mem.port_of(k)) else {
            return;
        };
        if mem.nbr_frag[p.index()] != mem.frag {
            ctx.send(p, Message::new(vec![kind::CAND, mem.frag]));
        }
    }

    fn receive(&self, mem: &mut NodeMemory<W>, ctx: &mut NodeContext<'_, W>, port: Port, msg: &Message) {
        let w = msg.words();
        match w[0] {
            kind::CAND => {
                mem.cand_in.push(port);
                let key = mem.edge_key(port, ctx.weight(port));
                let mutual = mem.frag_loe == Some(key);
                ctx.send(
                    port,
                    Message::new(vec![kind::STATUS, mem.frag_active as u64, mutual as u64, mem.frag]),
                );
            }
            kind::STATUS => {
                let base = mem.routing.base;
                Self::up(mem, ctx, base, [w[1], w[2], w[3]]);
            }
            kind::STATUS_UP => Self::up(mem, ctx, (w[1], w[2] as u32), [w[3], w[4], w[5]]),
            _ => {}
        }
    }
}

/// Leaders whose LOE joins the merge have its endpoints add it to the tree.
pub struct MarkCast;

impl<W: Weight> BroadcastSource<W> for MarkCast {
    fn root_value(&self, mem: &NodeMemory<W>) -> Option<Vec<u64>> {
        mem.lead.mark_loe.then(|| vec![1])
    }

    fn deliver(&self, mem: &mut NodeMemory<W>, ctx: &mut NodeContext<'_, W>, _value: &[u64]) {
        if let Some(p) = mem.frag_loe.as_ref().and_then(|k| mem.port_of(k)) {
            if mem.nbr_frag[p.index()] != mem.frag {
                MarkAcross::mark(mem, ctx, p);
            }
        }
    }

    fn other(&self, mem: &mut NodeMemory<W>, _ctx: &mut NodeContext<'_, W>, port: Port, msg: &Message) {
        MarkAcross::receive(mem, port, msg);
    }
}

/// Non-absorbed leaders flood their id over tree edges; every reached node
/// adopts it.
pub struct Flood;

impl<W: Weight> Handler<W, NodeMemory<W>> for Flood {
    fn start(&self, mem: &mut NodeMemory<W>, ctx: &mut NodeContext<'_, W>) {
        if mem.leader && mem.lead.merge_target.is_none() {
            mem.scratch.seen = true;
            for &p in &mem.tree {
                ctx.send(p, Message::new(vec![kind::FLOOD, mem.id.0]));
            }
        }
    }

    fn receive(&self, mem: &mut NodeMemory<W>, ctx: &mut NodeContext<'_, W>, port: Port, msg: &Message) {
        let w = msg.words();
        if w[0] != kind::FLOOD || mem.scratch.seen {
            return;
        }
        mem.scratch.seen = true;
        mem.frag = w[1];
        mem.leader = mem.id == NodeId(w[1]);
        for &p in &mem.tree {
            if p != port {
                ctx.send(p, Message::new(vec![kind::FLOOD, w[1]]));
            }
        }
    }
}

/// BFS from each leader inside its fragment's induced subgraph. Doubles as
/// a fragment-id exchange: every node hears the id of every neighbour.
pub struct Bfs;

impl<W: Weight> Handler<W, NodeMemory<W>> for Bfs {
    fn start(&self, mem: &mut NodeMemory<W>, ctx: &mut NodeContext<'_, W>) {
        if mem.leader {
            mem.scratch.seen = true;
            ctx.send_all(&Message::new(vec![kind::BFS, mem.frag]));
        }
    }

    fn receive(&self, mem: &mut NodeMemory<W>, ctx: &mut NodeContext<'_, W>, port: Port, msg: &Message) {
        let w = msg.words();
        match w[0] {
            kind::BFS => {
                mem.nbr_frag[port.index()] = w[1];
                if w[1] == mem.frag && !mem.scratch.seen {
                    mem.scratch.seen = true;
                    mem.scratch.parent = Some(port);
                    ctx.send(port, Message::new(vec![kind::CHILD]));
                    for p in ctx.ports().collect::<Vec<_>>() {
                        if p != port {
                            ctx.send(p, Message::new(vec![kind::BFS, mem.frag]));
                        }
                    }
                }
            }
            kind::CHILD => {
                mem.nbr_frag[port.index()] = mem.frag;
                mem.scratch.children.push(port);
            }
            _ => {}
        }
    }
}
