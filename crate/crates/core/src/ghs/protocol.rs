use crate::graph::Port;
use crate::node::{kind, NodeMemory};
use crate::sim::{Handler, Message, NodeContext};
use crate::weight::Weight;

/// Every fragment connects over its LOE. The higher-id endpoint of an edge
/// chosen from both sides becomes the next leader (`scratch.seen`).
pub struct Connect;

impl<W: Weight> Handler<W, NodeMemory<W>> for Connect {
    fn start(&self, mem: &mut NodeMemory<W>, ctx: &mut NodeContext<'_, W>) {
        let Some(p) = mem.frag_loe.as_ref().and_then(|k| mem.port_of(k)) else {
            return;
        };
        if mem.nbr_frag[p.index()] != mem.frag {
            mem.tree.insert(p);
            ctx.send(p, Message::new(vec![kind::CONNECT]));
        }
    }

    fn receive(&self, mem: &mut NodeMemory<W>, ctx: &mut NodeContext<'_, W>, port: Port, msg: &Message) {
        if msg.tag() != kind::CONNECT {
            return;
        }
        mem.tree.insert(port);
        let key = mem.edge_key(port, ctx.weight(port));
        if mem.frag_loe == Some(key) && mem.id.0 > mem.nbr[port.index()] {
            mem.scratch.seen = true;
        }
    }
}

/// New leaders flood their id over tree edges, building a rooted tree.
pub struct TreeFlood;

impl<W: Weight> Handler<W, NodeMemory<W>> for TreeFlood {
    fn start(&self, mem: &mut NodeMemory<W>, ctx: &mut NodeContext<'_, W>) {
        if mem.leader {
            mem.frag = mem.id.0;
            mem.scratch.seen = true;
            for &p in &mem.tree {
                ctx.send(p, Message::new(vec![kind::FLOOD, mem.frag]));
            }
        }
    }

    fn receive(&self, mem: &mut NodeMemory<W>, ctx: &mut NodeContext<'_, W>, port: Port, msg: &Message) {
        let w = msg.words();
        match w[0] {
            kind::FLOOD if !mem.scratch.seen => {
                mem.scratch.seen = true;
                mem.frag = w[1];
                mem.scratch.parent = Some(port);
                ctx.send(port, Message::new(vec![kind::CHILD]));
                for &p in &mem.tree {
                    if p != port {
                        ctx.send(p, Message::new(vec![kind::FLOOD, w[1]]));
                    }
                }
            }
            kind::CHILD => mem.scratch.children.push(port),
            _ => {}
        }
    }
}
