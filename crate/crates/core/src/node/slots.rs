//! Aggregation and dissemination over routing chains.
//!
//! A node holds one slot per routing key it participates in. The slot for key
//! `K` forwards to `up[K]`; where `up[K]` is undefined the chain ends, and the
//! value passes either to the fragment root (at the current leader) or into
//! the continuation chain of a former leader.

use std::collections::BTreeSet;

use super::{kind, NodeMemory, RKey};
use crate::graph::Port;
use crate::sim::{Handler, Message, NodeContext};
use crate::weight::Weight;

fn slot_keys<W>(mem: &NodeMemory<W>) -> BTreeSet<RKey> {
    let r = &mem.routing;
    let mut keys: BTreeSet<RKey> = r.up.keys().chain(r.down.keys()).copied().collect();
    keys.insert(r.base);
    keys
}

fn ending_keys<W>(mem: &NodeMemory<W>) -> Vec<RKey> {
    slot_keys(mem)
        .into_iter()
        .filter(|k| !mem.routing.up.contains_key(k))
        .collect()
}

/// Next hop for a message travelling toward the current leader on chain
/// `key`. `None` means this node is the leader.
pub fn route_up<W: Weight>(mem: &NodeMemory<W>, mut key: RKey) -> Option<(RKey, Port)> {
    loop {
        if let Some(&p) = mem.routing.up.get(&key) {
            return Some((key, p));
        }
        if mem.leader {
            return None;
        }
        let next = mem.continuation()?;
        if next == key {
            return None;
        }
        key = next;
    }
}

pub trait Aggregate<W: Weight> {
    fn identity(&self) -> Vec<u64>;

    fn input(&self, mem: &NodeMemory<W>, ctx: &NodeContext<'_, W>) -> Vec<u64>;

    fn combine(&self, acc: &mut Vec<u64>, other: &[u64]);

    fn at_root(&self, mem: &mut NodeMemory<W>, result: Vec<u64>);
}

/// Every fragment aggregates one value per member toward its leader. Each
/// slot sends exactly once, after hearing from all of its children.
pub struct Convergecast<A>(pub A);

impl<A> Convergecast<A> {
    fn settle<W: Weight>(&self, mem: &mut NodeMemory<W>, ctx: &mut NodeContext<'_, W>, key: RKey)
    where
        A: Aggregate<W>,
    {
        let Some((_, acc)) = mem.scratch.agg.remove(&key) else {
            return;
        };
        if let Some(&p) = mem.routing.up.get(&key) {
            let mut words = vec![kind::AGG, key.0, key.1 as u64];
            words.extend_from_slice(&acc);
            ctx.send(p, Message::new(words));
        } else if mem.leader {
            self.0.combine(&mut mem.scratch.root_acc, &acc);
            mem.scratch.root_pending -= 1;
            if mem.scratch.root_pending == 0 {
                let result = std::mem::take(&mut mem.scratch.root_acc);
                self.0.at_root(mem, result);
            }
        } else if let Some(c) = mem.continuation() {
            self.feed(mem, ctx, c, &acc);
        }
    }

    fn feed<W: Weight>(
        &self,
        mem: &mut NodeMemory<W>,
        ctx: &mut NodeContext<'_, W>,
        key: RKey,
        value: &[u64],
    ) where
        A: Aggregate<W>,
    {
        let ready = match mem.scratch.agg.get_mut(&key) {
            Some((pending, acc)) => {
                self.0.combine(acc, value);
                *pending -= 1;
                *pending == 0
            }
            None => false,
        };
        if ready {
            self.settle(mem, ctx, key);
        }
    }
}

impl<W: Weight, A: Aggregate<W>> Handler<W, NodeMemory<W>> for Convergecast<A> {
    fn start(&self, mem: &mut NodeMemory<W>, ctx: &mut NodeContext<'_, W>) {
        let ending = ending_keys(mem);
        let cont = mem.continuation();
        let base = mem.routing.base;
        mem.scratch.agg.clear();
        for key in slot_keys(mem) {
            let mut pending = mem.routing.down.get(&key).map_or(0, Vec::len);
            if key == base {
                pending += 1;
            }
            if Some(key) == cont && !mem.leader {
                pending += ending.len();
            }
            mem.scratch.agg.insert(key, (pending, self.0.identity()));
        }
        if mem.leader {
            mem.scratch.root_pending = ending.len();
            mem.scratch.root_acc = self.0.identity();
        }
        let own = self.0.input(mem, ctx);
        self.feed(mem, ctx, base, &own);
        let idle: Vec<RKey> = mem
            .scratch
            .agg
            .iter()
            .filter(|(_, (p, _))| *p == 0)
            .map(|(k, _)| *k)
            .collect();
        for key in idle {
            self.settle(mem, ctx, key);
        }
    }

    fn receive(&self, mem: &mut NodeMemory<W>, ctx: &mut NodeContext<'_, W>, _port: Port, msg: &Message) {
        let w = msg.words();
        if w[0] != kind::AGG {
            return;
        }
        self.feed(mem, ctx, (w[1], w[2] as u32), &w[3..]);
    }
}

pub trait BroadcastSource<W: Weight> {
    /// Value a current leader disseminates, if any.
    fn root_value(&self, mem: &NodeMemory<W>) -> Option<Vec<u64>>;

    /// Called once at every member of a fragment whose leader broadcast.
    fn deliver(&self, mem: &mut NodeMemory<W>, ctx: &mut NodeContext<'_, W>, value: &[u64]);

    /// Messages other than the broadcast itself (follow-up traffic started
    /// from `deliver`).
    fn other(&self, _mem: &mut NodeMemory<W>, _ctx: &mut NodeContext<'_, W>, _port: Port, _msg: &Message) {}
}

/// Leader-to-members dissemination, the exact reverse of [`Convergecast`].
pub struct Broadcast<B>(pub B);

impl<B> Broadcast<B> {
    fn process<W: Weight>(
        &self,
        mem: &mut NodeMemory<W>,
        ctx: &mut NodeContext<'_, W>,
        key: RKey,
        value: &[u64],
    ) where
        B: BroadcastSource<W>,
    {
        if let Some(ports) = mem.routing.down.get(&key).cloned() {
            for p in ports {
                let mut words = vec![kind::DOWN, key.0, key.1 as u64];
                words.extend_from_slice(value);
                ctx.send(p, Message::new(words));
            }
        }
        if key == mem.routing.base {
            self.0.deliver(mem, ctx, value);
        }
        if !mem.leader && Some(key) == mem.continuation() {
            for k in ending_keys(mem) {
                self.process(mem, ctx, k, value);
            }
        }
    }
}

impl<W: Weight, B: BroadcastSource<W>> Handler<W, NodeMemory<W>> for Broadcast<B> {
    fn start(&self, mem: &mut NodeMemory<W>, ctx: &mut NodeContext<'_, W>) {
        if !mem.leader {
            return;
        }
        if let Some(value) = self.0.root_value(mem) {
            for k in ending_keys(mem) {
                self.process(mem, ctx, k, &value);
            }
        }
    }

    fn receive(&self, mem: &mut NodeMemory<W>, ctx: &mut NodeContext<'_, W>, port: Port, msg: &Message) {
        let w = msg.words();
        if w[0] == kind::DOWN {
            self.process(mem, ctx, (w[1], w[2] as u32), &w[3..]);
        } else {
            self.0.other(mem, ctx, port, msg);
        }
    }
}
