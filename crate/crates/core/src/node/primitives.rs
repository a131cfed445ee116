use super::slots::{route_up, BroadcastSource};
use super::{kind, NodeMemory};
use crate::graph::Port;
use crate::sim::{Handler, Message, NodeContext};
use crate::weight::Weight;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExchangeField {
    /// Own id; fills `nbr`.
    Id,
    /// Fragment id; fills `nbr_frag`.
    Frag,
    /// Phase label; fills `nbr_frag` as well, since labels replace fragment
    /// ids once fragments stop merging locally.
    Label,
}

/// One message per port in each direction.
pub struct Exchange(pub ExchangeField);

impl<W: Weight> Handler<W, NodeMemory<W>> for Exchange {
    fn start(&self, mem: &mut NodeMemory<W>, ctx: &mut NodeContext<'_, W>) {
        let (k, v) = match self.0 {
            ExchangeField::Id => (kind::ID, mem.id.0),
            ExchangeField::Frag => (kind::FRAG, mem.frag),
            ExchangeField::Label => (kind::LABEL, mem.label),
        };
        ctx.send_all(&Message::new(vec![k, v]));
    }

    fn receive(&self, mem: &mut NodeMemory<W>, _ctx: &mut NodeContext<'_, W>, port: Port, msg: &Message) {
        let w = msg.words();
        match w[0] {
            kind::ID => mem.nbr[port.index()] = w[1],
            kind::FRAG | kind::LABEL => mem.nbr_frag[port.index()] = w[1],
            _ => {}
        }
    }
}

/// Adds the edge behind `port` to the local tree and tells the other end.
pub struct MarkAcross;

impl MarkAcross {
    pub fn mark<W: Weight>(mem: &mut NodeMemory<W>, ctx: &mut NodeContext<'_, W>, port: Port) {
        if mem.tree.insert(port) {
            ctx.send(port, Message::new(vec![kind::MARK]));
        }
    }

    pub fn receive<W: Weight>(mem: &mut NodeMemory<W>, port: Port, msg: &Message) -> bool {
        if msg.tag() == kind::MARK {
            mem.tree.insert(port);
            true
        } else {
            false
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MailDirection {
    /// Across the fragment's own lightest outgoing edge.
    ToParent,
    /// Across every edge on which a neighbouring fragment proposed.
    ToChildren,
}

/// Leader-to-leader mail between adjacent fragments: down the sender's tree,
/// across the edge, up the receiver's chains. Payloads are at most 4 words;
/// receivers filter by sender id.
pub struct LeaderMail(pub MailDirection);

impl LeaderMail {
    fn forward_up<W: Weight>(mem: &mut NodeMemory<W>, ctx: &mut NodeContext<'_, W>, key: (u64, u32), body: &[u64]) {
        match route_up(mem, key) {
            Some((k, p)) => {
                let mut words = vec![kind::MAIL_UP, k.0, k.1 as u64];
                words.extend_from_slice(body);
                ctx.send(p, Message::new(words));
            }
            None => mem.lead.inbox.push((body[0], body[1..].to_vec())),
        }
    }
}

impl<W: Weight> BroadcastSource<W> for LeaderMail {
    fn root_value(&self, mem: &NodeMemory<W>) -> Option<Vec<u64>> {
        let payload = mem.lead.outbox.as_ref()?;
        let mut v = vec![mem.frag];
        v.extend_from_slice(payload);
        Some(v)
    }

    fn deliver(&self, mem: &mut NodeMemory<W>, ctx: &mut NodeContext<'_, W>, value: &[u64]) {
        let mut words = vec![kind::MAIL_ACROSS];
        words.extend_from_slice(value);
        let msg = Message::new(words);
        match self.0 {
            MailDirection::ToParent => {
                if let Some(p) = mem.frag_loe.as_ref().and_then(|k| mem.port_of(k)) {
                    ctx.send(p, msg);
                }
            }
            MailDirection::ToChildren => {
                for p in mem.cand_in.clone() {
                    ctx.send(p, msg.clone());
                }
            }
        }
    }

    fn other(&self, mem: &mut NodeMemory<W>, ctx: &mut NodeContext<'_, W>, _port: Port, msg: &Message) {
        let w = msg.words();
        match w[0] {
            kind::MAIL_ACROSS => {
                let base = mem.routing.base;
                Self::forward_up(mem, ctx, base, &w[1..]);
            }
            kind::MAIL_UP => Self::forward_up(mem, ctx, (w[1], w[2] as u32), &w[3..]),
            _ => {}
        }
    }
}
