use rand::Rng;

use crate::graph::Port;
use crate::node::{
    decode_key, encode_key, kind, route_up, BroadcastSource, MarkAcross, Membership, NodeMemory, NONE_WORD,
};
use crate::sim::{Handler, Message, NodeContext};
use crate::weight::Weight;

fn ports<W: Weight>(ctx: &NodeContext<'_, W>) -> Vec<Port> {
    ctx.ports().collect()
}

/// Flood-max over random ranks; ties go to the larger id. Afterwards
/// `scratch.words` holds `[rank, winner]`.
pub struct Elect;

impl<W: Weight> Handler<W, NodeMemory<W>> for Elect {
    fn start(&self, mem: &mut NodeMemory<W>, ctx: &mut NodeContext<'_, W>) {
        let rank: u64 = ctx.rng().random();
        mem.scratch.words = vec![rank, mem.id.0];
        ctx.send_all(&Message::new(vec![kind::ELECT, rank, mem.id.0]));
    }

    fn receive(&self, mem: &mut NodeMemory<W>, ctx: &mut NodeContext<'_, W>, port: Port, msg: &Message) {
        let w = msg.words();
        if w[0] != kind::ELECT || (w[1], w[2]) <= (mem.scratch.words[0], mem.scratch.words[1]) {
            return;
        }
        mem.scratch.words = vec![w[1], w[2]];
        for p in ports(ctx) {
            if p != port {
                ctx.send(p, Message::new(w.to_vec()));
            }
        }
    }
}

/// BFS from the elected root; fills `global.parent`, `children`, `depth`.
pub struct GlobalBfs;

impl<W: Weight> Handler<W, NodeMemory<W>> for GlobalBfs {
    fn start(&self, mem: &mut NodeMemory<W>, ctx: &mut NodeContext<'_, W>) {
        if mem.global.root {
            mem.scratch.seen = true;
            ctx.send_all(&Message::new(vec![kind::BFS, 1]));
        }
    }

    fn receive(&self, mem: &mut NodeMemory<W>, ctx: &mut NodeContext<'_, W>, port: Port, msg: &Message) {
        let w = msg.words();
        match w[0] {
            kind::BFS if !mem.scratch.seen => {
                mem.scratch.seen = true;
                mem.global.parent = Some(port);
                mem.global.depth = w[1];
                ctx.send(port, Message::new(vec![kind::CHILD]));
                for p in ports(ctx) {
                    if p != port {
                        ctx.send(p, Message::new(vec![kind::BFS, w[1] + 1]));
                    }
                }
            }
            kind::CHILD => mem.global.children.push(port),
            _ => {}
        }
    }
}

/// Maximum depth up the global tree, then `2·depth` back down as the
/// diameter estimate.
pub struct Eccentricity;

impl Eccentricity {
    fn report<W: Weight>(mem: &mut NodeMemory<W>, ctx: &mut NodeContext<'_, W>) {
        let deepest = mem.scratch.root_acc.first().copied().unwrap_or(0).max(mem.global.depth);
        match mem.global.parent {
            Some(p) => ctx.send(p, Message::new(vec![kind::DEPTH, deepest])),
            None => Self::announce(mem, ctx, 2 * deepest),
        }
    }

    fn announce<W: Weight>(mem: &mut NodeMemory<W>, ctx: &mut NodeContext<'_, W>, dtilde: u64) {
        mem.global.dtilde = dtilde;
        for &p in &mem.global.children {
            ctx.send(p, Message::new(vec![kind::DTILDE, dtilde]));
        }
    }
}

impl<W: Weight> Handler<W, NodeMemory<W>> for Eccentricity {
    fn start(&self, mem: &mut NodeMemory<W>, ctx: &mut NodeContext<'_, W>) {
        mem.scratch.root_pending = mem.global.children.len();
        mem.scratch.root_acc = vec![0];
        if mem.scratch.root_pending == 0 {
            Self::report(mem, ctx);
        }
    }

    fn receive(&self, mem: &mut NodeMemory<W>, ctx: &mut NodeContext<'_, W>, _port: Port, msg: &Message) {
        let w = msg.words();
        match w[0] {
            kind::DEPTH => {
                mem.scratch.root_acc[0] = mem.scratch.root_acc[0].max(w[1]);
                mem.scratch.root_pending -= 1;
                if mem.scratch.root_pending == 0 {
                    Self::report(mem, ctx);
                }
            }
            kind::DTILDE => Self::announce(mem, ctx, w[1]),
            _ => {}
        }
    }
}

/// The endpoint of an active fragment's LOE tells the far fragment's leader
/// that it is being pointed at.
pub struct Notice;

impl Notice {
    fn up<W: Weight>(mem: &mut NodeMemory<W>, ctx: &mut NodeContext<'_, W>, key: (u64, u32), body: &[u64]) {
        match route_up(mem, key) {
            Some((k, p)) => {
                let mut words = vec![kind::NOTICE_UP, k.0, k.1 as u64];
                words.extend_from_slice(body);
                ctx.send(p, Message::new(words));
            }
            None => {
                if let Some(edge) = decode_key(&body[1..4]) {
                    mem.lead.noticers.push((body[0], edge, true));
                }
            }
        }
    }
}

impl<W: Weight> Handler<W, NodeMemory<W>> for Notice {
    fn start(&self, mem: &mut NodeMemory<W>, ctx: &mut NodeContext<'_, W>) {
        if !mem.frag_active {
            return;
        }
        let Some(key) = mem.frag_loe else { return };
        let Some(p) = mem.port_of(&key) else { return };
        if mem.nbr_frag[p.index()] != mem.frag {
            let mut words = vec![kind::NOTICE, mem.frag];
            words.extend_from_slice(&key.words());
            ctx.send(p, Message::new(words));
        }
    }

    fn receive(&self, mem: &mut NodeMemory<W>, ctx: &mut NodeContext<'_, W>, _port: Port, msg: &Message) {
        let w = msg.words();
        match w[0] {
            kind::NOTICE => {
                let base = mem.routing.base;
                Self::up(mem, ctx, base, &w[1..5]);
            }
            kind::NOTICE_UP => Self::up(mem, ctx, (w[1], w[2] as u32), &w[3..7]),
            _ => {}
        }
    }
}

fn membership<W>(mem: &NodeMemory<W>, level: usize, cluster: (u64, u64)) -> Option<&Membership> {
    mem.covers
        .get(level - 1)?
        .iter()
        .find(|m| m.cluster == (cluster.0 as u32, cluster.1))
}

/// Leaders with unfinished links send one probe up every level-`level`
/// cluster tree they belong to: `[PROBE, round, center, self, target]`,
/// with `target` the fragment this leader is looking for, if any. Each hop
/// remembers where the probe came from; roots collect them in
/// `scratch.items`.
pub struct Probe {
    pub level: usize,
}

impl Probe {
    fn forward<W: Weight>(&self, mem: &mut NodeMemory<W>, ctx: &mut NodeContext<'_, W>, w: &[u64]) {
        match membership(mem, self.level, (w[1], w[2])).map(|m| m.parent) {
            Some(Some(p)) => ctx.send(p, Message::new(w.to_vec())),
            Some(None) => mem.scratch.items.push(w[1..].to_vec()),
            None => {}
        }
    }
}

impl<W: Weight> Handler<W, NodeMemory<W>> for Probe {
    fn start(&self, mem: &mut NodeMemory<W>, ctx: &mut NodeContext<'_, W>) {
        if !mem.leader {
            return;
        }
        let me = mem.id.0;
        let lead = &mem.lead;
        let own = (lead.active && lead.loe.is_some() && !lead.installed.contains(&(me, lead.target)))
            .then_some(lead.target);
        let noticed = lead.noticers.iter().any(|n| !lead.installed.contains(&(n.0, me)));
        if own.is_none() && !noticed {
            return;
        }
        let clusters: Vec<(u32, u64)> = mem
            .covers
            .get(self.level - 1)
            .map(|l| l.iter().map(|m| m.cluster).collect())
            .unwrap_or_default();
        for c in clusters {
            let w = [kind::PROBE, c.0 as u64, c.1, me, own.unwrap_or(NONE_WORD)];
            self.forward(mem, ctx, &w);
        }
    }

    fn receive(&self, mem: &mut NodeMemory<W>, ctx: &mut NodeContext<'_, W>, port: Port, msg: &Message) {
        let w = msg.words();
        if w[0] != kind::PROBE {
            return;
        }
        mem.scratch.ports.insert((w[1], w[2], w[3]), port);
        self.forward(mem, ctx, w);
    }
}

/// Cluster roots that heard both ends of a link report back to both:
/// `[SUCCESS, round, center, a, b, side, root]`. Runs on the state left by
/// [`Probe`].
pub struct Success;

impl Success {
    fn deliver<W: Weight>(mem: &mut NodeMemory<W>, ctx: &mut NodeContext<'_, W>, w: &[u64]) {
        let dest = if w[5] == 0 { w[3] } else { w[4] };
        if dest == mem.id.0 {
            let cand = (w[6], w[1], w[2]);
            let best = mem.lead.routes.entry((w[3], w[4])).or_insert(cand);
            *best = (*best).max(cand);
        } else if let Some(&p) = mem.scratch.ports.get(&(w[1], w[2], dest)) {
            ctx.send(p, Message::new(w.to_vec()));
        }
    }
}

impl<W: Weight> Handler<W, NodeMemory<W>> for Success {
    fn start(&self, mem: &mut NodeMemory<W>, ctx: &mut NodeContext<'_, W>) {
        let items = std::mem::take(&mut mem.scratch.items);
        for it in &items {
            let (round, center, x, t) = (it[0], it[1], it[2], it[3]);
            if t == NONE_WORD || !items.iter().any(|o| o[0] == round && o[1] == center && o[2] == t) {
                continue;
            }
            for side in 0..2 {
                let w = [kind::SUCCESS, round, center, x, t, side, mem.id.0];
                Self::deliver(mem, ctx, &w);
            }
        }
    }

    fn receive(&self, mem: &mut NodeMemory<W>, ctx: &mut NodeContext<'_, W>, _port: Port, msg: &Message) {
        if msg.tag() == kind::SUCCESS {
            Self::deliver(mem, ctx, msg.words());
        }
    }
}

/// Both ends of a link climb the chosen cluster tree, writing the link's
/// hop-by-hop entries: `[INSTALL, a, b, side, round, center]`.
pub struct Install {
    pub level: usize,
}

impl Install {
    fn climb<W: Weight>(&self, mem: &mut NodeMemory<W>, ctx: &mut NodeContext<'_, W>, w: &[u64], from: Option<Port>) {
        let parent = membership(mem, self.level, (w[4], w[5])).and_then(|m| m.parent);
        let entry = mem.links.entry((w[1], w[2])).or_default();
        let side = w[3] as usize;
        entry.toward[side] = from;
        entry.to_root[side] = parent;
        if let Some(p) = parent {
            ctx.send(p, Message::new(w.to_vec()));
        }
    }
}

impl<W: Weight> Handler<W, NodeMemory<W>> for Install {
    fn start(&self, mem: &mut NodeMemory<W>, ctx: &mut NodeContext<'_, W>) {
        if !mem.leader {
            return;
        }
        let me = mem.id.0;
        let fresh: Vec<_> = mem
            .lead
            .routes
            .iter()
            .filter(|(k, _)| !mem.lead.installed.contains(k))
            .map(|(k, v)| (*k, *v))
            .collect();
        for ((a, b), (_, round, center)) in fresh {
            mem.lead.installed.insert((a, b));
            let side = if me == a { 0 } else { 1 };
            self.climb(mem, ctx, &[kind::INSTALL, a, b, side, round, center], None);
        }
    }

    fn receive(&self, mem: &mut NodeMemory<W>, ctx: &mut NodeContext<'_, W>, port: Port, msg: &Message) {
        if msg.tag() == kind::INSTALL {
            self.climb(mem, ctx, msg.words(), Some(port));
        }
    }
}

pub enum Hop {
    Arrived,
    Next(Port),
    Lost,
}

/// Next step of a message on link `(a, b)` heading to side `dir`.
pub fn link_hop<W>(mem: &NodeMemory<W>, a: u64, b: u64, dir: u64) -> Hop {
    let dest = if dir == 0 { a } else { b };
    if mem.id.0 == dest {
        return Hop::Arrived;
    }
    match mem.links.get(&(a, b)).and_then(|e| e.next_hop(dir as usize)) {
        Some(p) => Hop::Next(p),
        None => Hop::Lost,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LinkMode {
    /// Leaders tell every noticer `[active, w, lo, hi]`.
    Status,
    ToParent,
    ToChildren,
}

/// Leader-to-leader mail over installed links: `[LINK, a, b, dir, payload]`.
/// Arrivals land in `lead.inbox` as `(sender, payload)`.
pub struct LinkMail(pub LinkMode);

impl<W: Weight> Handler<W, NodeMemory<W>> for LinkMail {
    fn start(&self, mem: &mut NodeMemory<W>, ctx: &mut NodeContext<'_, W>) {
        if !mem.leader {
            return;
        }
        let me = mem.id.0;
        let mut out: Vec<(u64, u64, u64, Vec<u64>)> = Vec::new();
        match self.0 {
            LinkMode::Status => {
                let mut v = vec![mem.lead.active as u64];
                v.extend_from_slice(&encode_key(mem.lead.loe));
                for n in &mem.lead.noticers {
                    out.push((n.0, me, 0, v.clone()));
                }
            }
            LinkMode::ToParent => {
                if let (Some(p), Some(v)) = (mem.lead.cv_parent, &mem.lead.outbox) {
                    if mem.lead.active {
                        out.push((me, p, 1, v.clone()));
                    }
                }
            }
            LinkMode::ToChildren => {
                if let Some(v) = &mem.lead.outbox {
                    if mem.lead.active {
                        for &c in &mem.lead.cv_children {
                            out.push((c, me, 0, v.clone()));
                        }
                    }
                }
            }
        }
        for (a, b, dir, payload) in out {
            let mut w = vec![kind::LINK, a, b, dir];
            w.extend(payload);
            self.relay(mem, ctx, &w);
        }
    }

    fn receive(&self, mem: &mut NodeMemory<W>, ctx: &mut NodeContext<'_, W>, _port: Port, msg: &Message) {
        if msg.tag() == kind::LINK {
            self.relay(mem, ctx, msg.words());
        }
    }
}

impl LinkMail {
    fn relay<W: Weight>(&self, mem: &mut NodeMemory<W>, ctx: &mut NodeContext<'_, W>, w: &[u64]) {
        match link_hop(mem, w[1], w[2], w[3]) {
            Hop::Arrived => {
                let sender = if w[3] == 0 { w[2] } else { w[1] };
                mem.lead.inbox.push((sender, w[4..].to_vec()));
            }
            Hop::Next(p) => ctx.send(p, Message::new(w.to_vec())),
            Hop::Lost => {}
        }
    }
}

/// Absorbed leaders walk their link to the absorbing leader, laying down
/// routing key `(self, level)`: `[ATTACH, a, b, dir, self, level]`. The far
/// end answers `[MERGE_WITH, a, b, dir, final]` with the id the merged
/// fragment will carry.
pub struct Attach {
    pub level: u32,
}

impl Attach {
    fn walk<W: Weight>(&self, mem: &mut NodeMemory<W>, ctx: &mut NodeContext<'_, W>, w: &[u64]) {
        match link_hop(mem, w[1], w[2], w[3]) {
            Hop::Arrived if w[0] == kind::ATTACH => {
                let fin = mem.lead.merge_target.unwrap_or(mem.id.0);
                let back = [kind::MERGE_WITH, w[1], w[2], 1 - w[3], fin];
                self.walk(mem, ctx, &back);
            }
            Hop::Arrived => mem.lead.final_id = w[4],
            Hop::Next(p) => {
                if w[0] == kind::ATTACH {
                    mem.routing.up.insert((w[4], w[5] as u32), p);
                }
                ctx.send(p, Message::new(w.to_vec()));
            }
            Hop::Lost => {}
        }
    }
}

impl<W: Weight> Handler<W, NodeMemory<W>> for Attach {
    fn start(&self, mem: &mut NodeMemory<W>, ctx: &mut NodeContext<'_, W>) {
        if !mem.leader {
            return;
        }
        let Some(t) = mem.lead.merge_target else { return };
        let me = mem.id.0;
        let (a, b, dir) = if mem.links.contains_key(&(me, t)) { (me, t, 1) } else { (t, me, 0) };
        self.walk(mem, ctx, &[kind::ATTACH, a, b, dir, me, self.level as u64]);
    }

    fn receive(&self, mem: &mut NodeMemory<W>, ctx: &mut NodeContext<'_, W>, port: Port, msg: &Message) {
        let w = msg.words();
        match w[0] {
            kind::ATTACH => {
                mem.routing.add_down((w[4], w[5] as u32), port);
                self.walk(mem, ctx, w);
            }
            kind::MERGE_WITH => self.walk(mem, ctx, w),
            _ => {}
        }
    }
}

/// Leaders of fragments that merge tell members the new fragment id and
/// whether the fragment's LOE joins the tree: `[new id, mark]`.
pub struct Relabel;

impl<W: Weight> BroadcastSource<W> for Relabel {
    fn root_value(&self, mem: &NodeMemory<W>) -> Option<Vec<u64>> {
        let lead = &mem.lead;
        let id = if lead.merge_target.is_some() { lead.final_id } else { mem.frag };
        (lead.merge_target.is_some() || lead.mark_loe).then(|| vec![id, lead.mark_loe as u64])
    }

    fn deliver(&self, mem: &mut NodeMemory<W>, ctx: &mut NodeContext<'_, W>, value: &[u64]) {
        mem.frag = value[0];
        if value[1] == 1 {
            if let Some(p) = mem.frag_loe.as_ref().and_then(|k| mem.port_of(k)) {
                MarkAcross::mark(mem, ctx, p);
            }
        }
    }

    fn other(&self, mem: &mut NodeMemory<W>, _ctx: &mut NodeContext<'_, W>, port: Port, msg: &Message) {
        MarkAcross::receive(mem, port, msg);
    }
}

/// Every leader sends `[UPCAST, leader, label, w, lo, hi, target label]` up
/// the global tree; hops remember the way back in `scratch.table`.
pub struct Upcast;

impl Upcast {
    fn forward<W: Weight>(mem: &mut NodeMemory<W>, ctx: &mut NodeContext<'_, W>, w: &[u64]) {
        match mem.global.parent {
            Some(p) => ctx.send(p, Message::new(w.to_vec())),
            None => mem.scratch.items.push(w[1..].to_vec()),
        }
    }
}

impl<W: Weight> Handler<W, NodeMemory<W>> for Upcast {
    fn start(&self, mem: &mut NodeMemory<W>, ctx: &mut NodeContext<'_, W>) {
        if !mem.leader {
            return;
        }
        let mut w = vec![kind::UPCAST, mem.id.0, mem.label];
        w.extend_from_slice(&encode_key(mem.lead.loe));
        w.push(mem.lead.target);
        Self::forward(mem, ctx, &w);
    }

    fn receive(&self, mem: &mut NodeMemory<W>, ctx: &mut NodeContext<'_, W>, port: Port, msg: &Message) {
        let w = msg.words();
        if w[0] == kind::UPCAST {
            mem.scratch.table.insert(w[1], port);
            Self::forward(mem, ctx, w);
        }
    }
}

/// The root merges labels along each label's lightest edge and sends every
/// leader `[DOWNCAST, leader, new label, selected]`. Runs on the state left
/// by [`Upcast`].
pub struct Downcast;

impl Downcast {
    fn deliver<W: Weight>(mem: &mut NodeMemory<W>, ctx: &mut NodeContext<'_, W>, w: &[u64]) {
        if w[1] == mem.id.0 {
            mem.lead.final_id = w[2];
            mem.lead.mark_loe = w[3] == 1;
        } else if let Some(&p) = mem.scratch.table.get(&w[1]) {
            ctx.send(p, Message::new(w.to_vec()));
        }
    }
}

impl<W: Weight> Handler<W, NodeMemory<W>> for Downcast {
    fn start(&self, mem: &mut NodeMemory<W>, ctx: &mut NodeContext<'_, W>) {
        if mem.global.parent.is_some() {
            return;
        }
        let items = std::mem::take(&mut mem.scratch.items);
        let (labels, decisions) = merge_labels::<W>(&items);
        mem.global.labels = labels;
        for (leader, label, selected) in decisions {
            Self::deliver(mem, ctx, &[kind::DOWNCAST, leader, label, selected as u64]);
        }
    }

    fn receive(&self, mem: &mut NodeMemory<W>, ctx: &mut NodeContext<'_, W>, _port: Port, msg: &Message) {
        if msg.tag() == kind::DOWNCAST {
            Self::deliver(mem, ctx, msg.words());
        }
    }
}

/// Local computation at the root: items are `[leader, label, w, lo, hi,
/// target label]`. Returns the new label count and, per leader, its new
/// label and whether its edge was selected.
pub fn merge_labels<W: Weight>(items: &[Vec<u64>]) -> (u64, Vec<(u64, u64, bool)>) {
    use std::collections::BTreeMap;
    let mut best: BTreeMap<u64, (crate::graph::EdgeKey<W>, usize)> = BTreeMap::new();
    let mut index: BTreeMap<u64, usize> = BTreeMap::new();
    for (i, it) in items.iter().enumerate() {
        let n = index.len();
        index.entry(it[1]).or_insert(n);
        if let Some(k) = decode_key::<W>(&it[2..5]) {
            let e = best.entry(it[1]).or_insert((k, i));
            if k < e.0 {
                *e = (k, i);
            }
        }
    }
    for it in items {
        let n = index.len();
        if it[5] != NONE_WORD {
            index.entry(it[5]).or_insert(n);
        }
    }
    let mut uf = crate::oracle::UnionFind::new(index.len());
    let mut selected = vec![false; items.len()];
    for (&label, &(_, i)) in &best {
        selected[i] = true;
        uf.union(index[&label], index[&items[i][5]]);
    }
    let mut rep_label: BTreeMap<usize, u64> = BTreeMap::new();
    for (&label, &i) in &index {
        let r = uf.find(i);
        let e = rep_label.entry(r).or_insert(label);
        *e = (*e).max(label);
    }
    let decisions = items
        .iter()
        .enumerate()
        .map(|(i, it)| (it[0], rep_label[&uf.find(index[&it[1]])], selected[i]))
        .collect();
    (rep_label.len() as u64, decisions)
}

/// Leaders pass the new label (and their edge, if selected) to members:
/// `[label, selected, w, lo, hi]`.
pub struct LabelCast;

impl<W: Weight> BroadcastSource<W> for LabelCast {
    fn root_value(&self, mem: &NodeMemory<W>) -> Option<Vec<u64>> {
        let mut v = vec![mem.lead.final_id, mem.lead.mark_loe as u64];
        v.extend_from_slice(&encode_key(mem.lead.loe));
        Some(v)
    }

    fn deliver(&self, mem: &mut NodeMemory<W>, ctx: &mut NodeContext<'_, W>, value: &[u64]) {
        mem.label = value[0];
        if value[1] == 1 {
            if let Some(p) = decode_key(&value[2..5]).and_then(|k| mem.port_of(&k)) {
                MarkAcross::mark(mem, ctx, p);
            }
        }
    }

    fn other(&self, mem: &mut NodeMemory<W>, _ctx: &mut NodeContext<'_, W>, port: Port, msg: &Message) {
        MarkAcross::receive(mem, port, msg);
    }
}
