//! Per-node memory shared by the fragment-based protocols, plus the generic
//! handlers they are assembled from.
//!
//! Everything under this module is node-local code: handlers see one node's
//! memory, its ports and the messages it receives.

mod primitives;
mod slots;

use std::collections::{BTreeMap, BTreeSet};

use crate::graph::{EdgeKey, NodeId, Port};
use crate::sim::NodeInfo;
use crate::weight::Weight;

pub use primitives::{Exchange, ExchangeField, LeaderMail, MailDirection, MarkAcross};
pub use slots::{route_up, Aggregate, Broadcast, BroadcastSource, Convergecast};

/// Routing key: a fragment (or former leader) id and a level.
pub type RKey = (u64, u32);

/// Sentinel for "no edge" inside fixed-width payloads (`lo == hi`).
pub const NONE_WORD: u64 = u64::MAX;

#[derive(Debug, Clone, Default)]
pub struct Routing {
    pub up: BTreeMap<RKey, Port>,
    pub down: BTreeMap<RKey, Vec<Port>>,
    /// Chain that starts at this node's base fragment tree.
    pub base: RKey,
    /// Level at which this node, as a leader, was absorbed.
    pub absorbed_at: Option<u32>,
}

impl Routing {
    pub fn add_down(&mut self, key: RKey, port: Port) {
        let ports = self.down.entry(key).or_default();
        if !ports.contains(&port) {
            ports.push(port);
        }
    }
}

/// State a fragment leader keeps between sub-procedures.
#[derive(Debug, Clone)]
pub struct LeaderState<W> {
    pub loe: Option<EdgeKey<W>>,
    pub target: u64,
    pub size: u64,
    pub active: bool,
    pub target_active: bool,
    pub target_loe: Option<EdgeKey<W>>,
    pub cv_parent: Option<u64>,
    pub cv_children: Vec<u64>,
    pub color: u64,
    pub matched: Option<u64>,
    /// Outgoing leader-to-leader payload for the next mail run.
    pub outbox: Option<Vec<u64>>,
    pub inbox: Vec<(u64, Vec<u64>)>,
    /// Fragments whose lightest edge points at this fragment.
    pub noticers: Vec<(u64, EdgeKey<W>, bool)>,
    pub merge_target: Option<u64>,
    /// Whether this fragment's own LOE joins the tree in the current merge.
    pub mark_loe: bool,
    pub final_id: u64,
    /// Best successful cluster root per link, as `(root, round, center)`.
    pub routes: BTreeMap<(u64, u64), (u64, u64, u64)>,
    pub installed: BTreeSet<(u64, u64)>,
}

impl<W> Default for LeaderState<W> {
    fn default() -> Self {
        LeaderState {
            loe: None,
            target: 0,
            size: 0,
            active: false,
            target_active: false,
            target_loe: None,
            cv_parent: None,
            cv_children: Vec::new(),
            color: 0,
            matched: None,
            outbox: None,
            inbox: Vec::new(),
            noticers: Vec::new(),
            merge_target: None,
            mark_loe: false,
            final_id: 0,
            routes: BTreeMap::new(),
            installed: BTreeSet::new(),
        }
    }
}

/// Path between two leaders, stored hop by hop. Side 0 is the requesting
/// fragment, side 1 the fragment its lightest edge points at.
#[derive(Debug, Clone, Default)]
pub struct LinkEntry {
    /// Next port toward side `s`, installed from that side's probe path.
    pub toward: [Option<Port>; 2],
    /// Port toward the chosen cluster root on side `s`'s probe path.
    pub to_root: [Option<Port>; 2],
}

impl LinkEntry {
    /// Next hop for a message heading to side `s`; `None` at the endpoint.
    pub fn next_hop(&self, s: usize) -> Option<Port> {
        self.toward[s].or(self.to_root[1 - s])
    }
}

/// One cluster of a neighbourhood cover, as seen by a member.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Membership {
    pub cluster: (u32, u64),
    pub parent: Option<Port>,
    pub children: Vec<Port>,
}

#[derive(Debug, Clone, Default)]
pub struct GlobalTree {
    pub parent: Option<Port>,
    pub children: Vec<Port>,
    pub root: bool,
    pub depth: u64,
    pub dtilde: u64,
    /// At the root: distinct labels after the latest Phase-3 merge.
    pub labels: u64,
}

#[derive(Debug, Clone)]
pub struct NodeMemory<W> {
    pub id: NodeId,
    pub degree: usize,
    pub n: usize,
    /// Neighbour id per port, once learned.
    pub nbr: Vec<u64>,
    pub nbr_frag: Vec<u64>,
    pub frag: u64,
    pub leader: bool,
    /// Incident MST edges found so far.
    pub tree: BTreeSet<Port>,
    pub routing: Routing,
    /// The current fragment's lightest outgoing edge, as broadcast by its leader.
    pub frag_loe: Option<EdgeKey<W>>,
    pub frag_active: bool,
    pub lead: LeaderState<W>,
    /// Ports over which an active neighbouring fragment proposed its LOE.
    pub cand_in: Vec<Port>,
    pub links: BTreeMap<(u64, u64), LinkEntry>,
    pub covers: Vec<Vec<Membership>>,
    pub global: GlobalTree,
    pub label: u64,
    pub scratch: Scratch,
}

/// Per-run working state, cleared by the orchestrators between runs.
#[derive(Debug, Clone, Default)]
pub struct Scratch {
    pub agg: BTreeMap<RKey, (usize, Vec<u64>)>,
    pub root_pending: usize,
    pub root_acc: Vec<u64>,
    pub seen: bool,
    pub parent: Option<Port>,
    pub children: Vec<Port>,
    pub words: Vec<u64>,
    pub ports: BTreeMap<(u64, u64, u64), Port>,
    pub table: BTreeMap<u64, Port>,
    pub items: Vec<Vec<u64>>,
}

impl<W> From<NodeInfo> for NodeMemory<W> {
    fn from(info: NodeInfo) -> Self {
        let id = info.id.0;
        NodeMemory {
            id: info.id,
            degree: info.degree,
            n: info.network_size,
            nbr: vec![NONE_WORD; info.degree],
            nbr_frag: vec![NONE_WORD; info.degree],
            frag: id,
            leader: true,
            tree: BTreeSet::new(),
            routing: Routing {
                base: (id, 1),
                ..Routing::default()
            },
            frag_loe: None,
            frag_active: false,
            lead: LeaderState::default(),
            cand_in: Vec::new(),
            links: BTreeMap::new(),
            covers: Vec::new(),
            global: GlobalTree::default(),
            label: id,
            scratch: Scratch::default(),
        }
    }
}

impl<W> LeaderState<W> {
    /// Merge decision after matching: matched pairs orient from lower to
    /// higher id, unmatched active fragments attach along their LOE.
    pub fn decide_merge(&mut self, own: u64) {
        self.merge_target = None;
        self.mark_loe = false;
        if !self.active {
            return;
        }
        match self.matched {
            None => {
                self.mark_loe = true;
                self.merge_target = Some(self.target);
            }
            Some(p) => {
                self.mark_loe = Some(p) == self.cv_parent;
                self.merge_target = (own < p).then_some(p);
            }
        }
    }
}

impl<W: Weight> NodeMemory<W> {
    /// Key of the edge behind `port`; requires the neighbour id.
    pub fn edge_key(&self, port: Port, weight: W) -> EdgeKey<W> {
        EdgeKey::new(weight, self.id, NodeId(self.nbr[port.index()]))
    }

    /// Port carrying edge `key`, if incident here.
    pub fn port_of(&self, key: &EdgeKey<W>) -> Option<Port> {
        if key.lo != self.id && key.hi != self.id {
            return None;
        }
        let other = key.other(self.id).0;
        self.nbr
            .iter()
            .position(|&x| x == other)
            .map(Port::from_index)
    }

    /// Continuation key of a former leader.
    pub fn continuation(&self) -> Option<RKey> {
        self.routing.absorbed_at.map(|l| (self.id.0, l))
    }

    pub fn reset_scratch(&mut self) {
        self.scratch = Scratch::default();
    }

    /// Replaces the level-1 tree with a fresh parent/children pair.
    pub fn set_base_tree(&mut self, parent: Option<Port>, children: Vec<Port>) {
        let base = (self.frag, 1);
        self.routing.up.clear();
        self.routing.down.clear();
        self.routing.base = base;
        if let Some(p) = parent {
            self.routing.up.insert(base, p);
        }
        if !children.is_empty() {
            self.routing.down.insert(base, children);
        }
    }
}

pub fn encode_key<W: Weight>(key: Option<EdgeKey<W>>) -> [u64; 3] {
    match key {
        Some(k) => k.words(),
        None => [0, NONE_WORD, NONE_WORD],
    }
}

pub fn decode_key<W: Weight>(words: &[u64]) -> Option<EdgeKey<W>> {
    (words[1] != words[2]).then(|| EdgeKey::from_words(words))
}

/// Message kinds. Each sub-procedure uses its own range so stray messages are
/// easy to spot.
pub mod kind {
    pub const ID: u64 = 1;
    pub const FRAG: u64 = 2;
    pub const LABEL: u64 = 3;
    pub const AGG: u64 = 10;
    pub const DOWN: u64 = 11;
    pub const MAIL_DOWN: u64 = 20;
    pub const MAIL_ACROSS: u64 = 21;
    pub const MAIL_UP: u64 = 22;
    pub const MARK: u64 = 23;
    pub const CAND: u64 = 30;
    pub const STATUS: u64 = 31;
    pub const STATUS_UP: u64 = 32;
    pub const FLOOD: u64 = 40;
    pub const BFS: u64 = 41;
    pub const CHILD: u64 = 42;
    pub const CONNECT: u64 = 43;
    pub const NOTICE: u64 = 50;
    pub const NOTICE_UP: u64 = 51;
    pub const PROBE: u64 = 60;
    pub const SUCCESS: u64 = 61;
    pub const INSTALL: u64 = 62;
    pub const LINK: u64 = 70;
    pub const ATTACH: u64 = 71;
    pub const MERGE_WITH: u64 = 72;
    pub const ELECT: u64 = 80;
    pub const DEPTH: u64 = 81;
    pub const DTILDE: u64 = 82;
    pub const UPCAST: u64 = 90;
    pub const DOWNCAST: u64 = 91;
    pub const WAVE: u64 = 100;
    pub const JOIN: u64 = 101;
}
