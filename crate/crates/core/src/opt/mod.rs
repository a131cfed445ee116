//! MST in near-optimal time and messages.
//!
//! Pipeline: diameter estimate and global BFS tree, controlled GHS for
//! fragments of size about `sqrt(n)`, cover-guided local merging while
//! fragments are small relative to the diameter, then label merging over
//! the global tree.

mod protocol;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::cghs::{self, tree_edges, LoeAgg, LoeCast};
use crate::cover;
use crate::error::{Error, Result};
use crate::graph::WeightedGraph;
use crate::matching::{maximal_matching, LeaderComm};
use crate::node::{decode_key, Broadcast, Convergecast, Exchange, ExchangeField, Membership, NodeMemory};
use crate::oracle::{MstResult, Provenance};
use crate::sim::{default_round_limit, Driver, Handler, Network, RunMetrics, DEFAULT_WORD_BUDGET};
use crate::weight::Weight;

pub use protocol::merge_labels;
use protocol::{
    Attach, Downcast, Eccentricity, Elect, GlobalBfs, Install, LabelCast, LinkMail, LinkMode, Notice, Probe,
    Relabel, Success, Upcast,
};

pub const ELECTION: &str = "election";
pub const FINDLIGHTEST: &str = "findlightest";
pub const FINDPATH: &str = "findpath";
pub const MATCHING: &str = "matching";
pub const MERGE: &str = "merge";
pub const PHASE3: &str = "phase3";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlgoConfig {
    /// Cover radius constant: level `i` uses radius `12·2^i·c1·sqrt(n)`.
    pub c1: f64,
    /// Fragment size constant: a fragment is active in iteration `i` while
    /// it has at most `2^i·c2·sqrt(n)` nodes.
    pub c2: f64,
    /// Local merging is skipped when the diameter estimate is at most
    /// `c_skip·sqrt(n)`.
    pub c_skip: f64,
    pub word_budget: usize,
    /// Per sub-run round limit; `None` picks [`default_round_limit`].
    pub round_limit: Option<u64>,
    /// Verify covers (rebuilding failures), routing tables and per-iteration
    /// weak diameters.
    pub verify: bool,
}

impl Default for AlgoConfig {
    fn default() -> Self {
        AlgoConfig {
            c1: 1.0,
            c2: 1.0,
            c_skip: 4.0,
            word_budget: DEFAULT_WORD_BUDGET,
            round_limit: None,
            verify: cfg!(debug_assertions),
        }
    }
}

impl AlgoConfig {
    fn check(&self) -> Result<()> {
        if !(self.c1 >= 1.0 && self.c2 >= 1.0 && self.c_skip > 0.0) {
            return Err(Error::Parameter("c1, c2 must be at least 1 and c_skip positive".into()));
        }
        Ok(())
    }

    pub fn cover_radius(&self, n: usize, i: u32) -> u64 {
        (12.0 * f64::from(1u32 << i) * self.c1 * (n as f64).sqrt()).ceil() as u64
    }
}

/// State after one local-merging iteration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationTrace {
    pub iteration: u32,
    pub cover_radius: u64,
    /// The global BFS tree served as the cover.
    pub cover_reused: bool,
    pub active: usize,
    pub fragments: usize,
    pub count_bound: f64,
    /// Empty unless verification is on.
    pub weak_diameters: Vec<u32>,
    pub diameter_bound: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct OptTrace {
    pub dtilde: u64,
    pub cghs_iterations: u32,
    pub cghs_fragments: usize,
    pub phase2_skipped: bool,
    pub phase2: Vec<IterationTrace>,
    /// Distinct labels before the first and after every label-merging step.
    pub phase3_labels: Vec<u64>,
}

#[derive(Debug, Clone)]
pub struct OptRun {
    pub mst: MstResult,
    pub metrics: RunMetrics,
    pub trace: OptTrace,
}

fn run<W: Weight, H: Handler<W, NodeMemory<W>>>(
    net: &mut Network<'_, W>,
    tag: &str,
    handler: H,
    states: &mut [NodeMemory<W>],
    limit: u64,
) -> Result<u64> {
    cghs::run(net, tag, handler, states, limit)
}

/// Like [`run`] but keeps the scratch state of the previous run.
fn resume<W: Weight, H: Handler<W, NodeMemory<W>>>(
    net: &mut Network<'_, W>,
    tag: &str,
    handler: H,
    states: &mut [NodeMemory<W>],
    limit: u64,
) -> Result<u64> {
    net.run(tag, &Driver::new(handler), states, limit)
}

fn fresh_states<W: Weight>(net: &Network<'_, W>) -> Vec<NodeMemory<W>> {
    (0..net.n()).map(|x| net.node_info(x).into()).collect()
}

/// Elects a root, builds a BFS tree from it and sets `global.dtilde` to
/// twice the root's eccentricity at every node.
fn elect_and_measure<W: Weight>(net: &mut Network<'_, W>, states: &mut [NodeMemory<W>], limit: u64) -> Result<u64> {
    run(net, ELECTION, Elect, states, limit)?;
    for s in states.iter_mut() {
        s.global = Default::default();
        s.global.root = s.scratch.words[1] == s.id.0;
    }
    run(net, ELECTION, GlobalBfs, states, limit)?;
    run(net, ELECTION, Eccentricity, states, limit)?;
    Ok(states.first().map_or(0, |s| s.global.dtilde))
}

/// Runs the election and BFS on its own; returns `D̃` with `D <= D̃ <= 2D`.
pub fn estimate_diameter<W: Weight>(g: &WeightedGraph<W>, seed: u64) -> Result<(u64, RunMetrics)> {
    let mut net = Network::new(g, seed);
    let mut states = fresh_states(&net);
    let d = elect_and_measure(&mut net, &mut states, default_round_limit(g.n()))?;
    Ok((d, net.into_metrics()))
}

struct LinkComm<'a, 'g, W> {
    net: &'a mut Network<'g, W>,
    limit: u64,
}

impl<W: Weight> LeaderComm<W> for LinkComm<'_, '_, W> {
    fn mail(&mut self, states: &mut [NodeMemory<W>], to_children: bool) -> Result<()> {
        let mode = if to_children { LinkMode::ToChildren } else { LinkMode::ToParent };
        run(self.net, MATCHING, LinkMail(mode), states, self.limit)?;
        Ok(())
    }
}

/// Largest shortest-path distance in `g` between members of one fragment.
pub fn weak_diameters<W: Weight>(g: &WeightedGraph<W>, states: &[NodeMemory<W>]) -> Vec<u32> {
    let mut groups: BTreeMap<u64, Vec<usize>> = BTreeMap::new();
    for (x, s) in states.iter().enumerate() {
        groups.entry(s.frag).or_default().push(x);
    }
    groups
        .values()
        .map(|members| {
            members
                .iter()
                .map(|&src| {
                    let dist = crate::graph::bfs_distances(g, src);
                    members.iter().filter_map(|&y| dist[y]).max().unwrap_or(0)
                })
                .max()
                .unwrap_or(0)
        })
        .collect()
}

/// Every `up` entry has the matching `down` entry on the other side of the
/// edge and vice versa.
pub fn routing_reciprocal<W: Weight>(g: &WeightedGraph<W>, states: &[NodeMemory<W>]) -> bool {
    states.iter().enumerate().all(|(x, s)| {
        s.routing.up.iter().all(|(k, &p)| {
            let (y, back) = g.across(x, p);
            states[y].routing.down.get(k).is_some_and(|d| d.contains(&back))
        }) && s.routing.down.iter().all(|(k, ports)| {
            ports.iter().all(|&p| {
                let (y, back) = g.across(x, p);
                states[y].routing.up.get(k) == Some(&back)
            })
        })
    })
}

fn leaders<W>(states: &[NodeMemory<W>]) -> usize {
    states.iter().filter(|s| s.leader).count()
}

fn global_tree_cover<W>(states: &[NodeMemory<W>]) -> Vec<Vec<Membership>> {
    states
        .iter()
        .map(|s| {
            vec![Membership {
                cluster: (0, 0),
                parent: s.global.parent,
                children: s.global.children.clone(),
            }]
        })
        .collect()
}

/// One local-merging iteration. Returns `None` once a single fragment is
/// left.
fn local_merge<W: Weight>(
    net: &mut Network<'_, W>,
    states: &mut [NodeMemory<W>],
    cfg: &AlgoConfig,
    i: u32,
    dtilde: u64,
    limit: u64,
) -> Result<Option<IterationTrace>> {
    let n = states.len();
    let sqrt_n = (n as f64).sqrt();
    let radius = cfg.cover_radius(n, i);
    let cover_reused = radius >= dtilde;
    let local = if cover_reused {
        global_tree_cover(states)
    } else {
        cover::compute_level(net, radius, cfg.verify)?.0
    };
    for (s, l) in states.iter_mut().zip(local) {
        s.covers.push(l);
        s.lead = Default::default();
        s.frag_loe = None;
        s.frag_active = false;
        s.links.clear();
    }

    run(net, FINDLIGHTEST, Exchange(ExchangeField::Frag), states, limit)?;
    run(net, FINDLIGHTEST, Convergecast(LoeAgg::FRAGMENT), states, limit)?;
    if !states.iter().any(|s| s.leader && s.lead.loe.is_some()) {
        return Ok(None);
    }
    let threshold = f64::from(1u32 << i) * cfg.c2 * sqrt_n;
    for s in states.iter_mut().filter(|s| s.leader) {
        s.lead.active = s.lead.loe.is_some() && s.lead.size as f64 <= threshold;
    }
    run(net, FINDLIGHTEST, Broadcast(LoeCast), states, limit)?;

    run(net, FINDPATH, Notice, states, limit)?;
    for k in 1..=i as usize {
        run(net, FINDPATH, Probe { level: k }, states, limit)?;
        resume(net, FINDPATH, Success, states, limit)?;
        run(net, FINDPATH, Install { level: k }, states, limit)?;
    }
    for s in states.iter().filter(|s| s.leader) {
        let me = s.id.0;
        let own = !s.lead.active || s.lead.installed.contains(&(me, s.lead.target));
        let noticed = s.lead.noticers.iter().all(|f| s.lead.installed.contains(&(f.0, me)));
        if !(own && noticed) {
            return Err(Error::Invariant(format!(
                "no path found for fragment {me} in iteration {i} up to cover level {i}"
            )));
        }
    }

    run(net, MATCHING, LinkMail(LinkMode::Status), states, limit)?;
    for s in states.iter_mut().filter(|s| s.leader) {
        let me = s.id.0;
        let lead = &mut s.lead;
        if let Some((_, v)) = lead.inbox.iter().find(|(from, _)| *from == lead.target) {
            lead.target_active = v[0] == 1;
            lead.target_loe = decode_key(&v[1..4]);
        }
        let mutual = lead.loe.is_some() && lead.target_loe == lead.loe;
        lead.cv_parent = (lead.active && lead.target_active && !(mutual && me > lead.target)).then_some(lead.target);
        let loe = lead.loe;
        lead.cv_children = if lead.active {
            lead.noticers
                .iter()
                .filter(|(f, key, _)| !(Some(*key) == loe && *f > me))
                .map(|f| f.0)
                .collect()
        } else {
            Vec::new()
        };
        lead.inbox.clear();
    }
    maximal_matching(&mut LinkComm { net, limit }, states)?;

    let level = i + 1;
    for s in states.iter_mut().filter(|s| s.leader) {
        let me = s.id.0;
        s.lead.decide_merge(me);
    }
    run(net, MERGE, Attach { level }, states, limit)?;
    run(net, MERGE, Broadcast(Relabel), states, limit)?;
    let active = states.iter().filter(|s| s.leader && s.lead.active).count();
    for s in states.iter_mut() {
        if s.leader && s.lead.merge_target.is_some() {
            s.leader = false;
            s.routing.absorbed_at = Some(level);
        }
    }
    let g = net.graph();
    if cfg.verify && !routing_reciprocal(g, states) {
        return Err(Error::Invariant(format!("routing tables not reciprocal after iteration {i}")));
    }
    Ok(Some(IterationTrace {
        iteration: i,
        cover_radius: radius,
        cover_reused,
        active,
        fragments: leaders(states),
        count_bound: sqrt_n / f64::from(1u32 << i),
        weak_diameters: if cfg.verify { weak_diameters(g, states) } else { Vec::new() },
        diameter_bound: 6.0 * f64::from(1u32 << i) * cfg.c1 * sqrt_n,
    }))
}

/// Label merging over the global BFS tree until one label remains.
fn label_merge<W: Weight>(net: &mut Network<'_, W>, states: &mut [NodeMemory<W>], limit: u64) -> Result<Vec<u64>> {
    let mut counts = vec![leaders(states) as u64];
    for s in states.iter_mut() {
        s.label = s.frag;
    }
    let bound = 2 * (usize::BITS - states.len().leading_zeros()) + 2;
    for _ in 0..bound {
        for s in states.iter_mut() {
            s.lead = Default::default();
        }
        run(net, PHASE3, Exchange(ExchangeField::Label), states, limit)?;
        run(net, PHASE3, Convergecast(LoeAgg::LABEL), states, limit)?;
        run(net, PHASE3, Upcast, states, limit)?;
        resume(net, PHASE3, Downcast, states, limit)?;
        run(net, PHASE3, Broadcast(LabelCast), states, limit)?;
        let labels = states.iter().find(|s| s.global.root).map_or(1, |s| s.global.labels);
        counts.push(labels);
        if labels <= 1 {
            return Ok(counts);
        }
    }
    Err(Error::Invariant(format!("label merging did not finish: {counts:?}")))
}

pub fn run_opt_mst_traced<W: Weight>(g: &WeightedGraph<W>, cfg: &AlgoConfig, seed: u64) -> Result<OptRun> {
    cfg.check()?;
    let n = g.n();
    let limit = cfg.round_limit.unwrap_or_else(|| default_round_limit(n));
    let mut net = Network::with_word_budget(g, seed, cfg.word_budget);
    let mut states = fresh_states(&net);
    let mut trace = OptTrace::default();
    if n > 1 {
        let dtilde = elect_and_measure(&mut net, &mut states, limit)?;
        trace.dtilde = dtilde;
        trace.cghs_iterations = cghs::run_controlled_ghs(&mut net, &mut states, limit)?;
        trace.cghs_fragments = leaders(&states);
        let sqrt_n = (n as f64).sqrt();
        trace.phase2_skipped = dtilde as f64 <= cfg.c_skip * sqrt_n;
        if !trace.phase2_skipped {
            let last = (dtilde as f64 / sqrt_n).log2().ceil().max(1.0) as u32;
            for i in 1..=last {
                match local_merge(&mut net, &mut states, cfg, i, dtilde, limit)? {
                    Some(t) => trace.phase2.push(t),
                    None => break,
                }
            }
        }
        trace.phase3_labels = label_merge(&mut net, &mut states, limit)?;
    }
    let mst = MstResult::new(g, tree_edges(g, &states), Provenance::Opt);
    Ok(OptRun {
        mst,
        metrics: net.into_metrics(),
        trace,
    })
}

pub fn run_opt_mst<W: Weight>(g: &WeightedGraph<W>, cfg: &AlgoConfig, seed: u64) -> Result<(MstResult, RunMetrics)> {
    let r = run_opt_mst_traced(g, cfg, seed)?;
    Ok((r.mst, r.metrics))
}
