//! Deterministic synchronous CONGEST round engine.
//!
//! Nodes run a [`Protocol`] step function once per round. A node sees only its
//! own id, its ports, the weights on its ports and the messages delivered to
//! it; it never learns a neighbour's id unless a message carries it.
//!
//! Each port transmits at most one message per round. Messages handed to
//! [`NodeContext::send`] enter a per-port FIFO; the engine transmits the head
//! of every non-empty queue at the end of the round, and the receiver reads it
//! in the next round. A message is counted when it is transmitted.

mod digest;
mod driver;

use std::collections::{BTreeMap, VecDeque};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{NodeId, Port, WeightedGraph};
use crate::weight::Weight;

pub use digest::replay_digest;
pub use driver::{Driver, Handler};

/// Word budget per message; one edge report (tag, two ids, weight) fits.
pub const DEFAULT_WORD_BUDGET: usize = 8;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Message {
    words: Vec<u64>,
}

impl Message {
    pub fn new(words: impl Into<Vec<u64>>) -> Self {
        Message {
            words: words.into(),
        }
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    pub fn word_count(&self) -> usize {
        self.words.len()
    }

    /// First word, conventionally the message kind.
    pub fn tag(&self) -> u64 {
        self.words.first().copied().unwrap_or(0)
    }
}

/// What a node wants after its step.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Step {
    /// Step again next round.
    Continue,
    /// Sleep until a message arrives.
    Halt,
    /// Sleep until the given round of this run, or until a message arrives.
    WakeAt(u64),
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunMetrics {
    pub rounds: u64,
    pub messages_total: u64,
    pub messages_by_tag: BTreeMap<String, u64>,
    pub rounds_by_tag: BTreeMap<String, u64>,
    pub words_total: u64,
}

impl RunMetrics {
    pub fn messages(&self, tag: &str) -> u64 {
        self.messages_by_tag.get(tag).copied().unwrap_or(0)
    }

    pub fn merge(&mut self, other: &RunMetrics) {
        self.rounds += other.rounds;
        self.messages_total += other.messages_total;
        self.words_total += other.words_total;
        for (k, v) in &other.messages_by_tag {
            *self.messages_by_tag.entry(k.clone()).or_default() += v;
        }
        for (k, v) in &other.rounds_by_tag {
            *self.rounds_by_tag.entry(k.clone()).or_default() += v;
        }
    }
}

/// Static knowledge a node starts with.
#[derive(Debug, Clone, Copy)]
pub struct NodeInfo {
    pub id: NodeId,
    pub degree: usize,
    pub network_size: usize,
}

/// A node's view of the current round.
pub struct NodeContext<'a, W> {
    info: NodeInfo,
    round: u64,
    weights: &'a [W],
    inbox: &'a [(Port, Message)],
    queues: &'a mut [VecDeque<Message>],
    rng: &'a mut ChaCha8Rng,
    budget: usize,
    violation: &'a mut Option<String>,
}

impl<W: Weight> NodeContext<'_, W> {
    #[inline]
    pub fn id(&self) -> NodeId {
        self.info.id
    }

    #[inline]
    pub fn degree(&self) -> usize {
        self.info.degree
    }

    /// `n`, known to every node.
    #[inline]
    pub fn network_size(&self) -> usize {
        self.info.network_size
    }

    /// Round number within the current run, starting at 0.
    #[inline]
    pub fn round(&self) -> u64 {
        self.round
    }

    pub fn ports(&self) -> impl Iterator<Item = Port> {
        (0..self.info.degree).map(Port::from_index)
    }

    /// Numeric weight of the edge behind `port`.
    pub fn weight(&self, port: Port) -> W {
        self.weights[port.index()]
    }

    pub fn inbox(&self) -> &[(Port, Message)] {
        self.inbox
    }

    pub fn rng(&mut self) -> &mut ChaCha8Rng {
        self.rng
    }

    pub fn send(&mut self, port: Port, message: Message) {
        if self.violation.is_some() {
            return;
        }
        if port.0 == 0 || port.index() >= self.info.degree {
            *self.violation = Some(format!("send on nonexistent port {port}"));
            return;
        }
        if message.word_count() > self.budget {
            *self.violation = Some(format!(
                "message of {} words exceeds budget {}",
                message.word_count(),
                self.budget
            ));
            return;
        }
        self.queues[port.index()].push_back(message);
    }

    pub fn send_all(&mut self, message: &Message) {
        for i in 0..self.info.degree {
            self.send(Port::from_index(i), message.clone());
        }
    }

    /// Messages still waiting for their port to free up.
    pub fn backlog(&self) -> usize {
        self.queues.iter().map(VecDeque::len).sum()
    }
}

pub trait Protocol<W: Weight> {
    type State;

    fn init(&self, info: &NodeInfo) -> Self::State;

    fn step(&self, state: &mut Self::State, ctx: &mut NodeContext<'_, W>) -> Step;

    /// Per-node result, used for replay digests.
    fn output(&self, _state: &Self::State) -> Vec<u64> {
        Vec::new()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Status {
    Active,
    Halted,
    Sleeping(u64),
}

/// A network ready to execute protocols. Metrics accumulate across runs so a
/// multi-stage algorithm can charge each stage under its own tag.
pub struct Network<'g, W> {
    graph: &'g WeightedGraph<W>,
    budget: usize,
    rngs: Vec<ChaCha8Rng>,
    port_weights: Vec<Vec<W>>,
    metrics: RunMetrics,
}

impl<'g, W: Weight> Network<'g, W> {
    pub fn new(graph: &'g WeightedGraph<W>, seed: u64) -> Self {
        Self::with_word_budget(graph, seed, DEFAULT_WORD_BUDGET)
    }

    pub fn with_word_budget(graph: &'g WeightedGraph<W>, seed: u64, budget: usize) -> Self {
        let rngs = (0..graph.n())
            .map(|x| {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream(graph.id(x).0);
                rng
            })
            .collect();
        let port_weights = (0..graph.n())
            .map(|x| {
                graph
                    .incident(x)
                    .iter()
                    .map(|&e| graph.edge(e).weight)
                    .collect()
            })
            .collect();
        Network {
            graph,
            budget,
            rngs,
            port_weights,
            metrics: RunMetrics::default(),
        }
    }

    pub fn graph(&self) -> &'g WeightedGraph<W> {
        self.graph
    }

    pub fn n(&self) -> usize {
        self.graph.n()
    }

    pub fn metrics(&self) -> &RunMetrics {
        &self.metrics
    }

    pub fn into_metrics(self) -> RunMetrics {
        self.metrics
    }

    pub fn node_info(&self, x: usize) -> NodeInfo {
        NodeInfo {
            id: self.graph.id(x),
            degree: self.graph.degree(x),
            network_size: self.graph.n(),
        }
    }

    /// Fresh states from [`Protocol::init`].
    pub fn init_states<P: Protocol<W>>(&self, protocol: &P) -> Vec<P::State> {
        (0..self.n())
            .map(|x| protocol.init(&self.node_info(x)))
            .collect()
    }

    /// Runs `protocol` until every node is asleep and no message is queued or
    /// in flight. Returns the index of the last executed round.
    pub fn run<P: Protocol<W>>(
        &mut self,
        tag: &str,
        protocol: &P,
        states: &mut [P::State],
        round_limit: u64,
    ) -> Result<u64> {
        let g = self.graph;
        let n = g.n();
        assert_eq!(states.len(), n, "one state per node");
        let mut queues: Vec<Vec<VecDeque<Message>>> =
            (0..n).map(|x| vec![VecDeque::new(); g.degree(x)]).collect();
        let mut inbox: Vec<Vec<(Port, Message)>> = vec![Vec::new(); n];
        let mut next_inbox: Vec<Vec<(Port, Message)>> = vec![Vec::new(); n];
        let mut status = vec![Status::Active; n];
        let mut queued = 0usize;
        let mut round = 0u64;
        let mut last_round = 0u64;

        loop {
            if round > round_limit {
                let mut partial = self.metrics.clone();
                partial.rounds += last_round;
                *partial.rounds_by_tag.entry(tag.to_string()).or_default() += last_round;
                return Err(Error::Timeout {
                    tag: tag.to_string(),
                    round_limit,
                    metrics: Box::new(partial),
                });
            }
            for x in 0..n {
                let due = match status[x] {
                    Status::Active => true,
                    Status::Halted => !inbox[x].is_empty(),
                    Status::Sleeping(r) => r <= round || !inbox[x].is_empty(),
                };
                if !due {
                    continue;
                }
                let before: usize = queues[x].iter().map(VecDeque::len).sum();
                let mut violation = None;
                let mut ctx = NodeContext {
                    info: self.node_info(x),
                    round,
                    weights: &self.port_weights[x],
                    inbox: &inbox[x],
                    queues: &mut queues[x],
                    rng: &mut self.rngs[x],
                    budget: self.budget,
                    violation: &mut violation,
                };
                let next = protocol.step(&mut states[x], &mut ctx);
                if let Some(message) = violation {
                    return Err(Error::ProtocolViolation {
                        node: g.id(x).0,
                        round,
                        message,
                    });
                }
                let after: usize = queues[x].iter().map(VecDeque::len).sum();
                queued += after - before;
                status[x] = match next {
                    Step::Continue => Status::Active,
                    Step::Halt => Status::Halted,
                    Step::WakeAt(r) if r <= round => Status::Active,
                    Step::WakeAt(r) => Status::Sleeping(r),
                };
                inbox[x].clear();
            }
            last_round = round;

            let mut delivered = 0usize;
            if queued > 0 {
                for x in 0..n {
                    for (pi, q) in queues[x].iter_mut().enumerate() {
                        if let Some(msg) = q.pop_front() {
                            let (y, arrival) = g.across(x, Port::from_index(pi));
                            self.metrics.words_total += msg.word_count() as u64;
                            next_inbox[y].push((arrival, msg));
                            delivered += 1;
                        }
                    }
                }
                queued -= delivered;
                self.metrics.messages_total += delivered as u64;
                *self
                    .metrics
                    .messages_by_tag
                    .entry(tag.to_string())
                    .or_default() += delivered as u64;
            }
            std::mem::swap(&mut inbox, &mut next_inbox);

            let any_active = status.iter().any(|s| *s == Status::Active);
            if !any_active && delivered == 0 && queued == 0 {
                let wake = status
                    .iter()
                    .filter_map(|s| match s {
                        Status::Sleeping(r) => Some(*r),
                        _ => None,
                    })
                    .min();
                match wake {
                    None => break,
                    Some(r) => {
                        round = r.max(round + 1);
                        continue;
                    }
                }
            }
            round += 1;
        }

        self.metrics.rounds += last_round;
        *self
            .metrics
            .rounds_by_tag
            .entry(tag.to_string())
            .or_default() += last_round;
        Ok(last_round)
    }
}

/// Safety net for a single sub-procedure run; generous enough that hitting it
/// indicates a livelock rather than a slow protocol.
pub fn default_round_limit(n: usize) -> u64 {
    let log = usize::BITS - n.max(1).leading_zeros();
    64 * n as u64 * (log as u64 + 1) + 10_000
}

/// One-shot execution: fresh states, a single run, per-node outputs.
pub fn run<W: Weight, P: Protocol<W>>(
    graph: &WeightedGraph<W>,
    protocol: &P,
    seed: u64,
    round_limit: u64,
) -> Result<(Vec<Vec<u64>>, RunMetrics)> {
    let mut net = Network::new(graph, seed);
    let mut states = net.init_states(protocol);
    net.run("run", protocol, &mut states, round_limit)?;
    let outputs = states.iter().map(|s| protocol.output(s)).collect();
    Ok((outputs, net.into_metrics()))
}
