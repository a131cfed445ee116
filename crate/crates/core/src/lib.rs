//! Distributed minimum spanning tree algorithms on a simulated synchronous
//! CONGEST network.

pub mod cghs;
pub mod cover;
pub mod error;
pub mod ghs;
pub mod graph;
pub mod lb;
pub mod matching;
pub mod node;
pub mod opt;
pub mod oracle;
pub mod sim;
pub mod stats;
pub mod weight;

pub use error::{Error, Result};
pub use graph::{EdgeKey, NodeId, Port, WeightedEdge, WeightedGraph};
pub use sim::{Message, NodeContext, NodeInfo, Protocol, RunMetrics, Step};
pub use weight::Weight;

/// Integer-weighted graph.
pub type Graph = WeightedGraph<u64>;
/// Float-weighted graph.
pub type FloatGraph = WeightedGraph<f64>;
