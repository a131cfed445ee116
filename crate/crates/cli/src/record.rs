use std::collections::BTreeMap;
use std::time::Instant;

use clap::ValueEnum;
use serde::{Deserialize, Serialize};

use congest_mst::ghs::ghs_classic;
use congest_mst::graph::hop_diameter;
use congest_mst::opt::{run_opt_mst, AlgoConfig};
use congest_mst::oracle::{kruskal, verify_spanning_tree};
use congest_mst::{Graph, Result, RunMetrics};

use crate::ExecArgs;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algo {
    Opt,
    Ghs,
    Kruskal,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRecord {
    pub schema_version: u32,
    pub instance: String,
    pub algorithm: Algo,
    pub seed: u64,
    pub n: usize,
    pub m: usize,
    pub diameter: u32,
    pub diameter_exact: bool,
    pub rounds: u64,
    pub messages_total: u64,
    pub messages_by_tag: BTreeMap<String, u64>,
    pub rounds_by_tag: BTreeMap<String, u64>,
    pub mst_weight: f64,
    /// `true` only when the edge set was compared with Kruskal and matched.
    pub verified: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wall_clock_ms: Option<f64>,
}

pub fn run_one(g: &Graph, instance: &str, exec: &ExecArgs, seed: u64) -> Result<ResultRecord> {
    let start = Instant::now();
    let (mst, metrics) = match exec.algo {
        Algo::Opt => {
            let cfg = AlgoConfig {
                round_limit: exec.round_limit,
                verify: exec.verify,
                ..AlgoConfig::default()
            };
            run_opt_mst(g, &cfg, seed)?
        }
        Algo::Ghs => ghs_classic(g, seed)?,
        Algo::Kruskal => (kruskal(g)?, RunMetrics::default()),
    };
    let elapsed = start.elapsed();
    let verified = exec.verify && verify_spanning_tree(&mst.edges, g, true).passed();
    let d = hop_diameter(g)?;
    Ok(ResultRecord {
        schema_version: SCHEMA_VERSION,
        instance: instance.to_string(),
        algorithm: exec.algo,
        seed,
        n: g.n(),
        m: g.m(),
        diameter: d.value,
        diameter_exact: d.exact,
        rounds: metrics.rounds,
        messages_total: metrics.messages_total,
        messages_by_tag: metrics.messages_by_tag,
        rounds_by_tag: metrics.rounds_by_tag,
        mst_weight: mst.total_weight,
        verified,
        wall_clock_ms: exec.timing.then(|| elapsed.as_secs_f64() * 1e3),
    })
}
