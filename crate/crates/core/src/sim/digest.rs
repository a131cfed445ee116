use sha2::{Digest, Sha256};

use super::RunMetrics;

/// Hex SHA-256 over rounds, message count and the sorted per-node outputs.
/// Two runs with the same graph, protocol and seed produce the same digest.
pub fn replay_digest(metrics: &RunMetrics, outputs: &[Vec<u64>]) -> String {
    let mut sorted: Vec<&Vec<u64>> = outputs.iter().collect();
    sorted.sort();
    let mut h = Sha256::new();
    h.update(metrics.rounds.to_le_bytes());
    h.update(metrics.messages_total.to_le_bytes());
    h.update((sorted.len() as u64).to_le_bytes());
    for out in sorted {
        h.update((out.len() as u64).to_le_bytes());
        for w in out {
            h.update(w.to_le_bytes());
        }
    }
    hex::encode(h.finalize())
}
