use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use super::WeightedGraph;
use crate::error::{Error, Result};
use crate::weight::Weight;

/// Above this node count `hop_diameter` falls back to sampled eccentricities.
pub const EXACT_DIAMETER_LIMIT: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Diameter {
    pub value: u32,
    /// `false` when `value` is a sampled lower bound with `value <= D <= 2 * value`.
    pub exact: bool,
}

/// Hop distances from `src`; `None` marks unreachable nodes.
pub fn bfs_distances<W: Weight>(g: &WeightedGraph<W>, src: usize) -> Vec<Option<u32>> {
    let mut dist = vec![None; g.n()];
    dist[src] = Some(0);
    let mut queue = VecDeque::from([src]);
    while let Some(x) = queue.pop_front() {
        let d = dist[x].unwrap();
        for y in g.neighbors(x) {
            if dist[y].is_none() {
                dist[y] = Some(d + 1);
                queue.push_back(y);
            }
        }
    }
    dist
}

fn eccentricity<W: Weight>(g: &WeightedGraph<W>, src: usize) -> Result<u32> {
    bfs_distances(g, src)
        .into_iter()
        .try_fold(0u32, |acc, d| d.map(|d| acc.max(d)))
        .ok_or_else(|| Error::Structural("graph is disconnected".into()))
}

pub fn hop_diameter<W: Weight>(g: &WeightedGraph<W>) -> Result<Diameter> {
    hop_diameter_with_threshold(g, EXACT_DIAMETER_LIMIT)
}

pub fn hop_diameter_with_threshold<W: Weight>(
    g: &WeightedGraph<W>,
    exact_limit: usize,
) -> Result<Diameter> {
    let n = g.n();
    if n <= exact_limit {
        let mut best = 0;
        for x in 0..n {
            best = best.max(eccentricity(g, x)?);
        }
        return Ok(Diameter {
            value: best,
            exact: true,
        });
    }
    // Every eccentricity is within a factor two of D; a few evenly spaced
    // samples tighten the lower bound.
    let samples = 16.min(n);
    let mut best = 0;
    for s in 0..samples {
        best = best.max(eccentricity(g, s * n / samples)?);
    }
    Ok(Diameter {
        value: best,
        exact: false,
    })
}
