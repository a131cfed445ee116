use std::collections::HashSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{NodeId, WeightedGraph};
use crate::error::{Error, Result};
use crate::weight::Weight;

fn cast<W: Weight>(w: u64) -> W {
    num_traits::cast(w).expect("generator weight fits the scalar type")
}

/// `count` distinct integers drawn uniformly from `[1, max(n^3, count)]`.
pub fn shuffled_weights(count: usize, n: usize, rng: &mut impl Rng) -> Vec<u64> {
    let hi = (n as u64).saturating_pow(3).max(count as u64).max(1);
    let mut seen = HashSet::with_capacity(count);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let w = rng.random_range(1..=hi);
        if seen.insert(w) {
            out.push(w);
        }
    }
    out
}

/// Connected graph with exactly `n` nodes and `m` edges: a random spanning
/// tree plus uniformly chosen extra edges. Node ids are a random permutation
/// of `0..n`; weights are distinct draws from `[1, n^3]`.
pub fn generate_random_connected<W: Weight>(
    n: usize,
    m: usize,
    seed: u64,
) -> Result<WeightedGraph<W>> {
    let max_m = n.saturating_mul(n.saturating_sub(1)) / 2;
    if n == 0 || m + 1 < n || m > max_m {
        return Err(Error::Parameter(format!(
            "no connected graph with n={n}, m={m} (need {} <= m <= {max_m})",
            n.saturating_sub(1)
        )));
    }
    if n == 1 {
        return WeightedGraph::from_edges(1, &[]);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut ids: Vec<u64> = (0..n as u64).collect();
    ids.shuffle(&mut rng);

    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut rng);
    let mut pairs: Vec<(usize, usize)> = Vec::with_capacity(m);
    let mut present = HashSet::with_capacity(m);
    for i in 1..n {
        let j = rng.random_range(0..i);
        let (a, b) = (order[i], order[j]);
        pairs.push((a, b));
        present.insert((a.min(b), a.max(b)));
    }
    let extra = m - (n - 1);
    if extra * 2 > max_m {
        let mut rest: Vec<(usize, usize)> = (0..n)
            .flat_map(|a| (a + 1..n).map(move |b| (a, b)))
            .filter(|p| !present.contains(p))
            .collect();
        rest.shuffle(&mut rng);
        pairs.extend(rest.into_iter().take(extra));
    } else {
        while pairs.len() < m {
            let a = rng.random_range(0..n);
            let b = rng.random_range(0..n);
            if a != b && present.insert((a.min(b), a.max(b))) {
                pairs.push((a, b));
            }
        }
    }
    pairs.shuffle(&mut rng);
    let weights = shuffled_weights(m, n, &mut rng);
    let edges: Vec<_> = pairs
        .iter()
        .zip(weights)
        .map(|(&(a, b), w)| (NodeId(ids[a]), NodeId(ids[b]), cast::<W>(w)))
        .collect();
    WeightedGraph::from_edges(n, &edges)
}

/// Path `0 - 1 - ... - n-1` with weights `1..n-1` in order.
pub fn generate_path<W: Weight>(n: usize) -> Result<WeightedGraph<W>> {
    if n == 0 {
        return Err(Error::Parameter("path needs at least one node".into()));
    }
    let edges: Vec<_> = (1..n as u64)
        .map(|i| (NodeId(i - 1), NodeId(i), cast::<W>(i)))
        .collect();
    WeightedGraph::from_edges(n, &edges)
}

/// Path on ids `0..n` in order with `extra` short chords (each spans two or
/// three hops). Weights are distinct random draws, so the hop diameter
/// stays close to `n / 3` or above.
pub fn generate_path_like<W: Weight>(n: usize, extra: usize, seed: u64) -> Result<WeightedGraph<W>> {
    if n == 0 {
        return Err(Error::Parameter("path needs at least one node".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pairs: Vec<(u64, u64)> = (1..n as u64).map(|i| (i - 1, i)).collect();
    let mut seen: HashSet<(u64, u64)> = pairs.iter().copied().collect();
    let room = n.saturating_sub(2) + n.saturating_sub(3);
    if extra > room {
        return Err(Error::Parameter(format!("at most {room} chords fit on a path of {n}")));
    }
    while pairs.len() < n - 1 + extra {
        let span = rng.random_range(2..=3u64);
        let a = rng.random_range(0..n as u64);
        if a + span < n as u64 && seen.insert((a, a + span)) {
            pairs.push((a, a + span));
        }
    }
    let weights = shuffled_weights(pairs.len(), n, &mut rng);
    let edges: Vec<_> = pairs
        .into_iter()
        .zip(weights)
        .map(|((a, b), w)| (NodeId(a), NodeId(b), cast::<W>(w)))
        .collect();
    WeightedGraph::from_edges(n, &edges)
}

/// Star with centre 0 and `leaves` leaves; leaf `i` hangs on weight `i`.
pub fn generate_star<W: Weight>(leaves: usize) -> Result<WeightedGraph<W>> {
    let edges: Vec<_> = (1..=leaves as u64)
        .map(|i| (NodeId(0), NodeId(i), cast::<W>(i)))
        .collect();
    WeightedGraph::from_edges(leaves + 1, &edges)
}

/// Complete graph on ids `0..n` with distinct random weights.
pub fn generate_complete<W: Weight>(n: usize, seed: u64) -> Result<WeightedGraph<W>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pairs: Vec<(u64, u64)> = (0..n as u64)
        .flat_map(|a| (a + 1..n as u64).map(move |b| (a, b)))
        .collect();
    let weights = shuffled_weights(pairs.len(), n, &mut rng);
    let edges: Vec<_> = pairs
        .into_iter()
        .zip(weights)
        .map(|((a, b), w)| (NodeId(a), NodeId(b), cast::<W>(w)))
        .collect();
    WeightedGraph::from_edges(n, &edges)
}

/// `rows x cols` grid, node `(r, c)` has id `r * cols + c`, random weights.
pub fn generate_grid<W: Weight>(rows: usize, cols: usize, seed: u64) -> Result<WeightedGraph<W>> {
    if rows == 0 || cols == 0 {
        return Err(Error::Parameter("grid dimensions must be positive".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let id = |r: usize, c: usize| NodeId((r * cols + c) as u64);
    let mut pairs = Vec::new();
    for r in 0..rows {
        for c in 0..cols {
            if c + 1 < cols {
                pairs.push((id(r, c), id(r, c + 1)));
            }
            if r + 1 < rows {
                pairs.push((id(r, c), id(r + 1, c)));
            }
        }
    }
    let weights = shuffled_weights(pairs.len(), rows * cols, &mut rng);
    let edges: Vec<_> = pairs
        .into_iter()
        .zip(weights)
        .map(|((a, b), w)| (a, b, cast::<W>(w)))
        .collect();
    WeightedGraph::from_edges(rows * cols, &edges)
}
