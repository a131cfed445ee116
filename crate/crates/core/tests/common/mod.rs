//! Shared helpers and pinned constants for integration tests.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use congest_mst::graph::{generate_grid, generate_path, generate_random_connected, WeightedGraph};
use congest_mst::{Graph, Weight};

/// Multiplicative slack allowed on calibrated constants.
pub const SLACK: f64 = 1.10;

/// Constants measured on the calibration suite, see `fixtures/calibration.json`.
pub struct Calibration {
    /// Strong diameter factor for base fragments: `c_ghs·sqrt(n)`.
    pub c_ghs: f64,
    /// Base forest message factor: `c_msg·(m·log n + n·log² n)`.
    pub c_msg: f64,
}

pub fn calibration() -> Calibration {
    let v: serde_json::Value = serde_json::from_str(include_str!("../fixtures/calibration.json")).unwrap();
    Calibration {
        c_ghs: v["c_ghs"].as_f64().unwrap(),
        c_msg: v["c_msg"].as_f64().unwrap(),
    }
}

pub fn log2(n: usize) -> f64 {
    (n.max(2) as f64).log2()
}

/// Hop diameter of the subgraph induced by `members` (node indices), by BFS
/// from every member.
pub fn induced_diameter<W: Weight>(g: &WeightedGraph<W>, members: &[usize]) -> u32 {
    let inside: BTreeSet<usize> = members.iter().copied().collect();
    let mut best = 0;
    for &src in members {
        let mut dist: BTreeMap<usize, u32> = BTreeMap::from([(src, 0)]);
        let mut queue = VecDeque::from([src]);
        while let Some(x) = queue.pop_front() {
            let d = dist[&x];
            for y in g.neighbors(x) {
                if inside.contains(&y) && !dist.contains_key(&y) {
                    dist.insert(y, d + 1);
                    queue.push_back(y);
                }
            }
        }
        assert_eq!(dist.len(), members.len(), "induced subgraph is disconnected");
        best = best.max(dist.values().copied().max().unwrap_or(0));
    }
    best
}

/// Plain union-find kept separate from the library one.
pub struct Sets(Vec<usize>);

impl Sets {
    pub fn new(n: usize) -> Self {
        Sets((0..n).collect())
    }

    pub fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.0[r] != r {
            r = self.0[r];
        }
        let mut y = x;
        while self.0[y] != r {
            let next = self.0[y];
            self.0[y] = r;
            y = next;
        }
        r
    }

    pub fn join(&mut self, a: usize, b: usize) -> bool {
        let (a, b) = (self.find(a), self.find(b));
        self.0[a] = b;
        a != b
    }
}

/// Graphs of `n` nodes used to calibrate and check base forests: a path,
/// a square grid and random graphs with `n - 1`, `2n` and `4n` edges.
pub fn forest_family(n: usize) -> Vec<(String, Graph)> {
    let side = (n as f64).sqrt() as usize;
    let mut out: Vec<(String, Graph)> = vec![
        ("path".into(), generate_path(n).unwrap()),
        ("grid".into(), generate_grid(side, n / side, n as u64).unwrap()),
    ];
    for (k, m) in [n - 1, 2 * n, 4 * n].into_iter().enumerate() {
        let m = m.min(n * (n - 1) / 2);
        out.push((format!("random m={m}"), generate_random_connected(n, m, k as u64).unwrap()));
    }
    out
}

/// Calibration sizes for the base forest constants.
pub const CALIBRATION_SIZES: [usize; 3] = [16, 64, 256];
