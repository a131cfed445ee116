//! Node-side code may only see its own id, ports, port weights and received
//! messages. This scans the node-side sources for any route to the global
//! graph.

use std::fs;
use std::path::{Path, PathBuf};

const FORBIDDEN: &[&str] = &[
    "WeightedGraph",
    "Network",
    "Graph",
    ".graph(",
    "neighbors(",
    "across(",
    "index_of(",
    "edge_at(",
    "incident(",
    "hop_diameter",
    "bfs_distances",
];

fn node_side_sources() -> Vec<PathBuf> {
    let src = Path::new(env!("CARGO_MANIFEST_DIR")).join("src");
    let mut files: Vec<PathBuf> = fs::read_dir(src.join("node"))
        .unwrap()
        .map(|e| e.unwrap().path())
        .collect();
    for dir in fs::read_dir(&src).unwrap() {
        let p = dir.unwrap().path().join("protocol.rs");
        if p.exists() {
            files.push(p);
        }
    }
    files.push(src.join("sim/driver.rs"));
    files.sort();
    files
}

#[test]
fn node_side_code_has_no_global_view() {
    let files = node_side_sources();
    assert!(files.len() >= 7, "expected node and protocol sources, found {files:?}");
    let mut hits = Vec::new();
    for f in &files {
        let text = fs::read_to_string(f).unwrap();
        for (i, line) in text.lines().enumerate() {
            let code = line.split("//").next().unwrap();
            for pat in FORBIDDEN {
                if code.contains(pat) {
                    hits.push(format!("{}:{}: {}", f.display(), i + 1, line.trim()));
                }
            }
        }
    }
    assert!(hits.is_empty(), "global graph access in node code:\n{}", hits.join("\n"));
}

#[test]
fn context_exposes_no_neighbor_ids() {
    let text = fs::read_to_string(Path::new(env!("CARGO_MANIFEST_DIR")).join("src/sim/mod.rs")).unwrap();
    let start = text.find("impl<W: Weight> NodeContext<'_, W>").expect("context impl");
    let body = &text[start..];
    let end = body.find("\n}\n").unwrap();
    let api: Vec<&str> = body[..end]
        .lines()
        .filter(|l| l.trim_start().starts_with("pub fn"))
        .collect();
    assert!(!api.is_empty());
    for sig in api {
        assert!(!sig.contains("NodeId") || sig.contains("fn id("), "{sig}");
        assert!(!sig.contains("Graph"), "{sig}");
    }
}
