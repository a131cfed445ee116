use std::path::PathBuf;
use std::process::{Command, Output};

use congest_mst::graph::generate_random_connected;
use congest_mst::oracle::kruskal;
use congest_mst::Graph;
use serde_json::Value;

fn dmst(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dmst"))
        .args(args)
        .env_remove("DMST_OUT_DIR")
        .output()
        .expect("spawn dmst")
}

fn scratch_dir(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("dmst-test-{}-{name}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn records(out: &Output) -> Vec<Value> {
    String::from_utf8_lossy(&out.stdout)
        .lines()
        .map(|l| serde_json::from_str(l).expect("json line"))
        .collect()
}

#[test]
fn run_opt_on_random_gives_one_verified_record_per_seed() {
    let out = dmst(&[
        "run", "--gen", "random", "--n", "64", "--m", "128", "--algo", "opt", "--seeds", "1,2,3", "--verify",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let recs = records(&out);
    assert_eq!(recs.len(), 3);
    let g: Graph = generate_random_connected(64, 128, 0).unwrap();
    let want = kruskal(&g).unwrap().total_weight;
    for (r, seed) in recs.iter().zip([1, 2, 3]) {
        assert_eq!(r["schema_version"], 1);
        assert_eq!(r["seed"], seed);
        assert_eq!(r["verified"], true);
        assert_eq!(r["n"], 64);
        assert_eq!(r["m"], 128);
        assert_eq!(r["mst_weight"].as_f64(), Some(want));
        assert!(r["messages_total"].as_u64().unwrap() > 0);
        assert!(r.get("wall_clock_ms").is_none());
    }
}

#[test]
fn unknown_algorithm_is_a_usage_error() {
    let out = dmst(&["run", "--gen", "random", "--n", "8", "--algo", "nosuch"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn missing_instance_is_a_usage_error() {
    assert_eq!(dmst(&["run", "--algo", "ghs"]).status.code(), Some(2));
    let bad = dmst(&["run", "--file", "/nonexistent/graph.txt"]);
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn single_node_records_zero_cost() {
    for algo in ["opt", "ghs", "kruskal"] {
        let out = dmst(&["run", "--gen", "path", "--n", "1", "--algo", algo, "--verify"]);
        assert_eq!(out.status.code(), Some(0));
        let r = &records(&out)[0];
        assert_eq!(r["rounds"], 0);
        assert_eq!(r["messages_total"], 0);
        assert_eq!(r["mst_weight"].as_f64(), Some(0.0));
    }
}

#[test]
fn output_is_deterministic() {
    let args = ["run", "--gen", "pathlike", "--n", "40", "--algo", "opt", "--seeds", "4,5"];
    let a = dmst(&args);
    let b = dmst(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn timing_adds_wall_clock() {
    let out = dmst(&["run", "--gen", "star", "--n", "5", "--algo", "ghs", "--timing"]);
    assert!(records(&out)[0]["wall_clock_ms"].as_f64().unwrap() >= 0.0);
}

#[test]
fn out_dir_from_environment() {
    let dir = scratch_dir("env");
    let out = Command::new(env!("CARGO_BIN_EXE_dmst"))
        .args(["run", "--gen", "grid", "--n", "16", "--algo", "ghs"])
        .env("DMST_OUT_DIR", &dir)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(dir.join("run.jsonl")).unwrap();
    assert_eq!(text.lines().count(), 1);
}

#[test]
fn sweep_writes_csv_with_slopes() {
    let out = dmst(&["sweep", "--gen", "path", "--sizes", "16,32,64", "--algo", "ghs", "--seeds", "1,2", "--verify"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert!(lines[0].starts_with("n,m,diameter,median_rounds,median_messages"));
    let rows: Vec<Vec<&str>> = lines[1..4].iter().map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.iter().map(|r| r[0]).collect::<Vec<_>>(), ["16", "32", "64"]);
    assert_eq!(rows[2][2], "63");
    assert!(lines[4].starts_with("# slope_messages_vs_m,"));
    assert!(lines[5].starts_with("# slope_rounds_vs_d_plus_sqrt_n,"));
}

#[test]
fn sweep_over_edge_counts() {
    let out = dmst(&[
        "sweep", "--gen", "random", "--sizes", "32", "--edges", "64,128,256", "--algo", "kruskal",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let ms: Vec<&str> = text.lines().skip(1).take(3).map(|l| l.split(',').nth(1).unwrap()).collect();
    assert_eq!(ms, ["64", "128", "256"]);
}

#[test]
fn sweep_needs_three_instances() {
    assert_eq!(dmst(&["sweep", "--gen", "path", "--sizes", "16,32"]).status.code(), Some(2));
    assert_eq!(dmst(&["sweep", "--gen", "path"]).status.code(), Some(2));
}

#[test]
fn sweep_failure_flags_partial_csv() {
    let out = dmst(&[
        "sweep", "--gen", "path", "--sizes", "8,300,16", "--algo", "opt", "--round-limit", "5",
    ]);
    assert_eq!(out.status.code(), Some(1));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.lines().last().unwrap().starts_with("# aborted:"));
}

#[test]
fn generated_file_round_trips() {
    let dir = scratch_dir("gen");
    let path = dir.join("g.txt");
    let p = path.to_str().unwrap();
    let out = dmst(&["gen", "--gen", "random", "--n", "30", "--m", "60", "--graph-seed", "7", "--out", p]);
    assert_eq!(out.status.code(), Some(0));
    let run = dmst(&["run", "--file", p, "--algo", "ghs", "--verify"]);
    assert_eq!(run.status.code(), Some(0));
    let g: Graph = generate_random_connected(30, 60, 7).unwrap();
    assert_eq!(records(&run)[0]["mst_weight"].as_f64(), kruskal(&g).ok().map(|k| k.total_weight));
}

#[test]
fn hard_instance_writes_parameters() {
    let dir = scratch_dir("hard");
    let path = dir.join("hard.txt");
    let out = dmst(&["gen", "--gen", "hard", "--n", "16", "--diameter", "8", "--out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let params: Value =
        serde_json::from_str(&std::fs::read_to_string(dir.join("hard.txt.params.json")).unwrap()).unwrap();
    assert_eq!(params["d_target"], 8);
}

#[test]
fn verify_cover_reports_pass() {
    let out = dmst(&["verify-cover", "--gen", "grid", "--n", "36", "--radius", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["report"]["trees_ok"], true);
    assert_eq!(v["report"]["neighborhood_ok"], true);
    assert_eq!(dmst(&["verify-cover", "--gen", "grid", "--n", "36", "--radius", "0"]).status.code(), Some(2));
}
