//! `dmst`: build instances, run MST algorithms in the simulator, and record
//! metrics.

mod instance;
mod record;

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};

use congest_mst::cover::{compute_cover, verify_cover};
use congest_mst::graph::write_graph;
use congest_mst::stats::{loglog_slope, median};
use congest_mst::Error;

use instance::{Family, InstanceArgs};
use record::{run_one, Algo, ResultRecord};

#[derive(Parser)]
#[command(name = "dmst", version, about = "Distributed MST experiments on a simulated CONGEST network")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one algorithm on one instance for each seed; prints JSON lines.
    Run(RunArgs),
    /// Run one algorithm over a family of sizes; prints CSV.
    Sweep(SweepArgs),
    /// Write a generated graph to a file.
    Gen(GenArgs),
    /// Build a neighborhood cover and check its properties.
    VerifyCover(CoverArgs),
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    instance: InstanceArgs,
    #[command(flatten)]
    exec: ExecArgs,
    /// Output file; defaults to `$DMST_OUT_DIR/run.jsonl` when that is set,
    /// otherwise stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Clone)]
struct ExecArgs {
    #[arg(long, value_enum, default_value_t = Algo::Opt)]
    algo: Algo,
    #[arg(long, value_delimiter = ',', default_value = "1")]
    seeds: Vec<u64>,
    /// Compare every output with Kruskal; exit 1 on mismatch.
    #[arg(long)]
    verify: bool,
    /// Per sub-run round limit (opt only).
    #[arg(long)]
    round_limit: Option<u64>,
    /// Record wall-clock milliseconds. Makes output non-deterministic.
    #[arg(long)]
    timing: bool,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long, value_enum)]
    gen: Family,
    /// Node counts.
    #[arg(long, value_delimiter = ',', required = true)]
    sizes: Vec<usize>,
    /// Edge counts, crossed with `--sizes` (random and pathlike only).
    #[arg(long, value_delimiter = ',')]
    edges: Vec<usize>,
    #[arg(long, default_value_t = 0)]
    graph_seed: u64,
    #[command(flatten)]
    exec: ExecArgs,
    /// Output CSV; defaults to `$DMST_OUT_DIR/sweep.csv` when that is set,
    /// otherwise stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct GenArgs {
    #[command(flatten)]
    instance: InstanceArgs,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct CoverArgs {
    #[command(flatten)]
    instance: InstanceArgs,
    #[arg(long)]
    radius: u64,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Also write the cover as JSON.
    #[arg(long)]
    dump: Option<PathBuf>,
}

/// Error carrying the process exit code.
struct Failure {
    code: u8,
    error: anyhow::Error,
}

impl Failure {
    fn usage(error: impl Into<anyhow::Error>) -> Self {
        Failure { code: 2, error: error.into() }
    }

    fn failed(error: impl Into<anyhow::Error>) -> Self {
        Failure { code: 1, error: error.into() }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Parameter(_) | Error::Parse { .. } | Error::Structural(_) | Error::Io(_) | Error::Json(_) => {
                Failure::usage(e)
            }
            _ => Failure::failed(e),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::usage(e)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run(a) => cmd_run(a),
        Command::Sweep(a) => cmd_sweep(a),
        Command::Gen(a) => cmd_gen(a),
        Command::VerifyCover(a) => cmd_verify_cover(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {:#}", f.error);
            ExitCode::from(f.code)
        }
    }
}

fn default_out(explicit: Option<PathBuf>, name: &str) -> Option<PathBuf> {
    explicit.or_else(|| std::env::var_os("DMST_OUT_DIR").map(|d| Path::new(&d).join(name)))
}

fn open_out(path: Option<&Path>) -> Result<Box<dyn Write>, Failure> {
    Ok(match path {
        Some(p) => {
            if let Some(dir) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
                fs::create_dir_all(dir)?;
            }
            Box::new(fs::File::create(p).with_context(|| format!("creating {}", p.display())).map_err(Failure::usage)?)
        }
        None => Box::new(std::io::stdout()),
    })
}

fn check_exec(exec: &ExecArgs) -> Result<(), Failure> {
    if exec.seeds.is_empty() {
        return Err(Failure::usage(anyhow::anyhow!("at least one seed is required")));
    }
    Ok(())
}

fn cmd_run(args: RunArgs) -> Result<(), Failure> {
    check_exec(&args.exec)?;
    let (g, descriptor) = args.instance.build()?;
    let out = default_out(args.out, "run.jsonl");
    let mut w = open_out(out.as_deref())?;
    let mut failed = None;
    for &seed in &args.exec.seeds {
        let rec = match run_one(&g, &descriptor, &args.exec, seed) {
            Ok(r) => r,
            Err(e) => {
                w.flush()?;
                return Err(e.into());
            }
        };
        writeln!(w, "{}", serde_json::to_string(&rec).map_err(Failure::usage)?)?;
        eprintln!(
            "{:?} seed={} rounds={} messages={} weight={} verified={}",
            rec.algorithm, seed, rec.rounds, rec.messages_total, rec.mst_weight, rec.verified
        );
        if args.exec.verify && !rec.verified {
            failed.get_or_insert(seed);
        }
    }
    w.flush()?;
    match failed {
        Some(seed) => Err(Failure::failed(anyhow::anyhow!("seed {seed}: output differs from Kruskal"))),
        None => Ok(()),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct SweepRow {
    n: usize,
    m: usize,
    diameter: u32,
    rounds: f64,
    messages: f64,
}

fn log3(n: usize) -> f64 {
    (n.max(2) as f64).log2().powi(3)
}

fn write_row(w: &mut dyn Write, r: &SweepRow) -> std::io::Result<()> {
    let msg_ratio = r.messages / (r.m.max(1) as f64 * log3(r.n));
    let round_ratio = r.rounds / ((r.diameter as f64 + (r.n as f64).sqrt()) * log3(r.n));
    writeln!(
        w,
        "{},{},{},{},{},{:.6},{:.6}",
        r.n, r.m, r.diameter, r.rounds, r.messages, msg_ratio, round_ratio
    )
}

fn cmd_sweep(args: SweepArgs) -> Result<(), Failure> {
    check_exec(&args.exec)?;
    let edges: Vec<Option<usize>> = if args.edges.is_empty() {
        vec![None]
    } else {
        args.edges.iter().map(|&m| Some(m)).collect()
    };
    let points: Vec<(usize, Option<usize>)> = args
        .sizes
        .iter()
        .flat_map(|&n| edges.iter().map(move |&m| (n, m)))
        .collect();
    if points.len() < 3 {
        return Err(Failure::usage(anyhow::anyhow!("a sweep needs at least 3 instances")));
    }
    let out = default_out(args.out, "sweep.csv");
    let mut w = open_out(out.as_deref())?;
    writeln!(w, "n,m,diameter,median_rounds,median_messages,messages_per_m_log3n,rounds_per_d_sqrtn_log3n")?;
    let mut rows = Vec::new();
    for (n, m) in points {
        let inst = InstanceArgs::generated(args.gen, n, m, args.graph_seed);
        let attempt = inst.build().map_err(Failure::from).and_then(|(g, desc)| {
            let mut recs: Vec<ResultRecord> = Vec::new();
            for &seed in &args.exec.seeds {
                let rec = run_one(&g, &desc, &args.exec, seed)?;
                if args.exec.verify && !rec.verified {
                    return Err(Failure::failed(anyhow::anyhow!("{desc} seed {seed}: output differs from Kruskal")));
                }
                recs.push(rec);
            }
            Ok(recs)
        });
        let recs = match attempt {
            Ok(r) => r,
            Err(f) => {
                writeln!(w, "# aborted: {:#}", f.error)?;
                w.flush()?;
                return Err(f);
            }
        };
        let rounds: Vec<f64> = recs.iter().map(|r| r.rounds as f64).collect();
        let messages: Vec<f64> = recs.iter().map(|r| r.messages_total as f64).collect();
        let row = SweepRow {
            n: recs[0].n,
            m: recs[0].m,
            diameter: recs[0].diameter,
            rounds: median(&rounds).unwrap_or(0.0),
            messages: median(&messages).unwrap_or(0.0),
        };
        write_row(&mut *w, &row)?;
        rows.push(row);
    }
    let ms: Vec<f64> = rows.iter().map(|r| r.m as f64).collect();
    let msgs: Vec<f64> = rows.iter().map(|r| r.messages).collect();
    let scale: Vec<f64> = rows.iter().map(|r| r.diameter as f64 + (r.n as f64).sqrt()).collect();
    let rounds: Vec<f64> = rows.iter().map(|r| r.rounds).collect();
    let fmt = |s: Option<f64>| s.map_or("nan".to_string(), |v| format!("{v:.4}"));
    writeln!(w, "# slope_messages_vs_m,{}", fmt(loglog_slope(&ms, &msgs)))?;
    writeln!(w, "# slope_rounds_vs_d_plus_sqrt_n,{}", fmt(loglog_slope(&scale, &rounds)))?;
    w.flush()?;
    Ok(())
}

fn cmd_gen(args: GenArgs) -> Result<(), Failure> {
    let (g, desc) = args.instance.build()?;
    if let Some(dir) = args.out.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir)?;
    }
    write_graph(&g, &args.out)?;
    if let Some(params) = args.instance.hard_params()? {
        let mut p = args.out.clone().into_os_string();
        p.push(".params.json");
        fs::write(&p, params.to_json()?)?;
    }
    eprintln!("{desc}: n={} m={} -> {}", g.n(), g.m(), args.out.display());
    Ok(())
}

fn cmd_verify_cover(args: CoverArgs) -> Result<(), Failure> {
    let (g, _) = args.instance.build()?;
    let (cover, metrics) = compute_cover(&g, args.radius, args.seed)?;
    let report = verify_cover(&cover, &g);
    if let Some(path) = &args.dump {
        fs::write(path, cover.to_json()?)?;
    }
    let summary = serde_json::json!({
        "schema_version": record::SCHEMA_VERSION,
        "radius": args.radius,
        "clusters": cover.clusters.len(),
        "rounds": metrics.rounds,
        "messages_total": metrics.messages_total,
        "report": report,
    });
    println!("{summary}");
    if report.passed() {
        Ok(())
    } else {
        Err(Failure::failed(anyhow::anyhow!("cover check failed")))
    }
}
