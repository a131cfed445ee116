use std::fs;
use std::path::PathBuf;

use clap::{Args, ValueEnum};

use congest_mst::graph::{
    generate_complete, generate_grid, generate_path, generate_path_like, generate_random_connected,
    generate_star, read_graph,
};
use congest_mst::lb::{build_hard_graph, LowerBoundParams};
use congest_mst::{Error, Graph, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Family {
    Random,
    Path,
    Pathlike,
    Grid,
    Complete,
    Star,
    /// Lower-bound construction; `--n` is the core size, `--diameter` the
    /// highway length.
    Hard,
}

#[derive(Args, Debug, Clone)]
pub struct InstanceArgs {
    #[arg(long, value_enum, required_unless_present = "file", conflicts_with = "file")]
    pub gen: Option<Family>,
    /// Read the graph from a file.
    #[arg(long)]
    pub file: Option<PathBuf>,
    #[arg(long, default_value_t = 64)]
    pub n: usize,
    /// Edge count for `random`, chord count for `pathlike`.
    #[arg(long)]
    pub m: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub graph_seed: u64,
    /// Highway length for `hard`.
    #[arg(long, default_value_t = 8)]
    pub diameter: usize,
    /// JSON parameters for `hard`, overriding `--n` and `--diameter`.
    #[arg(long)]
    pub params: Option<PathBuf>,
}

impl InstanceArgs {
    pub fn generated(family: Family, n: usize, m: Option<usize>, graph_seed: u64) -> Self {
        InstanceArgs {
            gen: Some(family),
            file: None,
            n,
            m,
            graph_seed,
            diameter: 8,
            params: None,
        }
    }

    pub fn hard_params(&self) -> Result<Option<LowerBoundParams>> {
        if self.gen != Some(Family::Hard) {
            return Ok(None);
        }
        Ok(Some(match &self.params {
            Some(p) => LowerBoundParams::from_json(&fs::read_to_string(p)?)?,
            None => LowerBoundParams::square(self.n, self.diameter, self.graph_seed),
        }))
    }

    /// The graph and a short descriptor for result records.
    pub fn build(&self) -> Result<(Graph, String)> {
        if let Some(path) = &self.file {
            return Ok((read_graph(path)?, format!("file:{}", path.display())));
        }
        let family = self.gen.ok_or_else(|| Error::Parameter("no instance given".into()))?;
        let (n, seed) = (self.n, self.graph_seed);
        if n == 0 {
            return Err(Error::Parameter("n must be positive".into()));
        }
        let g = match family {
            Family::Random => {
                let m = self.m.unwrap_or(2 * n).max(n - 1);
                return Ok((
                    generate_random_connected(n, m, seed)?,
                    format!("random:n={n},m={m},seed={seed}"),
                ));
            }
            Family::Path => generate_path(n)?,
            Family::Pathlike => {
                let extra = self.m.unwrap_or(n / 8);
                return Ok((
                    generate_path_like(n, extra, seed)?,
                    format!("pathlike:n={n},extra={extra},seed={seed}"),
                ));
            }
            Family::Grid => {
                let rows = (n as f64).sqrt().floor().max(1.0) as usize;
                let cols = n.div_ceil(rows);
                return Ok((
                    generate_grid(rows, cols, seed)?,
                    format!("grid:rows={rows},cols={cols},seed={seed}"),
                ));
            }
            Family::Complete => generate_complete(n, seed)?,
            Family::Star => generate_star(n - 1)?,
            Family::Hard => {
                let params = self.hard_params()?.expect("hard family");
                let hg = build_hard_graph(&params)?;
                return Ok((
                    hg.graph,
                    format!("hard:p={},d={},core={},seed={}", params.p, params.d_target, params.core_size, params.seed),
                ));
            }
        };
        let name = format!("{family:?}").to_lowercase();
        Ok((g, format!("{name}:n={n},seed={seed}")))
    }
}
