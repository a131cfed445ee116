//! Text edge-list format: a header line `n m`, then `m` lines `u v w`.
//! Ports are assigned by order of incidence in the file.

use std::fmt::Write as _;
use std::path::Path;

use super::{NodeId, WeightedGraph};
use crate::error::{Error, Result};
use crate::weight::Weight;

pub fn serialize_graph<W: Weight>(g: &WeightedGraph<W>) -> String {
    let mut out = String::with_capacity(16 * (g.m() + 1));
    let _ = writeln!(out, "{} {}", g.n(), g.m());
    for (u, v, w) in g.edge_list() {
        let _ = writeln!(out, "{u} {v} {w}");
    }
    out
}

pub fn parse_graph<W: Weight>(text: &str) -> Result<WeightedGraph<W>> {
    let mut lines = text
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty());
    let (hline, header) = lines.next().ok_or(Error::Parse {
        line: 1,
        message: "missing header".into(),
    })?;
    let mut fields = header.split_whitespace();
    let n = parse_field::<usize>(fields.next(), hline, "n")?;
    let m = parse_field::<usize>(fields.next(), hline, "m")?;
    let mut edges = Vec::with_capacity(m);
    for (lno, line) in lines {
        let mut f = line.split_whitespace();
        let u = parse_field::<u64>(f.next(), lno, "u")?;
        let v = parse_field::<u64>(f.next(), lno, "v")?;
        let w = parse_field::<W>(f.next(), lno, "w")?;
        if f.next().is_some() {
            return Err(Error::Parse {
                line: lno + 1,
                message: "trailing fields".into(),
            });
        }
        edges.push((NodeId(u), NodeId(v), w));
    }
    if edges.len() != m {
        return Err(Error::Parse {
            line: hline + 1,
            message: format!("header declares {m} edges, found {}", edges.len()),
        });
    }
    WeightedGraph::from_edges(n, &edges)
}

fn parse_field<T: std::str::FromStr>(field: Option<&str>, line: usize, name: &str) -> Result<T> {
    let raw = field.ok_or_else(|| Error::Parse {
        line: line + 1,
        message: format!("missing field `{name}`"),
    })?;
    raw.parse().map_err(|_| Error::Parse {
        line: line + 1,
        message: format!("bad value `{raw}` for `{name}`"),
    })
}

pub fn write_graph<W: Weight>(g: &WeightedGraph<W>, path: impl AsRef<Path>) -> Result<()> {
    std::fs::write(path, serialize_graph(g))?;
    Ok(())
}

pub fn read_graph<W: Weight>(path: impl AsRef<Path>) -> Result<WeightedGraph<W>> {
    parse_graph(&std::fs::read_to_string(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_reports_line_numbers() {
        let err = parse_graph::<u64>("2 1\n0 x 3\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }));
        let err = parse_graph::<u64>("3 2\n0 1 3\n").unwrap_err();
        assert!(matches!(err, Error::Parse { .. }));
    }

    #[test]
    fn exact_text_roundtrip() {
        let text = "4 4\n3 1 10\n1 0 7\n0 2 9\n2 1 8\n";
        let g = parse_graph::<u64>(text).unwrap();
        assert_eq!(serialize_graph(&g), text);
    }

    #[test]
    fn single_node_file() {
        let g = parse_graph::<u64>("1 0\n").unwrap();
        assert_eq!(g.n(), 1);
        assert_eq!(serialize_graph(&g), "1 0\n");
    }
}
