//! Edge-list text format.
//!
//! ```text
//! # comment
//! n 6
//! 0 1 1
//! 1 2 0.5
//! ```
//!
//! The first non-comment line is `n <vertex_count>`; every other line is
//! `u v mu`. Weights are written with Rust's shortest round-trip float
//! formatting, so save followed by load reproduces the graph bit for bit.
//! Generator annotations travel in a `<path>.meta` sidecar.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use crate::error::{LabError, Result};

use super::{Edge, GraphMeta, WeightedGraph};

pub fn write_edge_list(g: &WeightedGraph) -> String {
    let mut out = String::with_capacity(16 * g.edge_count() + 16);
    let _ = writeln!(out, "n {}", g.vertex_count());
    for e in g.edges() {
        let _ = writeln!(out, "{} {} {}", e.u, e.v, e.weight);
    }
    out
}

pub fn parse_edge_list(text: &str, source: &Path) -> Result<(Vec<Edge>, usize)> {
    let perr = |line: usize, message: String| LabError::Parse { path: source.to_path_buf(), line, message };
    let mut n: Option<usize> = None;
    let mut edges = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        match n {
            None => {
                if fields.len() != 2 || fields[0] != "n" {
                    return Err(perr(line_no, format!("expected header `n <vertex_count>`, found `{line}`")));
                }
                let count = fields[1]
                    .parse::<usize>()
                    .map_err(|e| perr(line_no, format!("bad vertex count `{}`: {e}", fields[1])))?;
                n = Some(count);
            }
            Some(count) => {
                if fields.len() != 3 {
                    return Err(perr(line_no, format!("expected `u v mu`, found `{line}`")));
                }
                let u = fields[0].parse::<usize>().map_err(|e| perr(line_no, format!("bad vertex `{}`: {e}", fields[0])))?;
                let v = fields[1].parse::<usize>().map_err(|e| perr(line_no, format!("bad vertex `{}`: {e}", fields[1])))?;
                let w = fields[2].parse::<f64>().map_err(|e| perr(line_no, format!("bad weight `{}`: {e}", fields[2])))?;
                if u >= count || v >= count {
                    return Err(perr(line_no, format!("edge ({u}, {v}) exceeds header vertex count {count}")));
                }
                edges.push(Edge::new(u, v, w));
            }
        }
    }
    match n {
        Some(count) => Ok((edges, count)),
        None => Err(perr(1, "missing header line `n <vertex_count>`".into())),
    }
}

fn sidecar_path(path: &Path) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".meta");
    PathBuf::from(s)
}

fn write_meta(meta: &GraphMeta) -> String {
    let join = |v: &[usize]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ");
    let mut out = String::new();
    let _ = writeln!(out, "family = {}", meta.family);
    let _ = writeln!(out, "boundary = {}", join(&meta.boundary));
    if let Some(o) = meta.origin {
        let _ = writeln!(out, "origin = {o}");
    }
    if let Some(i) = meta.interior {
        let _ = writeln!(out, "interior = {i}");
    }
    if let Some(w) = meta.walk_dim {
        let _ = writeln!(out, "walk_dim = {w}");
    }
    if meta.coord_dim > 0 {
        let _ = writeln!(out, "coord_dim = {}", meta.coord_dim);
        let coords = meta.coords.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ");
        let _ = writeln!(out, "coords = {coords}");
    }
    out
}

fn parse_meta(text: &str, source: &Path) -> Result<GraphMeta> {
    let perr = |line: usize, message: String| LabError::Parse { path: source.to_path_buf(), line, message };
    let mut meta = GraphMeta::default();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| perr(i + 1, format!("expected `key = value`, found `{line}`")))?;
        let value = value.trim();
        let ids = |v: &str| -> Result<Vec<usize>> {
            v.split_whitespace()
                .map(|t| t.parse::<usize>().map_err(|e| perr(i + 1, format!("bad id `{t}`: {e}"))))
                .collect()
        };
        match key.trim() {
            "family" => meta.family = value.to_string(),
            "boundary" => meta.boundary = ids(value)?,
            "origin" => meta.origin = Some(ids(value)?.first().copied().ok_or_else(|| perr(i + 1, "empty origin".into()))?),
            "interior" => meta.interior = Some(ids(value)?.first().copied().ok_or_else(|| perr(i + 1, "empty interior".into()))?),
            "walk_dim" => meta.walk_dim = Some(value.parse().map_err(|e| perr(i + 1, format!("bad walk_dim: {e}")))?),
            "coord_dim" => meta.coord_dim = value.parse().map_err(|e| perr(i + 1, format!("bad coord_dim: {e}")))?,
            "coords" => {
                meta.coords = value
                    .split_whitespace()
                    .map(|t| t.parse::<i64>().map_err(|e| perr(i + 1, format!("bad coordinate `{t}`: {e}"))))
                    .collect::<Result<_>>()?
            }
            other => return Err(perr(i + 1, format!("unknown key `{other}`"))),
        }
    }
    Ok(meta)
}

/// Write the edge list and, when the graph carries annotations, its sidecar.
pub fn save_graph(g: &WeightedGraph, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let io = |source| LabError::Io { path: path.to_path_buf(), source };
    fs::write(path, write_edge_list(g)).map_err(io)?;
    if *g.meta() != GraphMeta::default() {
        let side = sidecar_path(path);
        fs::write(&side, write_meta(g.meta())).map_err(|source| LabError::Io { path: side.clone(), source })?;
    }
    Ok(())
}

pub fn load_graph(path: impl AsRef<Path>) -> Result<WeightedGraph> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|source| LabError::Io { path: path.to_path_buf(), source })?;
    let (edges, n) = parse_edge_list(&text, path)?;
    let side = sidecar_path(path);
    let meta = if side.exists() {
        let t = fs::read_to_string(&side).map_err(|source| LabError::Io { path: side.clone(), source })?;
        parse_meta(&t, &side)?
    } else {
        GraphMeta::default()
    };
    WeightedGraph::from_edges(edges, n, meta)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::build_graph;

    #[test]
    fn missing_header_reports_line_one() {
        let err = parse_edge_list("0 1 1\n", Path::new("x.edges")).unwrap_err();
        match err {
            LabError::Parse { line, .. } => assert_eq!(line, 1),
            other => panic!("unexpected {other}"),
        }
        let err = parse_edge_list("# only comments\n", Path::new("x.edges")).unwrap_err();
        assert!(matches!(err, LabError::Parse { line: 1, .. }));
    }

    #[test]
    fn bad_lines_carry_line_numbers() {
        let err = parse_edge_list("# c\nn 3\n0 1 1\n1 two 1\n", Path::new("g")).unwrap_err();
        assert!(matches!(err, LabError::Parse { line: 4, .. }), "{err}");
        let err = parse_edge_list("n 2\n0 5 1\n", Path::new("g")).unwrap_err();
        assert!(matches!(err, LabError::Parse { line: 2, .. }), "{err}");
    }

    #[test]
    fn awkward_weights_round_trip() {
        let g = build_graph(&[(0, 1, 0.1), (1, 2, 1.0 / 3.0), (2, 0, 1e-300), (2, 3, 7.25)], 4).unwrap();
        let text = write_edge_list(&g);
        let (edges, n) = parse_edge_list(&text, Path::new("mem")).unwrap();
        let h = WeightedGraph::from_edges(edges, n, GraphMeta::default()).unwrap();
        assert_eq!(g, h);
        assert_eq!(text, write_edge_list(&h));
    }
}
