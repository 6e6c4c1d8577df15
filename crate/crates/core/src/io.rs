//! Edge-list files and sweep CSV.
//!
//! Edge lists are ASCII, one `u v` pair per line; anything after the second
//! token is ignored and lines starting with `#` or `%` are comments. Node
//! tokens are remapped to dense ids in sorted order: numerically when every
//! token is a non-negative integer, lexicographically otherwise. Because the
//! mapping is monotone, writing a graph back with its labels and reading it
//! again reproduces the same ids.

use std::collections::{BTreeMap, HashSet};
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::IoError;
use crate::graph::{Edge, Graph, NodeId};

/// A graph together with the original token of every dense node id.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledGraph {
    pub graph: Graph,
    pub labels: Vec<String>,
}

impl LabeledGraph {
    /// Labels `0..n` for a graph that was never read from a file.
    pub fn unlabeled(graph: Graph) -> Self {
        let labels = (0..graph.node_count()).map(|i| i.to_string()).collect();
        LabeledGraph { graph, labels }
    }
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> IoError + '_ {
    move |source| IoError::Io {
        path: path.display().to_string(),
        source,
    }
}

pub fn read_edge_list(path: impl AsRef<Path>) -> Result<LabeledGraph, IoError> {
    let path = path.as_ref();
    let file = File::open(path).map_err(io_err(path))?;
    parse_edge_list(BufReader::new(file)).map_err(|e| match e {
        IoError::Io { source, .. } => IoError::Io {
            path: path.display().to_string(),
            source,
        },
        other => other,
    })
}

pub fn parse_edge_list<R: Read>(reader: R) -> Result<LabeledGraph, IoError> {
    let mut rows: Vec<(usize, String, String)> = Vec::new();
    for (i, line) in BufReader::new(reader).lines().enumerate() {
        let line = line.map_err(|source| IoError::Io {
            path: "<input>".into(),
            source,
        })?;
        let line_no = i + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') || trimmed.starts_with('%') {
            continue;
        }
        let mut tokens = trimmed.split_whitespace();
        match (tokens.next(), tokens.next()) {
            (Some(u), Some(v)) => rows.push((line_no, u.to_string(), v.to_string())),
            _ => return Err(IoError::Parse { line: line_no }),
        }
    }

    let numeric = rows
        .iter()
        .all(|(_, u, v)| u.parse::<u64>().is_ok() && v.parse::<u64>().is_ok());
    let canonical = |t: &str| -> String {
        if numeric {
            t.parse::<u64>().expect("checked numeric").to_string()
        } else {
            t.to_string()
        }
    };
    let mut ids: BTreeMap<(u64, String), NodeId> = BTreeMap::new();
    let sort_key = |t: &str| -> (u64, String) {
        if numeric {
            (t.parse().expect("checked numeric"), String::new())
        } else {
            (0, t.to_string())
        }
    };
    for (_, u, v) in &rows {
        ids.insert(sort_key(u), 0);
        ids.insert(sort_key(v), 0);
    }
    let mut labels = Vec::with_capacity(ids.len());
    for (dense, (key, id)) in ids.iter_mut().enumerate() {
        *id = dense as NodeId;
        labels.push(if numeric {
            key.0.to_string()
        } else {
            key.1.clone()
        });
    }

    let mut graph = Graph::with_nodes(labels.len());
    let mut seen: HashSet<Edge> = HashSet::with_capacity(rows.len());
    for (line, u, v) in rows {
        let (a, b) = (ids[&sort_key(&u)], ids[&sort_key(&v)]);
        if a == b {
            return Err(IoError::SelfLoop {
                line,
                label: canonical(&u),
            });
        }
        if !seen.insert(Edge::new(a, b)) {
            return Err(IoError::DuplicateEdge {
                line,
                u: canonical(&u),
                v: canonical(&v),
            });
        }
        graph.add_edge(a, b)?;
    }
    Ok(LabeledGraph { graph, labels })
}

/// Writes edges in lexicographic id order using the graph's labels.
pub fn write_edge_list(g: &LabeledGraph, path: impl AsRef<Path>) -> Result<(), IoError> {
    let path = path.as_ref();
    let file = File::create(path).map_err(io_err(path))?;
    let mut out = BufWriter::new(file);
    format_edge_list(g, &mut out).map_err(io_err(path))?;
    out.flush().map_err(io_err(path))
}

pub fn format_edge_list<W: Write>(g: &LabeledGraph, out: &mut W) -> std::io::Result<()> {
    writeln!(
        out,
        "# nodes {} edges {}",
        g.graph.node_count(),
        g.graph.edge_count()
    )?;
    for e in g.graph.sorted_edges() {
        writeln!(out, "{} {}", g.labels[e.0 as usize], g.labels[e.1 as usize])?;
    }
    Ok(())
}

/// Header of every sweep CSV.
pub const SWEEP_HEADER: &str =
    "strategy,fraction,pairs,run,seed,r_initial,r_final,dp,wall_ms,status";

/// One row of sweep output. Aggregate rows use `run = -1` (mean over runs)
/// and `run = -2` (sample standard deviation), with `status` set to `mean`
/// or `std`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRecord {
    pub strategy: String,
    pub fraction: f64,
    pub pairs: usize,
    pub run: i64,
    pub seed: u64,
    pub r_initial: f64,
    pub r_final: f64,
    pub dp: i64,
    pub wall_ms: u64,
    pub status: String,
}

pub fn write_csv_to<W: Write>(records: &[SweepRecord], out: W) -> Result<(), IoError> {
    let mut w = csv::WriterBuilder::new()
        .has_headers(false)
        .from_writer(out);
    w.write_record(SWEEP_HEADER.split(','))?;
    for r in records {
        w.serialize(r)?;
    }
    w.flush().map_err(|source| IoError::Io {
        path: "<csv>".into(),
        source,
    })?;
    Ok(())
}

pub fn write_csv(records: &[SweepRecord], path: impl AsRef<Path>) -> Result<(), IoError> {
    let path = path.as_ref();
    let file = File::create(path).map_err(io_err(path))?;
    write_csv_to(records, BufWriter::new(file))
}

pub fn read_csv_from<R: Read>(input: R) -> Result<Vec<SweepRecord>, IoError> {
    let mut r = csv::Reader::from_reader(input);
    r.deserialize()
        .map(|row| row.map_err(IoError::from))
        .collect()
}

pub fn read_csv(path: impl AsRef<Path>) -> Result<Vec<SweepRecord>, IoError> {
    let path = path.as_ref();
    let file = File::open(path).map_err(io_err(path))?;
    read_csv_from(BufReader::new(file))
}
