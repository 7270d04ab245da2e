//! Text formats for graphs, labels and run logs.
//!
//! Edge lists start with a `n m` line followed by `m` lines `u v`. Label files
//! hold one `v ±1` pair per line. Lines starting with `#` and blank lines are
//! skipped everywhere.

use std::fmt::Write as _;
use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use crate::engine::RunResult;
use crate::error::{Error, Result};
use crate::graph::{Edge, Graph};
use crate::labeling::{Label, Labeling};

fn content_lines<R: BufRead>(reader: R) -> impl Iterator<Item = Result<(usize, String)>> {
    reader
        .lines()
        .enumerate()
        .filter_map(|(i, line)| match line {
            Ok(l) => {
                let t = l.trim();
                (!t.is_empty() && !t.starts_with('#')).then(|| Ok((i + 1, t.to_string())))
            }
            Err(e) => Some(Err(e.into())),
        })
}

fn two_fields(line: usize, text: &str) -> Result<(&str, &str)> {
    let mut it = text.split_whitespace();
    match (it.next(), it.next(), it.next()) {
        (Some(a), Some(b), None) => Ok((a, b)),
        _ => Err(Error::parse(
            line,
            format!("expected two fields, got {text:?}"),
        )),
    }
}

fn parse_usize(line: usize, s: &str) -> Result<usize> {
    s.parse()
        .map_err(|_| Error::parse(line, format!("invalid integer {s:?}")))
}

pub fn read_edge_list<R: BufRead>(reader: R) -> Result<Graph> {
    let mut lines = content_lines(reader);
    let (line, header) = lines
        .next()
        .transpose()?
        .ok_or_else(|| Error::parse(1, "missing `n m` header"))?;
    let (n, m) = two_fields(line, &header)?;
    let (n, m) = (parse_usize(line, n)?, parse_usize(line, m)?);
    let mut edges = Vec::with_capacity(m);
    for entry in lines {
        let (line, text) = entry?;
        let (u, v) = two_fields(line, &text)?;
        let (u, v) = (parse_usize(line, u)?, parse_usize(line, v)?);
        if u >= v {
            return Err(Error::parse(
                line,
                format!("edge {u} {v} must satisfy u < v"),
            ));
        }
        edges.push(Edge::new(u, v));
    }
    if edges.len() != m {
        return Err(Error::parse(
            0,
            format!("header declares {m} edges but {} follow", edges.len()),
        ));
    }
    Graph::new(n, edges)
}

pub fn write_edge_list<W: Write>(g: &Graph, mut out: W) -> Result<()> {
    writeln!(out, "{} {}", g.n(), g.edge_count())?;
    for e in g.edges() {
        writeln!(out, "{} {}", e.lo(), e.hi())?;
    }
    Ok(())
}

/// Reads a label file for a graph on `n` vertices. Vertices without a line
/// stay unlabeled.
pub fn read_labels<R: BufRead>(reader: R, n: usize) -> Result<Labeling> {
    let mut labels = Labeling::empty(n);
    for entry in content_lines(reader) {
        let (line, text) = entry?;
        let (v, l) = two_fields(line, &text)?;
        let v = parse_usize(line, v)?;
        let l: Label = l
            .parse()
            .map_err(|_| Error::parse(line, format!("invalid label {l:?}")))?;
        if v >= n {
            return Err(Error::VertexOutOfRange { vertex: v, n });
        }
        if labels.get(v).is_some() {
            return Err(Error::parse(line, format!("vertex {v} labeled twice")));
        }
        labels.set(v, l)?;
    }
    Ok(labels)
}

pub fn write_labels<W: Write>(labels: &Labeling, mut out: W) -> Result<()> {
    for (v, l) in labels.observed() {
        writeln!(out, "{v} {l}")?;
    }
    Ok(())
}

/// One `step phase vertex label` line per query.
pub fn format_run_log(result: &RunResult) -> String {
    let mut s = String::new();
    for r in &result.log {
        writeln!(s, "{} {} {} {}", r.step, r.phase, r.vertex, r.label).unwrap();
    }
    s
}

/// Summary written next to a run log.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub algorithm: String,
    pub queries_used: usize,
    pub raw_queries: u64,
    pub budget: Option<usize>,
    pub cuts_found: usize,
    pub cut_recovered: Option<bool>,
}
