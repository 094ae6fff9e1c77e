//! Plain-text graph files.
//!
//! ```text
//! # comment
//! graph <n>            | host <r> <N>
//! r <i> <j>            (host only: edge of the cluster graph)
//! e <u> <v>            (global vertex indices)
//! psi <v> <c>          (pattern only: cluster of vertex v)
//! ```
//!
//! Writers emit edges sorted lexicographically, so equal graphs produce
//! byte-identical files. Embeddings use one `map <x> <v>` line per pattern vertex.

use std::fmt::Write as _;

use super::cluster::ClusterGraph;
use super::host::PartitionedHost;
use super::pattern::Pattern;
use super::simple::SimpleGraph;
use crate::error::{Error, Result};

/// A parsed pattern file before it is bound to a cluster graph.
#[derive(Clone, Debug)]
pub struct PatternFile {
    pub graph: SimpleGraph,
    pub assignment: Vec<usize>,
}

impl PatternFile {
    /// Validates against the host's cluster graph; `max_degree` defaults to `Δ(H)`.
    pub fn bind(self, host: &PartitionedHost, max_degree: Option<usize>) -> Result<Pattern> {
        let bound = max_degree.unwrap_or_else(|| self.graph.max_degree());
        Pattern::new(self.graph, self.assignment, host.cluster_graph(), host.cluster_size(), bound)
    }
}

struct Lines<'a> {
    inner: std::iter::Enumerate<std::str::Lines<'a>>,
}

impl<'a> Lines<'a> {
    fn new(text: &'a str) -> Self {
        Lines {
            inner: text.lines().enumerate(),
        }
    }
}

impl<'a> Iterator for Lines<'a> {
    type Item = (usize, Vec<&'a str>);

    fn next(&mut self) -> Option<Self::Item> {
        for (idx, line) in self.inner.by_ref() {
            let content = line.split('#').next().unwrap_or("").trim();
            if !content.is_empty() {
                return Some((idx + 1, content.split_whitespace().collect()));
            }
        }
        None
    }
}

fn num(line: usize, token: &str) -> Result<usize> {
    token
        .parse()
        .map_err(|_| Error::parse(line, format!("expected a nonnegative integer, found {token:?}")))
}

fn expect_args(line: usize, tokens: &[&str], count: usize) -> Result<()> {
    if tokens.len() != count + 1 {
        return Err(Error::parse(
            line,
            format!("`{}` takes {count} arguments, found {}", tokens[0], tokens.len() - 1),
        ));
    }
    Ok(())
}

enum Header {
    Graph(usize),
    Host(usize, usize),
}

fn header(lines: &mut Lines<'_>) -> Result<Header> {
    let (line, tokens) = lines.next().ok_or_else(|| Error::parse(0, "empty graph file"))?;
    match tokens[0] {
        "graph" => {
            expect_args(line, &tokens, 1)?;
            Ok(Header::Graph(num(line, tokens[1])?))
        }
        "host" => {
            expect_args(line, &tokens, 2)?;
            Ok(Header::Host(num(line, tokens[1])?, num(line, tokens[2])?))
        }
        other => Err(Error::parse(line, format!("expected `graph` or `host` header, found {other:?}"))),
    }
}

pub fn write_graph(g: &SimpleGraph) -> String {
    let mut out = format!("graph {}\n", g.vertex_count());
    for (u, v) in g.edges() {
        let _ = writeln!(out, "e {u} {v}");
    }
    out
}

pub fn parse_graph(text: &str) -> Result<SimpleGraph> {
    parse_pattern_like(text, false).map(|p| p.graph)
}

pub fn write_pattern(p: &Pattern) -> String {
    let mut out = write_graph(p.graph());
    for (x, &c) in p.assignment().iter().enumerate() {
        let _ = writeln!(out, "psi {x} {c}");
    }
    out
}

pub fn parse_pattern(text: &str) -> Result<PatternFile> {
    parse_pattern_like(text, true)
}

fn parse_pattern_like(text: &str, need_psi: bool) -> Result<PatternFile> {
    let mut lines = Lines::new(text);
    let n = match header(&mut lines)? {
        Header::Graph(n) => n,
        Header::Host(..) => return Err(Error::parse(1, "expected a `graph` header, found `host`")),
    };
    let mut edges = Vec::new();
    let mut psi: Vec<Option<usize>> = vec![None; n];
    for (line, tokens) in lines {
        match tokens[0] {
            "e" => {
                expect_args(line, &tokens, 2)?;
                let (u, v) = (num(line, tokens[1])?, num(line, tokens[2])?);
                if u >= n || v >= n || u == v {
                    return Err(Error::parse(line, format!("invalid edge ({u},{v})")));
                }
                edges.push((u, v));
            }
            "psi" => {
                expect_args(line, &tokens, 2)?;
                let (v, c) = (num(line, tokens[1])?, num(line, tokens[2])?);
                if v >= n {
                    return Err(Error::parse(line, format!("psi for vertex {v} out of range")));
                }
                if psi[v].replace(c).is_some() {
                    return Err(Error::parse(line, format!("duplicate psi for vertex {v}")));
                }
            }
            other => return Err(Error::parse(line, format!("unknown record {other:?}"))),
        }
    }
    let assignment = if need_psi {
        psi.iter()
            .enumerate()
            .map(|(v, c)| c.ok_or_else(|| Error::parse(0, format!("vertex {v} has no psi line"))))
            .collect::<Result<Vec<_>>>()?
    } else {
        Vec::new()
    };
    Ok(PatternFile {
        graph: SimpleGraph::from_edges(n, edges)?,
        assignment,
    })
}

pub fn write_host(g: &PartitionedHost) -> String {
    let r = g.cluster_graph();
    let mut out = format!("host {} {}\n", r.order(), g.cluster_size());
    for (i, j) in r.edges() {
        let _ = writeln!(out, "r {i} {j}");
    }
    for (u, v) in g.edges() {
        let _ = writeln!(out, "e {u} {v}");
    }
    out
}

/// Parses a host file. Without any `r` lines the cluster graph is inferred
/// from the edges present.
pub fn parse_host(text: &str) -> Result<PartitionedHost> {
    let mut lines = Lines::new(text);
    let (r, size) = match header(&mut lines)? {
        Header::Host(r, size) => (r, size),
        Header::Graph(_) => return Err(Error::parse(1, "expected a `host` header, found `graph`")),
    };
    if size == 0 {
        return Err(Error::parse(1, "cluster size must be positive"));
    }
    let n = r * size;
    let mut cluster_edges = Vec::new();
    let mut edges = Vec::new();
    for (line, tokens) in lines {
        match tokens[0] {
            "r" => {
                expect_args(line, &tokens, 2)?;
                cluster_edges.push((num(line, tokens[1])?, num(line, tokens[2])?));
            }
            "e" => {
                expect_args(line, &tokens, 2)?;
                let (u, v) = (num(line, tokens[1])?, num(line, tokens[2])?);
                if u >= n || v >= n {
                    return Err(Error::parse(line, format!("edge ({u},{v}) out of range")));
                }
                edges.push((u, v));
            }
            other => return Err(Error::parse(line, format!("unknown record {other:?}"))),
        }
    }
    if cluster_edges.is_empty() {
        cluster_edges = edges.iter().map(|&(u, v)| (u / size, v / size)).collect();
    }
    let clusters = ClusterGraph::new(r, cluster_edges)?;
    PartitionedHost::from_edges(clusters, size, edges)
}

pub fn write_map(map: &[(usize, usize)]) -> String {
    let mut sorted = map.to_vec();
    sorted.sort_unstable();
    let mut out = String::new();
    for (x, v) in sorted {
        let _ = writeln!(out, "map {x} {v}");
    }
    out
}

/// Parses `map x v` lines. A pattern vertex may appear at most once.
pub fn parse_map(text: &str) -> Result<Vec<(usize, usize)>> {
    let mut seen = std::collections::BTreeSet::new();
    let mut out = Vec::new();
    for (line, tokens) in Lines::new(text) {
        if tokens[0] != "map" {
            return Err(Error::parse(line, format!("unknown record {:?}", tokens[0])));
        }
        expect_args(line, &tokens, 2)?;
        let (x, v) = (num(line, tokens[1])?, num(line, tokens[2])?);
        if !seen.insert(x) {
            return Err(Error::parse(line, format!("pattern vertex {x} mapped twice")));
        }
        out.push((x, v));
    }
    Ok(out)
}
