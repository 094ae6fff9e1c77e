use std::fmt;
use std::str::FromStr;

use blowup_core::{ClusterGraph, Error, Result};
use serde::{Deserialize, Serialize};

/// A named cluster graph: `triangle`, `edge`, `path:<r>`, `cycle:<r>` or
/// `complete:<r>`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum ClusterSpec {
    Triangle,
    Edge,
    Path(usize),
    Cycle(usize),
    Complete(usize),
}

impl ClusterSpec {
    pub fn build(&self) -> Result<ClusterGraph> {
        match *self {
            ClusterSpec::Triangle => Ok(ClusterGraph::triangle()),
            ClusterSpec::Edge => Ok(ClusterGraph::single_edge()),
            ClusterSpec::Path(r) => ClusterGraph::new(r, (1..r).map(|i| (i - 1, i))),
            ClusterSpec::Cycle(r) => ClusterGraph::cycle(r),
            ClusterSpec::Complete(r) => ClusterGraph::complete(r),
        }
    }
}

impl FromStr for ClusterSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::arg(format!("unknown cluster graph {s:?}; try triangle, edge, path:R, cycle:R, complete:R"));
        match s {
            "triangle" => return Ok(ClusterSpec::Triangle),
            "edge" => return Ok(ClusterSpec::Edge),
            _ => {}
        }
        let (kind, r) = s.split_once(':').ok_or_else(bad)?;
        let r: usize = r.parse().map_err(|_| bad())?;
        match kind {
            "path" => Ok(ClusterSpec::Path(r)),
            "cycle" => Ok(ClusterSpec::Cycle(r)),
            "complete" => Ok(ClusterSpec::Complete(r)),
            _ => Err(bad()),
        }
    }
}

impl TryFrom<String> for ClusterSpec {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<ClusterSpec> for String {
    fn from(c: ClusterSpec) -> String {
        c.to_string()
    }
}

impl fmt::Display for ClusterSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ClusterSpec::Triangle => write!(f, "triangle"),
            ClusterSpec::Edge => write!(f, "edge"),
            ClusterSpec::Path(r) => write!(f, "path:{r}"),
            ClusterSpec::Cycle(r) => write!(f, "cycle:{r}"),
            ClusterSpec::Complete(r) => write!(f, "complete:{r}"),
        }
    }
}
