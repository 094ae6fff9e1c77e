use std::collections::BTreeSet;

use crate::error::{Error, Result};

/// The reduced graph `R` on clusters `0..r`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ClusterGraph {
    r: usize,
    edges: BTreeSet<(usize, usize)>,
}

impl ClusterGraph {
    pub fn new(r: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        if r < 2 {
            return Err(Error::arg(format!("cluster graph needs at least 2 clusters, got {r}")));
        }
        let mut set = BTreeSet::new();
        for (i, j) in edges {
            if i >= r || j >= r {
                return Err(Error::arg(format!("cluster edge ({i},{j}) out of range for r = {r}")));
            }
            if i == j {
                return Err(Error::arg(format!("cluster graph loop at {i}")));
            }
            set.insert((i.min(j), i.max(j)));
        }
        Ok(ClusterGraph { r, edges: set })
    }

    pub fn complete(r: usize) -> Result<Self> {
        Self::new(r, (0..r).flat_map(|i| (i + 1..r).map(move |j| (i, j))))
    }

    pub fn cycle(r: usize) -> Result<Self> {
        Self::new(r, (0..r).map(|i| (i, (i + 1) % r)))
    }

    pub fn triangle() -> Self {
        Self::complete(3).expect("valid")
    }

    pub fn single_edge() -> Self {
        Self::new(2, [(0, 1)]).expect("valid")
    }

    pub fn order(&self) -> usize {
        self.r
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        self.edges.contains(&(i.min(j), i.max(j)))
    }

    /// Edges `(i, j)` with `i < j` in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.edges.iter().copied()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn neighbors(&self, i: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.r).filter(move |&j| self.has_edge(i, j))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validates_structure() {
        assert!(ClusterGraph::new(1, []).is_err());
        assert!(ClusterGraph::new(3, [(0, 0)]).is_err());
        assert!(ClusterGraph::new(3, [(0, 3)]).is_err());
        let r = ClusterGraph::new(3, [(2, 0), (0, 2)]).unwrap();
        assert_eq!(r.edge_count(), 1);
        assert!(r.has_edge(0, 2) && r.has_edge(2, 0));
        assert_eq!(ClusterGraph::triangle().edges().collect::<Vec<_>>(), vec![(0, 1), (0, 2), (1, 2)]);
        assert_eq!(ClusterGraph::cycle(4).unwrap().neighbors(0).collect::<Vec<_>>(), vec![1, 3]);
    }
}
