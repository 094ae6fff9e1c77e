use super::bitset::BitSet;
use super::simple::Density;
use crate::error::{Error, Result};

/// A bipartite graph `(A, B, E)` stored as one bitset row over `B` per vertex of `A`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct BipartitePair {
    right: usize,
    rows: Vec<BitSet>,
}

impl BipartitePair {
    pub fn from_rows(right: usize, rows: Vec<BitSet>) -> Result<Self> {
        if rows.iter().any(|r| r.universe() != right) {
            return Err(Error::arg("pair row has the wrong universe"));
        }
        Ok(BipartitePair { right, rows })
    }

    pub fn from_edges(left: usize, right: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut rows = vec![BitSet::new(right); left];
        for (a, b) in edges {
            if a >= left || b >= right {
                return Err(Error::arg(format!("pair edge ({a},{b}) out of range")));
            }
            rows[a].insert(b);
        }
        Ok(BipartitePair { right, rows })
    }

    pub fn complete(left: usize, right: usize) -> Self {
        BipartitePair {
            right,
            rows: vec![BitSet::full(right); left],
        }
    }

    pub fn empty(left: usize, right: usize) -> Self {
        BipartitePair {
            right,
            rows: vec![BitSet::new(right); left],
        }
    }

    pub fn left_count(&self) -> usize {
        self.rows.len()
    }

    pub fn right_count(&self) -> usize {
        self.right
    }

    pub fn row(&self, a: usize) -> &BitSet {
        &self.rows[a]
    }

    pub fn rows(&self) -> &[BitSet] {
        &self.rows
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.rows[a].contains(b)
    }

    pub fn edge_count(&self) -> usize {
        self.rows.iter().map(BitSet::count).sum()
    }

    /// The same pair seen from the `B` side.
    pub fn transpose(&self) -> BipartitePair {
        let mut rows = vec![BitSet::new(self.left_count()); self.right];
        for (a, row) in self.rows.iter().enumerate() {
            for b in row.iter() {
                rows[b].insert(a);
            }
        }
        BipartitePair {
            right: self.left_count(),
            rows,
        }
    }

    pub fn density(&self) -> Density {
        Density {
            edges: self.edge_count() as u64,
            pairs: (self.left_count() * self.right) as u64,
        }
    }

    /// `e(X, Y)` for `X ⊆ A`, `Y ⊆ B`.
    pub fn edges_between(&self, xs: &BitSet, ys: &BitSet) -> usize {
        xs.iter().map(|a| self.rows[a].intersection_count(ys)).sum()
    }
}
