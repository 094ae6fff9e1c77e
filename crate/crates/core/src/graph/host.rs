use super::bitset::BitSet;
use super::cluster::ClusterGraph;
use super::pair::BipartitePair;
use super::simple::{Density, SimpleGraph};
use crate::error::{Error, Result};

/// A host graph `G` on clusters `V_0..V_{r-1}`, each of size `N`.
///
/// Vertex `(i, a)` has global index `i·N + a`. Only pairs along edges of the
/// cluster graph carry edges; each such pair is stored in both directions.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct PartitionedHost {
    clusters: ClusterGraph,
    size: usize,
    // Indexed by `i * r + j`; `Some` iff {i,j} is an edge of the cluster graph.
    blocks: Vec<Option<BipartitePair>>,
}

impl PartitionedHost {
    /// Builds a host from one bipartite pair per cluster edge `(i, j)`, `i < j`,
    /// given from the `V_i` side.
    pub fn from_pairs(
        clusters: ClusterGraph,
        size: usize,
        mut pair_for: impl FnMut(usize, usize) -> Result<BipartitePair>,
    ) -> Result<Self> {
        if size == 0 {
            return Err(Error::arg("cluster size must be at least 1"));
        }
        let r = clusters.order();
        let mut blocks = vec![None; r * r];
        for (i, j) in clusters.edges().collect::<Vec<_>>() {
            let pair = pair_for(i, j)?;
            if pair.left_count() != size || pair.right_count() != size {
                return Err(Error::arg(format!("pair ({i},{j}) is not {size}×{size}")));
            }
            blocks[j * r + i] = Some(pair.transpose());
            blocks[i * r + j] = Some(pair);
        }
        Ok(PartitionedHost {
            clusters,
            size,
            blocks,
        })
    }

    /// Builds a host from global edges, rejecting edges inside a cluster or
    /// across a non-edge of the cluster graph.
    pub fn from_edges(
        clusters: ClusterGraph,
        size: usize,
        edges: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Self> {
        let r = clusters.order();
        let n = r * size;
        let mut per_pair: Vec<Vec<(usize, usize)>> = vec![Vec::new(); r * r];
        for (u, v) in edges {
            if u >= n || v >= n {
                return Err(Error::arg(format!("host edge ({u},{v}) out of range")));
            }
            let (ci, a) = (u / size, u % size);
            let (cj, b) = (v / size, v % size);
            if ci == cj || !clusters.has_edge(ci, cj) {
                return Err(Error::arg(format!(
                    "host edge ({u},{v}) joins clusters {ci} and {cj}, which are not adjacent in R"
                )));
            }
            if ci < cj {
                per_pair[ci * r + cj].push((a, b));
            } else {
                per_pair[cj * r + ci].push((b, a));
            }
        }
        Self::from_pairs(clusters, size, |i, j| {
            BipartitePair::from_edges(size, size, std::mem::take(&mut per_pair[i * r + j]))
        })
    }

    pub fn cluster_graph(&self) -> &ClusterGraph {
        &self.clusters
    }

    /// `N`, the common size of every cluster.
    pub fn cluster_size(&self) -> usize {
        self.size
    }

    pub fn cluster_count(&self) -> usize {
        self.clusters.order()
    }

    pub fn vertex_count(&self) -> usize {
        self.size * self.clusters.order()
    }

    #[inline]
    pub fn global(&self, cluster: usize, offset: usize) -> usize {
        cluster * self.size + offset
    }

    #[inline]
    pub fn locate(&self, v: usize) -> (usize, usize) {
        (v / self.size, v % self.size)
    }

    /// The pair `(V_i, V_j)` from the `V_i` side, if `{i,j}` is a cluster edge.
    pub fn pair(&self, i: usize, j: usize) -> Option<&BipartitePair> {
        let r = self.clusters.order();
        if i >= r || j >= r {
            return None;
        }
        self.blocks[i * r + j].as_ref()
    }

    /// `N(v) ∩ V_j` as a bitset over offsets in `V_j`.
    #[inline]
    pub fn row(&self, cluster: usize, offset: usize, j: usize) -> Option<&BitSet> {
        self.pair(cluster, j).map(|p| p.row(offset))
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        let (i, a) = self.locate(u);
        let (j, b) = self.locate(v);
        self.row(i, a, j).is_some_and(|row| row.contains(b))
    }

    pub fn degree(&self, v: usize) -> usize {
        let (i, a) = self.locate(v);
        self.clusters
            .neighbors(i)
            .map(|j| self.row(i, a, j).map_or(0, BitSet::count))
            .sum()
    }

    /// `deg(v, Y)` for `Y ⊆ V_j` given as offsets.
    pub fn degree_into_class(&self, v: usize, j: usize, set: &BitSet) -> Result<usize> {
        if v >= self.vertex_count() {
            return Err(Error::arg(format!("host vertex {v} out of range")));
        }
        if set.universe() != self.size {
            return Err(Error::arg("class subset has the wrong universe"));
        }
        let (i, a) = self.locate(v);
        Ok(self.row(i, a, j).map_or(0, |row| row.intersection_count(set)))
    }

    /// `deg(v, Y)` for a global vertex set `Y`.
    pub fn degree_into(&self, v: usize, set: &BitSet) -> Result<usize> {
        if v >= self.vertex_count() {
            return Err(Error::arg(format!("host vertex {v} out of range")));
        }
        if set.universe() != self.vertex_count() {
            return Err(Error::arg("vertex set has the wrong universe"));
        }
        let (i, a) = self.locate(v);
        Ok(self
            .clusters
            .neighbors(i)
            .filter_map(|j| self.row(i, a, j).map(|row| (j, row)))
            .map(|(j, row)| row.iter().filter(|&b| set.contains(self.global(j, b))).count())
            .sum())
    }

    pub fn pair_density(&self, i: usize, j: usize) -> Option<Density> {
        self.pair(i, j).map(BipartitePair::density)
    }

    pub fn edge_count(&self) -> usize {
        self.clusters
            .edges()
            .map(|(i, j)| self.pair(i, j).map_or(0, BipartitePair::edge_count))
            .sum()
    }

    /// Global edges `(u, v)` with `u < v`, lexicographically sorted.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(self.edge_count());
        for (i, j) in self.clusters.edges() {
            if let Some(pair) = self.pair(i, j) {
                for (a, row) in pair.rows().iter().enumerate() {
                    out.extend(row.iter().map(|b| (self.global(i, a), self.global(j, b))));
                }
            }
        }
        out.sort_unstable();
        out
    }

    pub fn to_simple(&self) -> SimpleGraph {
        SimpleGraph::from_edges(self.vertex_count(), self.edges()).expect("host edges are valid")
    }

    /// A copy with the edge `{u, v}` removed. Intended for fault injection in tests.
    pub fn without_edge(&self, u: usize, v: usize) -> PartitionedHost {
        let mut out = self.clone();
        let r = self.clusters.order();
        let (i, a) = self.locate(u);
        let (j, b) = self.locate(v);
        if let Some(Some(p)) = out.blocks.get_mut(i * r + j) {
            let mut rows = p.rows().to_vec();
            rows[a].remove(b);
            *p = BipartitePair::from_rows(self.size, rows).expect("same shape");
        }
        if let Some(Some(p)) = out.blocks.get_mut(j * r + i) {
            let mut rows = p.rows().to_vec();
            rows[b].remove(a);
            *p = BipartitePair::from_rows(self.size, rows).expect("same shape");
        }
        out
    }
}
