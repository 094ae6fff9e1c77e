use super::cluster::ClusterGraph;
use super::simple::SimpleGraph;
use crate::error::{Error, Result};

/// A pattern graph `H` with its cluster assignment `ψ`.
///
/// Construction checks that `ψ` is a homomorphism into the cluster graph,
/// that `Δ(H)` respects the configured bound and that no class
/// `X_i = ψ⁻¹(i)` is larger than the cluster size `N`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Pattern {
    graph: SimpleGraph,
    assignment: Vec<usize>,
    clusters: ClusterGraph,
    cluster_size: usize,
    max_degree: usize,
}

impl Pattern {
    pub fn new(
        graph: SimpleGraph,
        assignment: Vec<usize>,
        clusters: &ClusterGraph,
        cluster_size: usize,
        max_degree: usize,
    ) -> Result<Self> {
        let n = graph.vertex_count();
        if assignment.len() != n {
            return Err(Error::arg(format!(
                "assignment covers {} vertices, graph has {n}",
                assignment.len()
            )));
        }
        let r = clusters.order();
        if let Some(x) = assignment.iter().position(|&c| c >= r) {
            return Err(Error::arg(format!("vertex {x} assigned to nonexistent cluster {}", assignment[x])));
        }
        for (x, y) in graph.edges() {
            let (cx, cy) = (assignment[x], assignment[y]);
            if !clusters.has_edge(cx, cy) {
                return Err(Error::arg(format!(
                    "edge ({x},{y}) maps to clusters ({cx},{cy}), which is not an edge of R"
                )));
            }
        }
        if graph.max_degree() > max_degree {
            return Err(Error::arg(format!(
                "pattern has maximum degree {} above the bound {max_degree}",
                graph.max_degree()
            )));
        }
        let mut sizes = vec![0usize; r];
        for &c in &assignment {
            sizes[c] += 1;
        }
        if let Some(i) = sizes.iter().position(|&s| s > cluster_size) {
            return Err(Error::arg(format!(
                "class X_{i} has {} vertices, more than the cluster size {cluster_size}",
                sizes[i]
            )));
        }
        Ok(Pattern {
            graph,
            assignment,
            clusters: clusters.clone(),
            cluster_size,
            max_degree,
        })
    }

    pub fn graph(&self) -> &SimpleGraph {
        &self.graph
    }

    pub fn assignment(&self) -> &[usize] {
        &self.assignment
    }

    #[inline]
    pub fn cluster_of(&self, x: usize) -> usize {
        self.assignment[x]
    }

    pub fn cluster_graph(&self) -> &ClusterGraph {
        &self.clusters
    }

    pub fn cluster_size(&self) -> usize {
        self.cluster_size
    }

    /// The configured degree bound `Δ`.
    pub fn max_degree_bound(&self) -> usize {
        self.max_degree
    }

    pub fn vertex_count(&self) -> usize {
        self.graph.vertex_count()
    }

    /// `X_i`, in increasing vertex order.
    pub fn class(&self, i: usize) -> Vec<usize> {
        (0..self.vertex_count()).filter(|&x| self.assignment[x] == i).collect()
    }

    pub fn class_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.clusters.order()];
        for &c in &self.assignment {
            sizes[c] += 1;
        }
        sizes
    }

    /// Whether `|X_i| = N` for every cluster.
    pub fn is_balanced(&self) -> bool {
        self.class_sizes().iter().all(|&s| s == self.cluster_size)
    }

    /// Appends isolated vertices until every class has exactly `N` members.
    /// Original vertices keep their indices.
    pub fn padded(&self) -> Pattern {
        let mut assignment = self.assignment.clone();
        for (i, &s) in self.class_sizes().iter().enumerate() {
            assignment.extend(std::iter::repeat_n(i, self.cluster_size - s));
        }
        let graph = SimpleGraph::from_edges(assignment.len(), self.graph.edges()).expect("edges stay valid");
        Pattern {
            graph,
            assignment,
            clusters: self.clusters.clone(),
            cluster_size: self.cluster_size,
            max_degree: self.max_degree,
        }
    }
}
