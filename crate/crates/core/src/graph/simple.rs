use std::collections::VecDeque;

use super::bitset::BitSet;
use crate::error::{Error, Result};
use crate::rational::Rational;

/// An undirected simple graph on vertices `0..n`.
///
/// Adjacency is kept both as bitset rows (for set algebra) and as sorted
/// neighbour lists (for iteration).
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SimpleGraph {
    rows: Vec<BitSet>,
    lists: Vec<Vec<usize>>,
    edge_count: usize,
}

/// `e(X,Y)` together with `|X|·|Y|`.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct Density {
    pub edges: u64,
    pub pairs: u64,
}

impl Density {
    pub fn as_rational(&self) -> Rational {
        if self.pairs == 0 {
            return Rational::zero();
        }
        Rational::new(self.edges as i64, self.pairs as i64).expect("nonzero denominator")
    }

    pub fn as_f64(&self) -> f64 {
        if self.pairs == 0 {
            0.0
        } else {
            self.edges as f64 / self.pairs as f64
        }
    }
}

impl SimpleGraph {
    pub fn empty(n: usize) -> Self {
        SimpleGraph {
            rows: vec![BitSet::new(n); n],
            lists: vec![Vec::new(); n],
            edge_count: 0,
        }
    }

    /// Builds a graph from an edge list. Duplicate edges are merged; loops and
    /// out-of-range endpoints are rejected.
    pub fn from_edges(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut rows = vec![BitSet::new(n); n];
        for (u, v) in edges {
            if u >= n || v >= n {
                return Err(Error::arg(format!("edge ({u},{v}) out of range for {n} vertices")));
            }
            if u == v {
                return Err(Error::arg(format!("self-loop at vertex {u}")));
            }
            rows[u].insert(v);
            rows[v].insert(u);
        }
        let lists: Vec<Vec<usize>> = rows.iter().map(|r| r.iter().collect()).collect();
        let edge_count = lists.iter().map(Vec::len).sum::<usize>() / 2;
        Ok(SimpleGraph {
            rows,
            lists,
            edge_count,
        })
    }

    pub fn vertex_count(&self) -> usize {
        self.rows.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    #[inline]
    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.lists[v]
    }

    #[inline]
    pub fn neighbor_set(&self, v: usize) -> &BitSet {
        &self.rows[v]
    }

    #[inline]
    pub fn degree(&self, v: usize) -> usize {
        self.lists[v].len()
    }

    #[inline]
    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.rows[u].contains(v)
    }

    pub fn max_degree(&self) -> usize {
        self.lists.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn min_degree(&self) -> usize {
        self.lists.iter().map(Vec::len).min().unwrap_or(0)
    }

    /// Edges as `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.lists
            .iter()
            .enumerate()
            .flat_map(|(u, ns)| ns.iter().filter(move |&&v| v > u).map(move |&v| (u, v)))
    }

    fn check_vertex(&self, v: usize) -> Result<()> {
        if v >= self.vertex_count() {
            return Err(Error::arg(format!(
                "vertex {v} out of range for {} vertices",
                self.vertex_count()
            )));
        }
        Ok(())
    }

    /// `deg(v, Y) = |N(v) ∩ Y|`.
    pub fn degree_into(&self, v: usize, set: &BitSet) -> Result<usize> {
        self.check_vertex(v)?;
        if set.universe() != self.vertex_count() {
            return Err(Error::arg("vertex set has a different universe"));
        }
        Ok(self.rows[v].intersection_count(set))
    }

    /// `d(X,Y) = e(X,Y) / (|X|·|Y|)` for disjoint nonempty `X`, `Y`.
    pub fn density(&self, xs: &BitSet, ys: &BitSet) -> Result<Density> {
        if xs.universe() != self.vertex_count() || ys.universe() != self.vertex_count() {
            return Err(Error::arg("vertex set has a different universe"));
        }
        let (nx, ny) = (xs.count(), ys.count());
        if nx == 0 || ny == 0 {
            return Err(Error::arg("density of an empty vertex set"));
        }
        if !xs.is_disjoint(ys) {
            return Err(Error::arg("density requires disjoint vertex sets"));
        }
        let edges: usize = xs.iter().map(|x| self.rows[x].intersection_count(ys)).sum();
        Ok(Density {
            edges: edges as u64,
            pairs: (nx * ny) as u64,
        })
    }

    /// Shortest-path length, or `None` if `v` is unreachable from `u`.
    pub fn bfs_distance(&self, u: usize, v: usize) -> Result<Option<usize>> {
        self.check_vertex(u)?;
        self.check_vertex(v)?;
        if u == v {
            return Ok(Some(0));
        }
        let mut dist = vec![usize::MAX; self.vertex_count()];
        let mut queue = VecDeque::from([u]);
        dist[u] = 0;
        while let Some(x) = queue.pop_front() {
            for &y in &self.lists[x] {
                if dist[y] == usize::MAX {
                    dist[y] = dist[x] + 1;
                    if y == v {
                        return Ok(Some(dist[y]));
                    }
                    queue.push_back(y);
                }
            }
        }
        Ok(None)
    }

    /// All vertices within distance `radius` of `v`, including `v`.
    pub fn ball(&self, v: usize, radius: usize) -> Vec<usize> {
        let mut seen = vec![v];
        let mut frontier = vec![v];
        for _ in 0..radius {
            let mut next = Vec::new();
            for &x in &frontier {
                for &y in &self.lists[x] {
                    if !seen.contains(&y) {
                        seen.push(y);
                        next.push(y);
                    }
                }
            }
            frontier = next;
        }
        seen
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn path(n: usize) -> SimpleGraph {
        SimpleGraph::from_edges(n, (1..n).map(|i| (i - 1, i))).unwrap()
    }

    #[test]
    fn rejects_loops_and_out_of_range() {
        assert!(SimpleGraph::from_edges(3, [(1, 1)]).is_err());
        assert!(SimpleGraph::from_edges(3, [(0, 3)]).is_err());
    }

    #[test]
    fn degree_into_examples() {
        let g = SimpleGraph::from_edges(4, [(0, 1)]).unwrap();
        assert_eq!(g.degree_into(3, &BitSet::full(4)).unwrap(), 0);
        // K_{3,3} on {0,1,2} × {3,4,5}
        let k33 = SimpleGraph::from_edges(6, (0..3).flat_map(|a| (3..6).map(move |b| (a, b)))).unwrap();
        let opposite = BitSet::from_indices(6, 3..6);
        assert_eq!(k33.degree_into(1, &opposite).unwrap(), 3);
        assert!(k33.degree_into(6, &opposite).is_err());
    }

    #[test]
    fn density_examples() {
        let k33 = SimpleGraph::from_edges(6, (0..3).flat_map(|a| (3..6).map(move |b| (a, b)))).unwrap();
        let x = BitSet::from_indices(6, [0, 2]);
        let y = BitSet::from_indices(6, [4, 5]);
        assert_eq!(k33.density(&x, &y).unwrap().as_rational(), Rational::one());
        let empty = SimpleGraph::empty(6);
        assert!(empty.density(&x, &y).unwrap().as_rational().is_zero());
        // |X| = 3, |Y| = 4, e(X,Y) = 6
        let edges = [(0, 3), (0, 4), (1, 5), (1, 6), (2, 3), (2, 6)];
        let g = SimpleGraph::from_edges(7, edges).unwrap();
        let d = g
            .density(&BitSet::from_indices(7, 0..3), &BitSet::from_indices(7, 3..7))
            .unwrap();
        assert_eq!(d.as_rational(), Rational::new(1, 2).unwrap());
        assert!(g.density(&BitSet::new(7), &BitSet::full(7)).is_err());
        assert!(g.density(&BitSet::from_indices(7, [0, 1]), &BitSet::from_indices(7, [1, 2])).is_err());
    }

    #[test]
    fn bfs_distance_examples() {
        let p5 = path(5);
        assert_eq!(p5.bfs_distance(2, 2).unwrap(), Some(0));
        assert_eq!(p5.bfs_distance(2, 3).unwrap(), Some(1));
        assert_eq!(p5.bfs_distance(0, 4).unwrap(), Some(4));
        let two = SimpleGraph::from_edges(4, [(0, 1), (2, 3)]).unwrap();
        assert_eq!(two.bfs_distance(0, 3).unwrap(), None);
        assert_eq!(p5.ball(0, 2), vec![0, 1, 2]);
    }

    fn random_graph(n: usize, p: f64, seed: u64) -> (SimpleGraph, Vec<(usize, usize)>) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut edges = Vec::new();
        for u in 0..n {
            for v in u + 1..n {
                if rng.random_bool(p) {
                    edges.push((u, v));
                }
            }
        }
        (SimpleGraph::from_edges(n, edges.iter().copied()).unwrap(), edges)
    }

    proptest! {
        #[test]
        fn degree_into_matches_edge_scan(seed in any::<u64>(), v in 0usize..20, mask in any::<u32>()) {
            let (g, edges) = random_graph(20, 0.3, seed);
            let ys: Vec<usize> = (0..20).filter(|i| mask >> i & 1 == 1).collect();
            let set = BitSet::from_indices(20, ys.iter().copied());
            let naive = edges
                .iter()
                .filter(|&&(a, b)| (a == v && ys.contains(&b)) || (b == v && ys.contains(&a)))
                .count();
            prop_assert_eq!(g.degree_into(v, &set).unwrap(), naive);
        }

        #[test]
        fn symmetric_loop_free_and_density_counts_edges(seed in any::<u64>(), mask in 1u32..(1 << 19)) {
            let (g, edges) = random_graph(20, 0.4, seed);
            for u in 0..20 {
                prop_assert!(!g.has_edge(u, u));
                for v in 0..20 {
                    prop_assert_eq!(g.has_edge(u, v), g.has_edge(v, u));
                }
            }
            prop_assert_eq!(g.edge_count() * 2, (0..20).map(|v| g.degree(v)).sum::<usize>());
            prop_assert_eq!(g.edges().collect::<Vec<_>>(), edges.clone());
            let xs = BitSet::from_indices(20, (0..20).filter(|i| mask >> i & 1 == 1));
            let ys = BitSet::full(20).difference(&xs);
            let d = g.density(&xs, &ys).unwrap();
            let naive = edges
                .iter()
                .filter(|&&(a, b)| (xs.contains(a) && ys.contains(b)) || (xs.contains(b) && ys.contains(a)))
                .count();
            prop_assert_eq!(d.edges as usize, naive);
            prop_assert_eq!(d.pairs as usize, xs.count() * ys.count());
        }
    }
}
