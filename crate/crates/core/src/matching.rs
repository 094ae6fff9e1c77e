//! Maximum bipartite matching and Hall-violator extraction.
//!
//! Used by the second embedding phase to find a system of distinct
//! representatives: left vertices are the still-unplaced pattern vertices of a
//! cluster, right vertices the unoccupied host vertices of that cluster, and an
//! edge means membership in the pattern vertex's candidate set.

use std::collections::VecDeque;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{BipartitePair, BitSet};

/// Left vertices with one bitset row of admissible right vertices each.
pub type BipartiteInstance = BipartitePair;

const FREE: usize = usize::MAX;

/// Result of asking for a perfect matching of a square instance.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum SdrOutcome {
    Perfect(Vec<(usize, usize)>),
    /// A left set `S` with `|N(S)| < |S|`, so no perfect matching exists.
    Violator { left: Vec<usize>, neighborhood: Vec<usize> },
}

struct HopcroftKarp<'a> {
    adj: Vec<Vec<usize>>,
    inst: &'a BipartiteInstance,
    match_left: Vec<usize>,
    match_right: Vec<usize>,
    layer: Vec<usize>,
}

impl<'a> HopcroftKarp<'a> {
    fn new(inst: &'a BipartiteInstance) -> Self {
        HopcroftKarp {
            adj: inst.rows().iter().map(|row| row.iter().collect()).collect(),
            inst,
            match_left: vec![FREE; inst.left_count()],
            match_right: vec![FREE; inst.right_count()],
            layer: vec![FREE; inst.left_count()],
        }
    }

    /// Layers left vertices by alternating distance from the free ones.
    /// Returns whether some free right vertex is reachable.
    fn bfs(&mut self) -> bool {
        let mut queue = VecDeque::new();
        for (u, m) in self.match_left.iter().enumerate() {
            if *m == FREE {
                self.layer[u] = 0;
                queue.push_back(u);
            } else {
                self.layer[u] = FREE;
            }
        }
        let mut found = false;
        while let Some(u) = queue.pop_front() {
            for &v in &self.adj[u] {
                match self.match_right[v] {
                    FREE => found = true,
                    w if self.layer[w] == FREE => {
                        self.layer[w] = self.layer[u] + 1;
                        queue.push_back(w);
                    }
                    _ => {}
                }
            }
        }
        found
    }

    /// Iterative layered DFS from the free left vertex `root`.
    fn augment_from(&mut self, root: usize, cursor: &mut [usize]) -> bool {
        let mut stack = vec![root];
        let mut via: Vec<usize> = Vec::new();
        while let Some(&u) = stack.last() {
            let mut advanced = false;
            while cursor[u] < self.adj[u].len() {
                let v = self.adj[u][cursor[u]];
                cursor[u] += 1;
                let w = self.match_right[v];
                if w == FREE {
                    // Flip the alternating path root → ... → u → v.
                    via.push(v);
                    for (&x, &y) in stack.iter().zip(&via) {
                        self.match_left[x] = y;
                        self.match_right[y] = x;
                    }
                    return true;
                }
                if self.layer[w] == self.layer[u] + 1 {
                    via.push(v);
                    stack.push(w);
                    advanced = true;
                    break;
                }
            }
            if !advanced {
                self.layer[u] = FREE;
                stack.pop();
                via.pop();
            }
        }
        false
    }

    fn run(&mut self) {
        while self.bfs() {
            let mut cursor = vec![0; self.inst.left_count()];
            for u in 0..self.inst.left_count() {
                if self.match_left[u] == FREE {
                    self.augment_from(u, &mut cursor);
                }
            }
        }
    }

    fn pairs(&self) -> Vec<(usize, usize)> {
        self.match_left
            .iter()
            .enumerate()
            .filter(|(_, &v)| v != FREE)
            .map(|(u, &v)| (u, v))
            .collect()
    }

    /// Left vertices reachable from free left vertices by alternating paths,
    /// and the right vertices they see.
    fn alternating_reach(&self) -> (Vec<usize>, Vec<usize>) {
        let mut left_seen = vec![false; self.inst.left_count()];
        let mut right_seen = vec![false; self.inst.right_count()];
        let mut queue: VecDeque<usize> = (0..self.inst.left_count())
            .filter(|&u| self.match_left[u] == FREE)
            .collect();
        for &u in &queue {
            left_seen[u] = true;
        }
        while let Some(u) = queue.pop_front() {
            for &v in &self.adj[u] {
                if !right_seen[v] {
                    right_seen[v] = true;
                    let w = self.match_right[v];
                    if w != FREE && !left_seen[w] {
                        left_seen[w] = true;
                        queue.push_back(w);
                    }
                }
            }
        }
        let collect = |seen: &[bool]| seen.iter().enumerate().filter(|(_, &s)| s).map(|(i, _)| i).collect();
        (collect(&left_seen), collect(&right_seen))
    }
}

/// A maximum-cardinality matching as `(left, right)` pairs sorted by left vertex.
///
/// Hopcroft–Karp layered augmentation, `O(E·√V)`. Vertices are scanned in
/// increasing order, so the result is a deterministic function of the instance.
pub fn max_matching(inst: &BipartiteInstance) -> Vec<(usize, usize)> {
    let mut hk = HopcroftKarp::new(inst);
    hk.run();
    hk.pairs()
}

/// Either a perfect matching or a Hall violator of a square instance.
pub fn perfect_or_violator(inst: &BipartiteInstance) -> Result<SdrOutcome> {
    if inst.left_count() != inst.right_count() {
        return Err(Error::arg(format!(
            "perfect matching needs a square instance, got {}×{}",
            inst.left_count(),
            inst.right_count()
        )));
    }
    let mut hk = HopcroftKarp::new(inst);
    hk.run();
    let pairs = hk.pairs();
    if pairs.len() == inst.left_count() {
        return Ok(SdrOutcome::Perfect(pairs));
    }
    let (left, neighborhood) = hk.alternating_reach();
    debug_assert!(neighborhood.len() < left.len());
    Ok(SdrOutcome::Violator { left, neighborhood })
}

/// `|N(S)|` computed by a direct bitset union.
pub fn neighborhood_size(inst: &BipartiteInstance, left: &[usize]) -> usize {
    let mut union = BitSet::new(inst.right_count());
    for &u in left {
        union.union_with(inst.row(u));
    }
    union.count()
}

/// Whether `pairs` is a matching of `inst`: disjoint endpoints, instance edges only.
pub fn is_valid_matching(inst: &BipartiteInstance, pairs: &[(usize, usize)]) -> bool {
    let mut left = vec![false; inst.left_count()];
    let mut right = vec![false; inst.right_count()];
    pairs.iter().all(|&(u, v)| {
        u < inst.left_count()
            && v < inst.right_count()
            && inst.has_edge(u, v)
            && !std::mem::replace(&mut left[u], true)
            && !std::mem::replace(&mut right[v], true)
    })
}
