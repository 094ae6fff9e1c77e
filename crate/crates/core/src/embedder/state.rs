use std::collections::HashSet;

use rand_chacha::ChaCha8Rng;

use crate::graph::{BitSet, PartitionedHost, Pattern};

/// Mutable state of one embedding run.
///
/// Host vertices inside per-cluster sets are offsets in `V_i`; `phi` holds
/// global host ids.
#[derive(Clone, Debug)]
pub struct EmbeddingState {
    /// Number of vertices placed by the greedy phase so far.
    pub t: usize,
    /// The embedding order; positions `t..` are still to come.
    pub order: Vec<usize>,
    pub phi: Vec<Option<usize>>,
    /// Occupied host vertices per cluster.
    pub occupied: Vec<BitSet>,
    /// `C_{t,y}`: hosts in `V_{ψ(y)}` adjacent to the images of all placed
    /// neighbours of `y`. Stale once `y` is placed.
    pub cand: Vec<BitSet>,
    /// `H_{t,y} = C_{t,y} ∖ Z_t`.
    pub avail: Vec<BitSet>,
    /// `|H_{t,y}|`.
    pub avail_size: Vec<usize>,
    /// Unordered pairs `(min, max)` excluded from the pairwise condition.
    pub bad: HashSet<(usize, usize)>,
    pub buffers: Vec<Vec<usize>>,
    pub is_buffer: Vec<bool>,
    pub t0: usize,
    pub t1: usize,
    pub t_end: usize,
    /// Low-degree host vertices per cluster, found before embedding.
    pub e1: Vec<Vec<usize>>,
    /// Host vertices missed by too many buffer candidate sets at `t = T0`.
    pub e2: Vec<Vec<usize>>,
    /// 0 for ordinary vertices, 1 or 2 for vertices that take an image from
    /// the matching exceptional pool.
    pub eh_level: Vec<u8>,
    /// Next unused index into `e1[i]` and `e2[i]`.
    pub pool_next: [Vec<usize>; 2],
    pub remaining_nonbuffer: usize,
    pub rng: ChaCha8Rng,
}

impl EmbeddingState {
    pub fn new(pattern: &Pattern, host: &PartitionedHost, rng: ChaCha8Rng) -> Self {
        let n = pattern.vertex_count();
        let r = host.cluster_count();
        let size = host.cluster_size();
        EmbeddingState {
            t: 0,
            order: Vec::new(),
            phi: vec![None; n],
            occupied: vec![BitSet::new(size); r],
            cand: vec![BitSet::full(size); n],
            avail: vec![BitSet::full(size); n],
            avail_size: vec![size; n],
            bad: HashSet::new(),
            buffers: vec![Vec::new(); r],
            is_buffer: vec![false; n],
            t0: 0,
            t1: 1,
            t_end: 0,
            e1: vec![Vec::new(); r],
            e2: vec![Vec::new(); r],
            eh_level: vec![0; n],
            pool_next: [vec![0; r], vec![0; r]],
            remaining_nonbuffer: n,
            rng,
        }
    }

    #[inline]
    pub fn is_placed(&self, x: usize) -> bool {
        self.phi[x].is_some()
    }

    pub fn placed_count(&self) -> usize {
        self.phi.iter().filter(|p| p.is_some()).count()
    }

    pub fn is_bad(&self, y: usize, z: usize) -> bool {
        self.bad.contains(&(y.min(z), y.max(z)))
    }

    pub fn mark_bad(&mut self, y: usize, z: usize) -> bool {
        self.bad.insert((y.min(z), y.max(z)))
    }

    /// Replaces `H_{t,y}` by `C_{t,y} ∖ Z_t`. Test hooks call this after
    /// editing `cand` directly.
    pub fn refresh_avail(&mut self, y: usize, cluster: usize) {
        self.avail[y] = self.cand[y].difference(&self.occupied[cluster]);
        self.avail_size[y] = self.avail[y].count();
    }
}
