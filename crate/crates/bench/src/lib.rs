//! Shared fixtures for the benchmarks.

use blowup_core::generators::{pattern_cycles, random_host, HostRecipe};
use blowup_core::{BipartitePair, ClusterGraph, PartitionedHost, Pattern};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn random_pair(left: usize, right: usize, p: f64, seed: u64) -> BipartitePair {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let edges: Vec<(usize, usize)> = (0..left)
        .flat_map(|x| (0..right).map(move |y| (x, y)))
        .filter(|_| rng.random_bool(p))
        .collect();
    BipartitePair::from_edges(left, right, edges).expect("indices in range")
}

/// A random triangle host of cluster size `size` with a spanning triangle factor.
pub fn triangle_instance(size: usize, seed: u64) -> (PartitionedHost, Pattern) {
    let r = ClusterGraph::triangle();
    let recipe = HostRecipe {
        size,
        d: "0.6".parse().unwrap(),
        delta: "0.5".parse().unwrap(),
        low_degree_fraction: "0.02".parse().unwrap(),
        seed,
    };
    let host = random_host(&r, &recipe).expect("valid recipe");
    let pattern = pattern_cycles(&r, size, &[0, 1, 2]).expect("triangle sequence");
    (host, pattern)
}
