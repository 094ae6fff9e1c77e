//! Seeded constructions of hosts and patterns.
//!
//! All randomness comes from a ChaCha8 stream seeded by the caller, so equal
//! inputs give bit-identical graphs on every platform.

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{BipartitePair, BitSet, ClusterGraph, PartitionedHost, Pattern, SimpleGraph};
use crate::rational::Rational;

/// The complete blow-up `R(N)`: every edge of `R` becomes `K_{N,N}`.
pub fn blowup(clusters: &ClusterGraph, size: usize) -> Result<PartitionedHost> {
    PartitionedHost::from_pairs(clusters.clone(), size, |_, _| Ok(BipartitePair::complete(size, size)))
}

/// Inputs of [`random_host`].
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct HostRecipe {
    pub size: usize,
    /// Edge probability of every pair.
    pub d: Rational,
    /// Minimum degree fraction; degraded vertices get exactly `⌈δN⌉`.
    pub delta: Rational,
    /// Fraction of each class (its first vertices) to degrade.
    pub low_degree_fraction: Rational,
    pub seed: u64,
}

impl HostRecipe {
    fn validate(&self) -> Result<()> {
        let zero = Rational::zero();
        let one = Rational::one();
        if self.size == 0 {
            return Err(Error::arg("host cluster size must be positive"));
        }
        if self.d <= zero || self.d > one {
            return Err(Error::arg(format!("d must lie in (0,1], got {}", self.d)));
        }
        if self.delta <= zero || self.delta > self.d {
            return Err(Error::arg(format!("delta must lie in (0, d], got {}", self.delta)));
        }
        if self.low_degree_fraction < zero || self.low_degree_fraction >= one {
            return Err(Error::arg(format!(
                "low_degree_fraction must lie in [0,1), got {}",
                self.low_degree_fraction
            )));
        }
        Ok(())
    }

    /// Number of degraded vertices at the front of each class.
    pub fn degraded_count(&self) -> usize {
        self.low_degree_fraction.floor_times(self.size as u64) as usize
    }

    /// The exact degree `⌈δN⌉` given to degraded vertices.
    pub fn degraded_degree(&self) -> usize {
        self.delta.ceil_times(self.size as u64) as usize
    }

    /// Non-fatal remarks, e.g. more degraded vertices than `εN` per class.
    pub fn warnings(&self, eps: &Rational) -> Vec<String> {
        let mut out = Vec::new();
        if !eps.count_at_most(self.degraded_count() as u64, self.size as u64) {
            out.push(format!(
                "{} degraded vertices per class exceed eps·N = {}·{}",
                self.degraded_count(),
                eps,
                self.size
            ));
        }
        out
    }
}

/// Independent `G(N, N, d)` pairs along every edge of `R`.
///
/// Per pair `(V_i, V_j)`, `i < j`: sample every cross pair with probability
/// `d`; give the first `⌊fN⌋` vertices of `V_i` exactly `⌈δN⌉` uniformly
/// chosen neighbours; do the same for the first `⌊fN⌋` vertices of `V_j`
/// while keeping their (already fixed) adjacency to degraded `V_i` vertices;
/// finally top up every other vertex to degree `⌈δN⌉` by adding edges to
/// non-degraded partners, so every vertex satisfies the minimum-degree condition.
pub fn random_host(clusters: &ClusterGraph, recipe: &HostRecipe) -> Result<PartitionedHost> {
    recipe.validate()?;
    let size = recipe.size;
    let k = recipe.degraded_count();
    let target = recipe.degraded_degree();
    if target > size - k.min(size) && k > 0 {
        return Err(Error::arg(format!(
            "cannot give degraded vertices degree {target} with only {} non-degraded partners",
            size - k
        )));
    }
    let p = recipe.d.to_f64();
    let mut rng = ChaCha8Rng::seed_from_u64(recipe.seed);
    PartitionedHost::from_pairs(clusters.clone(), size, |_, _| {
        let mut rows = vec![BitSet::new(size); size];
        for row in rows.iter_mut() {
            for b in 0..size {
                if rng.random_bool(p) {
                    row.insert(b);
                }
            }
        }
        for row in rows.iter_mut().take(k) {
            *row = BitSet::from_indices(size, index::sample(&mut rng, size, target).iter());
        }
        for b in 0..k {
            let fixed = (0..k).filter(|&a| rows[a].contains(b)).count();
            if fixed > target {
                return Err(Error::arg(format!(
                    "degraded vertex {b} already has {fixed} > {target} degraded neighbours; lower low_degree_fraction"
                )));
            }
            let chosen = index::sample(&mut rng, size - k, target - fixed);
            for a in k..size {
                rows[a].remove(b);
            }
            for a in chosen.iter() {
                rows[k + a].insert(b);
            }
        }
        // Top up V_i side.
        for row in rows.iter_mut().skip(k) {
            let deg = row.count();
            if deg < target {
                let missing: Vec<usize> = (k..size).filter(|&b| !row.contains(b)).collect();
                for idx in index::sample(&mut rng, missing.len(), target - deg).iter() {
                    row.insert(missing[idx]);
                }
            }
        }
        // Top up V_j side.
        for b in k..size {
            let deg = (0..size).filter(|&a| rows[a].contains(b)).count();
            if deg < target {
                let missing: Vec<usize> = (k..size).filter(|&a| !rows[a].contains(b)).collect();
                for idx in index::sample(&mut rng, missing.len(), target - deg).iter() {
                    rows[missing[idx]].insert(b);
                }
            }
        }
        BipartitePair::from_rows(size, rows)
    })
}

fn check_cluster_sequence(clusters: &ClusterGraph, sequence: &[usize], cyclic: bool) -> Result<()> {
    let r = clusters.order();
    let mut seen = vec![false; r];
    for &c in sequence {
        if c >= r || std::mem::replace(&mut seen[c], true) {
            return Err(Error::arg(format!("cluster sequence {sequence:?} is not a permutation of 0..{r}")));
        }
    }
    if sequence.len() != r {
        return Err(Error::arg(format!("cluster sequence {sequence:?} does not visit all {r} clusters")));
    }
    let steps = if cyclic { r } else { r - 1 };
    for p in 0..steps {
        let (a, b) = (sequence[p], sequence[(p + 1) % r]);
        if !clusters.has_edge(a, b) {
            return Err(Error::arg(format!("clusters {a} and {b} are consecutive in the sequence but not adjacent in R")));
        }
    }
    Ok(())
}

/// `N` disjoint cycles of length `r`, each visiting the clusters in `sequence`.
///
/// Vertex `c·r + p` is the `p`-th vertex of cycle `c`, assigned to `sequence[p]`.
pub fn pattern_cycles(clusters: &ClusterGraph, size: usize, sequence: &[usize]) -> Result<Pattern> {
    let r = clusters.order();
    if r < 3 {
        return Err(Error::arg("a cycle needs at least 3 clusters; use pattern_paths for r = 2"));
    }
    check_cluster_sequence(clusters, sequence, true)?;
    let edges = (0..size).flat_map(|c| (0..r).map(move |p| (c * r + p, c * r + (p + 1) % r)));
    let graph = SimpleGraph::from_edges(size * r, edges)?;
    let assignment = (0..size * r).map(|x| sequence[x % r]).collect();
    Pattern::new(graph, assignment, clusters, size, 2)
}

/// `N` disjoint paths on `r` vertices, each visiting the clusters in `sequence`.
pub fn pattern_paths(clusters: &ClusterGraph, size: usize, sequence: &[usize]) -> Result<Pattern> {
    let r = clusters.order();
    check_cluster_sequence(clusters, sequence, false)?;
    let edges = (0..size).flat_map(|c| (1..r).map(move |p| (c * r + p - 1, c * r + p)));
    let graph = SimpleGraph::from_edges(size * r, edges)?;
    let assignment = (0..size * r).map(|x| sequence[x % r]).collect();
    Pattern::new(graph, assignment, clusters, size, if r == 2 { 1 } else { 2 })
}

/// Inputs of [`pattern_random_bounded`].
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RandomPatternRecipe {
    pub size: usize,
    pub max_degree: usize,
    pub fill_fraction: Rational,
    pub target_edges: usize,
    pub attempts: usize,
    pub seed: u64,
    /// Pad every class with isolated vertices up to `N`.
    #[serde(default)]
    pub pad: bool,
}

/// A random pattern with `Δ(H) ≤ max_degree` and a valid assignment.
///
/// Each class gets `⌊fill·N⌋` vertices (`X_i` is the index block
/// `i·m..(i+1)·m`). Candidate edges are drawn by picking a uniform edge of
/// `R` and a uniform vertex on each side; a candidate is kept when both
/// endpoints still have spare degree. Sampling stops at `target_edges` or
/// after `attempts` draws.
pub fn pattern_random_bounded(clusters: &ClusterGraph, recipe: &RandomPatternRecipe) -> Result<Pattern> {
    let zero = Rational::zero();
    if recipe.fill_fraction <= zero || recipe.fill_fraction > Rational::one() {
        return Err(Error::arg(format!("fill_fraction must lie in (0,1], got {}", recipe.fill_fraction)));
    }
    let per = recipe.fill_fraction.floor_times(recipe.size as u64) as usize;
    let r = clusters.order();
    let cluster_edges: Vec<(usize, usize)> = clusters.edges().collect();
    let mut rng = ChaCha8Rng::seed_from_u64(recipe.seed);
    let mut degree = vec![0usize; per * r];
    let mut adjacency: Vec<BitSet> = vec![BitSet::new(per * r); per * r];
    let mut edges = Vec::new();
    if per > 0 && !cluster_edges.is_empty() {
        for _ in 0..recipe.attempts {
            if edges.len() >= recipe.target_edges {
                break;
            }
            let (i, j) = cluster_edges[rng.random_range(0..cluster_edges.len())];
            let x = i * per + rng.random_range(0..per);
            let y = j * per + rng.random_range(0..per);
            if degree[x] < recipe.max_degree && degree[y] < recipe.max_degree && !adjacency[x].contains(y) {
                adjacency[x].insert(y);
                adjacency[y].insert(x);
                degree[x] += 1;
                degree[y] += 1;
                edges.push((x, y));
            }
        }
    }
    let graph = SimpleGraph::from_edges(per * r, edges)?;
    let assignment = (0..per * r).map(|x| x / per).collect();
    let pattern = Pattern::new(graph, assignment, clusters, recipe.size, recipe.max_degree)?;
    Ok(if recipe.pad { pattern.padded() } else { pattern })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::io;
    use crate::regularity::{check_super_regular, RegularityMode};

    fn q(s: &str) -> Rational {
        s.parse().unwrap()
    }

    fn recipe(size: usize, d: &str, delta: &str, low: &str, seed: u64) -> HostRecipe {
        HostRecipe {
            size,
            d: q(d),
            delta: q(delta),
            low_degree_fraction: q(low),
            seed,
        }
    }

    #[test]
    fn blowup_examples() {
        let g = blowup(&ClusterGraph::single_edge(), 2).unwrap();
        assert_eq!((g.vertex_count(), g.edge_count()), (4, 4));
        let t = blowup(&ClusterGraph::triangle(), 1).unwrap();
        assert_eq!(t.edge_count(), 3);
        assert_eq!(blowup(&ClusterGraph::triangle(), 3).unwrap().edge_count(), 27);
    }

    #[test]
    fn blowup_pairs_are_super_regular() {
        let g = blowup(&ClusterGraph::triangle(), 5).unwrap();
        for (i, j) in ClusterGraph::triangle().edges() {
            let v = check_super_regular(g.pair(i, j).unwrap(), &q("0.05"), &q("1"), &q("1"), RegularityMode::Exact).unwrap();
            assert!(v.passes());
        }
    }

    #[test]
    fn full_density_host_equals_blowup() {
        let r = ClusterGraph::triangle();
        let g = random_host(&r, &recipe(7, "1", "0.5", "0", 3)).unwrap();
        assert_eq!(g, blowup(&r, 7).unwrap());
    }

    #[test]
    fn density_concentrates() {
        // One pair has N² = 40000 independent Bernoulli(1/2) entries: the measured
        // density has standard deviation sqrt(1/4)/N = 0.0025, so ±0.05 is 20σ.
        let r = ClusterGraph::single_edge();
        for seed in 0..20 {
            let g = random_host(&r, &recipe(200, "0.5", "0.3", "0", seed)).unwrap();
            let d = g.pair_density(0, 1).unwrap().as_f64();
            assert!((d - 0.5).abs() <= 0.05, "seed {seed}: density {d}");
        }
    }

    #[test]
    fn degraded_vertices_have_exact_degree_and_others_meet_minimum() {
        let r = ClusterGraph::triangle();
        let rec = recipe(100, "0.6", "0.5", "0.05", 9);
        let g = random_host(&r, &rec).unwrap();
        let full = BitSet::full(100);
        for (i, j) in r.edges().flat_map(|(i, j)| [(i, j), (j, i)]) {
            for a in 0..100 {
                let deg = g.degree_into_class(g.global(i, a), j, &full).unwrap();
                if a < rec.degraded_count() {
                    assert_eq!(deg, 50, "degraded ({i},{a}) into {j}");
                } else {
                    assert!(deg >= 50);
                }
            }
        }
        // No edges leave the cluster-graph structure.
        for (u, v) in g.edges() {
            assert!(r.has_edge(u / 100, v / 100));
        }
    }

    #[test]
    fn same_seed_same_file() {
        let r = ClusterGraph::triangle();
        let a = io::write_host(&random_host(&r, &recipe(40, "0.4", "0.2", "0.05", 1)).unwrap());
        let b = io::write_host(&random_host(&r, &recipe(40, "0.4", "0.2", "0.05", 1)).unwrap());
        let c = io::write_host(&random_host(&r, &recipe(40, "0.4", "0.2", "0.05", 2)).unwrap());
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn recipe_violations_are_rejected() {
        let r = ClusterGraph::triangle();
        assert!(random_host(&r, &recipe(10, "0.5", "0.6", "0", 0)).is_err());
        assert!(random_host(&r, &recipe(10, "0", "0", "0", 0)).is_err());
        assert!(random_host(&r, &recipe(10, "0.5", "0.5", "1", 0)).is_err());
        assert!(random_host(&r, &recipe(0, "0.5", "0.5", "0", 0)).is_err());
        assert_eq!(recipe(10, "0.5", "0.5", "0.3", 0).warnings(&q("0.1")).len(), 1);
    }

    #[test]
    fn cycle_patterns() {
        let r = ClusterGraph::triangle();
        let p = pattern_cycles(&r, 4, &[0, 1, 2]).unwrap();
        assert_eq!((p.vertex_count(), p.graph().edge_count()), (12, 12));
        assert_eq!(p.graph().max_degree(), 2);
        assert!(p.is_balanced());
        assert!(pattern_cycles(&ClusterGraph::single_edge(), 4, &[0, 1]).is_err());
        assert!(pattern_cycles(&ClusterGraph::cycle(4).unwrap(), 2, &[0, 2, 1, 3]).is_err());
        let paths = pattern_paths(&ClusterGraph::single_edge(), 3, &[0, 1]).unwrap();
        assert_eq!(paths.graph().edge_count(), 3);
        assert_eq!(paths.graph().max_degree(), 1);
    }

    fn random_recipe(max_degree: usize, fill: &str, target: usize, attempts: usize, seed: u64) -> RandomPatternRecipe {
        RandomPatternRecipe {
            size: 30,
            max_degree,
            fill_fraction: q(fill),
            target_edges: target,
            attempts,
            seed,
            pad: false,
        }
    }

    #[test]
    fn random_patterns_respect_bounds() {
        let r = ClusterGraph::complete(4).unwrap();
        let empty = pattern_random_bounded(&r, &random_recipe(0, "1", 0, 0, 1)).unwrap();
        assert_eq!(empty.graph().edge_count(), 0);
        assert!(empty.is_balanced());
        for seed in 0..10 {
            let p = pattern_random_bounded(&r, &random_recipe(3, "0.8", 1000, 5000, seed)).unwrap();
            assert!(p.graph().max_degree() <= 3);
            assert!(p.class_sizes().iter().all(|&s| s == 24));
            for (x, y) in p.graph().edges() {
                assert!(r.has_edge(p.cluster_of(x), p.cluster_of(y)));
            }
            let mut padded_recipe = random_recipe(3, "0.8", 1000, 5000, seed);
            padded_recipe.pad = true;
            assert!(pattern_random_bounded(&r, &padded_recipe).unwrap().is_balanced());
        }
    }

    #[test]
    fn edge_count_is_monotone_in_attempts() {
        let r = ClusterGraph::triangle();
        let mut last = 0;
        for attempts in [0, 5, 20, 50, 100, 400, 2000] {
            let e = pattern_random_bounded(&r, &random_recipe(2, "1", 10_000, attempts, 42))
                .unwrap()
                .graph()
                .edge_count();
            assert!(e >= last);
            last = e;
        }
        assert!(last > 0);
    }
}
