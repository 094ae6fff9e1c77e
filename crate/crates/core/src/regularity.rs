//! ε-regularity and super-regularity checks for bipartite pairs.
//!
//! A pair `(A, B)` is ε-regular when every `X ⊆ A`, `Y ⊆ B` with
//! `|X| > ε|A|` and `|Y| > ε|B|` has `|d(X,Y) − d(A,B)| < ε`. A witness of
//! irregularity is therefore a subset pair with deviation `≥ ε`.
//!
//! The exhaustive checker is exact but exponential in `|A|`; the sampled
//! checker is one-sided: it can find witnesses but never certifies.

use std::cmp::Ordering;

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{BipartitePair, BitSet, PartitionedHost};
use crate::rational::Rational;

/// Default per-side size limit of [`check_regular_exact`].
pub const EXHAUSTIVE_LIMIT: usize = 14;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum RegularityStatus {
    RegularCertified,
    IrregularWitnessed,
    NoWitnessFound,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Witness {
    pub xs: Vec<usize>,
    pub ys: Vec<usize>,
    pub subset_density: Rational,
    pub pair_density: Rational,
}

impl Witness {
    pub fn deviation(&self) -> Rational {
        let diff = &self.subset_density - &self.pair_density;
        if diff.is_positive() {
            diff
        } else {
            &Rational::zero() - &diff
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RegularityVerdict {
    pub status: RegularityStatus,
    pub witness: Option<Witness>,
    /// Subsets `X` enumerated (exhaustive) or subset pairs sampled.
    pub trials: u64,
}

fn check_eps(eps: &Rational) -> Result<()> {
    if !eps.is_positive() || eps >= &Rational::one() {
        return Err(Error::arg(format!("eps must lie in (0,1), got {eps}")));
    }
    Ok(())
}

/// Smallest subset size strictly above `eps · side`.
fn min_size(eps: &Rational, side: usize) -> usize {
    (eps.floor_times(side as u64) + 1) as usize
}

/// `|e·|A||B| − E·|X||Y||` over `|X||Y||A||B|`, as an exact fraction.
#[derive(Clone, Copy, Debug)]
struct Deviation {
    num: i128,
    den: i128,
}

impl Deviation {
    fn new(edges: usize, sx: usize, sy: usize, total: usize, a: usize, b: usize) -> Self {
        let ab = (a * b) as i128;
        let num = (edges as i128 * ab - total as i128 * (sx * sy) as i128).abs();
        Deviation {
            num,
            den: (sx * sy) as i128 * ab,
        }
    }

    fn cmp(&self, other: &Deviation) -> Ordering {
        (self.num * other.den).cmp(&(other.num * self.den))
    }

    fn reaches(&self, eps: &Rational) -> bool {
        eps.cmp_fraction(self.num, self.den) != Ordering::Less
    }
}

fn make_witness(pair: &BipartitePair, xs: Vec<usize>, ys: Vec<usize>) -> Witness {
    let xset = BitSet::from_indices(pair.left_count(), xs.iter().copied());
    let yset = BitSet::from_indices(pair.right_count(), ys.iter().copied());
    let e = pair.edges_between(&xset, &yset);
    Witness {
        subset_density: Rational::new(e as i64, (xs.len() * ys.len()) as i64).expect("nonempty"),
        pair_density: pair.density().as_rational(),
        xs,
        ys,
    }
}

/// Exhaustive ε-regularity test, exact for pairs with at most `limit` vertices per side.
///
/// Every qualifying `X ⊆ A` is enumerated. For fixed `X` and `|Y| = k` the
/// extreme values of `e(X,Y)` come from the `k` vertices of `B` with the most
/// (or fewest) neighbours in `X`, so checking those two choices per `k` covers
/// every `Y`. On irregular pairs the witness of maximum deviation is returned.
pub fn check_regular_exact(pair: &BipartitePair, eps: &Rational, limit: usize) -> Result<RegularityVerdict> {
    check_eps(eps)?;
    let (a, b) = (pair.left_count(), pair.right_count());
    if a > limit || b > limit {
        return Err(Error::Capability(format!(
            "exhaustive regularity check supports at most {limit} vertices per side, pair is {a}×{b}; \
             use the sampled checker"
        )));
    }
    let (xmin, ymin) = (min_size(eps, a), min_size(eps, b));
    let mut trials = 0u64;
    if xmin > a || ymin > b || a == 0 || b == 0 {
        return Ok(RegularityVerdict {
            status: RegularityStatus::RegularCertified,
            witness: None,
            trials,
        });
    }
    let total = pair.edge_count();
    // Column masks: bit `x` of `cols[y]` is set iff x ~ y.
    let cols: Vec<u32> = (0..b)
        .map(|y| (0..a).filter(|&x| pair.has_edge(x, y)).fold(0u32, |m, x| m | 1 << x))
        .collect();

    let mut best: Option<(Deviation, u32, usize, bool)> = None;
    let mut order: Vec<(usize, usize)> = Vec::with_capacity(b);
    for mask in 1u32..(1u32 << a) {
        let sx = mask.count_ones() as usize;
        if sx < xmin {
            continue;
        }
        trials += 1;
        order.clear();
        order.extend(cols.iter().enumerate().map(|(y, &c)| ((c & mask).count_ones() as usize, y)));
        order.sort_unstable_by(|p, q| q.0.cmp(&p.0).then(p.1.cmp(&q.1)));
        let mut top = 0;
        let mut bottom = 0;
        for k in 1..=b {
            top += order[k - 1].0;
            bottom += order[b - k].0;
            if k < ymin {
                continue;
            }
            for (edges, from_top) in [(top, true), (bottom, false)] {
                let dev = Deviation::new(edges, sx, k, total, a, b);
                if best.as_ref().is_none_or(|(d, ..)| dev.cmp(d) == Ordering::Greater) {
                    best = Some((dev, mask, k, from_top));
                }
            }
        }
    }

    let (dev, mask, k, from_top) = best.expect("at least one qualifying subset pair");
    if !dev.reaches(eps) {
        return Ok(RegularityVerdict {
            status: RegularityStatus::RegularCertified,
            witness: None,
            trials,
        });
    }
    let xs: Vec<usize> = (0..a).filter(|&x| mask >> x & 1 == 1).collect();
    let mut order: Vec<(usize, usize)> = cols
        .iter()
        .enumerate()
        .map(|(y, &c)| ((c & mask).count_ones() as usize, y))
        .collect();
    order.sort_unstable_by(|p, q| q.0.cmp(&p.0).then(p.1.cmp(&q.1)));
    let mut ys: Vec<usize> = if from_top {
        order[..k].iter().map(|&(_, y)| y).collect()
    } else {
        order[b - k..].iter().map(|&(_, y)| y).collect()
    };
    ys.sort_unstable();
    Ok(RegularityVerdict {
        status: RegularityStatus::IrregularWitnessed,
        witness: Some(make_witness(pair, xs, ys)),
        trials,
    })
}

/// Randomised witness search: `trials` subset pairs with sizes drawn uniformly
/// over the qualifying range and members drawn uniformly. Deterministic in `seed`.
pub fn check_regular_sampled(pair: &BipartitePair, eps: &Rational, trials: u64, seed: u64) -> Result<RegularityVerdict> {
    check_eps(eps)?;
    if trials == 0 {
        return Err(Error::arg("trials must be at least 1"));
    }
    let (a, b) = (pair.left_count(), pair.right_count());
    let (xmin, ymin) = (min_size(eps, a), min_size(eps, b));
    if xmin > a || ymin > b {
        return Ok(RegularityVerdict {
            status: RegularityStatus::NoWitnessFound,
            witness: None,
            trials: 0,
        });
    }
    let total = pair.edge_count();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for t in 1..=trials {
        let sx = rng.random_range(xmin..=a);
        let sy = rng.random_range(ymin..=b);
        let xs = index::sample(&mut rng, a, sx);
        let ys = index::sample(&mut rng, b, sy);
        let yset = BitSet::from_indices(b, ys.iter());
        let edges: usize = xs.iter().map(|x| pair.row(x).intersection_count(&yset)).sum();
        if Deviation::new(edges, sx, sy, total, a, b).reaches(eps) {
            let mut xs = xs.into_vec();
            let mut ys = ys.into_vec();
            xs.sort_unstable();
            ys.sort_unstable();
            return Ok(RegularityVerdict {
                status: RegularityStatus::IrregularWitnessed,
                witness: Some(make_witness(pair, xs, ys)),
                trials: t,
            });
        }
    }
    Ok(RegularityVerdict {
        status: RegularityStatus::NoWitnessFound,
        witness: None,
        trials,
    })
}

/// Recomputes a witness from scratch against the definition.
pub fn reverify_witness(pair: &BipartitePair, witness: &Witness, eps: &Rational) -> bool {
    let (a, b) = (pair.left_count(), pair.right_count());
    let (sx, sy) = (witness.xs.len(), witness.ys.len());
    if eps.count_at_most(sx as u64, a as u64) || eps.count_at_most(sy as u64, b as u64) {
        return false;
    }
    let mut e = 0usize;
    for &x in &witness.xs {
        for &y in &witness.ys {
            if pair.has_edge(x, y) {
                e += 1;
            }
        }
    }
    let mut total = 0usize;
    for x in 0..a {
        for y in 0..b {
            if pair.has_edge(x, y) {
                total += 1;
            }
        }
    }
    let sub = Rational::new(e as i64, (sx * sy) as i64).expect("nonempty");
    let whole = Rational::new(total as i64, (a * b) as i64).expect("nonempty");
    let diff = &sub - &whole;
    let dev = if diff.is_positive() { diff } else { &Rational::zero() - &diff };
    dev >= *eps
}

/// How [`check_super_regular`] should test the regularity part.
#[derive(Clone, Copy, Debug)]
pub enum RegularityMode {
    Exact,
    Sampled { trials: u64, seed: u64 },
    /// Exact within [`EXHAUSTIVE_LIMIT`], sampled beyond it.
    Auto { trials: u64, seed: u64 },
}

#[derive(Clone, Debug, Serialize)]
pub struct SuperRegularVerdict {
    pub degree_ok_a: bool,
    pub degree_ok_b: bool,
    pub min_deg_a: usize,
    pub min_deg_b: usize,
    /// Vertices of `A` with `deg < δ|B|`.
    pub low_degree_a: Vec<usize>,
    /// Vertices of `B` with `deg < δ|A|`.
    pub low_degree_b: Vec<usize>,
    pub density: Rational,
    pub density_ok: bool,
    pub regularity: RegularityVerdict,
}

impl SuperRegularVerdict {
    /// All checks passed; a sampled `no-witness-found` counts as passing.
    pub fn passes(&self) -> bool {
        self.degree_ok_a
            && self.degree_ok_b
            && self.density_ok
            && self.regularity.status != RegularityStatus::IrregularWitnessed
    }
}

/// `(ε, d, δ)`-super-regularity: ε-regular, density at least `d`, and
/// `deg(a) ≥ δ|B|`, `deg(b) ≥ δ|A|` for every vertex.
pub fn check_super_regular(
    pair: &BipartitePair,
    eps: &Rational,
    d: &Rational,
    delta: &Rational,
    mode: RegularityMode,
) -> Result<SuperRegularVerdict> {
    let (a, b) = (pair.left_count(), pair.right_count());
    let transposed = pair.transpose();
    let degs_a: Vec<usize> = pair.rows().iter().map(BitSet::count).collect();
    let degs_b: Vec<usize> = transposed.rows().iter().map(BitSet::count).collect();
    let low = |degs: &[usize], other: usize| -> Vec<usize> {
        (0..degs.len())
            .filter(|&v| delta.count_below(degs[v] as u64, other as u64))
            .collect()
    };
    let low_degree_a = low(&degs_a, b);
    let low_degree_b = low(&degs_b, a);
    let density = pair.density().as_rational();
    let regularity = match mode {
        RegularityMode::Exact => check_regular_exact(pair, eps, EXHAUSTIVE_LIMIT)?,
        RegularityMode::Sampled { trials, seed } => check_regular_sampled(pair, eps, trials, seed)?,
        RegularityMode::Auto { trials, seed } => {
            if a <= EXHAUSTIVE_LIMIT && b <= EXHAUSTIVE_LIMIT {
                check_regular_exact(pair, eps, EXHAUSTIVE_LIMIT)?
            } else {
                check_regular_sampled(pair, eps, trials, seed)?
            }
        }
    };
    Ok(SuperRegularVerdict {
        degree_ok_a: low_degree_a.is_empty(),
        degree_ok_b: low_degree_b.is_empty(),
        min_deg_a: degs_a.iter().copied().min().unwrap_or(0),
        min_deg_b: degs_b.iter().copied().min().unwrap_or(0),
        low_degree_a,
        low_degree_b,
        density_ok: density >= *d,
        density,
        regularity,
    })
}

/// Global ids of `v ∈ V_i` with `deg(v, V_j) < threshold · N`.
pub fn list_low_degree_vertices(
    host: &PartitionedHost,
    i: usize,
    j: usize,
    threshold: &Rational,
) -> Result<Vec<usize>> {
    let pair = host
        .pair(i, j)
        .ok_or_else(|| Error::arg(format!("clusters {i} and {j} are not adjacent in R")))?;
    let size = host.cluster_size() as u64;
    Ok((0..host.cluster_size())
        .filter(|&a| threshold.count_below(pair.row(a).count() as u64, size))
        .map(|a| host.global(i, a))
        .collect())
}
