use rand::seq::{IndexedRandom, SliceRandom};

use super::engine::{Band, Embedder};
use super::report::{Case2Event, Halt, StuckInfo};
use crate::error::Error;
use crate::graph::BitSet;

/// An image chosen by the regular selection rule.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Selection {
    /// Offset of the image inside the cluster of the placed vertex.
    pub offset: usize,
    /// Pairs `{y, y′}` whose joint candidate set the image treats irregularly;
    /// they are excluded from the pairwise condition from now on.
    pub bad_pairs: Vec<(usize, usize)>,
}

/// Data for one unplaced neighbour `y` of the vertex being placed.
struct NeighbourCheck<'b> {
    y: usize,
    cluster: usize,
    band: &'b Band,
    avail: &'b BitSet,
    avail_size: usize,
    cand: &'b BitSet,
    cand_size: usize,
    /// `(y′, C_y ∩ C_{y′}, its size)` over eligible `y′`.
    pairs: Vec<(usize, BitSet, usize)>,
}

enum Verdict {
    Valid(Vec<(usize, usize)>),
    Rejected(usize),
}

impl Embedder<'_> {
    /// Unplaced `y′ ≠ y` (or including `y` if configured) in the class of `y`
    /// whose pair with `y` is not excluded.
    pub fn eligible_partners(&self, y: usize) -> Vec<usize> {
        let j = self.pattern.cluster_of(y);
        self.classes[j]
            .iter()
            .copied()
            .filter(|&z| !self.state.is_placed(z))
            .filter(|&z| z != y || self.config.proportion_includes_self)
            .filter(|&z| !self.state.is_bad(y, z))
            .collect()
    }

    fn neighbour_checks(&self, x: usize) -> Vec<NeighbourCheck<'_>> {
        let i = self.pattern.cluster_of(x);
        self.unplaced_neighbours(x)
            .into_iter()
            .map(|y| {
                let j = self.pattern.cluster_of(y);
                let cand = &self.state.cand[y];
                let pairs = self
                    .eligible_partners(y)
                    .into_iter()
                    .map(|z| {
                        let joint = cand.intersection(&self.state.cand[z]);
                        let k = joint.count();
                        (z, joint, k)
                    })
                    .collect();
                NeighbourCheck {
                    y,
                    cluster: j,
                    band: self.band(i, j),
                    avail: &self.state.avail[y],
                    avail_size: self.state.avail_size[y],
                    cand,
                    cand_size: cand.count(),
                    pairs,
                }
            })
            .collect()
    }

    fn judge(&self, i: usize, a: usize, checks: &[NeighbourCheck<'_>], collect: bool) -> Verdict {
        let eps1 = &self.cascade.effective.eps1;
        let mut failing = Vec::new();
        for c in checks {
            let row = self.host.row(i, a, c.cluster).expect("pattern edges map to cluster edges");
            if !c.band.admits(c.avail_size, row.intersection_count(c.avail)) {
                return Verdict::Rejected(0);
            }
            if !c.band.admits(c.cand_size, row.intersection_count(c.cand)) {
                return Verdict::Rejected(1);
            }
            let mut fails = 0usize;
            let start = failing.len();
            for (z, joint, k) in &c.pairs {
                if !c.band.admits(*k, row.intersection_count(joint)) {
                    fails += 1;
                    if collect {
                        failing.push((c.y, *z));
                    }
                }
            }
            if !eps1.count_at_most(fails as u64, c.pairs.len() as u64) {
                failing.truncate(start);
                return Verdict::Rejected(2);
            }
        }
        Verdict::Valid(failing)
    }

    /// Picks an image for `x` among `H_{t−1,x}` satisfying the degree
    /// conditions towards every unplaced neighbour, uniformly at random.
    pub fn select_image_case1(&mut self, x: usize) -> Result<Selection, Halt> {
        let i = self.pattern.cluster_of(x);
        let mut candidates: Vec<usize> = self.state.avail[x].iter().collect();
        let mut rng = self.state.rng.clone();
        candidates.shuffle(&mut rng);
        let checks = self.neighbour_checks(x);
        let mut rejected = [0usize; 3];
        let mut chosen = None;
        if self.config.exhaustive_selection {
            let mut valid = Vec::new();
            for &a in &candidates {
                match self.judge(i, a, &checks, false) {
                    Verdict::Valid(_) => valid.push(a),
                    Verdict::Rejected(k) => rejected[k] += 1,
                }
            }
            valid.sort_unstable();
            chosen = valid.choose(&mut rng).copied();
        } else {
            for &a in &candidates {
                match self.judge(i, a, &checks, false) {
                    Verdict::Valid(_) => {
                        chosen = Some(a);
                        break;
                    }
                    Verdict::Rejected(k) => rejected[k] += 1,
                }
            }
        }
        let outcome = match chosen {
            Some(a) => match self.judge(i, a, &checks, true) {
                Verdict::Valid(bad_pairs) => Ok(Selection { offset: a, bad_pairs }),
                Verdict::Rejected(_) => Err(Error::internal("accepted image fails on re-evaluation").into()),
            },
            None => Err(Halt::Stuck(StuckInfo {
                t: self.state.t,
                vertex: x,
                cluster: i,
                candidates: candidates.len(),
                rejected,
                neighbors: checks.iter().map(|c| (c.y, c.avail_size, c.cand_size, c.pairs.len())).collect(),
                message: if candidates.is_empty() {
                    format!("vertex {x} has no available image")
                } else {
                    format!("no image of vertex {x} meets the degree conditions")
                },
            })),
        };
        drop(checks);
        self.state.rng = rng;
        outcome
    }

    /// Takes the next unused host vertex of the exceptional pool that `x` was
    /// matched with.
    pub fn select_image_case2(&mut self, x: usize) -> Result<(usize, Case2Event), Halt> {
        let level = self.state.eh_level[x];
        if level == 0 {
            return Err(Error::internal(format!("vertex {x} has no exceptional pool")).into());
        }
        let i = self.pattern.cluster_of(x);
        let slot = (level - 1) as usize;
        let pool = if level == 1 { &self.state.e1[i] } else { &self.state.e2[i] };
        let next = self.state.pool_next[slot][i];
        let Some(&a) = pool.get(next) else {
            return Err(Error::internal(format!("exceptional pool {level} of cluster {i} is exhausted")).into());
        };
        if !self.state.avail[x].contains(a) {
            return Err(Error::internal(format!("exceptional host {a} is not available to vertex {x}")).into());
        }
        self.state.pool_next[slot][i] += 1;

        let size = self.cluster_size() as u64;
        let delta_n = self.cascade.delta.ceil_times(size);
        let reserve = (self.state.t0 + self.diag.eh1 + self.diag.eh2) as i64;
        let degree_slack = self
            .unplaced_neighbours(x)
            .into_iter()
            .map(|y| {
                let j = self.pattern.cluster_of(y);
                let row = self.host.row(i, a, j).expect("pattern edges map to cluster edges");
                row.intersection_count(&self.state.avail[y]) as i64 - (delta_n - reserve)
            })
            .min();
        let event = Case2Event {
            t: self.state.t,
            vertex: x,
            level,
            image: self.host.global(i, a),
            degree_slack,
            neighbors_keep_min_degree: false,
            neighbors_untouched_before: false,
        };
        Ok((a, event))
    }
}
