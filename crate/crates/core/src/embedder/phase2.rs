use super::engine::Embedder;
use super::report::{Halt, HallViolation, Phase2Cluster};
use crate::error::Error;
use crate::graph::{BipartitePair, BitSet};
use crate::matching::{perfect_or_violator, SdrOutcome};

impl Embedder<'_> {
    /// The membership instance of cluster `i`: unplaced pattern vertices
    /// against free host offsets, an edge meaning `v ∈ H_{T,y}`.
    pub fn phase2_instance(&self, i: usize) -> (Vec<usize>, Vec<usize>, BipartitePair) {
        let size = self.cluster_size();
        let left: Vec<usize> = self.classes[i].iter().copied().filter(|&y| !self.state.is_placed(y)).collect();
        let right: Vec<usize> = (0..size).filter(|&a| !self.state.occupied[i].contains(a)).collect();
        let rows = left
            .iter()
            .map(|&y| BitSet::from_indices(right.len(), (0..right.len()).filter(|&k| self.state.avail[y].contains(right[k]))))
            .collect();
        let inst = BipartitePair::from_rows(right.len(), rows).expect("rows match the right side");
        (left, right, inst)
    }

    /// Places the remaining vertices of every cluster by a perfect matching.
    pub fn run_phase2(&mut self) -> Result<(), Halt> {
        let d3 = self.cascade.effective.d3.clone();
        for i in 0..self.host.cluster_count() {
            let (left, right, inst) = self.phase2_instance(i);
            if left.len() != right.len() {
                return Err(Error::internal(format!(
                    "cluster {i}: {} unplaced pattern vertices but {} free hosts",
                    left.len(),
                    right.len()
                ))
                .into());
            }
            let m = left.len();
            let min_left = inst.rows().iter().map(BitSet::count).min().unwrap_or(0);
            let transposed = inst.transpose();
            let min_right = transposed.rows().iter().map(BitSet::count).min().unwrap_or(0);
            self.diag.phase2.push(Phase2Cluster {
                cluster: i,
                size: m,
                edges: inst.edge_count(),
                min_left_degree: min_left,
                min_right_degree: min_right,
                left_degree_condition: m == 0 || !d3.count_at_most(min_left as u64, m as u64),
                right_degree_condition: m == 0 || !d3.count_below(min_right as u64, m as u64),
            });
            match perfect_or_violator(&inst)? {
                SdrOutcome::Perfect(pairs) => {
                    for (l, k) in pairs {
                        let (y, a) = (left[l], right[k]);
                        self.state.phi[y] = Some(self.host.global(i, a));
                        self.state.occupied[i].insert(a);
                    }
                }
                SdrOutcome::Violator { left: s, neighborhood } => {
                    let violation = HallViolation {
                        cluster: i,
                        vertices: s.iter().map(|&l| left[l]).collect(),
                        neighborhood: neighborhood.iter().map(|&k| self.host.global(i, right[k])).collect(),
                    };
                    return Err(Halt::Hall(violation));
                }
            }
        }
        Ok(())
    }
}
