use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::cascade::{compute_cascade, Overrides, ParameterCascade};
use super::config::{Balance, DensityMode, EmbedConfig, ParamMode, Verbosity};
use super::report::{Diagnostics, Halt, ReorderEvent, StuckInfo};
use super::state::EmbeddingState;
use crate::error::{Error, Result};
use crate::graph::{BitSet, PartitionedHost, Pattern};
use crate::rational::Rational;

const AUDIT_STREAM: u64 = 0x0a0d_17ed_5eed_0001;

/// Integer bounds `⌈(ρ−ε)k⌉ ≤ deg ≤ ⌊(ρ+ε)k⌋` for every set size `k ≤ N`.
#[derive(Clone, Debug)]
pub(crate) struct Band {
    lo: Vec<u32>,
    hi: Vec<u32>,
}

impl Band {
    fn new(rho: &Rational, eps: &Rational, size: usize) -> Band {
        let below = rho - eps;
        let above = rho + eps;
        let lo = (0..=size as u64).map(|k| below.ceil_times(k).clamp(0, u32::MAX as i64) as u32).collect();
        let hi = (0..=size as u64).map(|k| above.floor_times(k).clamp(0, u32::MAX as i64) as u32).collect();
        Band { lo, hi }
    }

    #[inline]
    pub(crate) fn admits(&self, set_size: usize, degree: usize) -> bool {
        let d = degree as u32;
        self.lo[set_size] <= d && d <= self.hi[set_size]
    }

    #[inline]
    pub(crate) fn lower(&self, set_size: usize) -> usize {
        self.lo[set_size] as usize
    }
}

/// One embedding run: inputs, derived thresholds and the evolving state.
///
/// [`super::embed`] drives the whole pipeline; the individual steps are public
/// so that tests can inspect or perturb the state between them.
#[derive(Clone)]
pub struct Embedder<'a> {
    pub(crate) pattern: Pattern,
    pub(crate) host: &'a PartitionedHost,
    pub cascade: ParameterCascade,
    pub(crate) config: EmbedConfig,
    pub(crate) classes: Vec<Vec<usize>>,
    /// Degree band per ordered cluster pair, `None` off the cluster graph.
    pub(crate) bands: Vec<Option<Band>>,
    pub state: EmbeddingState,
    pub diag: Diagnostics,
    audit_rng: ChaCha8Rng,
    original_vertices: usize,
}

impl<'a> Embedder<'a> {
    pub fn new(pattern: &Pattern, host: &'a PartitionedHost, config: &EmbedConfig) -> Result<Self> {
        if pattern.cluster_graph() != host.cluster_graph() {
            return Err(Error::arg("pattern and host use different cluster graphs"));
        }
        let size = host.cluster_size();
        if pattern.cluster_size() != size {
            return Err(Error::arg(format!(
                "pattern expects cluster size {}, host has {size}",
                pattern.cluster_size()
            )));
        }
        let original_vertices = pattern.vertex_count();
        let pattern = match (pattern.is_balanced(), config.balance) {
            (true, _) => pattern.clone(),
            (false, Balance::Lenient) => pattern.padded(),
            (false, Balance::Strict) => {
                return Err(Error::arg(format!(
                    "class sizes {:?} differ from the cluster size {size}; use lenient balance to pad",
                    pattern.class_sizes()
                )))
            }
        };
        if !(0.0..=1.0).contains(&config.audit_rate) {
            return Err(Error::arg(format!("audit rate must lie in [0,1], got {}", config.audit_rate)));
        }
        let clusters = host.cluster_graph();
        let r = clusters.order();

        let d = match &config.d {
            Some(d) => d.clone(),
            None => clusters
                .edges()
                .filter_map(|(i, j)| host.pair_density(i, j))
                .map(|dens| dens.as_rational())
                .min()
                .ok_or_else(|| Error::arg("cluster graph has no edges"))?,
        };
        let delta = match &config.delta {
            Some(delta) => delta.clone(),
            None => min_degree_ratio(host),
        };
        let max_degree = config.max_degree.unwrap_or(pattern.max_degree_bound()).max(1);
        let overrides = match config.mode {
            ParamMode::PaperExact if !config.overrides.is_empty() => {
                return Err(Error::arg("paper-exact mode does not accept overrides"))
            }
            ParamMode::PaperExact => Overrides::default(),
            ParamMode::Practical => config.overrides.or(&Overrides::practical_defaults()),
        };
        let cascade = compute_cascade(&d, &delta, max_degree, r, &overrides)?;

        let mut bands = vec![None; r * r];
        for (i, j) in clusters.edges() {
            let rho = match config.density {
                DensityMode::Measured => host.pair_density(i, j).expect("cluster edge").as_rational(),
                DensityMode::Nominal => d.clone(),
            };
            let band = Band::new(&rho, &cascade.effective.eps, size);
            bands[i * r + j] = Some(band.clone());
            bands[j * r + i] = Some(band);
        }

        let classes = (0..r).map(|i| pattern.class(i)).collect();
        let rng = ChaCha8Rng::seed_from_u64(config.seed);
        let state = EmbeddingState::new(&pattern, host, rng);
        let diag = Diagnostics {
            pattern_vertices: original_vertices,
            padded_vertices: pattern.vertex_count(),
            cluster_size: size,
            clusters: r,
            ..Diagnostics::default()
        };
        Ok(Embedder {
            original_vertices,
            pattern,
            host,
            cascade,
            config: config.clone(),
            classes,
            bands,
            state,
            diag,
            audit_rng: ChaCha8Rng::seed_from_u64(config.seed ^ AUDIT_STREAM),
        })
    }

    pub fn original_vertices(&self) -> usize {
        self.original_vertices
    }

    pub fn pattern(&self) -> &Pattern {
        &self.pattern
    }

    pub fn cluster_size(&self) -> usize {
        self.host.cluster_size()
    }

    pub(crate) fn band(&self, i: usize, j: usize) -> &Band {
        self.bands[i * self.host.cluster_count() + j]
            .as_ref()
            .expect("pattern edges map to cluster edges")
    }

    /// Buffers, the initial order and the low-degree exceptional set.
    pub fn preprocess(&mut self) -> std::result::Result<(), Halt> {
        let nd = (self.cascade.max_degree * self.cluster_size()) as f64;
        self.diag.bad_growth_bound = self.cascade.effective.eps1.to_f64() * nd;
        self.select_buffers()?;
        self.initial_order();
        self.detect_exceptional_g1()?;
        if self.config.audit_rate > 0.0 {
            self.audit_buffers();
        }
        Ok(())
    }

    /// Picks `⌈d′N⌉` buffer vertices per class, pairwise at distance at least 3
    /// in the whole pattern, scanning vertices in random order.
    pub fn select_buffers(&mut self) -> std::result::Result<(), Halt> {
        let n = self.pattern.vertex_count();
        let size = self.cluster_size();
        let quota = (self.cascade.effective.d1.ceil_times(size as u64).max(0) as usize).min(size);
        let mut scan: Vec<usize> = (0..n).collect();
        scan.shuffle(&mut self.state.rng);
        let mut blocked = vec![false; n];
        let graph = self.pattern.graph();
        for x in scan {
            let i = self.pattern.cluster_of(x);
            if blocked[x] || self.state.buffers[i].len() >= quota {
                continue;
            }
            self.state.buffers[i].push(x);
            self.state.is_buffer[x] = true;
            for y in graph.ball(x, 2) {
                blocked[y] = true;
            }
        }
        let sizes: Vec<usize> = self.state.buffers.iter().map(Vec::len).collect();
        self.diag.buffer_sizes = sizes.clone();
        if sizes.iter().any(|&s| s < quota) {
            return Err(Halt::Preprocessing(format!(
                "buffer quota {quota} per cluster not reached; achieved {sizes:?}"
            )));
        }
        self.state.remaining_nonbuffer = n - sizes.iter().sum::<usize>();
        Ok(())
    }

    /// Buffer neighbourhoods first, then the other non-buffers shuffled, then
    /// the buffers. Sets `T0` to the length of the neighbourhood prefix.
    pub fn initial_order(&mut self) {
        let n = self.pattern.vertex_count();
        let graph = self.pattern.graph();
        let mut seen = vec![false; n];
        let mut prefix = Vec::new();
        for list in &self.state.buffers {
            for &b in list {
                seen[b] = true;
            }
        }
        for list in &self.state.buffers {
            for &b in list {
                for &y in graph.neighbors(b) {
                    if !seen[y] {
                        seen[y] = true;
                        prefix.push(y);
                    }
                }
            }
        }
        let mut rest: Vec<usize> = (0..n).filter(|&x| !seen[x]).collect();
        rest.shuffle(&mut self.state.rng);
        self.state.t0 = prefix.len();
        let mut order = prefix;
        order.extend(rest);
        order.extend(self.state.buffers.iter().flatten().copied());
        self.state.order = order;
        let total = n as u64;
        self.state.t1 = (self.cascade.effective.d2.ceil_times(total).max(1)) as usize;
        self.diag.t1 = self.state.t1;
        self.diag.t0 = self.state.t0;
    }

    /// Host vertices with too few neighbours in some neighbouring class, and a
    /// matching number of well-separated pattern vertices moved to the front.
    pub fn detect_exceptional_g1(&mut self) -> std::result::Result<(), Halt> {
        let size = self.cluster_size();
        let r = self.host.cluster_count();
        let clusters = self.host.cluster_graph();
        for i in 0..r {
            let neighbours: Vec<usize> = clusters.neighbors(i).collect();
            self.state.e1[i] = (0..size)
                .filter(|&a| {
                    neighbours.iter().any(|&j| {
                        let deg = self.host.row(i, a, j).expect("cluster edge").count();
                        deg < self.band(i, j).lower(size)
                    })
                })
                .collect();
        }
        self.diag.e1_sizes = self.state.e1.iter().map(Vec::len).collect();
        let bound = &Rational::from_integer(r as i64) * &self.cascade.effective.eps;
        self.diag.e1_within_bound = self.diag.e1_sizes.iter().all(|&s| bound.count_at_most(s as u64, size as u64));

        let need: Vec<usize> = self.diag.e1_sizes.clone();
        if need.iter().all(|&k| k == 0) {
            return Ok(());
        }
        let mut blocked = vec![false; self.pattern.vertex_count()];
        for &b in self.state.buffers.iter().flatten() {
            for y in self.pattern.graph().ball(b, 2) {
                blocked[y] = true;
            }
        }
        let chosen = self.choose_separated(0, &need, &mut blocked, |_, _| true);
        let counts = count_per_cluster(&chosen, &self.pattern, r);
        if counts != need {
            return Err(Halt::Preprocessing(format!(
                "only {counts:?} separated pattern vertices available for low-degree host sets of sizes {need:?}"
            )));
        }
        for &x in &chosen {
            self.state.eh_level[x] = 1;
        }
        self.diag.eh1 = chosen.len();
        self.state.t0 += chosen.len();
        self.diag.t0 = self.state.t0;
        self.bring_forward(0, &chosen);
        Ok(())
    }

    /// Host vertices lying in fewer than `d″|B_i|` buffer candidate sets, and
    /// untouched pattern vertices far from everything placed, moved forward.
    pub fn detect_exceptional_g2(&mut self) -> std::result::Result<(), Halt> {
        let size = self.cluster_size();
        let r = self.host.cluster_count();
        for i in 0..r {
            let quota = self.state.buffers[i].len();
            let mut hits = vec![0usize; size];
            for &b in &self.state.buffers[i] {
                if !self.state.is_placed(b) {
                    for a in self.state.cand[b].iter() {
                        hits[a] += 1;
                    }
                }
            }
            self.state.e2[i] = (0..size)
                .filter(|&a| !self.state.occupied[i].contains(a))
                .filter(|&a| self.cascade.effective.d2.count_below(hits[a] as u64, quota as u64))
                .collect();
        }
        self.diag.e2_sizes = self.state.e2.iter().map(Vec::len).collect();
        let eps2 = &self.cascade.effective.eps2;
        self.diag.e2_within_bound = self.diag.e2_sizes.iter().all(|&s| eps2.count_at_most(s as u64, size as u64));

        let need = self.diag.e2_sizes.clone();
        if need.iter().all(|&k| k == 0) {
            return Ok(());
        }
        let n = self.pattern.vertex_count();
        let mut blocked = vec![false; n];
        for x in (0..n).filter(|&x| self.state.is_placed(x)) {
            for y in self.pattern.graph().ball(x, 2) {
                blocked[y] = true;
            }
        }
        let start = self.state.t;
        let chosen = self.choose_separated(start, &need, &mut blocked, |s, x| {
            s.eh_level[x] == 0 && s.cand[x].count() == size
        });
        let counts = count_per_cluster(&chosen, &self.pattern, r);
        if counts != need {
            let info = StuckInfo {
                t: self.state.t,
                message: format!(
                    "only {counts:?} separated untouched pattern vertices for buffer-missed host sets of sizes {need:?}"
                ),
                ..StuckInfo::default()
            };
            return Err(Halt::Stuck(info));
        }
        for &x in &chosen {
            self.state.eh_level[x] = 2;
        }
        self.diag.eh2 = chosen.len();
        self.bring_forward(start, &chosen);
        Ok(())
    }

    /// Unplaced vertices with `|H_{t,y}| ≤ (d′)²n` move to the front of the
    /// remaining order, behind any pending exceptional-pool vertices.
    pub fn detect_exceptional_h(&mut self) {
        let n = self.pattern.vertex_count() as u64;
        let d1sq = self.cascade.effective.d1.pow(2);
        let limit = d1sq.floor_times(n).max(-1);
        let start = self.state.t;
        let remaining = self.state.order[start..].to_vec();
        let mut pending = Vec::new();
        let mut low = Vec::new();
        let mut others = Vec::new();
        for x in remaining {
            if self.state.eh_level[x] > 0 {
                pending.push(x);
            } else if (self.state.avail_size[x] as i64) <= limit {
                low.push(x);
            } else {
                others.push(x);
            }
        }
        if !low.is_empty() {
            let buffers_moved = low.iter().filter(|&&x| self.state.is_buffer[x]).count();
            if self.state.t <= 2 * self.state.t0 {
                self.diag.early_reorders += 1;
            }
            self.diag.reorder_events.push(ReorderEvent {
                t: self.state.t,
                moved: low.len(),
                buffers_moved,
            });
        }
        let order = &mut self.state.order;
        order.truncate(start);
        order.extend(pending);
        order.extend(low);
        order.extend(others);
    }

    /// Greedy choice from the remaining order (positions `start..`) of
    /// non-buffer vertices, `need[i]` per class, pairwise at distance at least 3
    /// and outside `blocked`.
    fn choose_separated(
        &self,
        start: usize,
        need: &[usize],
        blocked: &mut [bool],
        eligible: impl Fn(&EmbeddingState, usize) -> bool,
    ) -> Vec<usize> {
        let mut left = need.to_vec();
        let mut chosen = Vec::new();
        for &x in &self.state.order[start..] {
            let i = self.pattern.cluster_of(x);
            if left[i] == 0 || blocked[x] || self.state.is_buffer[x] || self.state.is_placed(x) {
                continue;
            }
            if !eligible(&self.state, x) {
                continue;
            }
            chosen.push(x);
            left[i] -= 1;
            for y in self.pattern.graph().ball(x, 2) {
                blocked[y] = true;
            }
        }
        chosen
    }

    fn bring_forward(&mut self, start: usize, chosen: &[usize]) {
        let mut flag = vec![false; self.pattern.vertex_count()];
        for &x in chosen {
            flag[x] = true;
        }
        let rest: Vec<usize> = self.state.order[start..].iter().copied().filter(|&x| !flag[x]).collect();
        let order = &mut self.state.order;
        order.truncate(start);
        order.extend_from_slice(chosen);
        order.extend(rest);
    }

    /// Places `x` on offset `a` of its cluster and updates candidate sets.
    pub fn place(&mut self, x: usize, a: usize) {
        let i = self.pattern.cluster_of(x);
        let s = &mut self.state;
        debug_assert!(!s.occupied[i].contains(a));
        s.phi[x] = Some(self.host.global(i, a));
        s.occupied[i].insert(a);
        if !s.is_buffer[x] {
            s.remaining_nonbuffer -= 1;
        }
        for &y in &self.classes[i] {
            if s.phi[y].is_none() && s.avail[y].remove(a) {
                s.avail_size[y] -= 1;
            }
        }
        for &y in self.pattern.graph().neighbors(x) {
            if s.phi[y].is_none() {
                let j = self.pattern.cluster_of(y);
                let row = self.host.row(i, a, j).expect("pattern edges map to cluster edges");
                s.cand[y].intersect_with(row);
                s.refresh_avail(y, j);
            }
        }
    }

    /// Runs steps 1–5 until every non-buffer vertex is placed.
    pub fn run_phase1(&mut self) -> std::result::Result<(), Halt> {
        self.begin_phase1()?;
        while self.state.remaining_nonbuffer > 0 {
            self.step()?;
        }
        self.state.t_end = self.state.t;
        self.finish_phase1_diagnostics();
        Ok(())
    }

    /// Checks due before the first step. With an empty neighbourhood prefix
    /// the second exceptional pool is built here.
    pub fn begin_phase1(&mut self) -> std::result::Result<(), Halt> {
        if self.state.t0 == 0 {
            self.detect_exceptional_g2()?;
        }
        Ok(())
    }

    /// The vertex the next step will place.
    pub fn next_vertex(&self) -> Option<usize> {
        self.state.order.get(self.state.t).copied()
    }

    /// One greedy step: select an image, update candidate sets, then run the
    /// exceptional-set checks due at the new time.
    pub fn step(&mut self) -> std::result::Result<(), Halt> {
        let Some(x) = self.next_vertex() else {
            return Err(Error::internal("order exhausted before all non-buffer vertices were placed").into());
        };
        let snapshot = self.audit_rng.random_bool(self.config.audit_rate).then(|| self.state.cand.clone());
        let bad_before = self.state.bad.len();
        self.state.t += 1;

        if self.state.is_buffer[x] && !self.unplaced_neighbours(x).is_empty() {
            self.diag.buffers_placed_before_neighbors += 1;
            self.diag.notes.push(format!(
                "t={}: buffer {x} placed greedily before all its neighbours",
                self.state.t
            ));
        }
        if self.state.eh_level[x] > 0 {
            let size = self.cluster_size();
            let untouched: Vec<(usize, bool)> = self
                .unplaced_neighbours(x)
                .into_iter()
                .map(|y| (y, self.state.cand[y].count() == size))
                .collect();
            let (a, mut event) = self.select_image_case2(x)?;
            self.place(x, a);
            event.neighbors_untouched_before = untouched.iter().all(|&(_, u)| u);
            event.neighbors_keep_min_degree = untouched
                .iter()
                .all(|&(y, _)| !self.cascade.delta.count_below(self.state.cand[y].count() as u64, size as u64));
            self.diag.case2_steps += 1;
            self.diag.case2_events.push(event);
        } else {
            let selection = self.select_image_case1(x)?;
            for &(y, z) in &selection.bad_pairs {
                self.state.mark_bad(y, z);
            }
            self.place(x, selection.offset);
            self.diag.case1_steps += 1;
        }

        let t = self.state.t;
        if t == self.state.t0 {
            self.detect_exceptional_g2()?;
        }
        if t % self.state.t1 == 0 {
            self.detect_exceptional_h();
        }

        let growth = self.state.bad.len() - bad_before;
        self.diag.bad_max_step_growth = self.diag.bad_max_step_growth.max(growth);
        let min_h = (0..self.pattern.vertex_count())
            .filter(|&y| !self.state.is_placed(y))
            .map(|y| self.state.avail_size[y])
            .min();
        if let Some(m) = min_h {
            if self.diag.min_h_set.is_none_or(|cur| m < cur) {
                self.diag.min_h_set = Some(m);
                self.diag.min_h_set_step = t;
            }
        }
        if self.config.verbosity == Verbosity::Series {
            self.diag.min_h_series.push(min_h.unwrap_or(0));
            self.diag.bad_series.push(self.state.bad.len());
        }
        if let Some(snapshot) = snapshot {
            self.audit_step(&snapshot, growth);
        }
        Ok(())
    }

    pub(crate) fn unplaced_neighbours(&self, x: usize) -> Vec<usize> {
        self.pattern
            .graph()
            .neighbors(x)
            .iter()
            .copied()
            .filter(|&y| !self.state.is_placed(y))
            .collect()
    }

    fn finish_phase1_diagnostics(&mut self) {
        let size = self.cluster_size() as u64;
        let eff = &self.cascade.effective;
        self.diag.t_end = self.state.t_end;
        self.diag.min_h_above_d2n = self.diag.min_h_set.map(|m| !eff.d2.count_at_most(m as u64, size));
        self.diag.uncovered_at_end = self.state.occupied.iter().map(|z| size as usize - z.count()).collect();
        let gap = &eff.d1 - &eff.d2;
        self.diag.uncovered_above_bound =
            Some(self.diag.uncovered_at_end.iter().all(|&u| !gap.count_below(u as u64, size)));
    }

    /// Buffers pairwise at distance at least 3, by breadth-first search.
    fn audit_buffers(&mut self) {
        let all: Vec<usize> = self.state.buffers.iter().flatten().copied().collect();
        let graph = self.pattern.graph();
        for (k, &b) in all.iter().enumerate() {
            for &c in &all[k + 1..] {
                if let Ok(Some(dist)) = graph.bfs_distance(b, c) {
                    if dist < 3 {
                        self.diag.audit.violations.push(format!("buffers {b} and {c} at distance {dist}"));
                    }
                }
            }
        }
    }

    /// Recomputes candidate sets from scratch and compares with the state.
    fn audit_step(&mut self, before: &[BitSet], bad_growth: usize) {
        let t = self.state.t;
        let size = self.cluster_size();
        let mut problems = Vec::new();
        let placed = self.state.placed_count();
        let occupied: usize = self.state.occupied.iter().map(BitSet::count).sum();
        if placed != t || occupied != t {
            problems.push(format!("t={t}: {placed} placed, {occupied} occupied"));
        }
        for y in 0..self.pattern.vertex_count() {
            if self.state.is_placed(y) {
                continue;
            }
            let j = self.pattern.cluster_of(y);
            let mut fresh = BitSet::full(size);
            for &z in self.pattern.graph().neighbors(y) {
                if let Some(v) = self.state.phi[z] {
                    let (i, a) = self.host.locate(v);
                    fresh.intersect_with(self.host.row(i, a, j).expect("cluster edge"));
                }
            }
            if fresh != self.state.cand[y] {
                problems.push(format!("t={t}: candidate set of {y} differs from recomputation"));
            }
            let h = fresh.difference(&self.state.occupied[j]);
            if h != self.state.avail[y] || h.count() != self.state.avail_size[y] {
                problems.push(format!("t={t}: available set of {y} is not C minus occupied"));
            }
            if !self.state.cand[y].is_subset(&before[y]) {
                problems.push(format!("t={t}: candidate set of {y} grew"));
            }
        }
        let nd = (self.cascade.max_degree * size) as u64;
        if !self.cascade.effective.eps1.count_at_most(bad_growth as u64, nd) {
            problems.push(format!("t={t}: {bad_growth} new excluded pairs exceed the per-step bound"));
        }
        self.diag.audit.steps_checked += 1;
        self.diag.audit.violations.extend(problems);
    }
}

fn count_per_cluster(xs: &[usize], pattern: &Pattern, r: usize) -> Vec<usize> {
    let mut counts = vec![0; r];
    for &x in xs {
        counts[pattern.cluster_of(x)] += 1;
    }
    counts
}

/// Smallest `deg(v, V_j) / N` over all cluster edges and both sides.
fn min_degree_ratio(host: &PartitionedHost) -> Rational {
    let size = host.cluster_size();
    let clusters = host.cluster_graph();
    let min = clusters
        .edges()
        .flat_map(|(i, j)| [(i, j), (j, i)])
        .flat_map(|(i, j)| (0..size).map(move |a| host.row(i, a, j).map_or(0, BitSet::count)))
        .min()
        .unwrap_or(0);
    Rational::new(min as i64, size as i64).expect("cluster size is positive")
}
