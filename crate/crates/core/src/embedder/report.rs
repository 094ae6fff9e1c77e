use serde::{Serialize, Serializer};

use super::cascade::{CascadeMode, Derived};
use super::verify::VerificationReport;
use crate::error::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Outcome {
    Success,
    PreprocessingFailure,
    Phase1Stuck,
    Phase2HallFailure,
}

impl Outcome {
    pub fn as_str(self) -> &'static str {
        match self {
            Outcome::Success => "success",
            Outcome::PreprocessingFailure => "preprocessing-failure",
            Outcome::Phase1Stuck => "phase1-stuck",
            Outcome::Phase2HallFailure => "phase2-hall-failure",
        }
    }
}

/// Why a selection step found no admissible image.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct StuckInfo {
    pub t: usize,
    pub vertex: usize,
    pub cluster: usize,
    /// `|H_{t−1,x}|` for the vertex being placed.
    pub candidates: usize,
    /// Candidates rejected by the first condition they fail: the degree into
    /// `H_{t−1,y}`, the degree into `C_{t−1,y}`, the pairwise proportion.
    pub rejected: [usize; 3],
    /// `(y, |H_{t−1,y}|, |C_{t−1,y}|, eligible partners)` per unplaced neighbour.
    pub neighbors: Vec<(usize, usize, usize, usize)>,
    pub message: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HallViolation {
    pub cluster: usize,
    /// Pattern vertices whose joint candidate set is too small.
    pub vertices: Vec<usize>,
    /// Host vertices (global ids) in their joint candidate set.
    pub neighborhood: Vec<usize>,
}

/// A stop condition of the algorithm, or an internal error.
#[derive(Debug)]
pub enum Halt {
    Preprocessing(String),
    Stuck(StuckInfo),
    Hall(HallViolation),
    Error(Error),
}

impl From<Error> for Halt {
    fn from(e: Error) -> Self {
        Halt::Error(e)
    }
}

/// Record of one image chosen from an exceptional pool.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Case2Event {
    pub t: usize,
    pub vertex: usize,
    /// 1 for low-degree hosts found before embedding, 2 for hosts missed by
    /// too many buffer candidate sets.
    pub level: u8,
    pub image: usize,
    /// `min_y deg(v, H_{t−1,y}) − (δN − T0 − |E_H|)` over unembedded neighbours.
    pub degree_slack: Option<i64>,
    /// Every unembedded neighbour `y` ends with `|C_{t,y}| ≥ δN`.
    pub neighbors_keep_min_degree: bool,
    /// Every unembedded neighbour `y` ends with `C_{t,y} = ψ(y) ∩ N(v)`.
    pub neighbors_untouched_before: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ReorderEvent {
    pub t: usize,
    pub moved: usize,
    pub buffers_moved: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Phase2Cluster {
    pub cluster: usize,
    pub size: usize,
    pub edges: usize,
    pub min_left_degree: usize,
    pub min_right_degree: usize,
    /// `min |H_{T,y}| > d‴·M`.
    pub left_degree_condition: bool,
    /// Every free host vertex lies in at least `d‴·M` candidate sets.
    pub right_degree_condition: bool,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct AuditSummary {
    pub steps_checked: usize,
    pub violations: Vec<String>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct Diagnostics {
    pub pattern_vertices: usize,
    pub padded_vertices: usize,
    pub cluster_size: usize,
    pub clusters: usize,
    pub buffer_sizes: Vec<usize>,
    pub t0: usize,
    pub t1: usize,
    /// Step at which the greedy phase ended.
    pub t_end: usize,
    pub e1_sizes: Vec<usize>,
    pub e2_sizes: Vec<usize>,
    pub eh1: usize,
    pub eh2: usize,
    /// `|E_i^1| ≤ rεN` for every cluster.
    pub e1_within_bound: bool,
    /// `|E_i^2| ≤ ε″N` for every cluster.
    pub e2_within_bound: bool,
    pub case1_steps: usize,
    pub case2_steps: usize,
    pub case2_events: Vec<Case2Event>,
    pub reorder_events: Vec<ReorderEvent>,
    /// Reorders with at least one vertex moved while `t ≤ 2·T0`.
    pub early_reorders: usize,
    /// Buffer vertices placed greedily while some neighbour was unplaced.
    pub buffers_placed_before_neighbors: usize,
    /// Smallest `|H_{t,y}|` seen over unembedded `y` during the greedy phase.
    pub min_h_set: Option<usize>,
    pub min_h_set_step: usize,
    /// `min |H_{t,y}| > d″N`.
    pub min_h_above_d2n: Option<bool>,
    /// Uncovered host vertices per cluster at the end of the greedy phase.
    pub uncovered_at_end: Vec<usize>,
    /// Every cluster keeps at least `(d′ − d″)N` uncovered vertices.
    pub uncovered_above_bound: Option<bool>,
    pub bad_pairs: usize,
    pub bad_max_step_growth: usize,
    pub bad_growth_bound: f64,
    pub min_h_series: Vec<usize>,
    pub bad_series: Vec<usize>,
    pub phase2: Vec<Phase2Cluster>,
    pub stuck: Option<StuckInfo>,
    pub violator: Option<HallViolation>,
    pub audit: AuditSummary,
    pub notes: Vec<String>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct Timings {
    pub preprocessing_ms: f64,
    pub phase1_ms: f64,
    pub phase2_ms: f64,
    pub verify_ms: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CascadeSummary {
    pub mode: CascadeMode,
    pub d: String,
    pub delta: String,
    pub max_degree: usize,
    pub r: usize,
    pub log10_base: f64,
    pub exact_log10: Derived<f64>,
    pub effective_log10: Derived<f64>,
    pub effective: Derived<String>,
    pub ordering_holds: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EmbeddingReport {
    pub outcome: Outcome,
    pub seed: u64,
    pub cascade: CascadeSummary,
    /// On success, `φ(x)` as a global host vertex for every pattern vertex.
    #[serde(rename = "map", serialize_with = "map_lines")]
    pub phi: Option<Vec<usize>>,
    pub verification: Option<VerificationReport>,
    pub diagnostics: Diagnostics,
    pub timings: Timings,
}

impl EmbeddingReport {
    pub fn succeeded(&self) -> bool {
        self.outcome == Outcome::Success
    }

    /// Whether the run succeeded and the verifier found nothing wrong.
    pub fn verified(&self) -> bool {
        self.succeeded() && self.verification.as_ref().is_some_and(|v| v.passed())
    }
}

fn map_lines<S: Serializer>(phi: &Option<Vec<usize>>, serializer: S) -> Result<S::Ok, S::Error> {
    match phi {
        None => serializer.serialize_none(),
        Some(phi) => serializer.collect_seq(phi.iter().enumerate().map(|(x, v)| format!("map {x} {v}"))),
    }
}
