//! Batch runs over sweep points and seeds.
//!
//! Each `(sweep point, seed)` task builds or loads its instance, runs
//! [`embed`] and the verifier, and yields one [`ResultRow`]. Tasks run on a
//! rayon pool; rows are sorted by `(point, seed)` before anything is written,
//! so output files do not depend on scheduling.
//!
//! Output directory layout:
//!
//! ```text
//! results.csv    one row per run, no wall-clock columns
//! timings.csv    per-phase milliseconds per run
//! summary.csv    success counts per sweep point
//! runs/p<point>_s<seed>.json   full report (when `output.run_json`)
//! runs/p<point>_s<seed>.{host,pattern,map}   (when `output.artifacts`)
//! ```

use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};

use blowup_core::embedder::{embed, EmbedConfig, EmbeddingReport, Outcome, Overrides};
use blowup_core::generators::{
    blowup, pattern_cycles, pattern_paths, pattern_random_bounded, random_host, HostRecipe, RandomPatternRecipe,
};
use blowup_core::graph::io::{write_host, write_map, write_pattern};
use blowup_core::graph::PartitionedHost;
use blowup_core::{Error, Pattern, Rational, Result};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::clusters::ClusterSpec;
use crate::files::{read_host, read_pattern};

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default)]
    pub name: String,
    pub clusters: ClusterSpec,
    pub instance: InstanceSpec,
    /// Base embedder settings; `seed` is replaced by the run seed.
    #[serde(default)]
    pub embed: EmbedConfig,
    pub seeds: SeedSpec,
    #[serde(default)]
    pub sweep: SweepAxes,
    #[serde(default)]
    pub output: OutputSpec,
    /// Worker threads; all cores when absent.
    #[serde(default)]
    pub threads: Option<usize>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum InstanceSpec {
    /// Host and pattern built from the run seed.
    Generated {
        size: usize,
        host: HostSpec,
        pattern: PatternSpec,
    },
    /// The same host and pattern for every run.
    Files {
        host: PathBuf,
        pattern: PathBuf,
        #[serde(default)]
        max_degree: Option<usize>,
    },
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum HostSpec {
    Blowup,
    Random {
        d: Rational,
        delta: Rational,
        #[serde(default)]
        low_degree_fraction: Rational,
    },
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum PatternSpec {
    Cycles {
        #[serde(default)]
        sequence: Option<Vec<usize>>,
    },
    Paths {
        #[serde(default)]
        sequence: Option<Vec<usize>>,
    },
    Random {
        max_degree: usize,
        #[serde(default = "one")]
        fill_fraction: Rational,
        /// Defaults to `Δ·|V(H)|/2`, i.e. as many edges as the degree bound allows.
        #[serde(default)]
        target_edges: Option<usize>,
        /// Defaults to 20 draws per target edge.
        #[serde(default)]
        attempts: Option<usize>,
        #[serde(default)]
        pad: bool,
    },
}

fn one() -> Rational {
    Rational::one()
}

/// Either an explicit list or `{ start, count }`.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SeedSpec {
    List(Vec<u64>),
    Range { start: u64, count: u64 },
}

impl SeedSpec {
    pub fn seeds(&self) -> Result<Vec<u64>> {
        let seeds: Vec<u64> = match self {
            SeedSpec::List(v) => v.clone(),
            SeedSpec::Range { start, count } => (0..*count)
                .map(|k| start.checked_add(k).ok_or_else(|| Error::arg("seed range overflows u64")))
                .collect::<Result<_>>()?,
        };
        if seeds.is_empty() {
            return Err(Error::arg("at least one seed is required"));
        }
        if seeds.iter().collect::<BTreeSet<_>>().len() != seeds.len() {
            return Err(Error::arg("seeds must be distinct"));
        }
        Ok(seeds)
    }
}

/// Values to sweep; an empty axis keeps the base value. Points are the
/// cartesian product in the order `size, d, delta, max_degree, overrides`.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepAxes {
    /// Cluster size `N` of generated instances.
    pub size: Vec<usize>,
    /// Edge probability of random hosts.
    pub d: Vec<Rational>,
    /// Minimum-degree fraction of random hosts.
    pub delta: Vec<Rational>,
    /// Degree bound of the embedder, and of random patterns.
    pub max_degree: Vec<usize>,
    pub overrides: Vec<Overrides>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputSpec {
    pub dir: Option<PathBuf>,
    /// Write one JSON report per run.
    pub run_json: bool,
    /// Write host, pattern and map files per run so `verify` can re-check them.
    pub artifacts: bool,
}

impl Default for OutputSpec {
    fn default() -> Self {
        OutputSpec {
            dir: None,
            run_json: true,
            artifacts: false,
        }
    }
}

/// One fully resolved combination of sweep values.
#[derive(Clone, Debug, Serialize)]
pub struct SweepPoint {
    pub index: usize,
    pub size: Option<usize>,
    pub d: Option<Rational>,
    pub delta: Option<Rational>,
    pub max_degree: Option<usize>,
    pub overrides: Overrides,
}

impl SweepPoint {
    pub fn embed_config(&self, base: &EmbedConfig, seed: u64) -> EmbedConfig {
        let mut cfg = base.clone();
        cfg.seed = seed;
        if self.max_degree.is_some() {
            cfg.max_degree = self.max_degree;
        }
        cfg.overrides = self.overrides.or(&base.overrides);
        cfg
    }

    fn overrides_label(&self) -> String {
        let o = &self.overrides;
        let names = ["d1", "d2", "d3", "eps3", "eps2", "eps1", "eps"];
        let parts: Vec<String> = names
            .iter()
            .zip(o.to_vec())
            .filter_map(|(n, v)| v.as_ref().map(|v| format!("{n}={v}")))
            .collect();
        parts.join(" ")
    }
}

fn axis<T: Clone>(values: &[T]) -> Vec<Option<T>> {
    if values.is_empty() {
        vec![None]
    } else {
        values.iter().cloned().map(Some).collect()
    }
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::arg(format!("experiment config: {e}")))
    }

    pub fn points(&self) -> Result<Vec<SweepPoint>> {
        let s = &self.sweep;
        if let InstanceSpec::Files { .. } = self.instance {
            if !(s.size.is_empty() && s.d.is_empty() && s.delta.is_empty()) {
                return Err(Error::arg("size, d and delta cannot be swept over file instances"));
            }
        }
        let mut points = Vec::new();
        for size in axis(&s.size) {
            for d in axis(&s.d) {
                for delta in axis(&s.delta) {
                    for max_degree in axis(&s.max_degree) {
                        for overrides in axis(&s.overrides) {
                            points.push(SweepPoint {
                                index: points.len(),
                                size,
                                d: d.clone(),
                                delta: delta.clone(),
                                max_degree,
                                overrides: overrides.unwrap_or_default(),
                            });
                        }
                    }
                }
            }
        }
        Ok(points)
    }
}

/// One run. Parameter columns hold resolved values; `error` is empty unless
/// the run could not produce a report.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ResultRow {
    pub point: usize,
    pub n: usize,
    pub host_d: String,
    pub host_delta: String,
    pub max_degree: String,
    pub overrides: String,
    pub seed: u64,
    pub outcome: String,
    pub verified: bool,
    pub min_h_set: Option<usize>,
    pub e1: usize,
    pub e2: usize,
    pub eh1: usize,
    pub eh2: usize,
    pub bad_pairs: usize,
    pub case2_steps: usize,
    pub reorders: usize,
    pub t0: usize,
    pub t_end: usize,
    pub error: String,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct TimingRow {
    pub point: usize,
    pub seed: u64,
    pub preprocessing_ms: f64,
    pub phase1_ms: f64,
    pub phase2_ms: f64,
    pub verify_ms: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SummaryRow {
    pub point: usize,
    pub n: usize,
    pub host_d: String,
    pub host_delta: String,
    pub max_degree: String,
    pub overrides: String,
    pub runs: usize,
    pub verified: usize,
    pub preprocessing_failures: usize,
    pub stuck: usize,
    pub hall_failures: usize,
    pub errors: usize,
    pub success_rate: String,
}

/// A finished run together with its report, when there is one.
#[derive(Clone, Debug)]
pub struct RunRecord {
    pub row: ResultRow,
    pub timing: TimingRow,
    pub report: Option<EmbeddingReport>,
}

#[derive(Clone, Debug)]
pub struct ExperimentResults {
    pub points: Vec<SweepPoint>,
    pub runs: Vec<RunRecord>,
}

impl ExperimentResults {
    pub fn rows(&self) -> impl Iterator<Item = &ResultRow> {
        self.runs.iter().map(|r| &r.row)
    }

    pub fn summary(&self) -> Vec<SummaryRow> {
        self.points
            .iter()
            .map(|p| {
                let rows: Vec<&ResultRow> = self.rows().filter(|r| r.point == p.index).collect();
                let count = |o: Outcome| rows.iter().filter(|r| r.error.is_empty() && r.outcome == o.as_str()).count();
                let first = rows.first();
                let verified = rows.iter().filter(|r| r.verified).count();
                SummaryRow {
                    point: p.index,
                    n: first.map_or(0, |r| r.n),
                    host_d: first.map(|r| r.host_d.clone()).unwrap_or_default(),
                    host_delta: first.map(|r| r.host_delta.clone()).unwrap_or_default(),
                    max_degree: first.map(|r| r.max_degree.clone()).unwrap_or_default(),
                    overrides: p.overrides_label(),
                    runs: rows.len(),
                    verified,
                    preprocessing_failures: count(Outcome::PreprocessingFailure),
                    stuck: count(Outcome::Phase1Stuck),
                    hall_failures: count(Outcome::Phase2HallFailure),
                    errors: rows.iter().filter(|r| !r.error.is_empty()).count(),
                    success_rate: format!("{:.4}", verified as f64 / rows.len().max(1) as f64),
                }
            })
            .collect()
    }

    /// Writes the CSV tables and, as configured, per-run files.
    pub fn write(&self, dir: &Path, output: &OutputSpec) -> Result<()> {
        fs::create_dir_all(dir)?;
        write_csv(&dir.join("results.csv"), self.rows())?;
        write_csv(&dir.join("timings.csv"), self.runs.iter().map(|r| &r.timing))?;
        write_csv(&dir.join("summary.csv"), self.summary().iter())?;
        if output.run_json {
            let runs = dir.join("runs");
            fs::create_dir_all(&runs)?;
            for run in &self.runs {
                let doc = RunDocument {
                    row: &run.row,
                    report: run.report.as_ref(),
                };
                let text = serde_json::to_string_pretty(&doc).map_err(|e| Error::internal(e.to_string()))?;
                fs::write(runs.join(format!("{}.json", run_stem(&run.row))), text)?;
            }
        }
        Ok(())
    }
}

#[derive(Serialize)]
struct RunDocument<'a> {
    row: &'a ResultRow,
    report: Option<&'a EmbeddingReport>,
}

fn run_stem(row: &ResultRow) -> String {
    format!("p{:03}_s{}", row.point, row.seed)
}

fn write_csv<T: Serialize>(path: &Path, rows: impl Iterator<Item = T>) -> Result<()> {
    let io = |e: csv::Error| Error::Io(std::io::Error::other(e));
    let mut w = csv::Writer::from_path(path).map_err(io)?;
    for row in rows {
        w.serialize(row).map_err(io)?;
    }
    w.flush()?;
    Ok(())
}

/// Instances that do not depend on the seed, built once per sweep point.
struct PointCache {
    host: Option<std::result::Result<PartitionedHost, String>>,
    pattern: Option<std::result::Result<Pattern, String>>,
}

fn cached<T>(entry: &std::result::Result<T, String>) -> Result<&T> {
    entry.as_ref().map_err(|e| Error::arg(e.clone()))
}

struct Instance<'c> {
    host: std::borrow::Cow<'c, PartitionedHost>,
    pattern: std::borrow::Cow<'c, Pattern>,
    d: String,
    delta: String,
}

struct Runner<'a> {
    cfg: &'a ExperimentConfig,
    clusters: blowup_core::ClusterGraph,
    base_dir: PathBuf,
}

impl Runner<'_> {
    fn size(&self, point: &SweepPoint) -> usize {
        match &self.cfg.instance {
            InstanceSpec::Generated { size, .. } => point.size.unwrap_or(*size),
            InstanceSpec::Files { .. } => 0,
        }
    }

    fn host_recipe(&self, point: &SweepPoint, seed: u64) -> Option<HostRecipe> {
        match &self.cfg.instance {
            InstanceSpec::Generated {
                host: HostSpec::Random {
                    d,
                    delta,
                    low_degree_fraction,
                },
                ..
            } => Some(HostRecipe {
                size: self.size(point),
                d: point.d.clone().unwrap_or_else(|| d.clone()),
                delta: point.delta.clone().unwrap_or_else(|| delta.clone()),
                low_degree_fraction: low_degree_fraction.clone(),
                seed,
            }),
            _ => None,
        }
    }

    fn sequence(&self, given: &Option<Vec<usize>>) -> Vec<usize> {
        given.clone().unwrap_or_else(|| (0..self.clusters.order()).collect())
    }

    fn build_pattern(&self, point: &SweepPoint, spec: &PatternSpec, seed: u64) -> Result<Pattern> {
        let size = self.size(point);
        match spec {
            PatternSpec::Cycles { sequence } => pattern_cycles(&self.clusters, size, &self.sequence(sequence)),
            PatternSpec::Paths { sequence } => pattern_paths(&self.clusters, size, &self.sequence(sequence)),
            PatternSpec::Random {
                max_degree,
                fill_fraction,
                target_edges,
                attempts,
                pad,
            } => {
                let max_degree = point.max_degree.unwrap_or(*max_degree);
                let vertices = fill_fraction.floor_times(size as u64) as usize * self.clusters.order();
                let target = target_edges.unwrap_or(max_degree * vertices / 2);
                pattern_random_bounded(
                    &self.clusters,
                    &RandomPatternRecipe {
                        size,
                        max_degree,
                        fill_fraction: fill_fraction.clone(),
                        target_edges: target,
                        attempts: attempts.unwrap_or(20 * target.max(1)),
                        seed,
                        pad: *pad,
                    },
                )
            }
        }
    }

    fn cache(&self, point: &SweepPoint) -> PointCache {
        match &self.cfg.instance {
            InstanceSpec::Files {
                host,
                pattern,
                max_degree,
            } => {
                let host = read_host(&self.base_dir.join(host));
                let pattern = match &host {
                    Ok(h) => read_pattern(&self.base_dir.join(pattern), h, *max_degree),
                    Err(e) => Err(Error::arg(format!("host file unavailable: {e}"))),
                };
                PointCache {
                    host: Some(host.map_err(|e| e.to_string())),
                    pattern: Some(pattern.map_err(|e| e.to_string())),
                }
            }
            InstanceSpec::Generated { host, pattern, .. } => PointCache {
                host: matches!(host, HostSpec::Blowup)
                    .then(|| blowup(&self.clusters, self.size(point)).map_err(|e| e.to_string())),
                pattern: (!matches!(pattern, PatternSpec::Random { .. }))
                    .then(|| self.build_pattern(point, pattern, 0).map_err(|e| e.to_string())),
            },
        }
    }

    fn instance<'c>(&self, point: &SweepPoint, cache: &'c PointCache, seed: u64) -> Result<Instance<'c>> {
        use std::borrow::Cow;
        let (host, d, delta) = match (&cache.host, self.host_recipe(point, seed)) {
            (Some(h), _) => (Cow::Borrowed(cached(h)?), "1".into(), "1".into()),
            (None, Some(recipe)) => {
                let h = random_host(&self.clusters, &recipe)?;
                (Cow::Owned(h), recipe.d.to_string(), recipe.delta.to_string())
            }
            (None, None) => return Err(Error::internal("no host source for this instance")),
        };
        let pattern = match (&cache.pattern, &self.cfg.instance) {
            (Some(p), _) => Cow::Borrowed(cached(p)?),
            (None, InstanceSpec::Generated { pattern, .. }) => Cow::Owned(self.build_pattern(point, pattern, seed)?),
            (None, _) => return Err(Error::internal("no pattern source for this instance")),
        };
        let (d, delta) = match &self.cfg.instance {
            InstanceSpec::Files { .. } => (String::new(), String::new()),
            _ => (d, delta),
        };
        Ok(Instance { host, pattern, d, delta })
    }

    fn run(&self, point: &SweepPoint, cache: &PointCache, seed: u64, artifacts: Option<&Path>) -> RunRecord {
        let max_degree = point
            .max_degree
            .or(self.cfg.embed.max_degree)
            .map_or_else(|| "auto".to_string(), |m| m.to_string());
        let mut row = ResultRow {
            point: point.index,
            n: self.size(point),
            host_d: String::new(),
            host_delta: String::new(),
            max_degree,
            overrides: point.overrides_label(),
            seed,
            outcome: "error".into(),
            verified: false,
            min_h_set: None,
            e1: 0,
            e2: 0,
            eh1: 0,
            eh2: 0,
            bad_pairs: 0,
            case2_steps: 0,
            reorders: 0,
            t0: 0,
            t_end: 0,
            error: String::new(),
        };
        let mut timing = TimingRow {
            point: point.index,
            seed,
            ..TimingRow::default()
        };
        let result = self.instance(point, cache, seed).and_then(|inst| {
            row.n = inst.host.cluster_size();
            row.host_d = inst.d.clone();
            row.host_delta = inst.delta.clone();
            let report = embed(&inst.pattern, &inst.host, &point.embed_config(&self.cfg.embed, seed))?;
            if let Some(dir) = artifacts {
                write_artifacts(dir, &row, &inst, &report)?;
            }
            Ok(report)
        });
        let report = match result {
            Ok(report) => {
                let diag = &report.diagnostics;
                row.outcome = report.outcome.as_str().into();
                row.verified = report.verified();
                row.min_h_set = diag.min_h_set;
                row.e1 = diag.e1_sizes.iter().sum();
                row.e2 = diag.e2_sizes.iter().sum();
                row.eh1 = diag.eh1;
                row.eh2 = diag.eh2;
                row.bad_pairs = diag.bad_pairs;
                row.case2_steps = diag.case2_steps;
                row.reorders = diag.reorder_events.len();
                row.t0 = diag.t0;
                row.t_end = diag.t_end;
                let t = &report.timings;
                timing.preprocessing_ms = t.preprocessing_ms;
                timing.phase1_ms = t.phase1_ms;
                timing.phase2_ms = t.phase2_ms;
                timing.verify_ms = t.verify_ms;
                Some(report)
            }
            Err(e) => {
                row.error = e.to_string();
                None
            }
        };
        RunRecord { row, timing, report }
    }
}

fn write_artifacts(dir: &Path, row: &ResultRow, inst: &Instance<'_>, report: &EmbeddingReport) -> Result<()> {
    let stem = run_stem(row);
    fs::write(dir.join(format!("{stem}.host")), write_host(&inst.host))?;
    fs::write(dir.join(format!("{stem}.pattern")), write_pattern(&inst.pattern))?;
    if let Some(phi) = &report.phi {
        let map: Vec<(usize, usize)> = phi.iter().copied().enumerate().collect();
        fs::write(dir.join(format!("{stem}.map")), write_map(&map))?;
    }
    Ok(())
}

/// Runs every `(sweep point, seed)` pair. File paths in the config are
/// resolved against `base_dir`. Per-run failures become rows with a non-empty
/// `error` column; only configuration errors abort.
pub fn run_experiment(cfg: &ExperimentConfig, base_dir: &Path) -> Result<ExperimentResults> {
    let seeds = cfg.seeds.seeds()?;
    let points = cfg.points()?;
    let runner = Runner {
        cfg,
        clusters: cfg.clusters.build()?,
        base_dir: base_dir.to_path_buf(),
    };
    let artifacts = match (&cfg.output.dir, cfg.output.artifacts) {
        (Some(dir), true) => {
            let runs = base_dir.join(dir).join("runs");
            fs::create_dir_all(&runs)?;
            Some(runs)
        }
        _ => None,
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.threads.unwrap_or(0))
        .build()
        .map_err(|e| Error::internal(e.to_string()))?;
    let caches: Vec<PointCache> = points.iter().map(|p| runner.cache(p)).collect();
    let tasks: Vec<(usize, u64)> = (0..points.len()).flat_map(|p| seeds.iter().map(move |&s| (p, s))).collect();
    let mut runs: Vec<RunRecord> = pool.install(|| {
        tasks
            .par_iter()
            .map(|&(p, seed)| runner.run(&points[p], &caches[p], seed, artifacts.as_deref()))
            .collect()
    });
    runs.sort_by_key(|r| (r.row.point, r.row.seed));
    Ok(ExperimentResults { points, runs })
}
