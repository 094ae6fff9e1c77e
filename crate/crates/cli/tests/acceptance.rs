//! Acceptance gate: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

use std::collections::HashSet;
use std::fs;
use std::path::Path;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use blowup_cli::experiment::{HostSpec, InstanceSpec, OutputSpec, PatternSpec, SeedSpec, SweepAxes};
use blowup_cli::{run_experiment, ClusterSpec, ExperimentConfig, ExperimentResults};
use blowup_core::embedder::{compute_cascade, embed, EmbedConfig, Overrides};
use blowup_core::generators::{blowup, pattern_cycles, random_host, HostRecipe};
use blowup_core::matching::{max_matching, perfect_or_violator, SdrOutcome};
use blowup_core::regularity::{check_regular_exact, check_regular_sampled, RegularityStatus, EXHAUSTIVE_LIMIT};
use blowup_core::{BipartitePair, ClusterGraph, PartitionedHost, Pattern, Rational};
use num_bigint::BigUint;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const CASCADE_ABS_TOL: f64 = 1e-6;
const RELATION_REL_TOL: f64 = 1e-12;
const BLOWUP_SEEDS: u64 = 50;
const RANDOM_HOST_SEEDS: u64 = 50;
/// Pinned from pilot runs (50/50 observed on seeds 0..50, ~97% over 500 seeds).
const RANDOM_HOST_MIN_SUCCESSES: usize = 45;
const MATCHING_INSTANCES: usize = 1000;
const REGULARITY_PAIRS: usize = 200;
const SAMPLED_TRIALS: u64 = 2000;
const AUDITED_RUNS: u64 = 20;
const AUDIT_RATE: f64 = 0.25;

fn q(s: &str) -> Rational {
    s.parse().unwrap()
}

struct Gate {
    failures: usize,
}

impl Gate {
    fn report(&mut self, id: u32, name: &str, budget: Duration, f: impl FnOnce() -> Result<String, String>) {
        let start = Instant::now();
        let result = f();
        let elapsed = start.elapsed();
        let result = match result {
            Ok(detail) if elapsed > budget => Err(format!("{detail}; took {elapsed:.1?}, budget {budget:?}")),
            other => other,
        };
        match result {
            Ok(detail) => println!("PASS criterion {id} ({name}): {detail} [{elapsed:.2?}]"),
            Err(detail) => {
                self.failures += 1;
                println!("FAIL criterion {id} ({name}): {detail} [{elapsed:.2?}]");
            }
        }
    }
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

/// `log10` of a positive big integer from its decimal digits.
fn log10_big(n: &BigUint) -> f64 {
    let digits = n.to_str_radix(10);
    let lead = digits.len().min(17);
    let mantissa: f64 = digits[..lead].parse().unwrap();
    mantissa.log10() + (digits.len() - lead) as f64
}

fn criterion_cascade() -> Result<String, String> {
    let (d, delta, max_degree, r) = (q("0.5"), q("0.5"), 3usize, 4usize);
    let c = compute_cascade(&d, &delta, max_degree, r, &Overrides::default()).map_err(|e| e.to_string())?;
    // Independent oracle: base = (1/2)(1/2)^3 / (8·4·3) = 1 / 1536, raised to 328 exactly.
    let num = BigUint::from(1u32).pow(328);
    let den = (BigUint::from(2u32) * BigUint::from(8u32) * BigUint::from(96u32)).pow(328);
    let oracle = log10_big(&num) - log10_big(&den);
    let got = c.log10.eps;
    ensure((got - oracle).abs() <= CASCADE_ABS_TOL, || {
        format!("log10 eps = {got}, oracle {oracle}")
    })?;
    let l = &c.log10;
    let b = c.log10_base;
    let relations = [
        ("d1 = base", l.d1, b),
        ("d2 = d1^3", l.d2, 3.0 * l.d1),
        ("d3 = d2^2", l.d3, 2.0 * l.d2),
        ("eps3 = d3^2", l.eps3, 2.0 * l.d3),
        ("eps2 = base^2 d3^2 eps3^3", l.eps2, 2.0 * b + 2.0 * l.d3 + 3.0 * l.eps3),
        ("eps1 = base^2 d3^2 eps2^3", l.eps1, 2.0 * b + 2.0 * l.d3 + 3.0 * l.eps2),
        ("eps = eps1^2", l.eps, 2.0 * l.eps1),
    ];
    for (name, lhs, rhs) in relations {
        let rel = ((lhs - rhs) / rhs).abs();
        ensure(rel <= RELATION_REL_TOL, || format!("{name}: {lhs} vs {rhs} (relative error {rel:e})"))?;
    }
    Ok(format!("log10 eps = {got:.9}, oracle {oracle:.9}; 7 relations within {RELATION_REL_TOL:e}"))
}

/// Checks a total map against the definition with plain loops.
fn naive_embedding_check(pattern: &Pattern, host: &PartitionedHost, phi: &[usize]) -> Result<(), String> {
    let size = host.cluster_size();
    ensure(phi.len() == pattern.vertex_count(), || "map does not cover the pattern".into())?;
    let mut used = HashSet::new();
    for (x, &v) in phi.iter().enumerate() {
        ensure(v < host.vertex_count(), || format!("{x} -> {v} out of range"))?;
        ensure(used.insert(v), || format!("{v} used twice"))?;
        ensure(v / size == pattern.cluster_of(x), || format!("{x} -> {v} in the wrong cluster"))?;
    }
    for (x, y) in pattern.graph().edges() {
        ensure(host.has_edge(phi[x], phi[y]), || format!("edge {x}-{y} not preserved"))?;
    }
    Ok(())
}

fn criterion_blowup() -> Result<String, String> {
    let r = ClusterGraph::triangle();
    let host = blowup(&r, 120).map_err(|e| e.to_string())?;
    let pattern = pattern_cycles(&r, 120, &[0, 1, 2]).map_err(|e| e.to_string())?;
    let mut ok = 0;
    for seed in 0..BLOWUP_SEEDS {
        let report = embed(&pattern, &host, &EmbedConfig::with_seed(seed)).map_err(|e| format!("seed {seed}: {e}"))?;
        ensure(report.verified(), || format!("seed {seed}: {}", report.outcome.as_str()))?;
        naive_embedding_check(&pattern, &host, report.phi.as_ref().unwrap()).map_err(|e| format!("seed {seed}: {e}"))?;
        ok += 1;
    }
    Ok(format!("{ok}/{BLOWUP_SEEDS} succeeded and passed both verifiers"))
}

fn random_host_config() -> ExperimentConfig {
    ExperimentConfig {
        name: "random-triangle".into(),
        clusters: ClusterSpec::Triangle,
        instance: InstanceSpec::Generated {
            size: 150,
            host: HostSpec::Random {
                d: q("0.6"),
                delta: q("0.5"),
                low_degree_fraction: q("0.02"),
            },
            pattern: PatternSpec::Cycles { sequence: None },
        },
        embed: EmbedConfig {
            max_degree: Some(2),
            ..EmbedConfig::default()
        },
        seeds: SeedSpec::Range {
            start: 0,
            count: RANDOM_HOST_SEEDS,
        },
        sweep: SweepAxes::default(),
        output: OutputSpec {
            dir: None,
            run_json: false,
            artifacts: false,
        },
        threads: None,
    }
}

fn criterion_random_host(results: &ExperimentResults) -> Result<String, String> {
    let verified = results.rows().filter(|r| r.verified).count();
    let errors: Vec<String> = results.rows().filter(|r| !r.error.is_empty()).map(|r| r.error.clone()).collect();
    ensure(errors.is_empty(), || format!("run errors: {errors:?}"))?;
    ensure(verified >= RANDOM_HOST_MIN_SUCCESSES, || {
        format!("{verified}/{RANDOM_HOST_SEEDS} verified, need {RANDOM_HOST_MIN_SUCCESSES}")
    })?;
    Ok(format!("{verified}/{RANDOM_HOST_SEEDS} verified (threshold {RANDOM_HOST_MIN_SUCCESSES})"))
}

fn criterion_case2(results: &ExperimentResults) -> Result<String, String> {
    let r = ClusterGraph::triangle();
    let mut seeds_with_events = 0;
    let mut events = 0;
    for run in &results.runs {
        let Some(report) = &run.report else { continue };
        let diag = &report.diagnostics;
        if diag.case2_events.is_empty() {
            continue;
        }
        seeds_with_events += 1;
        let seed = run.row.seed;
        let host = random_host(
            &r,
            &HostRecipe {
                size: 150,
                d: q("0.6"),
                delta: q("0.5"),
                low_degree_fraction: q("0.02"),
                seed,
            },
        )
        .map_err(|e| e.to_string())?;
        let pattern = pattern_cycles(&r, 150, &[0, 1, 2]).unwrap();
        let delta_n = 75;
        for ev in &diag.case2_events {
            events += 1;
            ensure(ev.neighbors_untouched_before, || format!("seed {seed} t={}: neighbour already constrained", ev.t))?;
            ensure(ev.neighbors_keep_min_degree, || format!("seed {seed} t={}: neighbour below δN", ev.t))?;
            if ev.level == 1 {
                ensure(diag.e1_sizes.iter().sum::<usize>() >= 1, || "level-1 event without low-degree hosts".into())?;
            }
            // The image reaches every unembedded neighbour's class in at least δN vertices.
            let image = ev.image;
            let i = image / 150;
            ensure(i == pattern.cluster_of(ev.vertex), || format!("seed {seed}: image {image} outside its cluster"))?;
            for &y in pattern.graph().neighbors(ev.vertex) {
                let j = pattern.cluster_of(y);
                let deg = (0..150).filter(|&b| host.has_edge(image, j * 150 + b)).count();
                ensure(deg >= delta_n, || format!("seed {seed}: image {image} has {deg} < δN neighbours in V_{j}"))?;
            }
            if let Some(phi) = &report.phi {
                ensure(phi[ev.vertex] == image, || format!("seed {seed}: final map moved vertex {}", ev.vertex))?;
            }
        }
    }
    ensure(seeds_with_events >= 1, || "no run used an exceptional image".into())?;
    Ok(format!("{events} exceptional placements over {seeds_with_events} seeds, all post-conditions hold"))
}

/// Exhaustive maximum matching by recursion over left vertices.
fn brute_force_matching(inst: &BipartitePair, u: usize, used: &mut Vec<bool>) -> usize {
    if u == inst.left_count() {
        return 0;
    }
    let mut best = brute_force_matching(inst, u + 1, used);
    for v in inst.row(u).iter() {
        if !used[v] {
            used[v] = true;
            best = best.max(1 + brute_force_matching(inst, u + 1, used));
            used[v] = false;
        }
    }
    best
}

fn criterion_matching() -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut violators = 0;
    for k in 0..MATCHING_INSTANCES {
        let a = rng.random_range(1..=7);
        let b = if k % 2 == 0 { a } else { rng.random_range(1..=7) };
        let p: f64 = rng.random_range(0.05..0.7);
        let edges: Vec<(usize, usize)> =
            (0..a).flat_map(|x| (0..b).map(move |y| (x, y))).filter(|_| rng.random_bool(p)).collect();
        let inst = BipartitePair::from_edges(a, b, edges).unwrap();
        let got = max_matching(&inst).len();
        let want = brute_force_matching(&inst, 0, &mut vec![false; b]);
        ensure(got == want, || format!("instance {k}: matching {got}, optimum {want}"))?;
        if a == b {
            if let SdrOutcome::Violator { left, .. } = perfect_or_violator(&inst).unwrap() {
                violators += 1;
                let mut hood = HashSet::new();
                for &u in &left {
                    for v in 0..b {
                        if inst.has_edge(u, v) {
                            hood.insert(v);
                        }
                    }
                }
                ensure(hood.len() < left.len(), || format!("instance {k}: violator with |N(S)| = {} ≥ |S|", hood.len()))?;
            }
        }
    }
    Ok(format!("{MATCHING_INSTANCES} instances match the brute-force optimum; {violators} violators re-verified"))
}

fn criterion_regularity() -> Result<String, String> {
    for eps in [q("0.05"), q("0.2")] {
        for pair in [BipartitePair::complete(10, 10), BipartitePair::empty(10, 10)] {
            let v = check_regular_exact(&pair, &eps, EXHAUSTIVE_LIMIT).map_err(|e| e.to_string())?;
            ensure(v.status == RegularityStatus::RegularCertified, || format!("trivial pair not certified at eps {eps}"))?;
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut certified = 0;
    for k in 0..REGULARITY_PAIRS {
        let a = rng.random_range(2..=12);
        let b = rng.random_range(2..=12);
        let p: f64 = rng.random_range(0.0..1.0);
        let edges: Vec<(usize, usize)> =
            (0..a).flat_map(|x| (0..b).map(move |y| (x, y))).filter(|_| rng.random_bool(p)).collect();
        let pair = BipartitePair::from_edges(a, b, edges).unwrap();
        let eps = [q("0.2"), q("0.3"), q("0.4"), q("0.5")][k % 4].clone();
        let exact = check_regular_exact(&pair, &eps, EXHAUSTIVE_LIMIT).map_err(|e| e.to_string())?;
        if exact.status == RegularityStatus::RegularCertified {
            certified += 1;
            let sampled = check_regular_sampled(&pair, &eps, SAMPLED_TRIALS, k as u64).map_err(|e| e.to_string())?;
            ensure(sampled.status != RegularityStatus::IrregularWitnessed, || {
                format!("pair {k}: sampled witness on a certified pair")
            })?;
        }
    }
    ensure(certified > 0, || "no random pair was certified regular".into())?;

    let mut edges: Vec<(usize, usize)> = Vec::new();
    for x in 0..10 {
        for y in 0..10 {
            if (x < 3 && y < 3) || rng.random_bool(0.3) {
                edges.push((x, y));
            }
        }
    }
    let pair = BipartitePair::from_edges(10, 10, edges).unwrap();
    let density = pair.edge_count() as f64 / 100.0;
    // The block has density 1 and both sides exceed 0.2·10, so it qualifies
    // whenever 1 − d(A,B) ≥ 0.2.
    ensure(1.0 - density >= 0.2, || format!("planted pair too dense: {density}"))?;
    let v = check_regular_exact(&pair, &q("0.2"), EXHAUSTIVE_LIMIT).map_err(|e| e.to_string())?;
    ensure(v.status == RegularityStatus::IrregularWitnessed, || "planted block not witnessed".into())?;
    let dev = v.witness.unwrap().deviation();
    ensure(dev >= &Rational::one() - &pair.density().as_rational(), || format!("witness deviation {dev} below the block's"))?;
    Ok(format!("trivial pairs certified; {certified}/{REGULARITY_PAIRS} certified pairs never sampled-witnessed; planted block witnessed (deviation {dev})"))
}

fn criterion_audit() -> Result<String, String> {
    let r = ClusterGraph::triangle();
    let mut checked = 0;
    for seed in 0..AUDITED_RUNS {
        let host = random_host(
            &r,
            &HostRecipe {
                size: 120,
                d: q("0.6"),
                delta: q("0.5"),
                low_degree_fraction: q("0.02"),
                seed: 1000 + seed,
            },
        )
        .map_err(|e| e.to_string())?;
        let pattern = pattern_cycles(&r, 120, &[0, 1, 2]).unwrap();
        let mut cfg = EmbedConfig::with_seed(seed);
        cfg.audit_rate = AUDIT_RATE;
        cfg.exhaustive_selection = seed % 2 == 1;
        let report = embed(&pattern, &host, &cfg).map_err(|e| format!("seed {seed}: {e}"))?;
        let audit = &report.diagnostics.audit;
        ensure(audit.violations.is_empty(), || format!("seed {seed}: {:?}", audit.violations))?;
        ensure(report.diagnostics.bad_max_step_growth as f64 <= report.diagnostics.bad_growth_bound, || {
            format!("seed {seed}: Bad grew by {} in one step", report.diagnostics.bad_max_step_growth)
        })?;
        checked += audit.steps_checked;
    }
    ensure(checked > 0, || "no step was audited".into())?;
    Ok(format!("{AUDITED_RUNS} runs, {checked} audited steps, 0 violations"))
}

fn written(results: &ExperimentResults, dir: &Path) -> Result<(Vec<u8>, Vec<u8>), String> {
    let output = OutputSpec {
        dir: None,
        run_json: false,
        artifacts: false,
    };
    results.write(dir, &output).map_err(|e| e.to_string())?;
    let read = |f: &str| fs::read(dir.join(f)).map_err(|e| e.to_string());
    Ok((read("results.csv")?, read("summary.csv")?))
}

fn criterion_determinism(first: &ExperimentResults) -> Result<String, String> {
    let mut cfg = random_host_config();
    cfg.threads = Some(2);
    let second = run_experiment(&cfg, Path::new("")).map_err(|e| e.to_string())?;
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    let a = written(first, &tmp.path().join("a"))?;
    let b = written(&second, &tmp.path().join("b"))?;
    ensure(a.0 == b.0, || "results.csv differs between runs".into())?;
    ensure(a.1 == b.1, || "summary.csv differs between runs".into())?;
    Ok(format!("results.csv ({} bytes) and summary.csv identical across two sweeps", a.0.len()))
}

/// Expected trend, reported but not gated.
fn density_trend() {
    let mut cfg = random_host_config();
    cfg.instance = InstanceSpec::Generated {
        size: 150,
        host: HostSpec::Random {
            d: q("0.6"),
            delta: q("0.3"),
            low_degree_fraction: q("0"),
        },
        pattern: PatternSpec::Cycles { sequence: None },
    };
    cfg.seeds = SeedSpec::Range { start: 0, count: 20 };
    cfg.sweep.d = vec![q("0.3"), q("0.5"), q("0.7")];
    match run_experiment(&cfg, Path::new("")) {
        Ok(results) => {
            let rates: Vec<usize> = results.summary().iter().map(|s| s.verified).collect();
            let monotone = rates.windows(2).all(|w| w[0] <= w[1]);
            println!(
                "INFO density trend (d = 0.3, 0.5, 0.7; 20 seeds): verified {rates:?}, non-decreasing: {monotone}"
            );
        }
        Err(e) => println!("INFO density trend not available: {e}"),
    }
}

fn main() -> ExitCode {
    let mut gate = Gate { failures: 0 };
    gate.report(1, "cascade exactness", Duration::from_secs(1), criterion_cascade);
    gate.report(2, "verifier soundness on blow-ups", Duration::from_secs(60), criterion_blowup);

    let start = Instant::now();
    let sweep = run_experiment(&random_host_config(), Path::new(""));
    let sweep_time = start.elapsed();
    match &sweep {
        Ok(results) => {
            gate.report(3, "random-host success", Duration::from_secs(300).saturating_sub(sweep_time), || {
                criterion_random_host(results).map(|d| format!("{d}; sweep took {sweep_time:.2?}"))
            });
            gate.report(4, "exceptional-path coverage", Duration::from_secs(60), || criterion_case2(results));
        }
        Err(e) => {
            for (id, name) in [(3, "random-host success"), (4, "exceptional-path coverage")] {
                gate.failures += 1;
                println!("FAIL criterion {id} ({name}): sweep failed: {e}");
            }
        }
    }
    gate.report(5, "matching oracle", Duration::from_secs(30), criterion_matching);
    gate.report(6, "regularity checkers", Duration::from_secs(120), criterion_regularity);
    gate.report(7, "invariant audit", Duration::from_secs(120), criterion_audit);
    match &sweep {
        Ok(results) => gate.report(8, "determinism", Duration::from_secs(300), || criterion_determinism(results)),
        Err(e) => {
            gate.failures += 1;
            println!("FAIL criterion 8 (determinism): sweep failed: {e}");
        }
    }
    density_trend();

    if gate.failures == 0 {
        println!("acceptance: all 8 criteria passed");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: {} criteria failed", gate.failures);
        ExitCode::FAILURE
    }
}
