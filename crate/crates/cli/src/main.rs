use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use blowup_cli::files::{read_host, read_pattern};
use blowup_cli::{run_experiment, verify_file, ClusterSpec, ExperimentConfig};
use blowup_core::embedder::{compute_cascade, embed, Balance, EmbedConfig, Overrides, ParamMode};
use blowup_core::generators::{
    blowup, pattern_cycles, pattern_paths, pattern_random_bounded, random_host, HostRecipe, RandomPatternRecipe,
};
use blowup_core::graph::io::{write_host, write_map, write_pattern};
use blowup_core::regularity::{check_super_regular, RegularityMode};
use blowup_core::Rational;
use clap::{Args, Parser, Subcommand, ValueEnum};

/// Embed bounded-degree patterns into partitioned hosts built from
/// super-regular pairs.
#[derive(Parser)]
#[command(name = "blowup", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a host or pattern file.
    #[command(subcommand)]
    Gen(Gen),
    /// Check the pairs of a host for super-regularity.
    Regcheck(RegcheckArgs),
    /// Embed a pattern file into a host file.
    Embed(EmbedArgs),
    /// Re-check a stored map against its pattern and host. Exit 0 iff valid.
    Verify {
        #[arg(long)]
        pattern: PathBuf,
        #[arg(long)]
        host: PathBuf,
        #[arg(long)]
        map: PathBuf,
    },
    /// Run a batch experiment described by a TOML file.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        /// Output directory; overrides `output.dir` in the config.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        threads: Option<usize>,
    },
    /// Print the parameter cascade in log10 form.
    Cascade {
        #[arg(long)]
        d: Rational,
        #[arg(long)]
        delta: Rational,
        #[arg(long = "max-degree")]
        max_degree: usize,
        #[arg(long)]
        r: usize,
        /// `name=value` replacing one derived parameter (d1, d2, d3, eps3, eps2, eps1, eps).
        #[arg(long = "override", value_name = "NAME=VALUE")]
        overrides: Vec<String>,
        /// Use the calibrated defaults for every parameter not overridden.
        #[arg(long)]
        practical: bool,
        #[arg(long)]
        json: bool,
    },
}

#[derive(Subcommand)]
enum Gen {
    /// Complete blow-up: every cluster edge becomes K_{N,N}.
    Blowup {
        #[arg(long, default_value = "triangle")]
        clusters: ClusterSpec,
        #[arg(long)]
        size: usize,
        #[arg(short, long)]
        out: PathBuf,
    },
    /// Random pairs with edge probability d and minimum degree ⌈δN⌉.
    Host {
        #[arg(long, default_value = "triangle")]
        clusters: ClusterSpec,
        #[arg(long)]
        size: usize,
        #[arg(long)]
        d: Rational,
        #[arg(long)]
        delta: Rational,
        /// Fraction of each class given degree exactly ⌈δN⌉.
        #[arg(long, default_value = "0")]
        low_degree_fraction: Rational,
        #[arg(long)]
        seed: u64,
        #[arg(short, long)]
        out: PathBuf,
    },
    /// Cycles, paths or a random bounded-degree pattern.
    Pattern {
        #[arg(long, value_enum)]
        kind: PatternKind,
        #[arg(long, default_value = "triangle")]
        clusters: ClusterSpec,
        #[arg(long)]
        size: usize,
        /// Cluster order visited by cycles and paths; `0,1,..,r-1` by default.
        #[arg(long, value_delimiter = ',')]
        sequence: Option<Vec<usize>>,
        #[arg(long, default_value_t = 2)]
        max_degree: usize,
        #[arg(long, default_value = "1")]
        fill_fraction: Rational,
        #[arg(long)]
        target_edges: Option<usize>,
        #[arg(long)]
        attempts: Option<usize>,
        #[arg(long)]
        pad: bool,
        /// Required for random patterns.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(short, long)]
        out: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum PatternKind {
    Cycles,
    Paths,
    Random,
}

#[derive(Clone, Copy, ValueEnum)]
enum RegMode {
    Exact,
    Sampled,
    Auto,
}

#[derive(Args)]
struct RegcheckArgs {
    #[arg(long)]
    host: PathBuf,
    #[arg(long)]
    eps: Rational,
    #[arg(long)]
    d: Rational,
    #[arg(long)]
    delta: Rational,
    /// `auto` is exhaustive up to 14 vertices per side and sampled beyond.
    #[arg(long, value_enum, default_value = "auto")]
    mode: RegMode,
    #[arg(long, default_value_t = 2000)]
    trials: u64,
    /// Required unless `--mode exact`.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct EmbedArgs {
    #[arg(long)]
    host: PathBuf,
    #[arg(long)]
    pattern: PathBuf,
    #[arg(long)]
    seed: u64,
    /// TOML file with embedder settings; flags below take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Run with the exact cascade instead of calibrated defaults.
    #[arg(long)]
    paper_exact: bool,
    #[arg(long = "override", value_name = "NAME=VALUE")]
    overrides: Vec<String>,
    #[arg(long)]
    max_degree: Option<usize>,
    /// Pad smaller pattern classes with isolated vertices.
    #[arg(long)]
    lenient: bool,
    #[arg(long)]
    exhaustive: bool,
    /// Fraction of steps re-checked from scratch.
    #[arg(long)]
    audit_rate: Option<f64>,
    /// Write the full JSON report here.
    #[arg(long)]
    report: Option<PathBuf>,
    /// Write `map x v` lines here on success.
    #[arg(long)]
    map: Option<PathBuf>,
}

fn parse_overrides(items: &[String]) -> Result<Overrides> {
    let mut o = Overrides::default();
    for item in items {
        let (name, value) = item.split_once('=').with_context(|| format!("expected NAME=VALUE, got {item:?}"))?;
        let value: Rational = value.parse()?;
        let slot = match name.trim() {
            "d1" => &mut o.d1,
            "d2" => &mut o.d2,
            "d3" => &mut o.d3,
            "eps3" => &mut o.eps3,
            "eps2" => &mut o.eps2,
            "eps1" => &mut o.eps1,
            "eps" => &mut o.eps,
            other => bail!("unknown parameter {other:?}"),
        };
        *slot = Some(value);
    }
    Ok(o)
}

fn write(path: &Path, text: String) -> Result<()> {
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn gen(cmd: Gen) -> Result<()> {
    match cmd {
        Gen::Blowup { clusters, size, out } => write(&out, write_host(&blowup(&clusters.build()?, size)?)),
        Gen::Host {
            clusters,
            size,
            d,
            delta,
            low_degree_fraction,
            seed,
            out,
        } => {
            let recipe = HostRecipe {
                size,
                d,
                delta,
                low_degree_fraction,
                seed,
            };
            let host = random_host(&clusters.build()?, &recipe)?;
            write(&out, write_host(&host))
        }
        Gen::Pattern {
            kind,
            clusters,
            size,
            sequence,
            max_degree,
            fill_fraction,
            target_edges,
            attempts,
            pad,
            seed,
            out,
        } => {
            let r = clusters.build()?;
            let sequence = sequence.unwrap_or_else(|| (0..r.order()).collect());
            let pattern = match kind {
                PatternKind::Cycles => pattern_cycles(&r, size, &sequence)?,
                PatternKind::Paths => pattern_paths(&r, size, &sequence)?,
                PatternKind::Random => {
                    let seed = seed.context("--seed is required for random patterns")?;
                    let vertices = fill_fraction.floor_times(size as u64) as usize * r.order();
                    let target = target_edges.unwrap_or(max_degree * vertices / 2);
                    pattern_random_bounded(
                        &r,
                        &RandomPatternRecipe {
                            size,
                            max_degree,
                            fill_fraction,
                            target_edges: target,
                            attempts: attempts.unwrap_or(20 * target.max(1)),
                            seed,
                            pad,
                        },
                    )?
                }
            };
            write(&out, write_pattern(&pattern))
        }
    }
}

fn regcheck(args: RegcheckArgs) -> Result<bool> {
    let host = read_host(&args.host)?;
    let seed = || args.seed.context("--seed is required for sampled regularity checks");
    let mode = match args.mode {
        RegMode::Exact => RegularityMode::Exact,
        RegMode::Sampled => RegularityMode::Sampled {
            trials: args.trials,
            seed: seed()?,
        },
        RegMode::Auto => RegularityMode::Auto {
            trials: args.trials,
            seed: seed()?,
        },
    };
    let mut all = true;
    let mut docs = Vec::new();
    for (i, j) in host.cluster_graph().edges() {
        let pair = host.pair(i, j).expect("cluster edge");
        let v = check_super_regular(pair, &args.eps, &args.d, &args.delta, mode)?;
        all &= v.passes();
        if args.json {
            docs.push(serde_json::json!({ "pair": [i, j], "verdict": v }));
        } else {
            println!(
                "pair {i}-{j}: density {:.4} (>= d: {}), min degree {}/{}, low-degree {}+{}, regularity {:?} after {} trials -> {}",
                v.density.to_f64(),
                v.density_ok,
                v.min_deg_a,
                v.min_deg_b,
                v.low_degree_a.len(),
                v.low_degree_b.len(),
                v.regularity.status,
                v.regularity.trials,
                if v.passes() { "pass" } else { "FAIL" },
            );
        }
    }
    if args.json {
        println!("{}", serde_json::to_string_pretty(&docs)?);
    }
    Ok(all)
}

fn embed_cmd(args: EmbedArgs) -> Result<bool> {
    let mut cfg: EmbedConfig = match &args.config {
        Some(path) => toml::from_str(&fs::read_to_string(path)?).with_context(|| format!("parsing {}", path.display()))?,
        None => EmbedConfig::default(),
    };
    cfg.seed = args.seed;
    if args.paper_exact {
        cfg.mode = ParamMode::PaperExact;
    }
    cfg.overrides = parse_overrides(&args.overrides)?.or(&cfg.overrides);
    if args.max_degree.is_some() {
        cfg.max_degree = args.max_degree;
    }
    if args.lenient {
        cfg.balance = Balance::Lenient;
    }
    cfg.exhaustive_selection |= args.exhaustive;
    if let Some(rate) = args.audit_rate {
        cfg.audit_rate = rate;
    }
    let host = read_host(&args.host)?;
    let pattern = read_pattern(&args.pattern, &host, cfg.max_degree)?;
    let report = embed(&pattern, &host, &cfg)?;
    let d = &report.diagnostics;
    println!("outcome: {}", report.outcome.as_str());
    println!("verified: {}", report.verified());
    println!("cascade: {:?}, d = {}, delta = {}, max degree = {}", report.cascade.mode, report.cascade.d, report.cascade.delta, report.cascade.max_degree);
    println!("buffers per cluster: {:?}, T0 = {}, T1 = {}", d.buffer_sizes, d.t0, d.t1);
    println!("low-degree hosts: {:?}, buffer-missed hosts: {:?}", d.e1_sizes, d.e2_sizes);
    println!("greedy steps: {} regular, {} exceptional; bad pairs {}", d.case1_steps, d.case2_steps, d.bad_pairs);
    if let Some(s) = &d.stuck {
        println!("stuck: {}", s.message);
    }
    if let Some(v) = &d.violator {
        println!("hall violator in cluster {}: {} vertices, {} hosts", v.cluster, v.vertices.len(), v.neighborhood.len());
    }
    for note in d.notes.iter().take(5) {
        println!("note: {note}");
    }
    if let Some(path) = &args.report {
        write(path, serde_json::to_string_pretty(&report)?)?;
    }
    if let (Some(path), Some(phi)) = (&args.map, &report.phi) {
        let map: Vec<(usize, usize)> = phi.iter().copied().enumerate().collect();
        write(path, write_map(&map))?;
    }
    Ok(report.verified())
}

fn sweep(config: &Path, out: Option<PathBuf>, threads: Option<usize>) -> Result<()> {
    let text = fs::read_to_string(config).with_context(|| format!("reading {}", config.display()))?;
    let mut cfg = ExperimentConfig::from_toml(&text)?;
    if out.is_some() {
        cfg.output.dir = out;
    }
    if threads.is_some() {
        cfg.threads = threads;
    }
    let base = config.parent().unwrap_or(Path::new("."));
    let dir = base.join(cfg.output.dir.clone().unwrap_or_else(|| PathBuf::from("results")));
    cfg.output.dir = Some(dir.clone());
    let results = run_experiment(&cfg, Path::new(""))?;
    results.write(&dir, &cfg.output)?;
    for s in results.summary() {
        println!(
            "point {} (N={}, d={}, delta={}, max degree {}, {}): {}/{} verified",
            s.point,
            s.n,
            s.host_d,
            s.host_delta,
            s.max_degree,
            if s.overrides.is_empty() { "default overrides" } else { &s.overrides },
            s.verified,
            s.runs
        );
    }
    println!("results written to {}", dir.display());
    Ok(())
}

fn cascade(d: Rational, delta: Rational, max_degree: usize, r: usize, overrides: &[String], practical: bool, json: bool) -> Result<()> {
    let mut o = parse_overrides(overrides)?;
    if practical {
        o = o.or(&Overrides::practical_defaults());
    }
    let c = compute_cascade(&d, &delta, max_degree, r, &o)?;
    if json {
        println!("{}", serde_json::to_string_pretty(&c)?);
        return Ok(());
    }
    println!("log10 base = {:.6}  (base = δ·d^Δ / (8·r·Δ))", c.log10_base);
    println!("{:<6} {:>22} {:>18}", "param", "log10 (exact)", "log10 (used)");
    for (name, exact, used) in c.table() {
        println!("{name:<6} {exact:>22.9} {used:>18.6}");
    }
    println!("mode: {:?}; nominal ordering holds: {}", c.mode, c.ordering_holds());
    Ok(())
}

fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Gen(g) => gen(g).map(|_| true),
        Command::Regcheck(a) => regcheck(a),
        Command::Embed(a) => embed_cmd(a),
        Command::Verify { pattern, host, map } => {
            let report = verify_file(&pattern, &host, &map)?;
            for line in report.describe() {
                println!("{line}");
            }
            println!("{}", if report.passed() { "valid embedding" } else { "INVALID embedding" });
            Ok(report.passed())
        }
        Command::Sweep { config, out, threads } => sweep(&config, out, threads).map(|_| true),
        Command::Cascade {
            d,
            delta,
            max_degree,
            r,
            overrides,
            practical,
            json,
        } => cascade(d, delta, max_degree, r, &overrides, practical, json).map(|_| true),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
