use std::fs;
use std::path::Path;
use std::process::Command;

use blowup_cli::experiment::{HostSpec, InstanceSpec, OutputSpec, PatternSpec, SeedSpec};
use blowup_cli::{run_experiment, verify_file, ExperimentConfig};

const TINY: &str = r#"
clusters = "triangle"
seeds = [3]

[instance]
kind = "generated"
size = 30

[instance.host]
kind = "blowup"

[instance.pattern]
kind = "cycles"
"#;

fn tiny() -> ExperimentConfig {
    ExperimentConfig::from_toml(TINY).unwrap()
}

fn blowup_bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_blowup"))
}

#[test]
fn single_trivial_run_gives_one_success_row() {
    let results = run_experiment(&tiny(), Path::new("")).unwrap();
    let rows: Vec<_> = results.rows().collect();
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0].outcome, "success");
    assert!(rows[0].verified);
    assert_eq!((rows[0].n, rows[0].seed), (30, 3));
    assert_eq!(results.summary()[0].success_rate, "1.0000");
}

#[test]
fn thread_count_does_not_change_rows() {
    let mut cfg = tiny();
    cfg.seeds = SeedSpec::Range { start: 0, count: 6 };
    cfg.instance = InstanceSpec::Generated {
        size: 40,
        host: HostSpec::Random {
            d: "0.7".parse().unwrap(),
            delta: "0.5".parse().unwrap(),
            low_degree_fraction: "0".parse().unwrap(),
        },
        pattern: PatternSpec::Random {
            max_degree: 2,
            fill_fraction: "0.9".parse().unwrap(),
            target_edges: None,
            attempts: None,
            pad: true,
        },
    };
    cfg.sweep.size = vec![30, 40];
    cfg.threads = Some(1);
    let sequential = run_experiment(&cfg, Path::new("")).unwrap();
    cfg.threads = Some(4);
    let parallel = run_experiment(&cfg, Path::new("")).unwrap();
    let a: Vec<_> = sequential.rows().cloned().collect();
    let b: Vec<_> = parallel.rows().cloned().collect();
    assert_eq!(a.len(), 12);
    assert_eq!(a, b);
    assert_eq!(sequential.summary(), parallel.summary());
}

#[test]
fn sweep_points_are_the_cartesian_product() {
    let mut cfg = tiny();
    cfg.sweep.size = vec![10, 20];
    cfg.sweep.max_degree = vec![2, 3, 4];
    cfg.sweep.overrides = vec![Default::default(), toml::from_str("eps1 = 0.5").unwrap()];
    let points = cfg.points().unwrap();
    assert_eq!(points.len(), 12);
    assert_eq!(points[11].size, Some(20));
    assert_eq!(points[11].max_degree, Some(4));
    let embed = points[1].embed_config(&cfg.embed, 9);
    assert_eq!(embed.seed, 9);
    assert_eq!(embed.overrides.eps1, Some("1/2".parse().unwrap()));
}

#[test]
fn invalid_configs_are_rejected() {
    let mut cfg = tiny();
    cfg.seeds = SeedSpec::List(vec![1, 2, 1]);
    assert!(run_experiment(&cfg, Path::new("")).is_err());
    cfg.seeds = SeedSpec::List(vec![]);
    assert!(run_experiment(&cfg, Path::new("")).is_err());
    assert!(ExperimentConfig::from_toml(&TINY.replace("seeds = [3]", "seeds = [3]\nbogus = 1")).is_err());
    assert!(ExperimentConfig::from_toml(&TINY.replace("\"triangle\"", "\"star:3\"")).is_err());
}

#[test]
fn per_run_failures_become_rows() {
    let mut cfg = tiny();
    cfg.seeds = SeedSpec::List(vec![1, 2]);
    cfg.instance = InstanceSpec::Files {
        host: "missing.host".into(),
        pattern: "missing.pattern".into(),
        max_degree: None,
    };
    let results = run_experiment(&cfg, Path::new("/nonexistent")).unwrap();
    let rows: Vec<_> = results.rows().collect();
    assert_eq!(rows.len(), 2);
    assert!(rows.iter().all(|r| r.outcome == "error" && r.error.contains("missing.host")));
    assert_eq!(results.summary()[0].errors, 2);
}

#[test]
fn written_artifacts_re_verify() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = tiny();
    cfg.seeds = SeedSpec::List(vec![1, 2]);
    cfg.output = OutputSpec {
        dir: Some("out".into()),
        run_json: true,
        artifacts: true,
    };
    let results = run_experiment(&cfg, dir.path()).unwrap();
    let out = dir.path().join("out");
    results.write(&out, &cfg.output).unwrap();
    let runs = out.join("runs");
    for seed in [1, 2] {
        let stem = format!("p000_s{seed}");
        let file = |ext: &str| runs.join(format!("{stem}.{ext}"));
        let report = verify_file(&file("pattern"), &file("host"), &file("map")).unwrap();
        assert!(report.passed());
        let json: serde_json::Value = serde_json::from_str(&fs::read_to_string(file("json")).unwrap()).unwrap();
        assert_eq!(json["row"]["seed"], seed);
        assert_eq!(json["report"]["outcome"], "success");
    }
    let csv = fs::read_to_string(out.join("results.csv")).unwrap();
    assert!(csv.starts_with("point,n,host_d,host_delta,max_degree,overrides,seed,outcome,verified,"));
    assert_eq!(csv.lines().count(), 3);
    assert!(!csv.contains("_ms"));
    assert!(fs::read_to_string(out.join("timings.csv")).unwrap().contains("phase1_ms"));
}

#[test]
fn shipped_configs_parse() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    let mut count = 0;
    for entry in fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        let cfg = ExperimentConfig::from_toml(&fs::read_to_string(&path).unwrap()).unwrap();
        assert!(!cfg.points().unwrap().is_empty(), "{}", path.display());
        count += 1;
    }
    assert!(count >= 2);
}

#[test]
fn cli_round_trip_and_bad_maps() {
    let dir = tempfile::tempdir().unwrap();
    let p = |f: &str| dir.path().join(f);
    let run = |args: &[&str]| blowup_bin().args(args).output().unwrap();
    let s = |path: &Path| path.to_str().unwrap().to_string();

    let out = run(&["gen", "blowup", "--size", "20", "-o", &s(&p("h.txt"))]);
    assert!(out.status.success());
    let out = run(&["gen", "pattern", "--kind", "cycles", "--size", "20", "-o", &s(&p("p.txt"))]);
    assert!(out.status.success());
    let out = run(&[
        "embed", "--host", &s(&p("h.txt")), "--pattern", &s(&p("p.txt")), "--seed", "4", "--map", &s(&p("m.txt")),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stdout));
    let verify = |map: &str| run(&["verify", "--pattern", &s(&p("p.txt")), "--host", &s(&p("h.txt")), "--map", &s(&p(map))]);
    assert_eq!(verify("m.txt").status.code(), Some(0));

    let text = fs::read_to_string(p("m.txt")).unwrap();
    let images: Vec<&str> = text.lines().map(|l| l.rsplit(' ').next().unwrap()).collect();
    // Vertex 3 lies in the same cluster as vertex 0; give both the same image.
    let dup = text.replacen(&format!("map 3 {}\n", images[3]), &format!("map 3 {}\n", images[0]), 1);
    fs::write(p("dup.txt"), dup).unwrap();
    let out = verify("dup.txt");
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stdout).contains("injectivity"));

    let wrong = text.replacen(&format!("map 0 {}\n", images[0]), "map 0 59\n", 1);
    fs::write(p("wrong.txt"), wrong).unwrap();
    let out = verify("wrong.txt");
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stdout).contains("cluster"));

    fs::write(p("broken.txt"), "map 0\n").unwrap();
    assert_eq!(verify("broken.txt").status.code(), Some(2));
}

#[test]
fn randomized_commands_require_a_seed() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("h.txt");
    let status = blowup_bin()
        .args(["gen", "host", "--size", "10", "--d", "0.5", "--delta", "0.3", "-o"])
        .arg(&out)
        .output()
        .unwrap();
    assert_eq!(status.status.code(), Some(2));
    let status = blowup_bin()
        .args(["gen", "pattern", "--kind", "random", "--size", "10", "-o"])
        .arg(&out)
        .output()
        .unwrap();
    assert_eq!(status.status.code(), Some(2));
}

#[test]
fn cascade_command_prints_the_table() {
    let out = blowup_bin()
        .args(["cascade", "--d", "0.5", "--delta", "0.5", "--max-degree", "3", "--r", "4"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("-1045.136318"), "{text}");
}
