use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use cachesim::PopularityModel;

fn cachesim(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cachesim"))
        .args(args)
        .current_dir(dir)
        .env_remove("CACHESIM_SEED")
        .output()
        .expect("binary runs")
}

fn read(path: impl AsRef<Path>) -> Vec<u8> {
    fs::read(path).expect("output file exists")
}

#[test]
fn preset_is_byte_identical_across_runs_and_jobs() {
    let dir = tempfile::tempdir().unwrap();
    for (out, jobs) in [("a", "1"), ("b", "1"), ("c", "3")] {
        let o = cachesim(
            &[
                "preset", "fig6", "--seed", "7", "--trials", "20", "--out", out, "--jobs", jobs,
            ],
            dir.path(),
        );
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    }
    for file in ["fig6.csv", "fig6_summary.csv", "fig6_config.json"] {
        let a = read(dir.path().join("a").join(file));
        assert_eq!(a, read(dir.path().join("b").join(file)), "{file}");
        assert_eq!(a, read(dir.path().join("c").join(file)), "{file}");
    }
    let csv = String::from_utf8(read(dir.path().join("a/fig6.csv"))).unwrap();
    assert_eq!(
        csv.lines().next().unwrap(),
        "preset,policy,m,n,beta,rho,M,m1,k,delta,trial,seed,matched,unserved,rate"
    );
    assert_eq!(csv.lines().count(), 1 + 16 * 20);
}

#[test]
fn echoed_config_reproduces_output() {
    let dir = tempfile::tempdir().unwrap();
    let o = cachesim(
        &[
            "preset", "fig4", "--trials", "5", "--seed", "99", "--out", "first",
        ],
        dir.path(),
    );
    assert!(o.status.success());
    let o = cachesim(
        &[
            "sweep",
            "--config",
            "first/fig4_config.json",
            "--out",
            "second",
        ],
        dir.path(),
    );
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    for file in ["fig4.csv", "fig4_summary.csv", "fig4_config.json"] {
        assert_eq!(
            read(dir.path().join("first").join(file)),
            read(dir.path().join("second").join(file)),
            "{file}"
        );
    }
}

#[test]
fn seed_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let run = |out: &str, seed: Option<&str>, env: Option<&str>| {
        let mut args = vec!["preset", "fig4", "--trials", "3", "--out", out];
        if let Some(s) = seed {
            args.extend(["--seed", s]);
        }
        let mut cmd = Command::new(env!("CARGO_BIN_EXE_cachesim"));
        cmd.args(&args)
            .current_dir(dir.path())
            .env_remove("CACHESIM_SEED");
        if let Some(e) = env {
            cmd.env("CACHESIM_SEED", e);
        }
        assert!(cmd.status().unwrap().success());
        read(dir.path().join(out).join("fig4.csv"))
    };
    let flag = run("flag", Some("5"), None);
    let env = run("env", None, Some("5"));
    let both = run("both", Some("5"), Some("6"));
    let other_env = run("other", None, Some("6"));
    assert_eq!(flag, env);
    assert_eq!(flag, both);
    assert_ne!(flag, other_env);

    let o = Command::new(env!("CARGO_BIN_EXE_cachesim"))
        .args(["preset", "fig4", "--trials", "1", "--out", "bad"])
        .current_dir(dir.path())
        .env("CACHESIM_SEED", "not-a-number")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn svg_is_valid_with_one_polyline_per_curve() {
    let dir = tempfile::tempdir().unwrap();
    let o = cachesim(
        &["preset", "fig5", "--trials", "3", "--plot", "--out", "."],
        dir.path(),
    );
    assert!(o.status.success());
    let text = String::from_utf8(read(dir.path().join("fig5.svg"))).unwrap();
    let doc = roxmltree::Document::parse(&text).expect("well-formed SVG");
    assert_eq!(doc.root_element().tag_name().name(), "svg");
    let polylines = doc
        .descendants()
        .filter(|n| n.has_tag_name("polyline"))
        .count();
    assert_eq!(polylines, 4);
}

fn write(dir: &Path, name: &str, text: &str) {
    fs::write(dir.join(name), text).unwrap();
}

#[test]
fn bounds_with_no_memory_is_total_hit_mass() {
    let dir = tempfile::tempdir().unwrap();
    write(
        dir.path(),
        "c.json",
        r#"{"m": 10, "n": 30, "M": 0, "rho": 0.9, "beta": 0.6}"#,
    );
    let o = cachesim(&["bounds", "--config", "c.json"], dir.path());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let json: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let model = PopularityModel::zipf(30, 0.6).unwrap();
    let expected: f64 = (0..30).map(|i| model.hit_probability(i, 9)).sum();
    let got = json["lower_bound"].as_f64().unwrap();
    assert!((got - expected).abs() < 1e-9, "{got} vs {expected}");
}

#[test]
fn bounds_reports_exponents_and_checks() {
    let dir = tempfile::tempdir().unwrap();
    write(
        dir.path(),
        "c.json",
        r#"{"m": 4, "n": 8, "M": 8, "rho": 0.75, "beta": 1.2, "capacities": [5, 1, 1, 1]}"#,
    );
    let o = cachesim(&["bounds", "--config", "c.json"], dir.path());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let json: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let exps = json["exponents"].as_array().unwrap();
    assert!(exps
        .iter()
        .any(|e| e["theorem"] == "ksmlp_upper" && e["regime"] == "M = n"));
    assert!(json["checks"]["top_caches_homogeneous"].is_boolean());
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    write(
        dir.path(),
        "flat.json",
        r#"{"name": "flat", "policy": "ksmlp", "beta": 0.8, "trials": 2,
            "sweep": {"axis": "k", "m": 10, "n": 20, "values": [2], "m1_divisors": [1]}}"#,
    );
    write(dir.path(), "broken.json", "{ not json");
    write(
        dir.path(),
        "unknown.json",
        r#"{"name": "x", "policy": "ppmm", "beta": 0.3, "colour": 1,
            "sweep": {"axis": "k", "m": 10, "n": 20, "values": [2], "m1_divisors": [1]}}"#,
    );
    write(
        dir.path(),
        "zero_trials.json",
        r#"{"name": "z", "policy": "ppmm", "beta": 0.3, "trials": 0,
            "sweep": {"axis": "k", "m": 10, "n": 20, "values": [2], "m1_divisors": [1]}}"#,
    );
    write(dir.path(), "not_a_dir", "");

    let code = |args: &[&str]| cachesim(args, dir.path()).status.code();
    assert_eq!(
        code(&["sweep", "--config", "flat.json", "--out", "o1"]),
        Some(3)
    );
    assert!(!dir.path().join("o1/flat.csv").exists());
    assert_eq!(code(&["sweep", "--config", "broken.json"]), Some(2));
    assert_eq!(code(&["sweep", "--config", "unknown.json"]), Some(2));
    assert_eq!(code(&["sweep", "--config", "zero_trials.json"]), Some(2));
    assert_eq!(code(&["sweep", "--config", "missing.json"]), Some(4));
    assert_eq!(
        code(&["preset", "fig4", "--trials", "1", "--out", "not_a_dir"]),
        Some(4)
    );
    assert_eq!(code(&["preset", "fig9"]), Some(2));
    assert_eq!(
        code(&["preset", "fig4", "--policy", "ksmlp", "--trials", "1", "--out", "o2"]),
        Some(3)
    );
    assert_eq!(code(&["--help"]), Some(0));
}

#[test]
fn simulate_needs_a_single_point() {
    let dir = tempfile::tempdir().unwrap();
    write(
        dir.path(),
        "one.json",
        r#"{"name": "one", "policy": "ppmm", "beta": 0.3, "trials": 4, "seed": 1,
            "sweep": {"axis": "profiles", "n": 12, "profiles": [{"capacities": [4, 4, 1, 1, 1, 1]}]}}"#,
    );
    let o = cachesim(
        &["simulate", "--config", "one.json", "--out", "."],
        dir.path(),
    );
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let summary = String::from_utf8(read(dir.path().join("one_summary.csv"))).unwrap();
    assert_eq!(summary.lines().count(), 2);
    assert!(summary
        .lines()
        .nth(1)
        .unwrap()
        .starts_with("one,ppmm,6,12,0.3,0.97,12,2,4,0.5,-1,1,"));

    let o = cachesim(
        &["preset", "fig4", "--trials", "1", "--out", "x"],
        dir.path(),
    );
    assert!(o.status.success());
    let o = cachesim(
        &["simulate", "--config", "x/fig4_config.json", "--out", "y"],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn verify_passes() {
    let dir = tempfile::tempdir().unwrap();
    let o = cachesim(&["verify", "--cases", "300"], dir.path());
    assert!(o.status.success());
    let text = String::from_utf8(o.stdout).unwrap();
    assert_eq!(text.lines().count(), 3);
    assert!(text.contains("failed   0"));
}
