use std::fs;
use std::path::Path;

use clap::Parser;

use super::{run, Cli};

const BASE: &str = r#"seed = 4

[domain]
kind = "disk"
center = [0.0, 0.0]
radius = 1.0

[exponent]
kind = "constant"
p = 3.0

[boundary]
kind = "affine"
gradient = [1.0, -0.5]
"#;

fn tugwar(args: &[&str]) -> (i32, String) {
    let cli = Cli::try_parse_from(std::iter::once("tugwar").chain(args.iter().copied())).unwrap();
    match run(&cli.command) {
        Ok(()) => (0, String::new()),
        Err(e) => (e.exit_code(), e.to_string()),
    }
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, text).unwrap();
    path.display().to_string()
}

#[test]
fn solve_writes_field_report_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "run.toml", &format!("{BASE}\n[solver]\neps = 0.25\n"));
    let out = dir.path().join("out");
    let (code, err) = tugwar(&["solve", "--config", &cfg, "--out", out.to_str().unwrap()]);
    assert_eq!(code, 0, "{err}");
    let field = fs::read_to_string(out.join("field.csv")).unwrap();
    assert!(field.starts_with("node,x,y,region,lower,upper"));
    let report: serde_json::Value = serde_json::from_str(&fs::read_to_string(out.join("report.json")).unwrap()).unwrap();
    assert_eq!(report["report"]["converged"], true);
    let manifest: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["seed"], 4);
    assert_eq!(manifest["subcommand"], "solve");
}

#[test]
fn simulate_is_reproducible_and_seed_override_changes_runs() {
    let dir = tempfile::tempdir().unwrap();
    let text = format!(
        "{BASE}\n[solver]\neps = 0.25\n\n[simulate]\nstarts = [[0.1, 0.2]]\nruns = 300\nplayer_one = {{ kind = \"pull\", target = [1.0, 0.0] }}\nplayer_two = {{ kind = \"random\", salt = 9 }}\ntrajectories = 2\n"
    );
    let cfg = write(dir.path(), "run.toml", &text);
    let mut csvs = Vec::new();
    for (name, seed) in [("a", None), ("b", None), ("c", Some("99"))] {
        let out = dir.path().join(name);
        let mut args = vec!["simulate", "--config", &cfg, "--out", out.to_str().unwrap()];
        if let Some(s) = seed {
            args.extend(["--seed", s]);
        }
        let (code, err) = tugwar(&args);
        assert_eq!(code, 0, "{err}");
        assert!(out.join("trajectories.csv").exists());
        csvs.push(fs::read(out.join("runs.csv")).unwrap());
    }
    assert_eq!(csvs[0], csvs[1]);
    assert_ne!(csvs[0], csvs[2]);
    let manifest: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("a/manifest.json")).unwrap()).unwrap();
    assert!(manifest["details"]["mean_tau"][0].as_f64().unwrap() > 0.0);
}

#[test]
fn invalid_exponent_is_reported_with_its_line() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "bad.toml", &BASE.replace("p = 3.0", "p = 1.0"));
    let (code, err) = tugwar(&["solve", "--config", &cfg, "--out", dir.path().to_str().unwrap()]);
    assert_eq!(code, 2);
    assert!(err.contains("bad.toml:10:"), "{err}");

    let text = format!("{BASE}\n[solver]\nepsilon = 0.1\n");
    let line = text.lines().position(|l| l.starts_with("epsilon")).unwrap() + 1;
    let cfg = write(dir.path(), "typo.toml", &text);
    let (code, err) = tugwar(&["solve", "--config", &cfg]);
    assert_eq!(code, 2);
    assert!(err.contains(&format!("typo.toml:{line}:")), "{err}");
}

#[test]
fn strict_flags_non_convergence() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "run.toml", &format!("{BASE}\n[solver]\neps = 0.25\nmax_iters = 3\n"));
    let out = dir.path().join("out");
    let out = out.to_str().unwrap();
    assert_eq!(tugwar(&["solve", "--config", &cfg, "--out", out]).0, 0);
    let (code, err) = tugwar(&["solve", "--config", &cfg, "--out", out, "--strict"]);
    assert_eq!(code, 3, "{err}");
}

#[test]
fn converge_and_analyze_write_metrics() {
    let dir = tempfile::tempdir().unwrap();
    let text = format!(
        "{BASE}\n[converge]\neps_list = [0.4, 0.25]\nreference = {{ kind = \"affine\", gradient = [1.0, -0.5] }}\n\n[analyze.taylor]\nfunction = \"squared_distance\"\npoint = [0.1, 0.2]\ndirection = [1.0, 1.0]\neps_list = [0.1, 0.05]\n"
    );
    let cfg = write(dir.path(), "run.toml", &text);
    let out = dir.path().join("c");
    assert_eq!(tugwar(&["converge", "--config", &cfg, "--out", out.to_str().unwrap()]).0, 0);
    let table = fs::read_to_string(out.join("convergence.csv")).unwrap();
    assert_eq!(table.lines().count(), 3);
    assert!(!table.contains("wall_time"));
    let out = dir.path().join("a");
    assert_eq!(tugwar(&["analyze", "--config", &cfg, "--out", out.to_str().unwrap()]).0, 0);
    let metrics = fs::read_to_string(out.join("metrics.csv")).unwrap();
    assert!(metrics.starts_with("eps,metric,value"));
    assert_eq!(metrics.matches("taylor_r2").count(), 2);
}
