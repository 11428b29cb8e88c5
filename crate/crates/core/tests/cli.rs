use std::collections::BTreeSet;
use std::path::Path;
use std::process::{Command, Output};

use walklab::dist::IntegerDistribution;

fn walklab(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_walklab"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn files(dir: &Path) -> BTreeSet<String> {
    std::fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().file_name().to_string_lossy().into_owned())
        .collect()
}

#[test]
fn exit_code_matrix() {
    let dir = tempfile::tempdir().unwrap();
    let cases: &[(&[&str], i32)] = &[
        (&["--help"], 0),
        (&["main-bound", "--help"], 0),
        (&["dist", "--graph", "sticky:0.5,0.5,0.5", "--t", "2"], 0),
        (&["sigma2", "--graph", "sticky:0.01,0.5,0.5"], 0),
        (&["axioms", "--p", "0.5,0.5", "--sigma2", "0.2525", "--t", "8,32,128"], 0),
        (&["smooth", "--graph", "sticky:0.01,0.5,0.5", "--t", "16"], 0),
        (&["difftail", "--graph", "permmix:0.01,16,shift", "--t", "32"], 0),
        (&["difftail", "--graph", "permmix:0.01,16,shift", "--t", "32", "--independent"], 0),
        (&["main-bound", "--graph", "permmix:0.01,16,3", "--t", "16,64"], 0),
        (&["oracle-check", "--graph", "complete:4", "--seed", "1", "--samples", "5000"], 0),
        // Lax series tolerance leaves sigma^2 too far off for the convergence bound.
        (&["sigma2", "--graph", "sticky:0.9,0.5,0.5", "--tol", "0.5", "--t", "4096"], 2),
        (&["frobnicate"], 1),
        (&["dist", "--graph", "sticky:0.5,0.5", "--t", "2"], 1),
        (&["dist", "--graph", "complete:4"], 1),
        (&["dist", "--graph", "complete:4", "--t", "5000"], 1),
        (&["dist", "--graph", "complete:4", "--t", "5000", "--max-t", "5000"], 0),
        (&["dist", "--graph", "complete:4", "--t", "8", "--max-n", "3"], 1),
        (&["axioms", "--sigma2", "0.9"], 1),
        (&["oracle-check", "--graph", "complete:4"], 1),
        (&["sigma2", "--graph", "file:missing.json"], 1),
        (&["--config", "missing.toml", "sigma2", "--graph", "complete:4"], 1),
    ];
    for (args, expected) in cases {
        let out = walklab(dir.path(), args);
        assert_eq!(out.status.code(), Some(*expected), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    }
    let unknown = walklab(dir.path(), &["frobnicate"]);
    assert!(String::from_utf8_lossy(&unknown.stderr).contains("Usage"));
    assert!(files(dir.path()).is_empty(), "stray files: {:?}", files(dir.path()));
}

#[test]
fn dist_example() {
    let dir = tempfile::tempdir().unwrap();
    let out = walklab(dir.path(), &["dist", "--graph", "sticky:0.5,0.5,0.5", "--t", "2", "--out", "d.csv"]);
    assert!(out.status.success());
    let law = IntegerDistribution::from_csv(&std::fs::read_to_string(dir.path().join("d.csv")).unwrap()).unwrap();
    assert_eq!(law.probs(), &[0.375, 0.25, 0.375]);
}

#[test]
fn declared_artifacts_exactly() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(
        dir.path().join("exp.toml"),
        "[instance]\ngraph = \"permmix:0.01,16,5\"\n[grids]\nt = [16, 32, 64]\n[output]\nout = \"rate.json\"\nplot = \"rate.svg\"\n",
    )
    .unwrap();
    let out = walklab(dir.path(), &["--config", "exp.toml", "rate"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let expected: BTreeSet<String> = ["exp.toml", "rate.json", "rate.svg"].iter().map(|s| s.to_string()).collect();
    assert_eq!(files(dir.path()), expected);
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("rate.json")).unwrap()).unwrap();
    assert!(report["fit"]["slope"].as_f64().unwrap() < 0.0);

    // A declared artifact the subcommand cannot write is an error, not a silent skip.
    let out = walklab(dir.path(), &["--config", "exp.toml", "sigma2"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(files(dir.path()), expected);
}

#[test]
fn flags_override_config() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("exp.toml"), "[instance]\ngraph = \"sticky:0.3,0.5,0.5\"\n").unwrap();
    let out = walklab(
        dir.path(),
        &["--config", "exp.toml", "sigma2", "--graph", "sticky:0,0.25,0.75", "--out", "s.json"],
    );
    assert!(out.status.success());
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("s.json")).unwrap()).unwrap();
    assert!((report["sigma2"].as_f64().unwrap() - 0.1875).abs() < 1e-12);
}
