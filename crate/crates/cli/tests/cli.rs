//! End-to-end tests of the binary: exit-code contract, report determinism,
//! envelope schema, and the shipped scenario files.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn folcc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_folcc"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn repo_file(relative: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../..")
        .join(relative)
}

#[test]
fn passing_scenario_exits_zero() {
    let out = folcc(&["scenario", "--name", "hyperbolic"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn failing_check_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.toml");
    std::fs::write(
        &path,
        r#"
name = "bad-candidate"
[presentation]
window = [1.0, 2.0]
[[presentation.generators]]
kind = "explicit"
name = "halving"
expr = "x/2"
[[checks]]
kind = "affine-connection"
candidate = "1"
"#,
    )
    .unwrap();
    let out = folcc(&["scenario", "--config", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["status"], "fail");
}

#[test]
fn configuration_errors_exit_two() {
    // Unknown scenario name.
    let out = folcc(&["scenario", "--name", "no-such-thing"]);
    assert_eq!(out.status.code(), Some(2));
    // Missing file.
    let out = folcc(&["scenario", "--config", "/nonexistent/path.toml"]);
    assert_eq!(out.status.code(), Some(2));
    // Malformed expression inside a config.
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("broken.toml");
    std::fs::write(
        &path,
        r#"
name = "broken"
[presentation]
[[presentation.generators]]
kind = "explicit"
name = "g"
expr = "x +* 1"
[[checks]]
kind = "affine-connection"
candidate = "0"
"#,
    )
    .unwrap();
    let out = folcc(&["scenario", "--config", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    // Bad flag usage on a subcommand.
    let out = folcc(&["rotation", "--iters", "10"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn reports_are_byte_identical_across_runs() {
    for args in [
        vec!["scenario", "--name", "conjugated-rotation", "--seed", "42"],
        vec!["scenario", "--name", "reeb", "--seed", "7"],
        vec!["identities", "--seed", "3"],
        vec![
            "gf-cohomology",
            "--flavor",
            "full",
            "--degree",
            "3",
            "--weight-min",
            "-2",
            "--weight-max",
            "6",
        ],
    ] {
        let first = folcc(&args);
        let second = folcc(&args);
        assert_eq!(first.stdout, second.stdout, "args: {args:?}");
        assert!(!first.stdout.is_empty());
    }
}

#[test]
fn envelope_carries_schema_and_settings() {
    let out = folcc(&["identities", "--seed", "11", "--jet-order", "6"]);
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["schema"], "folcc-report/1");
    assert_eq!(doc["command"], "identities");
    assert_eq!(doc["seed"], 11);
    assert_eq!(doc["jet_order"], 6);
    assert!(doc["payload"]["symbolic"]["all_hold"].as_bool().unwrap());
    assert_eq!(doc["payload"]["symbolic"]["gysin_chain_sign"], -1);
}

#[test]
fn shipped_scenario_files_match_the_registry() {
    let names = [
        "hyperbolic",
        "translation",
        "orbifold-z2",
        "resilient",
        "conjugated-rotation",
        "reeb",
    ];
    for name in names {
        let path = repo_file(&format!("scenarios/{name}.toml"));
        let from_file = folcc(&["scenario", "--config", path.to_str().unwrap()]);
        assert_eq!(
            from_file.status.code(),
            Some(0),
            "{name}: {}",
            String::from_utf8_lossy(&from_file.stderr)
        );
        let from_registry = folcc(&["scenario", "--name", name]);
        assert_eq!(
            from_file.stdout, from_registry.stdout,
            "scenario file {name}.toml diverges from the built-in"
        );
    }
}

#[test]
fn scenario_out_flag_writes_the_report() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.json");
    let out = folcc(&[
        "scenario",
        "--name",
        "translation",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let written = std::fs::read(&path).unwrap();
    assert_eq!(written, out.stdout);
}

#[test]
fn csv_tables_have_headers() {
    let out = folcc(&[
        "reeb-probe",
        "--profile",
        "exp(1/(1 - x^2)) - exp(1)",
        "--nmax",
        "12",
        "--csv",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "n,x0,ratio2,ratio3,ratio4,ln_fprime,ln_fprime_over_f"
    );
    assert!(lines.clone().count() >= 12);
    // Every data row has the header's arity.
    for line in lines {
        assert_eq!(line.split(',').count(), 7, "row: {line}");
    }
}

#[test]
fn gysin_of_the_named_top_form() {
    let out = folcc(&["gysin", "--form", "gvl"]);
    assert_eq!(out.status.code(), Some(0));
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let push = &doc["payload"]["pushforward"];
    assert_eq!(push["terms"][0]["differentials"], serde_json::json!([0, 2]));
    assert_eq!(push["terms"][0]["coefficient"], "-1");
    // A form without the fiber direction integrates to zero.
    let out = folcc(&["gysin", "--form", "cl1"]);
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(doc["payload"]["pushforward"]["is_zero"].as_bool().unwrap());
}

#[test]
fn rotation_subcommand_recovers_a_rigid_rotation() {
    let out = folcc(&[
        "rotation",
        "--map",
        "x + 0.25",
        "--iters",
        "1000",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let reduced = doc["payload"]["reduced"].as_f64().unwrap();
    assert!((reduced - 0.25).abs() < 1e-12);
}

#[test]
fn list_scenarios_names_every_builtin() {
    let out = folcc(&["list-scenarios"]);
    assert_eq!(out.status.code(), Some(0));
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let names: Vec<&str> = doc["payload"]["scenarios"]
        .as_array()
        .unwrap()
        .iter()
        .map(|s| s["name"].as_str().unwrap())
        .collect();
    for expected in [
        "hyperbolic",
        "translation",
        "orbifold-z2",
        "resilient",
        "conjugated-rotation",
        "reeb",
    ] {
        assert!(names.contains(&expected), "missing {expected}");
    }
}

#[test]
fn connection_verify_reads_a_config() {
    let path = repo_file("scenarios/conjugated-rotation.toml");
    let out = folcc(&[
        "connection",
        "verify",
        "--config",
        path.to_str().unwrap(),
        "--kind",
        "affine",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["command"], "connection-verify");
    assert_eq!(doc["status"], "pass");
}

#[test]
fn diophantine_flags_fast_approximation() {
    let out = folcc(&["diophantine", "--alpha", "0.110001", "--cap", "1000000"]);
    assert_eq!(out.status.code(), Some(0));
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(doc["payload"]["liouville_suspect"].as_bool().unwrap());
    let out = folcc(&["diophantine", "--alpha", "(sqrt(5)-1)/2", "--cap", "1000000"]);
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(!doc["payload"]["liouville_suspect"].as_bool().unwrap());
}
