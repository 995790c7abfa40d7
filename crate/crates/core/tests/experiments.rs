use std::collections::BTreeSet;
use std::path::PathBuf;
use std::process::Command;

use cvxlab::experiments::{claim_of, exp_planar_monotone, run_all, ClaimStatus, RunConfig, CLAIMS};

fn config_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../configs")
        .join(name)
}

fn smoke() -> RunConfig {
    RunConfig::read(&config_path("smoke.toml")).unwrap()
}

#[test]
fn shipped_configs_parse() {
    for name in ["default.toml", "smoke.toml"] {
        RunConfig::read(&config_path(name)).unwrap_or_else(|e| panic!("{name}: {e}"));
    }
}

#[test]
fn smoke_run_passes_and_covers_every_claim() {
    let dir = tempfile::tempdir().unwrap();
    let reports = run_all(&smoke(), dir.path()).unwrap();
    for rep in &reports {
        assert!(rep.error.is_none(), "{}: {:?}", rep.name, rep.error);
        let failed: Vec<_> = rep.checks.iter().filter(|(_, c)| !c.pass).collect();
        assert!(failed.is_empty(), "{}: {failed:?}", rep.name);
    }

    let mut rdr = csv::Reader::from_path(dir.path().join("summary.csv")).unwrap();
    let mut seen = BTreeSet::new();
    for row in rdr.records() {
        let row = row.unwrap();
        let (claim, check, status) = (&row[1], &row[2], &row[7]);
        assert_eq!(claim, claim_of(check));
        assert_ne!(status, "unregistered", "{check}");
        seen.insert(claim.to_string());
    }
    for (claim, _) in CLAIMS {
        assert!(seen.contains(*claim), "claim {claim} has no summary row");
    }
}

#[test]
fn slicing_chain_is_never_marked_verified() {
    let (_, status) = CLAIMS.iter().find(|(c, _)| *c == "slicing_chain").unwrap();
    assert_eq!(*status, ClaimStatus::IngredientsVerified);
    assert_eq!(status.label(), "ingredients-verified");
}

#[test]
fn report_json_has_the_documented_fields() {
    let rep = exp_planar_monotone(10, 4);
    let v: serde_json::Value = serde_json::from_str(&rep.to_json().unwrap()).unwrap();
    for key in [
        "name",
        "params",
        "scalars",
        "checks",
        "seed",
        "runtime_seconds",
    ] {
        assert!(v.get(key).is_some(), "missing {key}");
    }
    for (name, c) in v["checks"].as_object().unwrap() {
        for key in ["value", "threshold", "margin", "pass"] {
            assert!(c.get(key).is_some(), "{name} lacks {key}");
        }
    }
}

#[test]
fn failing_experiment_does_not_stop_the_run() {
    let cfg = RunConfig::parse(
        "seed = 3\n[slicing]\ndims = [9]\ntrials = 1\n[planar_monotone]\ntrials = 10\n",
    )
    .unwrap();
    let dir = tempfile::tempdir().unwrap();
    let reports = run_all(&cfg, dir.path()).unwrap();
    assert_eq!(reports.len(), 2);
    assert!(reports
        .iter()
        .any(|r| r.name == "slicing" && r.error.is_some()));
    assert!(reports
        .iter()
        .any(|r| r.name == "planar_monotone" && r.passed()));
    let summary = std::fs::read_to_string(dir.path().join("summary.csv")).unwrap();
    assert!(summary.contains("slicing_n9,-,completed"));
}

#[test]
fn cli_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_cvxlab");
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("pm.json");
    let ok = Command::new(bin)
        .args(["planar-monotone", "--trials", "10", "--seed", "2", "--out"])
        .arg(&out)
        .status()
        .unwrap();
    assert!(ok.success());
    let v: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(v["name"], "planar_monotone");
    assert_eq!(v["seed"], 2);

    // too few trials is recorded as an error and fails the run
    let bad = Command::new(bin)
        .args(["planar-monotone", "--trials", "3"])
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(1));

    let missing = Command::new(bin)
        .args(["run-all", "--config", "/nonexistent.toml", "--out"])
        .arg(dir.path())
        .output()
        .unwrap();
    assert_eq!(missing.status.code(), Some(2));
}
