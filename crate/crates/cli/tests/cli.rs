use std::path::Path;
use std::process::Command;

use gbo_cli::{run, EXIT_INVALID, EXIT_NUMERICAL, EXIT_OK, EXIT_USAGE};
use gbo_core::io::Report;

struct Run {
    code: i32,
    out: String,
    err: String,
}

fn gbo(args: &[&str]) -> Run {
    let mut argv = vec!["gbo"];
    argv.extend_from_slice(args);
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = run(argv, &mut out, &mut err);
    Run { code, out: String::from_utf8(out).unwrap(), err: String::from_utf8(err).unwrap() }
}

fn parsed(r: &Run) -> Report {
    Report::from_ndjson(&r.out).unwrap()
}

fn path(dir: &Path, name: &str) -> String {
    dir.join(name).to_str().unwrap().to_string()
}

#[test]
fn scaling_check_at_the_critical_index() {
    let r = gbo(&["scaling-check", "--k", "4", "--lambda", "2", "--s", "0.25"]);
    assert_eq!(r.code, EXIT_OK, "{}", r.err);
    let rep = parsed(&r);
    assert_eq!(rep.command, "scaling-check");
    assert_eq!(rep.rows.len(), 1);
    let ratio = rep.rows[0]["ratio"].as_f64().unwrap();
    assert!((ratio - 1.0).abs() < 1e-10);
}

#[test]
fn est0_ratios_are_one() {
    let r = gbo(&["verify", "--estimate", "est0", "--trials", "3", "--octaves", "1", "--n", "512"]);
    assert_eq!(r.code, EXIT_OK, "{}", r.err);
    let rep = parsed(&r);
    assert_eq!(rep.rows.len(), 6);
    for row in &rep.rows {
        assert!((row["ratio"].as_f64().unwrap() - 1.0).abs() < 1e-12);
    }
}

#[test]
fn large_picard_datum_does_not_contract() {
    let r = gbo(&["picard", "--k", "4", "--amp", "100", "--T", "0.5"]);
    assert_eq!(r.code, EXIT_NUMERICAL);
    let rep = parsed(&r);
    assert_eq!(rep.summary["status"], "non_contraction");
    assert!(!rep.rows.is_empty());
}

#[test]
fn small_picard_datum_contracts() {
    let r = gbo(&["picard", "--n", "256", "--T", "0.1", "--nodes", "41", "--amp", "0.5"]);
    assert_eq!(r.code, EXIT_OK, "{}", r.err);
    let rep = parsed(&r);
    assert_eq!(rep.summary["converged"], true);
    assert!(rep.summary["max_ratio"].as_f64().unwrap() < 0.5);
}

#[test]
fn simulate_writes_a_trajectory_that_norms_can_read() {
    let dir = tempfile::tempdir().unwrap();
    let traj = path(dir.path(), "u.gbt");
    let r = gbo(&["simulate", "--n", "256", "--T", "0.05", "--dt", "0.005", "--stride", "5", "--amp", "0.5", "--output", &traj]);
    assert_eq!(r.code, EXIT_OK, "{}", r.err);
    let rep = parsed(&r);
    assert_eq!(rep.rows.len(), 3);
    assert!(rep.summary["l2_drift"].as_f64().unwrap() < 1e-8);

    let r = gbo(&["norms", "--input", &traj, "--norm", "mixed_xt", "--norm", "X_space", "--p", "4", "--q", "inf"]);
    assert_eq!(r.code, EXIT_OK, "{}", r.err);
    let rep = parsed(&r);
    assert_eq!(rep.rows.len(), 2);
    assert!(rep.rows.iter().all(|row| row["value"].as_f64().unwrap() > 0.0));
}

#[test]
fn simulate_reports_blow_up() {
    let r = gbo(&["simulate", "--n", "256", "--amp", "20", "--T", "1", "--dt", "0.01"]);
    assert_eq!(r.code, EXIT_NUMERICAL);
    assert_eq!(parsed(&r).summary["status"], "blow_up");
}

#[test]
fn make_data_feeds_lp_energies() {
    let dir = tempfile::tempdir().unwrap();
    let data = path(dir.path(), "u0.gbf");
    let r = gbo(&["make-data", "--kind", "packets", "--seed", "3", "--output", &data]);
    assert_eq!(r.code, EXIT_OK, "{}", r.err);
    let r = gbo(&["lp-energies", "--input", &data, "--s", "0", "--format", "csv"]);
    assert_eq!(r.code, EXIT_OK, "{}", r.err);
    let mut lines = r.out.lines();
    let header = lines.next().unwrap();
    assert!(header.contains("energy") && header.contains('j'));
    assert_eq!(lines.count(), 10);
}

#[test]
fn make_data_needs_an_output() {
    let r = gbo(&["make-data"]);
    assert_eq!(r.code, EXIT_INVALID);
    assert!(r.err.contains("output"));
}

#[test]
fn gauge_and_paraproduct_checks() {
    let r = gbo(&["gauge-check"]);
    assert_eq!(r.code, EXIT_OK, "{}", r.err);
    let rep = parsed(&r);
    assert!(rep.summary["order"].as_f64().unwrap() >= 1.8);
    assert!(rep.summary["fine_residual"].as_f64().unwrap() <= 1e-6);

    let r = gbo(&["paraproduct-check", "--trials", "2", "--n", "512", "--k", "3"]);
    assert_eq!(r.code, EXIT_OK, "{}", r.err);
    let rep = parsed(&r);
    assert!(rep.summary["max_split_defect"].as_f64().unwrap() < 1e-10);
    assert!(rep.summary["max_telescoping_defect"].as_f64().unwrap() < 1e-10);
}

#[test]
fn usage_and_validation_errors() {
    assert_eq!(gbo(&["bogus"]).code, EXIT_USAGE);
    assert_eq!(gbo(&[]).code, EXIT_USAGE);
    assert_eq!(gbo(&["--help"]).code, EXIT_OK);
    assert_eq!(gbo(&["simulate", "--k", "2"]).code, EXIT_INVALID);
    assert_eq!(gbo(&["lp-energies", "--set", "colour=blue"]).code, EXIT_INVALID);
    assert_eq!(gbo(&["lp-energies", "--format", "xml"]).code, EXIT_INVALID);
    assert_eq!(gbo(&["verify", "--estimate", "est9"]).code, EXIT_INVALID);
    assert_eq!(gbo(&["scaling-check", "--lambda", "3"]).code, EXIT_INVALID);
    assert_eq!(gbo(&["lp-energies", "--input", "/nonexistent/u.gbf"]).code, EXIT_INVALID);
}

#[test]
fn config_file_and_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = path(dir.path(), "run.cfg");
    std::fs::write(&cfg, "# small run\nk=5\nn=256\ns=auto\n").unwrap();
    let r = gbo(&["lp-energies", "--config", &cfg, "--set", "seed=9", "--k", "6"]);
    assert_eq!(r.code, EXIT_OK, "{}", r.err);
    let rep = parsed(&r);
    assert_eq!(rep.config["k"], 6);
    assert_eq!(rep.config["seed"], 9);
    assert_eq!(rep.config["n"], 256);
    assert!((rep.config["s_resolved"].as_f64().unwrap() - (0.5 - 1.0 / 6.0)).abs() < 1e-15);

    std::fs::write(&cfg, r#"{"k": 3, "n": 128}"#).unwrap();
    let r = gbo(&["lp-energies", "--config", &cfg]);
    assert_eq!(r.code, EXIT_OK, "{}", r.err);
    assert_eq!(parsed(&r).config["k"], 3);
}

#[test]
fn reports_are_deterministic_across_runs_and_workers() {
    let dir = tempfile::tempdir().unwrap();
    let mut outputs = Vec::new();
    for workers in ["1", "1", "4"] {
        let rep = path(dir.path(), &format!("r{}.ndjson", outputs.len()));
        let r = gbo(&[
            "verify", "--estimate", "est2", "--trials", "3", "--octaves", "1", "--n", "512", "--workers", workers,
            "--report", &rep,
        ]);
        assert_eq!(r.code, EXIT_OK, "{}", r.err);
        outputs.push(std::fs::read(&rep).unwrap());
    }
    assert_eq!(outputs[0], outputs[1]);
    assert_eq!(outputs[0], outputs[2]);

    let a = gbo(&["paraproduct-check", "--trials", "2", "--n", "256", "--format", "csv"]);
    let b = gbo(&["paraproduct-check", "--trials", "2", "--n", "256", "--format", "csv"]);
    assert_eq!(a.out, b.out);
}

#[test]
fn binary_honours_worker_variable() {
    let exe = env!("CARGO_BIN_EXE_gbo");
    let run = |workers: &str| {
        let out = Command::new(exe)
            .args(["verify", "--estimate", "est1", "--trials", "2", "--octaves", "1", "--n", "512"])
            .env("GBO_WORKERS", workers)
            .output()
            .unwrap();
        assert_eq!(out.status.code(), Some(0));
        out.stdout
    };
    assert_eq!(run("1"), run("3"));
}
