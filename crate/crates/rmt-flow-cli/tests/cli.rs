use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn rmt(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rmt-flow")).args(args).env_remove("RMT_FLOW_THREADS").output().expect("binary runs")
}

fn table(path: &Path) -> Vec<Vec<f64>> {
    let text = std::fs::read_to_string(path).unwrap();
    text.lines().skip(1).map(|l| l.split(',').map(|v| v.parse().unwrap()).collect()).collect()
}

#[test]
fn simulate_is_deterministic_across_threads() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.jsonl");
    let b = dir.path().join("b.jsonl");
    let base = ["simulate", "--kind", "gue", "--n", "3", "--t", "1", "--samples", "1000", "--seed", "7"];
    let run = |out: &Path, threads: &str| {
        let mut args = base.to_vec();
        args.extend(["--threads", threads, "--output", out.to_str().unwrap()]);
        assert!(rmt(&args).status.success());
    };
    run(&a, "1");
    run(&b, "3");
    let (ta, tb) = (std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    assert_eq!(ta, tb);
    let lines: Vec<Value> = String::from_utf8(ta).unwrap().lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(lines.len(), 1000);
    assert_eq!(lines[3]["sample"], 3);
    assert_eq!(lines[0]["seed"], 7);
    assert_eq!(lines[0]["eigenvalues"][0].as_array().unwrap().len(), 3);
}

#[test]
fn interpolating_chiral_ends_real() {
    let out = rmt(&["simulate", "--kind", "interp-lw", "--nu", "1", "--bigT", "1", "--samples", "100", "--output", "/dev/null"]);
    assert!(out.status.success());
    let summary: Value = serde_json::from_slice(out.stderr.trim_ascii()).unwrap();
    assert_eq!(summary["records"], 100);
    assert!(summary["terminal_imag_max"].as_f64().unwrap() < 1e-12);
}

#[test]
fn csv_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("p.csv");
    let json = dir.path().join("p.jsonl");
    let base = ["simulate", "--kind", "dyson", "--n", "2", "--samples", "4", "--steps", "5", "--seed", "3"];
    for (p, f) in [(&csv, "csv"), (&json, "json")] {
        let mut args = base.to_vec();
        args.extend(["--format", f, "--output", p.to_str().unwrap()]);
        assert!(rmt(&args).status.success());
    }
    let text = std::fs::read_to_string(&csv).unwrap();
    let rows: Vec<Vec<&str>> = text.lines().skip(1).map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 4 * 6);
    let recs: Vec<Value> = std::fs::read_to_string(&json).unwrap().lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    for r in &rows {
        let (sample, step): (usize, usize) = (r[1].parse().unwrap(), r[3].parse().unwrap());
        for k in 0..2 {
            let v: f64 = r[5 + k].parse().unwrap();
            assert_eq!(v, recs[sample]["eigenvalues"][step][k].as_f64().unwrap());
        }
    }
}

#[test]
fn selberg_report_gives_eight() {
    let out = rmt(&["verify", "selberg", "--n", "2", "--alpha", "1", "--gamma", "0.5"]);
    assert!(out.status.success());
    let report: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["pass"], true);
    assert!((report["details"][0]["closed_form"].as_f64().unwrap() - 8.0).abs() < 1e-12);
    assert!((report["details"][0]["quadrature"].as_f64().unwrap() - 8.0).abs() < 1e-6);
}

#[test]
fn hciz_report_has_zscores() {
    let out = rmt(&["verify", "hciz", "--kind", "A", "--n", "2", "--samples", "20000", "--tuples", "2"]);
    let report: Value = serde_json::from_slice(&out.stdout).unwrap();
    let details = report["details"].as_array().unwrap();
    assert_eq!(details.len(), 2);
    for d in details {
        assert_eq!(d["N"], 2);
        assert!(d["zscore"].is_number() && d["stderr"].as_f64().unwrap() > 0.0);
    }
    assert_eq!(out.status.success(), report["pass"].as_bool().unwrap());
}

#[test]
fn failing_report_sets_exit_code() {
    // The small-|x| ratio checks cannot reach their tolerance.
    let out = rmt(&["verify", "schur"]);
    let report: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["pass"], false);
    assert_eq!(out.status.code(), Some(1));
    let bad = rmt(&["verify", "equivalence", "--which", "nothing"]);
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn config_file_fills_unset_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    std::fs::write(&cfg, "seed = 11\n[simulate]\nkind = 'goe'\nn = 2\nsamples = 3\nsteps = 2\n").unwrap();
    let out = rmt(&["simulate", "--config", cfg.to_str().unwrap(), "--samples", "5"]);
    assert!(out.status.success());
    let lines: Vec<Value> = String::from_utf8(out.stdout).unwrap().lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(lines.len(), 5);
    assert_eq!(lines[0]["seed"], 11);
    assert_eq!(lines[0]["kind"], "goe");
}

#[test]
fn gue_density_table_integrates_to_one() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("gue.csv");
    let out = rmt(&["density", "--what", "ensemble", "--ensemble", "GUE", "--n", "1", "--t", "1", "--points", "601", "--output", p.to_str().unwrap()]);
    assert!(out.status.success());
    let rows = table(&p);
    let h = rows[1][0] - rows[0][0];
    let trap: f64 = rows.windows(2).map(|w| 0.5 * h * (w[0][1] + w[1][1])).sum();
    assert!((trap - 1.0).abs() < 1e-3, "{trap}");
}

#[test]
fn watermelon_table_is_time_symmetric() {
    let dir = tempfile::tempdir().unwrap();
    let mut tables = Vec::new();
    for t in ["0.3", "0.7"] {
        let p = dir.path().join(format!("w{t}.csv"));
        let args = ["density", "--what", "watermelon", "--family", "c", "--n", "2", "--big-t", "1", "--t", t, "--hi", "3", "--points", "25"];
        let mut args = args.to_vec();
        args.extend(["--output", p.to_str().unwrap()]);
        assert!(rmt(&args).status.success());
        tables.push(table(&p));
    }
    assert_eq!(tables[0].len(), 25 * 25);
    assert!(tables[0].iter().any(|r| r[2] > 0.0));
    for (a, b) in tables[0].iter().zip(&tables[1]) {
        assert!((a[2] - b[2]).abs() <= 1e-12 * a[2].abs().max(1e-300), "{a:?} {b:?}");
    }
}

#[test]
fn banana_final_table_uses_distinct_values() {
    let out = rmt(&["density", "--what", "banana", "--family", "a", "--n", "1", "--big-t", "1", "--t", "1", "--points", "5"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().next().unwrap(), "y1,density");
    assert_eq!(text.lines().count(), 6);
}
