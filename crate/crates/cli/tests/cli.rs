//! Scripted invocations of the binary: exit codes, artifacts and
//! determinism.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use spiralemb::verifier::VerificationReport;
use spiralemb_cli::output::to_json;

fn spiralemb(args: &[&str], threads: Option<&str>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_spiralemb"));
    cmd.args(args).env_remove("SPIRALEMB_THREADS");
    if let Some(t) = threads {
        cmd.env("SPIRALEMB_THREADS", t);
    }
    cmd.output().expect("binary runs")
}

fn code(args: &[&str]) -> i32 {
    spiralemb(args, None).status.code().unwrap()
}

fn path(dir: &Path, name: &str) -> String {
    dir.join(name).to_str().unwrap().to_owned()
}

#[test]
fn spiral_csv_has_header_and_one_row_per_sample() {
    let dir = tempfile::tempdir().unwrap();
    let out = path(dir.path(), "pts.csv");
    let args = [
        "spiral", "--A", "1", "--B", "1", "--lambda", "0.05", "--delta", "0", "--r", "0", "--grid", "20", "--out", &out,
    ];
    assert_eq!(code(&args), 0);
    let text = fs::read_to_string(&out).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("x,y,u,v"));
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 400);
    for field in rows[0].split(',') {
        let mantissa = field.trim_start_matches('-').split('e').next().unwrap();
        assert_eq!(mantissa.len(), 13, "{field}");
    }
}

#[test]
fn unknown_subcommand_and_flag_exit_two_with_usage() {
    let out = spiralemb(&["bogus"], None);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("Usage"));
    assert_eq!(code(&["plan", "--mode", "kh", "--lambda", "1"]), 2);
    assert_eq!(code(&["plan", "--mode", "sideways"]), 2);
}

#[test]
fn bad_thread_count_is_a_usage_error() {
    let out = spiralemb(&["plan", "--mode", "kh"], Some("zero"));
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn unwritable_path_exits_one() {
    assert_eq!(code(&["plan", "--mode", "family", "--out", "/nonexistent/dir/plan.json"]), 1);
    assert_eq!(code(&["figure", "--name", "spiral", "--out", "/nonexistent/dir/f.svg"]), 1);
}

#[test]
fn failing_verification_exits_one_and_still_writes_the_report() {
    let dir = tempfile::tempdir().unwrap();
    let out = path(dir.path(), "avoid.json");
    // Twice the avoidance radius: the corner of R2 lands inside it.
    let ds = spiralemb::double_spiral::DoubleSpiralConfig::with_default_m(1.0, 0.1).unwrap();
    let radius = format!("{}", 2.0 * ds.inner_radius());
    let args = [
        "verify", "--check", "avoids", "--map", "beta2", "--epsilon", "0.1", "--radius", &radius, "--grid", "100",
        "--out", &out,
    ];
    assert_eq!(code(&args), 1);
    let report: VerificationReport = serde_json::from_slice(&fs::read(&out).unwrap()).unwrap();
    assert!(!report.passed);
    assert!(report.violations > 0);
    assert_eq!(report.worst_violation.unwrap().location.len(), 2);
}

#[test]
fn passing_report_round_trips_byte_for_byte() {
    let dir = tempfile::tempdir().unwrap();
    let out = path(dir.path(), "sym.json");
    let args = ["verify", "--check", "symplectic", "--map", "spiral", "--grid", "50", "--random", "100", "--out", &out];
    assert_eq!(code(&args), 0);
    let bytes = fs::read(&out).unwrap();
    let report: VerificationReport = serde_json::from_slice(&bytes).unwrap();
    assert!(report.passed);
    assert_eq!(report.violations, 0);
    assert_eq!(report.rng.as_deref(), Some("ChaCha8"));
    assert_eq!(to_json(&report).unwrap(), bytes);
}

#[test]
fn reports_are_identical_across_runs_and_thread_counts() {
    let dir = tempfile::tempdir().unwrap();
    let mut outputs = Vec::new();
    for (k, threads) in [None, Some("1"), Some("3")].into_iter().enumerate() {
        let out = path(dir.path(), &format!("chain{k}.json"));
        let o = spiralemb(&["chain-verify", "--epsilon", "0.1", "--samples", "50000", "--out", &out], threads);
        assert_eq!(o.status.code(), Some(0));
        outputs.push(fs::read(&out).unwrap());
    }
    assert!(outputs.windows(2).all(|w| w[0] == w[1]));
}

#[test]
fn chain_report_fields() {
    let dir = tempfile::tempdir().unwrap();
    let out = path(dir.path(), "chain.json");
    assert_eq!(code(&["chain-verify", "--epsilon", "0.05", "--samples", "100000", "--out", &out]), 0);
    let v: serde_json::Value = serde_json::from_slice(&fs::read(&out).unwrap()).unwrap();
    for key in ["sup_norm", "bound", "c", "C"] {
        assert!(v[key].is_f64(), "{key}");
    }
    assert_eq!(v["passed"], true);
    assert!(v["sup_norm"].as_f64() < v["bound"].as_f64());
}

#[test]
fn config_supplies_defaults_and_flags_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = path(dir.path(), "cfg.json");
    fs::write(&cfg, r#"{"mode": "family", "epsilon": 0.05}"#).unwrap();
    let a = path(dir.path(), "a.json");
    let b = path(dir.path(), "b.json");
    assert_eq!(code(&["--config", &cfg, "plan", "--out", &a]), 0);
    assert_eq!(code(&["plan", "--config", &cfg, "--epsilon", "0.1", "--out", &b]), 0);
    let a: serde_json::Value = serde_json::from_slice(&fs::read(&a).unwrap()).unwrap();
    let b: serde_json::Value = serde_json::from_slice(&fs::read(&b).unwrap()).unwrap();
    assert_eq!(a["eps"].as_f64(), Some(0.05));
    assert_eq!(b["eps"].as_f64(), Some(0.1));
    assert!((b["S"].as_f64().unwrap() - 11.111111).abs() < 1e-6);

    fs::write(&cfg, r#"{"no_such_flag": 1}"#).unwrap();
    assert_eq!(code(&["plan", "--mode", "kh", "--config", &cfg]), 2);
}

#[test]
fn nesting_and_kh_plans() {
    let dir = tempfile::tempdir().unwrap();
    let out = path(dir.path(), "nest.json");
    assert_eq!(code(&["plan", "--mode", "nesting", "--eps-list", "0.1,0.05,0.02,0.01", "--out", &out]), 0);
    assert_eq!(code(&["plan", "--mode", "nesting", "--eps-list", "0.05,0.1"]), 2);
    let out = path(dir.path(), "kh.json");
    assert_eq!(code(&["plan", "--mode", "kh", "--epsilon", "0.01", "--T", "2", "--out", &out]), 0);
    let v: serde_json::Value = serde_json::from_slice(&fs::read(&out).unwrap()).unwrap();
    let (t, i) = (v["target_radius"].as_f64().unwrap(), v["inner_radius"].as_f64().unwrap());
    assert!((t - i).abs() <= 1e-12 * i);
}

#[test]
fn figures_write_svg_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    for name in ["spiral", "square-to-ball", "double-spiral", "domain-model"] {
        let svg = path(dir.path(), &format!("{name}.svg"));
        let o = spiralemb(&["figure", "--name", name, "--epsilon", "0.05", "--points", "500", "--out", &svg], None);
        assert_eq!(o.status.code(), Some(0), "{name}");
        let text = fs::read_to_string(&svg).unwrap();
        assert!(text.starts_with("<?xml") && text.contains(r#"version="1.1""#), "{name}");
        assert!(text.contains("<polyline") || text.contains("<polygon"), "{name}");
        let summary: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
        assert_eq!(summary["figure"], name);
    }
}

#[test]
fn flow_point_and_double_spiral_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let out = path(dir.path(), "flow.json");
    assert_eq!(code(&["flow", "--point", "0,0.1,1,0", "--out", &out]), 0);
    let v: serde_json::Value = serde_json::from_slice(&fs::read(&out).unwrap()).unwrap();
    // On the plateau chi = 1: y2 advances by sqrt(pi).
    let y2 = v["output"][3].as_f64().unwrap();
    assert!((y2 - std::f64::consts::PI.sqrt()).abs() < 1e-15);

    let out = path(dir.path(), "ds.csv");
    assert_eq!(code(&["double-spiral", "--epsilon", "0.1", "--grid", "30", "--out", &out]), 0);
    assert!(fs::read_to_string(&out).unwrap().lines().count() > 900);
}

#[test]
fn area_check_reports_relative_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = path(dir.path(), "area.json");
    let args = ["verify", "--check", "area", "--map", "f", "--samples", "20000", "--tol", "0.05", "--out", &out];
    assert_eq!(code(&args), 0);
    let r: VerificationReport = serde_json::from_slice(&fs::read(&out).unwrap()).unwrap();
    assert!(r.extremum("relative_error").unwrap() <= 0.05);
}
