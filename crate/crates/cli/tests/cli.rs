use std::path::{Path, PathBuf};
use std::process::Command;

use groupbuy_cli::execute;

const BASE: &str = r#"
n_required = 100
max_time = 7.0
arrival_rate = 14.0
dispatch_cost = 40.0
transport_cost_per_unit = 4.0
holding_rate = 0.02
penalty_cost = 10.0
reorder_cost = 300.0
"#;

fn write_config(dir: &Path, name: &str, extra: &str) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, format!("{BASE}{extra}")).unwrap();
    path
}

/// Runs in-process and returns (exit code, stdout, stderr).
fn run(args: &[&str]) -> (u8, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let mut full = vec!["groupbuy"];
    full.extend_from_slice(args);
    let code = execute(full, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

#[test]
fn optimize_reports_reference_figures() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "base.toml", "");
    let (code, out, _) = run(&["optimize", cfg.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert!(out.lines().nth(1).unwrap().starts_with("td_mode: paper, a_mode: approx"));
    for needle in ["0.4333", "6.7829", "15.9376", "433.8597", "434"] {
        assert!(out.contains(needle), "missing {needle}\n{out}");
    }
}

#[test]
fn optimize_without_deadline_shows_eoq() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "base.toml", "");
    let (code, out, _) = run(&["optimize", cfg.to_str().unwrap(), "--max_time", "inf"]);
    assert_eq!(code, 0);
    assert!(out.contains("EOQ"));
    let q_line = out.lines().find(|l| l.trim_start().starts_with("Q* [paper]")).unwrap();
    assert!(q_line.contains("648.0741"), "{q_line}");
}

#[test]
fn optimize_json_is_machine_readable() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "base.toml", "format = \"json\"\n");
    let (code, out, _) = run(&["optimize", cfg.to_str().unwrap()]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["td_mode"], "paper");
    assert_eq!(v["best_integer_q"], 434);
    assert!((v["q_star"].as_f64().unwrap() - 433.8597).abs() < 1e-3);
}

#[test]
fn config_errors_exit_2_and_name_the_key() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "base.toml", "");
    let cfg = cfg.to_str().unwrap();
    let (code, _, err) = run(&["optimize", cfg, "--holding_rate", "0"]);
    assert_eq!(code, 2);
    assert!(err.contains("holding_rate"), "{err}");

    let (code, _, err) = run(&["simulate", cfg, "--quantity", "500", "--cycles", "0"]);
    assert_eq!(code, 2);
    assert!(err.contains("num_cycles"), "{err}");

    let (code, _, err) = run(&["simulate", cfg]);
    assert_eq!(code, 2);
    assert!(err.contains("quantity"), "{err}");

    let (code, _, err) = run(&["sweep", cfg, "--format", "xlsx"]);
    assert_eq!(code, 2);
    assert!(err.contains("format"), "{err}");

    let bare = dir.path().join("bare.toml");
    std::fs::write(&bare, "n_required = 100\nmax_time = 7.0\narrival_rate = 14.0\n").unwrap();
    let (code, _, err) = run(&["validate", bare.to_str().unwrap()]);
    assert_eq!(code, 2);
    assert!(err.contains("dispatch_cost"), "{err}");

    let typo = write_config(dir.path(), "typo.toml", "holding = 0.1\n");
    let (code, _, err) = run(&["optimize", typo.to_str().unwrap()]);
    assert_eq!(code, 2);
    assert!(err.contains("holding"), "{err}");

    let (code, _, _) = run(&["optimize", cfg, "--seed", "not-a-number"]);
    assert_eq!(code, 2);
}

#[test]
fn degenerate_design_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "base.toml", "");
    let (code, _, err) = run(&["optimize", cfg.to_str().unwrap(), "--n_required", "4000", "--max_time", "1"]);
    assert_eq!(code, 3);
    assert!(err.contains("numeric"), "{err}");
}

#[test]
fn sweep_reproduces_reference_grid() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "grid.toml", "n_values = [80, 100, 120]\nt_values = [6.0, 7.0, 8.0]\n");
    let (code, out, _) = run(&["sweep", cfg.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert!(out.contains("td_mode: paper, a_mode: approx"));
    assert!(out.contains("| N=80 | 536 | 637 | 648 |"));
    assert!(out.contains("| N=100 | 156 | 434 | 606 |"));
    assert!(out.contains("| N=120 | 9 | 94 | 327 |"));
}

#[test]
fn sweep_single_cell_csv_to_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "base.toml", "");
    let target = dir.path().join("out.csv");
    let (code, out, err) =
        run(&["sweep", cfg.to_str().unwrap(), "--format", "csv", "--out", target.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert!(out.is_empty());
    assert!(err.contains("td_mode: paper, a_mode: approx"));
    let text = std::fs::read_to_string(target).unwrap();
    assert_eq!(text.lines().count(), 2);
    assert!(text.lines().nth(1).unwrap().starts_with("100,7,14,0.433311,15.9376,433.86,434,"));
}

#[test]
fn partial_grid_exits_4() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "base.toml", "");
    let (code, out, err) = run(&[
        "sweep",
        cfg.to_str().unwrap(),
        "--format",
        "csv",
        "--n_values",
        "100,400",
        "--t_values",
        "1,7",
        "--lambda_values",
        "1",
    ]);
    assert_eq!(code, 4);
    assert_eq!(out.lines().count(), 5);
    assert!(err.contains("failed"));
}

#[test]
fn simulate_is_byte_identical_per_seed() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "sim.toml", "quantity = 500.0\nnum_cycles = 2000\nreplications = 3\n");
    let cfg = cfg.to_str().unwrap();
    let a = run(&["simulate", cfg, "--seed", "42"]);
    let b = run(&["simulate", cfg, "--seed", "42"]);
    assert_eq!(a.0, 0);
    assert_eq!(a, b);
    let c = run(&["simulate", cfg, "--seed", "43"]);
    assert_ne!(a.1, c.1);
    assert!(a.1.contains("td_mode: paper, a_mode: approx"));
}

#[test]
fn simulate_flags_paper_mode_at_the_integer_optimum() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "sim.toml", "quantity = 434.0\nnum_cycles = 60000\n");
    let (code, out, _) = run(&["simulate", cfg.to_str().unwrap()]);
    assert_eq!(code, 0);
    let paper = out.lines().find(|l| l.trim_start().starts_with("T_d [paper]")).unwrap();
    let consistent = out.lines().find(|l| l.trim_start().starts_with("T_d [consistent]")).unwrap();
    assert!(paper.contains("differs by more than 3 SE"), "{paper}");
    assert!(!consistent.contains("differs"), "{consistent}");
}

#[test]
fn event_log_has_one_line_per_round() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "sim.toml", "quantity = 500.0\nnum_cycles = 20\n");
    let log = dir.path().join("events.jsonl");
    let (code, out, _) =
        run(&["simulate", cfg.to_str().unwrap(), "--event-log", log.to_str().unwrap(), "--format", "json"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    let auctions = v["runs"][0]["counts"]["auctions"].as_u64().unwrap();
    let text = std::fs::read_to_string(log).unwrap();
    assert_eq!(text.lines().count() as u64, auctions);
    let first: serde_json::Value = serde_json::from_str(text.lines().next().unwrap()).unwrap();
    assert!(first.get("level_after").is_some());
}

fn statuses(report: &str) -> Vec<String> {
    report
        .lines()
        .filter(|l| l.starts_with("[PASS]") || l.starts_with("[FAIL]"))
        .map(|l| l.split(':').next().unwrap().to_string())
        .collect()
}

#[test]
fn validate_passes_and_is_stable_across_seeds() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "base.toml", "quantity = 500.0\nnum_cycles = 20000\n");
    let cfg = cfg.to_str().unwrap();
    let mut first: Option<Vec<String>> = None;
    for seed in ["1", "2", "3", "4", "5"] {
        let (code, out, _) = run(&["validate", cfg, "--seed", seed]);
        assert_eq!(code, 0, "seed {seed}\n{out}");
        assert!(!out.contains("[FAIL]"));
        assert!(out.contains("[INFO] published C(Q*) N=100, T=7"));
        assert!(out.contains("[INFO] auction duration semantics"));
        let s = statuses(&out);
        match &first {
            None => first = Some(s),
            Some(f) => assert_eq!(f, &s),
        }
    }
}

#[test]
fn binary_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "base.toml", "");
    let bin = env!("CARGO_BIN_EXE_groupbuy");
    let status = |args: &[&str]| Command::new(bin).args(args).output().unwrap();
    let ok = status(&["optimize", cfg.to_str().unwrap()]);
    assert_eq!(ok.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&ok.stdout).contains("433.8597"));
    assert_eq!(status(&["optimize", cfg.to_str().unwrap(), "--holding_rate", "0"]).status.code(), Some(2));
    assert_eq!(status(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(
        status(&["optimize", cfg.to_str().unwrap(), "--n_required", "4000", "--max_time", "1"]).status.code(),
        Some(3)
    );
}
