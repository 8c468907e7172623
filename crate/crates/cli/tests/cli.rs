use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn switchlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_switchlab")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn verify_small_passes() {
    let o = switchlab(&["verify", "--n-max", "2", "--d-max", "1"]);
    assert_eq!(o.status.code(), Some(0));
    let reports: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    for r in reports.as_array().unwrap() {
        assert_eq!(r["violations"], 0);
    }
}

#[test]
fn size_guard_exit_code() {
    let o = switchlab(&["verify", "--n-max", "9", "--d-max", "2"]);
    assert_eq!(o.status.code(), Some(3));
    let o = switchlab(&["enumerate", "--n", "10", "--d", "3"]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(switchlab(&["estimate", "--pairs", "3x4", "--trials", "2"]).status.code(), Some(2));
    assert_eq!(switchlab(&["estimate", "--pairs", "nonsense"]).status.code(), Some(2));
    assert_eq!(switchlab(&["no-such-command"]).status.code(), Some(2));
}

#[test]
fn degenerate_chain_fails_sampler_test() {
    let o = switchlab(&["sampler-test", "--n", "4", "--d", "2", "--samples", "500", "--sampler", "mcmc", "--burn-in", "0"]);
    assert_eq!(o.status.code(), Some(1));
    let r: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(r["passed"], false);
    assert_eq!(r["distinct_seen"], 1);
}

#[test]
fn enumerate_lists_a42() {
    let o = switchlab(&["enumerate", "--n", "4", "--d", "2", "--format", "csv"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("index,rank,rows"));
    assert_eq!(lines.count(), 90);
}

#[test]
fn rank_of_block_diagonal_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bd.txt");
    fs::write(&path, "4 2\n0 1\n0 1\n2 3\n2 3\n").unwrap();
    let o = switchlab(&["rank", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let r: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(r["rank"], 2);
    assert_eq!(r["corank"], 2);
    assert_eq!(r["right_kernel"][0], "1/1 -1/1 0/1 0/1");
    assert_eq!(r["left_kernel"][1], "0/1 0/1 1/1 -1/1");

    fs::write(&path, "4 2\n0 1\n0 1\n2 3\n").unwrap();
    assert_eq!(switchlab(&["rank", path.to_str().unwrap()]).status.code(), Some(2));
}

fn estimate_into(dir: &Path, workers: &str) {
    let o = switchlab(&[
        "estimate", "--pairs", "12x2,9x3", "--trials", "60", "--seed", "77", "--workers", workers,
        "--format", "csv", "--out", dir.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn estimate_is_byte_identical() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    estimate_into(a.path(), "1");
    estimate_into(b.path(), "3");
    for name in ["trials.jsonl", "summary.csv"] {
        assert_eq!(fs::read(a.path().join(name)).unwrap(), fs::read(b.path().join(name)).unwrap());
    }
    let jsonl = fs::read_to_string(a.path().join("trials.jsonl")).unwrap();
    assert_eq!(jsonl.lines().count(), 120);
    assert!(!jsonl.contains("wall_time_ms"));
}

#[test]
fn config_file_mirrors_grid_spec() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("grid.json");
    fs::write(
        &cfg,
        r#"{"pairs":[[10,1]],"trials":20,"sampler":{"kind":"stub_rejection","max_rejections":10,"burn_in_steps":null,"steps_between_samples":1,"seed":1},"workers":1}"#,
    )
    .unwrap();
    let o = switchlab(&["estimate", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let rows: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(rows[0]["frac_full_rank"], 1.0);
    assert_eq!(rows[0]["trials"], 20);

    fs::write(&cfg, r#"{"pairs":[[10,1]],"trials":20,"extra":1}"#).unwrap();
    assert_eq!(switchlab(&["estimate", "--config", cfg.to_str().unwrap()]).status.code(), Some(2));
}
