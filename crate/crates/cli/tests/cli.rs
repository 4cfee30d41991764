use std::path::PathBuf;
use std::process::{Command, Output};

fn model(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../models").join(name)
}

fn lexsg(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lexsg")).args(args).env_remove("LEXSG_SEED").output().expect("spawn lexsg")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn solve_running_example() {
    let fig1 = model("fig1.sg");
    let o = lexsg(&["solve", fig1.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    let out = stdout(&o);
    assert!(out.contains("r: (0.5, 0.25)"), "{out}");
    assert!(out.contains("stages 1/3"), "{out}");
    assert!(out.contains("avg actions"), "{out}");
    assert!(out.contains("time "), "{out}");
}

#[test]
fn solve_memory_example_exact() {
    let fig3 = model("fig3.sg");
    let o = lexsg(&["solve", fig3.to_str().unwrap(), "--mode", "exact", "--state", "p"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let out = stdout(&o);
    assert!(out.starts_with("p: (1, 1)\n"), "{out}");
    assert!(out.contains("stages 3/3"), "{out}");
}

#[test]
fn lines_format_is_stable() {
    let fig1 = model("fig1.sg");
    let args = ["solve", fig1.to_str().unwrap(), "--mode", "exact", "--format", "lines"];
    let a = stdout(&lexsg(&args));
    let b = stdout(&lexsg(&args));
    assert_eq!(a, b);
    assert!(a.lines().any(|l| l == "value v 0 1/2"), "{a}");
    assert_eq!(a.lines().filter(|l| l.starts_with("value ")).count(), 8);
}

#[test]
fn missing_file_is_an_input_error() {
    let o = lexsg(&["solve", "/nonexistent/model.sg"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("error"));
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(lexsg(&["solve"]).status.code(), Some(2));
    let fig1 = model("fig1.sg");
    let o = lexsg(&["solve", fig1.to_str().unwrap(), "--epsilon", "0.5"]);
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
}

#[test]
fn decide_thresholds() {
    let fig1 = model("fig1.sg");
    let f = fig1.to_str().unwrap();
    let run = |t: &str| stdout(&lexsg(&["decide", f, "--mode", "exact", "--state", "r", "--threshold", t]));
    assert_eq!(run("1/2,1/4"), "true\n");
    assert_eq!(run("0.5,0.3"), "false\n");
    assert_eq!(run("1/3,1"), "true\n");
    let o = lexsg(&["decide", f, "--state", "r", "--threshold", "1/2"]);
    assert_eq!(o.status.code(), Some(3));
    let o = lexsg(&["decide", f, "--state", "r", "--threshold", "x,1"]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn exported_strategy_checks() {
    let dir = tempfile::tempdir().unwrap();
    let strat = dir.path().join("fig1.strategy");
    let fig1 = model("fig1.sg");
    let f = fig1.to_str().unwrap();
    let o = lexsg(&["solve", f, "--mode", "exact", "--strategy-out", strat.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    for mode in ["exact", "vi"] {
        let o = lexsg(&["check", f, "--mode", mode, "--strategy", strat.to_str().unwrap()]);
        assert!(o.status.success(), "{}", stderr(&o));
        assert!(stdout(&o).ends_with("PASS\n"));
    }
}

#[test]
fn memoryless_strategy_fails_check() {
    let dir = tempfile::tempdir().unwrap();
    let strat = dir.path().join("toward_q.strategy");
    let mut text = String::new();
    for stage in ["none", "1", "2"] {
        text.push_str(&format!("stage {stage} p to_q\nstage {stage} r to_p\n"));
    }
    text.push_str("value p 1 1\n");
    std::fs::write(&strat, text).unwrap();
    let fig3 = model("fig3.sg");
    let o = lexsg(&["check", fig3.to_str().unwrap(), "--mode", "exact", "--strategy", strat.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    let out = stdout(&o);
    assert!(out.contains("p: achieved (1, 0) claimed (1, 1)"), "{out}");
    assert!(out.ends_with("FAIL\n"));
}

#[test]
fn strategy_with_missing_stage_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let strat = dir.path().join("gap.strategy");
    std::fs::write(&strat, "stage none p to_q\nstage none r to_p\nvalue p 1 1\n").unwrap();
    let fig3 = model("fig3.sg");
    let o = lexsg(&["check", fig3.to_str().unwrap(), "--strategy", strat.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("no choice"), "{}", stderr(&o));
}

#[test]
fn generated_models_solve() {
    let dir = tempfile::tempdir().unwrap();
    for kind in ["random", "hallway", "avoid", "dice"] {
        let path = dir.path().join(format!("{kind}.sg"));
        let mut args = vec!["gen", "--kind", kind, "--seed", "1", "-o", path.to_str().unwrap()];
        if kind != "random" && kind != "dice" {
            args.extend(["--width", "3", "--height", "3"]);
        }
        let o = lexsg(&args);
        assert!(o.status.success(), "{kind}: {}", stderr(&o));
        let o = lexsg(&["solve", path.to_str().unwrap(), "--format", "lines"]);
        assert!(o.status.success(), "{kind}: {}", stderr(&o));
    }
}

#[test]
fn seed_comes_from_environment() {
    let gen = |env: Option<&str>, extra: &[&str]| {
        let mut cmd = Command::new(env!("CARGO_BIN_EXE_lexsg"));
        cmd.args(["gen", "--kind", "random"]).args(extra).env_remove("LEXSG_SEED");
        if let Some(v) = env {
            cmd.env("LEXSG_SEED", v);
        }
        stdout(&cmd.output().unwrap())
    };
    assert_eq!(gen(Some("7"), &[]), gen(None, &["--seed", "7"]));
    assert_eq!(gen(Some("7"), &["--seed", "3"]), gen(None, &["--seed", "3"]));
    assert_eq!(gen(None, &[]), gen(None, &[]));
}

#[test]
fn oracle_agrees_on_running_example() {
    let fig1 = model("fig1.sg");
    let o = lexsg(&["oracle", fig1.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).ends_with("discrepancy 0\n"), "{}", stdout(&o));
}

#[test]
fn oracle_limits_exit_four() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("hallway.sg");
    assert!(lexsg(&["gen", "--kind", "hallway", "-o", path.to_str().unwrap()]).status.success());
    let o = lexsg(&["oracle", path.to_str().unwrap(), "--max-product-states", "10"]);
    assert_eq!(o.status.code(), Some(4));
    assert!(stderr(&o).contains("limits exceeded"));
}
