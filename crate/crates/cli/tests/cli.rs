use std::path::PathBuf;
use std::process::{Command, Output};

fn model(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../models").join(format!("{name}.tcreol"))
}

fn tcreol(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tcreol")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn scratch(name: &str, text: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("tcreol-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

#[test]
fn parse_reports_syntax_errors_with_position() {
    let bad = scratch("bad.tcreol", "class Main()\nbegin\n  op run == x := \nend\n");
    let o = tcreol(&["parse", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("bad.tcreol:4:"), "{err}");
}

#[test]
fn parse_reports_validation_problems() {
    let bad = scratch("frob.tcreol", "class P() begin end\nclass Main() begin var p: P; op run == p.frob(;) end\n");
    let o = tcreol(&["parse", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("unknown method"));
}

#[test]
fn parse_dumps_the_syntax_tree() {
    let o = tcreol(&["parse", model("ping").to_str().unwrap(), "--dump-ast"]);
    assert!(o.status.success());
    let tree: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(tree["main"], "Main");
}

#[test]
fn run_prints_the_sink_summary() {
    let o = tcreol(&["run", model("star-no-interference").to_str().unwrap(), "--seed", "4", "--limit", "200"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("sink: received=12 last=2"), "{}", stdout(&o));
}

#[test]
fn run_exit_codes() {
    let o = tcreol(&["run", model("ping").to_str().unwrap(), "--max-steps", "2"]);
    assert_eq!(o.status.code(), Some(3));
    let fault = scratch("null.tcreol", "class W() begin op m == skip end\nclass Main() begin var w: W; op run == !w.m() end\n");
    let o = tcreol(&["run", fault.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stdout(&o).contains("faulted"));
    let o = tcreol(&["run", model("ping").to_str().unwrap(), "--policy", "nope"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn scripted_runs_follow_the_given_choices() {
    let p = model("tick-await");
    let a = tcreol(&["run", p.to_str().unwrap(), "--limit", "3", "--policy", "script", "--script", "1,0,1", "--snapshot"]);
    let b = tcreol(&["run", p.to_str().unwrap(), "--limit", "3", "--policy", "script", "--script", "1,0,1", "--snapshot"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn explore_reports_and_finds_witnesses() {
    let o = tcreol(&["explore", model("ping").to_str().unwrap(), "--limit", "1"]);
    assert!(o.status.success());
    let out = stdout(&o);
    assert!(out.contains("terminals: 1") && out.contains("visited: 21") && out.contains("truncated: false"), "{out}");

    let o = tcreol(&["explore", model("ping").to_str().unwrap(), "--limit", "1", "--depth", "1"]);
    assert!(stdout(&o).contains("truncated: true"));

    let witness = std::env::temp_dir().join(format!("tcreol-witness-{}.jsonl", std::process::id()));
    let o = tcreol(&[
        "explore",
        model("star-drop").to_str().unwrap(),
        "--limit",
        "200",
        "--query",
        "received=2,last=2",
        "--witness",
        witness.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let lines = std::fs::read_to_string(&witness).unwrap();
    assert!(lines.lines().count() > 0);
    let _ = std::fs::remove_file(witness);
}

#[test]
fn explore_query_errors() {
    let o = tcreol(&["explore", model("ping").to_str().unwrap(), "--limit", "1", "--query", "received=99"]);
    assert_eq!(o.status.code(), Some(4));
    assert!(stdout(&o).contains("not found"));
    let o = tcreol(&["explore", model("ping").to_str().unwrap(), "--query", "colour=red"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn bench_table_for_one_topology() {
    let o = tcreol(&["bench-table1", "--topologies", "star", "--seeds", "2"]);
    assert!(o.status.success());
    let out = stdout(&o);
    assert_eq!(out.lines().filter(|l| l.contains(" star ") && l.contains("yes")).count(), 3, "{out}");
}

#[test]
fn emit_model_matches_the_bundled_file() {
    let o = tcreol(&["emit-model", "--collision", "resend", "--topology", "mixed"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o), std::fs::read_to_string(model("mixed-resend")).unwrap());
    let o = tcreol(&["emit-model", "--collision", "jam", "--topology", "mixed"]);
    assert_eq!(o.status.code(), Some(1));
}
