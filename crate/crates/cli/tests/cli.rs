use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

fn scenario(stem: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../core/tests/scenarios")
        .join(format!("{stem}.toml"))
}

fn repgen(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_repgen"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn run_writes_the_golden_trace() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("trace.jsonl");
    let path = scenario("uniform_three_way");
    let o = repgen(&[
        "run",
        path.to_str().unwrap(),
        "--trace",
        out.to_str().unwrap(),
        "--assert",
    ]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    let golden = PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../core/tests/golden/uniform_three_way.jsonl");
    assert_eq!(
        fs::read_to_string(out).unwrap(),
        fs::read_to_string(golden).unwrap()
    );
}

#[test]
fn violated_expectation_exits_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let text = fs::read_to_string(scenario("empirical_parity_evens"))
        .unwrap()
        .replace("never_consistent = true", "consistent_by = 1");
    let file = dir.path().join("s.toml");
    fs::write(&file, text).unwrap();
    let f = file.to_str().unwrap();
    assert_eq!(repgen(&["run", f, "--assert"]).status.code(), Some(2));
    assert_eq!(repgen(&["run", f]).status.code(), Some(0));
}

#[test]
fn configuration_errors_exit_with_three() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("bad.toml");
    let text = fs::read_to_string(scenario("uniform_parity_evens"))
        .unwrap()
        .replace("\"1/4\"", "\"0.25\"");
    fs::write(&file, text).unwrap();
    let o = repgen(&["run", file.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("generator.alpha"));
    let missing = dir.path().join("missing.toml");
    assert_eq!(
        repgen(&["gc-dim", missing.to_str().unwrap()]).status.code(),
        Some(3)
    );
    assert_eq!(
        repgen(&["adversary", "geometric", "--alpha", "1/3"])
            .status
            .code(),
        Some(3)
    );
}

#[test]
fn gc_dim_reports_the_worked_example() {
    let o = repgen(&[
        "gc-dim",
        scenario("uniform_zero_split_half").to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    assert!(s.contains("GC = 1 (exact)"), "{s}");
    assert!(s.contains("witness: [0]"), "{s}");
}

#[test]
fn closure_and_feasibility() {
    let path = scenario("uniform_mod4_nested");
    let o = repgen(&["closure", path.to_str().unwrap(), "--prefix", "0,4"]);
    assert_eq!(stdout(&o).trim(), "ap:0,4,{0},{}");
    let o = repgen(&["closure", path.to_str().unwrap(), "--prefix", "0,2,1"]);
    assert_eq!(stdout(&o).trim(), "all");
    let path = scenario("inlimit_evens_mult4_short");
    let o = repgen(&[
        "feasible",
        path.to_str().unwrap(),
        "--hypothesis",
        "mult4",
        "--prefix",
        "0,4",
    ]);
    assert!(stdout(&o).starts_with("feasible"), "{}", stdout(&o));
}

#[test]
fn adversaries_report_every_round() {
    let o = repgen(&[
        "adversary",
        "geometric",
        "--depth",
        "4",
        "--generator",
        "inlimit",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let steps: Vec<&str> = text
        .lines()
        .map(|l| l.split_whitespace().next().unwrap())
        .collect();
    assert_eq!(steps, ["t=2", "t=6", "t=14", "t=30"]);

    let o = repgen(&[
        "adversary",
        "query",
        "--steps",
        "5",
        "--generator",
        "constant",
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).lines().count(), 5);

    let path = scenario("uniform_three_way");
    let o = repgen(&[
        "adversary",
        "witness",
        path.to_str().unwrap(),
        "--d-star",
        "3",
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("t=7"), "{}", stdout(&o));
}
