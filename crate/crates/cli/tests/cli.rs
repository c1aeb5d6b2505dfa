use std::path::PathBuf;
use std::process::{Command, Output};

use clap::Parser;
use underlords::{brute_force, parse_instance, solver::DEFAULT_SUBSET_GUARD, SearchOptions, Solution, Team};
use underlords_cli::{run, run_verify, verify_case, Cli, EXIT_DATA, EXIT_LIMIT, EXIT_MISMATCH};

fn root() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn fixture(name: &str) -> String {
    root().join("crates/core/tests/fixtures").join(name).display().to_string()
}

fn dataset() -> String {
    root().join("data/underlords.json").display().to_string()
}

fn underlords(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_underlords")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn solve_json_has_expected_fields() {
    let o = underlords(&["--format", "json", "solve", &dataset(), "--cap", "10"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    for key in ["team", "objective", "proven_optimal", "breakdown", "nodes", "wall_time"] {
        assert!(v.get(key).is_some(), "missing {key}");
    }
    assert_eq!(v["proven_optimal"], true);
    assert!((v["objective"].as_f64().unwrap() - 80.7).abs() < 1e-9);
    assert_eq!(v["team"].as_array().unwrap().len(), 10);
    assert_eq!(v["breakdown"].as_array().unwrap().len(), 10);
}

#[test]
fn solve_table_ends_with_summary() {
    let o = underlords(&["solve", &fixture("two_hero.json")]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.contains("Total"));
    assert!(text.contains("objective 2.5 (proven optimal)"), "{text}");
}

#[test]
fn evaluate_with_bound() {
    let o = underlords(&["evaluate", &fixture("two_hero.json"), "h1", "h2", "--bound", "2.4"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("exceeds 2.4: yes"));
    let o = underlords(&["--format", "json", "evaluate", &fixture("two_hero.json"), "h1"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["objective"], 1.0);
}

#[test]
fn data_errors_exit_with_two() {
    let o = underlords(&["evaluate", &fixture("two_hero.json"), "h9"]);
    assert_eq!(o.status.code(), Some(EXIT_DATA as i32));
    assert!(String::from_utf8_lossy(&o.stderr).contains("h9"));
    let o = underlords(&["solve", "/nonexistent/file.json"]);
    assert_eq!(o.status.code(), Some(EXIT_DATA as i32));
    let o = underlords(&["export", &dataset(), "--kind", "dot-pairs"]);
    assert_eq!(o.status.code(), Some(EXIT_DATA as i32));
}

#[test]
fn bad_json_reports_line_and_column() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("broken.json");
    std::fs::write(&path, "{\n  \"team_cap\": 2,\n  \"heroes\": [\n}").unwrap();
    let o = underlords(&["solve", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(EXIT_DATA as i32));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 4"));
}

#[test]
fn node_limit_exits_with_three() {
    let o = underlords(&["--node-limit", "5", "solve", &dataset()]);
    assert_eq!(o.status.code(), Some(EXIT_LIMIT as i32));
    assert!(stdout(&o).contains("not proven optimal"));
}

#[test]
fn oversized_reduction_exits_with_three() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("wide.json");
    let heroes: Vec<String> = (0..60)
        .map(|i| format!(r#"{{"name": "h{i}", "power": 1, "alliances": ["a{}"]}}"#, i / 3))
        .collect();
    std::fs::write(&path, format!(r#"{{"team_cap": 12, "heroes": [{}]}}"#, heroes.join(","))).unwrap();
    let o = underlords(&["export", path.to_str().unwrap(), "--kind", "dot-general", "--q", "3"]);
    assert_eq!(o.status.code(), Some(EXIT_LIMIT as i32), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn export_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("model.lp");
    let o = underlords(&["export", &fixture("two_hero.json"), "-o", out.to_str().unwrap()]);
    assert!(o.status.success());
    let golden = std::fs::read_to_string(fixture("two_hero.lp")).unwrap();
    assert_eq!(std::fs::read_to_string(out).unwrap(), golden);
    let o = underlords(&["export", &fixture("pair_min.json"), "--kind", "dot-pairs"]);
    assert_eq!(stdout(&o), std::fs::read_to_string(fixture("pair_min.dot")).unwrap());
}

#[test]
fn reduce_dks_output_solves() {
    let o = underlords(&["reduce-dks", &fixture("triangle.edges"), "--k", "2", "--vertices", "4"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let inst = parse_instance(&stdout(&o)).unwrap();
    assert_eq!(inst.hero_count(), 4);
    assert_eq!(inst.team_cap(), 2);
    let best = brute_force(&inst, DEFAULT_SUBSET_GUARD).unwrap();
    assert_eq!(best.objective, 4.0);
}

#[test]
fn verify_reports_success() {
    let cli = Cli::try_parse_from(["underlords", "--seed", "7", "verify", "--cases", "30"]).unwrap();
    let mut out = Vec::new();
    assert_eq!(run(&cli, &mut out).unwrap(), 0);
    assert!(String::from_utf8(out).unwrap().contains("30/30 cases agree"));
}

/// Drops the highest-numbered hero from the correct answer whenever the
/// team has more than one member.
fn broken_solver(inst: &underlords::Instance, _: &SearchOptions) -> Solution {
    let mut s = brute_force(inst, DEFAULT_SUBSET_GUARD).unwrap();
    if s.team.len() > 1 {
        let mut ids = s.team.to_vec();
        ids.pop();
        s.team = ids.into_iter().collect::<Team>();
        s.objective = underlords::evaluate_team(inst, &s.team).unwrap().total;
    }
    s
}

#[test]
fn verify_catches_a_broken_solver() {
    let report = run_verify(3, 40, &SearchOptions::default(), broken_solver).unwrap();
    assert!(!report.mismatches.is_empty());
    let m = &report.mismatches[0];
    // the reproducer regenerates the same instance and survives serialization
    assert_eq!(verify_case(m.seed, m.case), m.instance);
    assert_eq!(parse_instance(&m.instance.to_json()).unwrap(), m.instance);
    let mut out = Vec::new();
    underlords_cli::write_verify(&report, underlords_cli::Format::Table, &mut out).unwrap();
    let text = String::from_utf8(out).unwrap();
    assert!(text.contains(&format!("MISMATCH seed 3 case {}", m.case)));
    assert!(text.contains("reproducer:"));
    let _ = EXIT_MISMATCH;
}

#[test]
fn verify_is_identical_across_worker_counts() {
    let one = underlords(&["--seed", "42", "--format", "json", "verify", "--cases", "50"]);
    let four = underlords(&["--seed", "42", "--workers", "4", "--format", "json", "verify", "--cases", "50"]);
    let strip = |o: &Output| {
        let mut v: serde_json::Value = serde_json::from_str(&stdout(o)).unwrap();
        v.as_object_mut().unwrap().remove("wall_time");
        v
    };
    assert_eq!(strip(&one), strip(&four));
    assert_eq!(strip(&one)["passed"], 50);
}
