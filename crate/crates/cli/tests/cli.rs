use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_planwright")).args(args).output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn write(dir: &tempfile::TempDir, name: &str, text: &str) -> String {
    let p = dir.path().join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

fn sequence(json: &str) -> Vec<String> {
    let v: Value = serde_json::from_str(json).unwrap();
    serde_json::from_value(v["sequence"].clone()).unwrap()
}

const RAIN: &str = r#"{"requirements":[{"id":"req_sun","type":"VF"},{"id":"req_sensor","parent":"req_sun","type":"SF"}],
  "tests":[{"id":"t_sun","links":["req_sun"]},{"id":"t_sensor","links":["req_sensor"]}]"#;

#[test]
fn check_accepts_every_fixture() {
    for f in ["rain.json", "horn.json", "cycle.json", "platform.json"] {
        let o = run(&["check", fixture(f).to_str().unwrap()]);
        assert_eq!(code(&o), 0, "{f}: {}", String::from_utf8_lossy(&o.stderr));
        assert!(stdout(&o).starts_with("ok:"));
    }
}

#[test]
fn check_reports_dangling_link_with_exit_1() {
    let dir = tempfile::tempdir().unwrap();
    let p = write(
        &dir,
        "bad.json",
        r#"{"requirements":[{"id":"r1","type":"VF"}],"tests":[{"id":"t","links":["r99"]}]}"#,
    );
    let o = run(&["check", &p]);
    assert_eq!(code(&o), 1);
    assert!(String::from_utf8_lossy(&o.stderr).contains("r99"));
}

#[test]
fn unknown_fields_and_bad_json_exit_1() {
    let dir = tempfile::tempdir().unwrap();
    let extra = write(&dir, "extra.json", &format!("{RAIN},\"owner\":\"me\"}}"));
    assert_eq!(code(&run(&["check", &extra])), 1);
    let broken = write(&dir, "broken.json", "{\"requirements\": [");
    assert_eq!(code(&run(&["plan", &broken])), 1);
}

#[test]
fn missing_file_exits_3() {
    let o = run(&["plan", "/nonexistent/project.json"]);
    assert_eq!(code(&o), 3);
}

#[test]
fn usage_errors_exit_1() {
    let rain = fixture("rain.json");
    assert_eq!(code(&run(&["plan", rain.to_str().unwrap(), "--expect", "hopeful"])), 1);
    assert_eq!(code(&run(&["frobnicate"])), 1);
    assert_eq!(code(&run(&["--help"])), 0);
}

#[test]
fn contradicting_status_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let p = write(&dir, "s.json", &format!("{RAIN},\"status\":{{\"success\":[\"t_sun\"],\"fail\":[\"t_sensor\"]}}}}"));
    assert_eq!(code(&run(&["check", &p])), 0);
    assert_eq!(code(&run(&["plan", &p])), 2);
    assert_eq!(code(&run(&["redundant", &p])), 2);
}

#[test]
fn deps_renders_implications() {
    let o = run(&["deps", fixture("rain.json").to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o), "t_sun => t_sensor\n");
}

#[test]
fn rain_plans_follow_the_dependency_direction() {
    let rain = fixture("rain.json");
    let rain = rain.to_str().unwrap();
    // Both expected to fail: a failing sensor implies a failing sunroof.
    let o = run(&["plan", rain, "--expect", "pessimistic", "--out", "-"]);
    assert_eq!(sequence(&stdout(&o)), ["t_sensor", "t_sun"]);
    // Both expected to pass: a passing sunroof implies a passing sensor.
    let o = run(&["plan", rain, "--expect", "optimistic", "--out", "-"]);
    assert_eq!(sequence(&stdout(&o)), ["t_sun", "t_sensor"]);
    // With no embedded expectation the default is pessimistic.
    let o = run(&["plan", rain, "--out", "-"]);
    assert_eq!(sequence(&stdout(&o)), ["t_sensor", "t_sun"]);
}

#[test]
fn plan_writes_json_file_and_table() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("plan.json");
    let o = run(&["plan", fixture("cycle.json").to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let table = stdout(&o);
    assert!(table.contains("dropped constraints:"), "{table}");
    let plan: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(plan["search_mode"], "exact");
    assert_eq!(plan["dropped_constraints"].as_array().unwrap().len(), 1);
}

#[test]
fn plan_reports_conflicts() {
    let dir = tempfile::tempdir().unwrap();
    let p = write(&dir, "c.json", &format!("{RAIN},\"expectation\":{{\"t_sun\":\"success\",\"t_sensor\":\"fail\"}}}}"));
    let o = run(&["plan", &p]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("conflicting expectations"), "{}", stdout(&o));
}

#[test]
fn history_expectation_reads_prior_results() {
    let dir = tempfile::tempdir().unwrap();
    let h = write(&dir, "h.json", r#"{"t_sun":"pass","t_sensor":"pass"}"#);
    let o = run(&["plan", fixture("rain.json").to_str().unwrap(), "--expect", &format!("history={h}"), "--out", "-"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(sequence(&stdout(&o)), ["t_sun", "t_sensor"]);
    let missing = dir.path().join("none.json");
    let o = run(&["plan", fixture("rain.json").to_str().unwrap(), "--expect", &format!("history={}", missing.display())]);
    assert_eq!(code(&o), 3);
}

#[test]
fn file_expectation_requires_one() {
    let o = run(&["plan", fixture("rain.json").to_str().unwrap(), "--expect", "file"]);
    assert_eq!(code(&o), 1);
}

#[test]
fn exact_threshold_zero_switches_to_heuristic() {
    let o = run(&["plan", fixture("cycle.json").to_str().unwrap(), "--exact-threshold", "0", "--out", "-"]);
    let plan: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(plan["search_mode"], "heuristic");
}

#[test]
fn redundant_uses_embedded_status() {
    let o = run(&["redundant", fixture("platform.json").to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let text = stdout(&o);
    assert!(text.contains("t_bus_vehicle  FORCED_FALSE"), "{text}");
    assert!(text.contains("t_wiper        OPEN"), "{text}");
}

#[test]
fn export_cnf_writes_dimacs() {
    let rain = fixture("rain.json");
    let o = run(&["export-cnf", rain.to_str().unwrap(), "--stage", "R"]);
    let text = stdout(&o);
    assert!(text.contains("p cnf 2 1\n"), "{text}");
    let o = run(&["export-cnf", rain.to_str().unwrap(), "--stage", "T"]);
    assert!(stdout(&o).contains("p cnf 4 4\n"));
    let o = run(&["export-cnf", rain.to_str().unwrap(), "--stage", "P"]);
    assert!(stdout(&o).contains("p cnf 0 0\n"));

    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("all.cnf");
    let o = run(&["export-cnf", rain.to_str().unwrap(), "--stage", "RTPS", "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let parsed = planwright_core::dimacs::parse_dimacs(&std::fs::read_to_string(out).unwrap()).unwrap();
    assert_eq!(parsed.num_vars, 4);
    assert_eq!(parsed.clauses.len(), 5);
    assert_eq!(code(&run(&["export-cnf", rain.to_str().unwrap(), "--stage", "Q"])), 1);
}
