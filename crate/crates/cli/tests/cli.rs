use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use decmon_cli::output::{DecmonLine, FsmOutput, MonitorOutput, SimulateOutput, VerifyOutput, WcetOutput};
use decmon_core::Verdict3;

const HEATING: &str = "G((!b0|!b1)&(t30->fan_on))";
const REFERENCE_FLAGS: [&str; 12] =
    ["--n", "4", "--fault-t", "0", "--wcet-l", "10", "--wcet-e", "5", "--wcet-m", "32", "--wcet-t", "10"];

fn here(rel: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests").join(rel)
}

fn decmon(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_decmon")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn golden(name: &str) -> String {
    std::fs::read_to_string(here(&format!("golden/{name}"))).unwrap()
}

#[test]
fn golden_verify() {
    let mut args = vec!["--json", "verify"];
    args.extend(REFERENCE_FLAGS);
    let o = decmon(&args);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), golden("verify_n4.json"));
}

#[test]
fn golden_monitor_violation() {
    let trace = here("fixtures/heating_violation.jsonl");
    let o = decmon(&["--json", "monitor", "-f", HEATING, trace.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(stdout(&o), golden("monitor_violation.json"));
}

#[test]
fn golden_wcet_reference_bus() {
    let o = decmon(&["--json", "wcet", "--table1"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), golden("wcet_reference.json"));
}

#[test]
fn text_verify_summary() {
    let mut args = vec!["verify"];
    args.extend(REFERENCE_FLAGS);
    let out = stdout(&decmon(&args));
    assert!(out.contains("synch-sampling=holds"));
    assert!(out.contains("liveness=holds"));
    assert!(out.contains("period=72"));
}

#[test]
fn config_file_matches_flags() {
    let cfg = here("fixtures/reference_n4.cfg");
    let o = decmon(&["--json", "verify", "--config", cfg.to_str().unwrap()]);
    assert_eq!(stdout(&o), golden("verify_n4.json"));
}

#[test]
fn violation_exit_can_be_suppressed() {
    let trace = here("fixtures/heating_violation.jsonl");
    let o = decmon(&["monitor", "--no-fail-on-violation", "-f", HEATING, trace.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).ends_with("verdict: BOT\n"));
}

#[test]
fn usage_and_input_errors_exit_2() {
    assert_eq!(decmon(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(decmon(&["monitor", "-f", "G(", "missing.jsonl"]).status.code(), Some(2));
    let trace = here("fixtures/heating_violation.jsonl");
    let o = decmon(&["monitor", "-f", "G(", trace.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("syntax error"));
    // declared alphabet lacks b1
    let o = decmon(&["monitor", "--ap", "b0,t30,fan_on", "-f", "G !b0", trace.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(decmon(&["verify", "--n", "4", "--fault-t", "1"]).status.code(), Some(2));
    assert_eq!(decmon(&["verify"]).status.code(), Some(2));
}

#[test]
fn state_budget_env() {
    let o = Command::new(env!("CARGO_BIN_EXE_decmon"))
        .args(["verify", "--n", "4"])
        .env("DECMON_STATE_BUDGET", "3")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
    let o = Command::new(env!("CARGO_BIN_EXE_decmon"))
        .args(["verify", "--n", "4"])
        .env("DECMON_STATE_BUDGET", "lots")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn threads_do_not_change_result() {
    let mut args = vec!["--json", "--threads", "4", "verify"];
    args.extend(REFERENCE_FLAGS);
    assert_eq!(stdout(&decmon(&args)), golden("verify_n4.json"));
}

fn round_trip<T>(text: &str) -> T
where
    T: serde::de::DeserializeOwned + serde::Serialize,
{
    let v: T = serde_json::from_str(text).expect("parses against schema");
    assert_eq!(serde_json::to_string_pretty(&v).unwrap() + "\n", text);
    v
}

#[test]
fn json_schemas_round_trip() {
    let trace = here("fixtures/heating_violation.jsonl");
    let m: MonitorOutput = round_trip(&stdout(&decmon(&["--json", "monitor", "-f", HEATING, trace.to_str().unwrap()])));
    assert_eq!(m.verdict, Verdict3::Bot);
    assert_eq!(m.steps.len(), 3);

    let f: FsmOutput = round_trip(&stdout(&decmon(&["--json", "build-fsm", "-f", HEATING])));
    assert_eq!(f.states.len(), 2);
    assert_eq!(f.transitions.len(), 2 * 16);

    let s: SimulateOutput =
        round_trip(&stdout(&decmon(&["--json", "simulate", "--n", "3", "--fault-t", "1", "--rounds", "2"])));
    assert_eq!(s.period, 1 + 3 + 1 + 4 + 1);
    assert_eq!(s.events.last().unwrap().time, 2 * s.period);

    let mut args = vec!["--json", "verify"];
    args.extend(REFERENCE_FLAGS);
    let v: VerifyOutput = round_trip(&stdout(&decmon(&args)));
    assert!(v.all_hold());

    let w: WcetOutput =
        round_trip(&stdout(&decmon(&["--json", "wcet", "--n", "5", "--fault-t", "1", "--cycles", "65415"])));
    assert_eq!(w.sampling.unwrap().period, 1 + 5 + 1 + 6 + 1);
    assert!((w.cycles.unwrap().seconds - 0.0327075).abs() < 1e-12);

    let scenario = here("fixtures/heating_scenario.json");
    let out = stdout(&decmon(&["--json", "decmon", scenario.to_str().unwrap()]));
    let lines: Vec<DecmonLine> = out
        .lines()
        .map(|l| {
            let r: DecmonLine = serde_json::from_str(l).unwrap();
            assert_eq!(serde_json::to_string(&r).unwrap(), l);
            r
        })
        .collect();
    assert_eq!(lines.len(), 3);
}

#[test]
fn decmon_scenario_masks_flip_then_catches_violation() {
    let scenario = here("fixtures/heating_scenario.json");
    let o = decmon(&["decmon", scenario.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    let out = stdout(&o);
    assert!(out.contains("round=1 time=74 sample={fan_on,t30} verdicts=[UNKNOWN,TOP,UNKNOWN] voted=UNKNOWN"));
    assert!(out.contains("round=2 time=148 sample={b0,b1} verdicts=[BOT,BOT,BOT] voted=BOT decision=BOT"));
}

#[test]
fn build_fsm_dot_and_text() {
    let dot = stdout(&decmon(&["build-fsm", "--dot", "-f", HEATING]));
    assert!(dot.starts_with("digraph monitor {"));
    let text = stdout(&decmon(&["build-fsm", "-f", "a U b"]));
    assert!(text.starts_with("alphabet a,b\ninitial 0\n"));
}

#[test]
fn simulate_csv_and_ascii() {
    let csv = stdout(&decmon(&["simulate", "--n", "2"]));
    assert!(csv.starts_with("time,component,location\n0,0,start\n"));
    assert!(csv.trim_end().ends_with("sampling_local_events"));
    let ascii = stdout(&decmon(&["simulate", "--n", "2", "--format", "ascii"]));
    assert!(ascii.contains("synch! sampling_local_events"));
}

#[test]
fn wcet_text_report() {
    let out = stdout(&decmon(&["wcet"]));
    for needle in ["281 bytes", "2810 bits", "0.585 sec"] {
        assert!(out.contains(needle), "missing {needle}");
    }
    let scaled = stdout(&decmon(&["--json", "wcet", "--nodes", "8", "--synch-bytes", "0"]));
    let w: WcetOutput = serde_json::from_str(&scaled).unwrap();
    assert_eq!(w.comm.total_bytes, 8 * 70);
}
