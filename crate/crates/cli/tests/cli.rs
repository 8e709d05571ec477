use std::f64::consts::PI;
use std::fs;
use std::process::{Command, Output};

use qudit_search::engine::{run_search, ExperimentConfig, FChoice};
use qudit_search::schedule::deterministic_schedule;
use qudit_search::state::QuditShape;
use serde_json::Value;

fn qsearch(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qsearch")).args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).unwrap()
}

fn ok(args: &[&str]) -> String {
    let out = qsearch(args);
    assert_eq!(out.status.code(), Some(0), "{args:?}: {}", stderr(&out));
    stdout(&out)
}

fn exit_code(args: &[&str]) -> i32 {
    qsearch(args).status.code().unwrap()
}

/// Parses a two-line CSV into header -> value pairs.
fn record(csv: &str) -> Vec<(String, String)> {
    let mut lines = csv.lines();
    let header = lines.next().unwrap().split(',');
    let row = lines.next().unwrap().split(',');
    header.zip(row).map(|(h, v)| (h.to_string(), v.to_string())).collect()
}

fn field(rec: &[(String, String)], key: &str) -> String {
    rec.iter().find(|(h, _)| h == key).unwrap_or_else(|| panic!("missing {key}")).1.clone()
}

fn populations(csv: &str) -> Vec<f64> {
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("step,population"));
    lines
        .enumerate()
        .map(|(k, line)| {
            let (step, p) = line.split_once(',').unwrap();
            assert_eq!(step.parse::<usize>().unwrap(), k);
            p.parse().unwrap()
        })
        .collect()
}

#[test]
fn five_qutrit_search_reaches_the_marked_item() {
    let pops = populations(&ok(&["search", "--d", "3", "--n", "5", "--mode", "deterministic"]));
    assert_eq!(pops.len(), 13);
    assert!(pops[12] >= 0.999);
    assert!((pops[0] - 1.0 / 243.0).abs() < 1e-12);
}

#[test]
fn two_qubit_search_with_pi_phase_finishes_in_one_step() {
    let pops = populations(&ok(&["search", "--d", "2", "--n", "2", "--mode", "pi"]));
    // round(pi/4 sqrt 4) = 2 recorded steps.
    assert_eq!(pops.len(), 3);
    assert_eq!(pops[1], 1.0);
}

#[test]
fn single_level_qudits_are_a_usage_error() {
    let out = qsearch(&["search", "--d", "1", "--n", "3"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("d >= 2"));
    assert!(stdout(&out).is_empty());
}

#[test]
fn csv_round_trips_against_the_simulation() {
    let shape = QuditShape::new(3, 4).unwrap();
    let schedule = deterministic_schedule(shape.size()).unwrap();
    let cfg = ExperimentConfig::new(shape, shape.index(17).unwrap(), schedule).unwrap().with_f(FChoice::RandomPhase(5));
    let expected = run_search(&cfg).unwrap();
    let pops = populations(&ok(&["search", "--d", "3", "--n", "4", "--marked", "17", "--f", "random:5"]));
    assert_eq!(pops.len(), expected.populations.len());
    for (p, e) in pops.iter().zip(&expected.populations) {
        assert!((p - e).abs() <= 1e-11 * e.abs().max(1e-3), "{p} vs {e}");
    }
}

#[test]
fn json_carries_schedule_and_trajectory() {
    let doc: Value = serde_json::from_str(&ok(&["search", "--d", "3", "--n", "5", "--format", "json"])).unwrap();
    assert_eq!(doc["schedule"]["steps"], 12);
    assert_eq!(doc["schedule"]["n_items"], 243);
    assert_eq!(doc["schedule"]["mode"], "deterministic");
    assert_eq!(doc["trajectory"].as_array().unwrap().len(), 13);
    assert_eq!(doc["peak_step"], 12);
    assert!(doc["peak_population"].as_f64().unwrap() > 0.999);
}

#[test]
fn repeated_runs_are_byte_identical() {
    let runs: [&[&str]; 4] = [
        &["search", "--d", "4", "--n", "3", "--f", "random:1234", "--diffusion", "gates"],
        &["search", "--d", "3", "--n", "3", "--f", "random:7", "--format", "json"],
        &["search", "--d", "3", "--n", "3", "--sweep", "26,0,13,5"],
        &["validate-f", "--d", "16", "--f", "random:42"],
    ];
    for args in runs {
        assert_eq!(ok(args), ok(args), "{args:?}");
    }
}

#[test]
fn seeds_change_the_gate_but_not_the_trajectory() {
    let a = ok(&["search", "--d", "3", "--n", "3", "--f", "random:1"]);
    let b = ok(&["search", "--d", "3", "--n", "3", "--f", "random:2"]);
    let (pa, pb) = (populations(&a), populations(&b));
    assert!(pa.iter().zip(&pb).all(|(x, y)| (x - y).abs() < 1e-10));
}

#[test]
fn custom_mode_needs_a_phase_and_takes_radians_only() {
    assert_eq!(exit_code(&["search", "--d", "3", "--n", "2", "--mode", "custom"]), 2);
    assert_eq!(exit_code(&["search", "--d", "3", "--n", "2", "--mode", "custom", "--phi", "90deg"]), 2);
    assert_eq!(exit_code(&["search", "--d", "3", "--n", "2", "--phi", "1.0"]), 2);
    let pops = populations(&ok(&["search", "--d", "2", "--n", "2", "--mode", "custom", "--phi", "3.141592653589793"]));
    // Default step count is round(pi/4 sqrt N) = 2.
    assert_eq!(pops.len(), 3);
    assert!((pops[1] - 1.0).abs() < 1e-12);
}

#[test]
fn steps_flag_overrides_the_schedule() {
    let pops = populations(&ok(&["search", "--d", "3", "--n", "2", "--steps", "10"]));
    assert_eq!(pops.len(), 11);
}

#[test]
fn other_usage_errors_exit_with_two() {
    for args in [
        &["search", "--d", "3", "--n", "2", "--marked", "9"][..],
        &["search", "--d", "3", "--n", "2", "--f", "walsh"],
        &["search", "--d", "3", "--n", "2", "--f", "random:x"],
        &["search", "--d", "3"],
        &["search", "--d", "3", "--n", "2", "--marked", "1", "--sweep", "1,2"],
        &["search", "--d", "3", "--n", "2", "--config", "/nonexistent/qsearch.json"],
        &["bogus"],
        &["validate-f", "--d", "1"],
        &["pulse-check", "--d", "1"],
        &["schedule", "--d", "3"],
    ] {
        assert_eq!(exit_code(args), 2, "{args:?}");
    }
}

#[test]
fn schedule_for_five_qutrits() {
    let rec = record(&ok(&["schedule", "--N", "243"]));
    assert_eq!(field(&rec, "j"), "12");
    assert_eq!(field(&rec, "n_g"), "12");
    assert_eq!(field(&rec, "canonical_steps"), "12");
    let phi: f64 = field(&rec, "phi").parse().unwrap();
    assert!((phi - 2.7296).abs() < 1e-3);
    assert_eq!(field(&rec, "phi"), "2.72910798445");
    assert_eq!(ok(&["schedule", "--d", "3", "--n", "5"]), ok(&["schedule", "--N", "243"]));
}

#[test]
fn schedule_for_four_items() {
    let rec = record(&ok(&["schedule", "--N", "4"]));
    assert_eq!(field(&rec, "j"), "2");
    assert_eq!(field(&rec, "n_g"), "3");
    // The phase is matched to the three-step run.
    assert_eq!(field(&rec, "phi"), "0.922442026906");
    let pops = populations(&ok(&["search", "--d", "2", "--n", "2"]));
    assert_eq!(pops.len(), 4);
    assert!((pops[3] - 1.0).abs() < 1e-12);
}

#[test]
fn schedule_rejects_a_single_item() {
    let out = qsearch(&["schedule", "--N", "1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("N >= 2"));
}

#[test]
fn schedule_sweep_keeps_input_order() {
    let csv = ok(&["schedule", "--sweep", "243,4,9"]);
    let sizes: Vec<&str> = csv.lines().skip(1).map(|l| l.split(',').next().unwrap()).collect();
    assert_eq!(sizes, ["243", "4", "9"]);
    let doc: Value = serde_json::from_str(&ok(&["schedule", "--sweep", "243,4", "--format", "json"])).unwrap();
    assert_eq!(doc[0]["n_g"], 12);
    assert_eq!(doc[1]["n_g"], 3);
}

#[test]
fn search_sweep_keeps_input_order() {
    let csv = ok(&["search", "--d", "3", "--n", "2", "--sweep", "8,0,4"]);
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("marked,step,population"));
    let marked: Vec<&str> = lines.map(|l| l.split(',').next().unwrap()).collect();
    assert_eq!(marked, ["8", "8", "8", "0", "0", "0", "4", "4", "4"]);
    let single = populations(&ok(&["search", "--d", "3", "--n", "2", "--marked", "4"]));
    let swept: Vec<f64> = csv.lines().skip(7).map(|l| l.rsplit(',').next().unwrap().parse().unwrap()).collect();
    assert_eq!(single, swept);
}

#[test]
fn config_file_with_flag_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    fs::write(&cfg, r#"{"d": 3, "n": 5, "marked": 7, "f": "dft", "format": "json", "steps": 20}"#).unwrap();
    let cfg = cfg.to_str().unwrap();

    let doc: Value = serde_json::from_str(&ok(&["search", "--config", cfg])).unwrap();
    assert_eq!(doc["config"]["marked"], 7);
    assert_eq!(doc["config"]["f"], "dft");
    assert_eq!(doc["trajectory"].as_array().unwrap().len(), 21);

    let csv = ok(&["search", "--config", cfg, "--format", "csv", "--steps", "12", "--f", "householder"]);
    let pops = populations(&csv);
    assert_eq!(pops.len(), 13);
    assert!(pops[12] > 0.999);

    let bad = dir.path().join("bad.json");
    fs::write(&bad, r#"{"d": 3, "n": 5, "angle_units": "deg"}"#).unwrap();
    assert_eq!(exit_code(&["search", "--config", bad.to_str().unwrap()]), 2);
}

#[test]
fn out_flag_writes_a_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("trajectory.csv");
    let out = qsearch(&["search", "--d", "3", "--n", "5", "--out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let written = fs::read_to_string(&path).unwrap();
    assert_eq!(written, ok(&["search", "--d", "3", "--n", "5"]));

    let missing = dir.path().join("no/such/dir/out.csv");
    assert_eq!(exit_code(&["search", "--d", "2", "--n", "2", "--out", missing.to_str().unwrap()]), 1);
}

#[test]
fn resonant_pulse_is_a_pi_reflection() {
    let rec = record(&ok(&["pulse-check", "--d", "3", "--deltaT", "0"]));
    let phi: f64 = field(&rec, "phi").parse().unwrap();
    let residual: f64 = field(&rec, "residual").parse().unwrap();
    assert!((phi - PI).abs() < 1e-4);
    assert!(residual < 1e-6);
}

#[test]
fn detuned_pulse_follows_the_phase_law() {
    let rec = record(&ok(&["pulse-check", "--d", "3", "--deltaT", "1"]));
    let phi: f64 = field(&rec, "phi").parse().unwrap();
    let analytic: f64 = field(&rec, "phi_analytic").parse().unwrap();
    assert!((phi - PI / 2.0).abs() < 1e-4);
    assert!((analytic - PI / 2.0).abs() < 1e-10);

    let doc: Value = serde_json::from_str(&ok(&["pulse-check", "--d", "3", "--deltaT", "-1", "--format", "json"])).unwrap();
    assert!((doc["phase"].as_f64().unwrap() + PI / 2.0).abs() < 1e-4);
    assert!((doc["analytic_phase"].as_f64().unwrap() + PI / 2.0).abs() < 1e-12);
}

#[test]
fn four_pi_area_is_refused() {
    let out = qsearch(&["pulse-check", "--d", "4", "--area", "12.566"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("area"));
}

#[test]
fn gaussian_pulses_are_judged_by_leakage() {
    let rec = record(&ok(&["pulse-check", "--d", "3", "--shape", "gaussian"]));
    assert_eq!(field(&rec, "phi_analytic"), "");
    let out = qsearch(&["pulse-check", "--d", "3", "--shape", "gaussian", "--deltaT", "0.5"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("leakage"));
}

#[test]
fn f_gates_validate() {
    for (d, f) in [("7", "dft"), ("3", "householder"), ("16", "random:42"), ("4", "pulse")] {
        let rec = record(&ok(&["validate-f", "--d", d, "--f", f]));
        assert_eq!(field(&rec, "pass"), "true");
        assert_eq!(field(&rec, "f"), f);
        assert!(field(&rec, "unitarity_defect").parse::<f64>().unwrap() < 1e-10);
        assert!(field(&rec, "column_moduli_deviation").parse::<f64>().unwrap() < 1e-10);
    }
    let doc: Value = serde_json::from_str(&ok(&["validate-f", "--d", "5", "--format", "json"])).unwrap();
    assert_eq!(doc["pass"], true);
    assert_eq!(doc["f"], "householder");
}

#[test]
fn pulse_derived_f_drives_a_search() {
    let pops = populations(&ok(&["search", "--d", "3", "--n", "5", "--f", "pulse"]));
    assert!(pops[12] > 0.999);
}
