use std::fs;
use std::process::Command;

use csl_cutoff_cli::{run_with, CliError};

fn run(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let mut argv = vec!["csl-cutoff"];
    argv.extend_from_slice(args);
    let code = run_with(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn value_of(text: &str, key: &str) -> f64 {
    text.lines()
        .find_map(|l| l.strip_prefix(key).map(|v| v.trim().parse().unwrap()))
        .unwrap_or_else(|| panic!("no `{key}` in\n{text}"))
}

fn binary() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_csl-cutoff"));
    c.env_remove("CSL_CUTOFF_CONFIG");
    c
}

#[test]
fn collapse_time_of_the_flash_write() {
    let (code, out, _) = run(&["collapse-time", "--preset", "flash-500mA", "--cutoff", "white"]);
    assert_eq!(code, 0);
    let t_c = value_of(&out, "t_c_s");
    assert!((t_c / 1.295e-6 - 1.0).abs() < 1e-3, "{t_c}");
}

#[test]
fn colored_collapse_time_needs_a_cutoff_frequency() {
    let (code, _, err) = run(&["collapse-time", "--cutoff", "lorentzian"]);
    assert_eq!(code, 1);
    assert!(err.contains("--omega-m"));
    let (code, out, _) = run(&["collapse-time", "--cutoff", "lorentzian", "--omega-m", "1e3"]);
    assert_eq!(code, 0);
    assert!(value_of(&out, "t_c_s") > 1.295e-6);
}

#[test]
fn fluctuation_bound_for_i() {
    let (code, out, _) = run(&["fluct-bound", "--measure", "I", "--t-m", "1e-4"]);
    assert_eq!(code, 0);
    let line = out.lines().nth(1).unwrap();
    let omega: f64 = line.split_whitespace().last().unwrap().parse().unwrap();
    assert!((omega / 1e5 - 1.0).abs() < 0.05, "{omega}");
}

fn parse_csv(text: &str) -> (Vec<String>, Vec<Vec<f64>>) {
    let mut lines = text.lines().filter(|l| !l.starts_with('#'));
    let header = lines.next().unwrap().split(',').map(String::from).collect();
    let rows = lines
        .map(|l| l.split(',').map(|c| c.parse().unwrap()).collect())
        .collect();
    (header, rows)
}

#[test]
fn lambda_curve_has_the_cutoff_ordering() {
    let args = [
        "lambda-curve",
        "--cutoff",
        "lorentzian",
        "--omega-m",
        "1e6,1e8,4e10",
        "--t-grid",
        "log:1e-12:1e-3:200",
    ];
    let (code, out, _) = run(&args);
    assert_eq!(code, 0);
    let (header, rows) = parse_csv(&out);
    assert_eq!(
        header,
        ["t", "lambda_lorentzian_1e6", "lambda_lorentzian_1e8", "lambda_lorentzian_4e10", "lambda_white"]
    );
    assert_eq!(rows.len(), 200);
    for r in &rows {
        assert!(r[1] <= r[2] && r[2] <= r[3] && r[3] <= r[4], "{r:?}");
        assert!((r[4] / (r[0] / 2.0) - 1.0).abs() < 1e-8);
    }
    // Nine significant digits.
    let first = out.lines().nth(1).unwrap();
    assert_eq!(first.split(',').next().unwrap(), "1.00000000e-12");
    let (_, again, _) = run(&args);
    assert_eq!(out, again);
}

#[test]
fn cutoff_bound_summary_and_curve_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("fig3.csv");
    let p = path.to_str().unwrap();
    let (code, out, _) = run(&["cutoff-bound", "--output", p]);
    assert_eq!(code, 0);
    assert_eq!(out.lines().count(), 5);
    let first = fs::read_to_string(&path).unwrap();
    assert!(first.starts_with("# bulk_heating_bound,4.00000000e10\nomega_m,t_c_nand-13.8mA,t_c_flash-500mA\n"));
    let (_, rows) = parse_csv(&first);
    assert_eq!(rows.len(), 141);
    for col in 1..3 {
        assert!(rows.windows(2).all(|w| w[1][col] <= w[0][col]));
    }
    run(&["cutoff-bound", "--output", p]);
    assert_eq!(first, fs::read_to_string(&path).unwrap());
}

#[test]
fn report_annotates_the_two_known_discrepancies() {
    let (code, out, _) = run(&["report"]);
    assert_eq!(code, 0);
    let annotated: Vec<&str> = out
        .lines()
        .filter(|l| l.contains("ANNOTATED"))
        .map(|l| l.split_whitespace().next().unwrap())
        .collect();
    assert_eq!(annotated, ["rescale-13.8mA-1e-4", "heat-gamma-quoted"]);
    assert!(out.contains("0 deviating"));
}

#[test]
fn heating_and_ions_reports() {
    let (code, out, _) = run(&["heating"]);
    assert_eq!(code, 0);
    assert!((value_of(&out, "temperature_rise_k") / 1.24e-8 - 1.0).abs() < 0.01);
    assert!(value_of(&out, "gamma") <= 1e-16);
    let (code, out, _) = run(&["ions", "--preset", "detection-2mA"]);
    assert_eq!(code, 0);
    let n: f64 = out.lines().nth(1).unwrap().split_whitespace().nth(3).unwrap().parse().unwrap();
    assert!((n / 4.46e18 - 1.0).abs() < 0.01);
}

#[test]
fn usage_errors_exit_with_one() {
    assert_eq!(run(&["no-such-command"]).0, 1);
    assert_eq!(run(&["collapse-time", "--preset", "nope"]).0, 1);
    assert_eq!(run(&["lambda-curve", "--t-grid", "log:1:0.1:10"]).0, 1);
    assert_eq!(run(&["lambda-curve", "--omega-m", "1e8,1e6"]).0, 1);
    assert_eq!(run(&["fluct-bound", "--threshold", "1.5"]).0, 1);
    assert_eq!(run(&["--help"]).0, 0);
}

#[test]
fn solver_failures_exit_with_two() {
    let (code, _, err) = run(&["cutoff-bound", "--preset", "detection-2mA", "--t-m", "1e-8"]);
    assert_eq!(code, 2);
    assert!(err.contains("does not collapse"));
}

#[test]
fn verification_failure_maps_to_three() {
    assert_eq!(CliError::Verification("x".into()).exit_code(), 3);
    assert_eq!(CliError::Model(csl_cutoff::Error::MaxIterations { iterations: 1 }).exit_code(), 2);
}

#[test]
fn config_file_and_flag_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("run.toml");
    fs::write(&path, "[scenario]\npreset = \"nand-13.8mA\"\n[collapse]\nlambda = 8e-9\n").unwrap();
    let p = path.to_str().unwrap();
    let (code, out, _) = run(&["--config", p, "collapse-time"]);
    assert_eq!(code, 0);
    assert!(out.contains("nand-13.8mA"));
    // Γ ∝ λ t³ for white noise.
    let expected = 4.28544e-6 * (1e-8f64 / 8e-9).powf(1.0 / 3.0);
    assert!((value_of(&out, "t_c_s") / expected - 1.0).abs() < 1e-4);
    let (_, out, _) = run(&["--config", p, "collapse-time", "--preset", "flash-500mA"]);
    assert!(out.contains("flash-500mA"));

    fs::write(&path, "[collapse]\nlamda = 1\n").unwrap();
    assert_eq!(run(&["--config", p, "report"]).0, 1);
    assert_eq!(run(&["--config", "/nonexistent/run.toml", "report"]).0, 1);
}

#[test]
fn config_path_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("env.toml");
    fs::write(&path, "[scenario]\npreset = \"detection-2mA\"\n").unwrap();
    let output = binary()
        .env("CSL_CUTOFF_CONFIG", &path)
        .args(["collapse-time"])
        .output()
        .unwrap();
    assert!(output.status.success());
    let out = String::from_utf8(output.stdout).unwrap();
    assert!((value_of(&out, "t_c_s") / 8.16e-6 - 1.0).abs() < 0.01);
}

#[test]
fn binary_exit_codes() {
    assert_eq!(binary().arg("bogus").output().unwrap().status.code(), Some(1));
    let solver = binary()
        .args(["cutoff-bound", "--preset", "detection-2mA", "--t-m", "1e-8"])
        .output()
        .unwrap();
    assert_eq!(solver.status.code(), Some(2));
}

#[test]
fn mc_verify_passes_and_dumps_a_trajectory() {
    let dir = tempfile::tempdir().unwrap();
    let dump = dir.path().join("traj.csv");
    let (code, out, err) = run(&["mc-verify", "--dump-trajectory", dump.to_str().unwrap()]);
    assert_eq!(code, 0, "{out}{err}");
    assert_eq!(out.lines().filter(|l| l.starts_with("PASS") || l.starts_with("FAIL")).count(), 13);
    let traj = fs::read_to_string(&dump).unwrap();
    assert!(traj.starts_with("index,time,value\n0,0.00000000e0,"));
    assert_eq!(traj.lines().count(), 10_002);
}
