//! End-to-end tests of the `qes2d` binary: exit codes, stream separation,
//! deterministic output, config-file precedence, and spot checks of the
//! emitted numbers.

use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_qes2d"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf-8 stdout")
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).expect("utf-8 stderr")
}

fn temp_path(name: &str) -> PathBuf {
    let mut p = std::env::temp_dir();
    p.push(format!("qes2d-cli-test-{}-{name}", std::process::id()));
    p
}

#[test]
fn spectrum_emits_the_degree_two_multiplet() {
    let out = run(&[
        "spectrum", "--model", "v1", "--omega", "1", "--k1", "0", "--k2", "1.5", "--sign2", "+",
        "--n", "2",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let data = stdout(&out);
    assert!(data.contains("\"model\": \"v1\""));
    assert!(data.contains("\"energy\": 7.5000000000000000e0"));
    // lambda = +-sqrt(32 w (3 + 2 k2)) = +-sqrt(192) and 0
    assert!(data.contains("-1.3856406460551018e1"));
    assert!(data.contains("\"lambda\": 1.3856406460551018e1"));
    assert!(data.contains("\"q1\": 1"));
    assert!(data.contains("\"zeros\""));
    // summary goes to stderr when the data goes to stdout
    assert!(stderr(&out).contains("spectrum of v1"));
}

#[test]
fn identical_invocations_are_byte_identical() {
    let args = ["spectrum", "--model", "v2", "--n", "3", "--d2", "2"];
    let first = run(&args);
    let second = run(&args);
    assert_eq!(first.status.code(), Some(0));
    assert_eq!(first.stdout, second.stdout);
}

#[test]
fn output_file_matches_stdout_data() {
    let path = temp_path("spectrum.json");
    let piped = run(&["spectrum", "--n", "1"]);
    let filed = run(&["spectrum", "--n", "1", "--output", path.to_str().unwrap()]);
    assert_eq!(filed.status.code(), Some(0));
    let written = std::fs::read_to_string(&path).expect("output file written");
    assert_eq!(written, stdout(&piped));
    // with --output the summary moves to stdout
    assert!(stdout(&filed).contains("spectrum of v1"));
    std::fs::remove_file(&path).ok();
}

#[test]
fn config_file_fills_gaps_and_flags_win() {
    let path = temp_path("run.cfg");
    std::fs::write(&path, "# test config\nmodel = v1\nomega = 2\nk2 = 0.25\nsign2 = -\nn = 1\n")
        .unwrap();
    let out = run(&["spectrum", "--config", path.to_str().unwrap(), "--omega", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let data = stdout(&out);
    // omega comes from the flag, everything else from the file
    assert!(data.contains("\"omega\": 1.0000000000000000e0"));
    assert!(data.contains("\"k2\": 2.5000000000000000e-1"));
    assert!(data.contains("\"sign2\": \"-\""));
    assert!(data.contains("\"n\": 1"));
    std::fs::remove_file(&path).ok();
}

#[test]
fn unknown_config_key_exits_2_listing_valid_keys() {
    let path = temp_path("bad.cfg");
    std::fs::write(&path, "model = v1\nbogus = 3\n").unwrap();
    let out = run(&["spectrum", "--config", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let err = stderr(&out);
    assert!(err.contains("unknown key `bogus`"));
    assert!(err.contains("omega"));
    assert!(err.contains("sign2"));
    std::fs::remove_file(&path).ok();
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(run(&["spectrum", "--bogus"]).status.code(), Some(2));
    assert_eq!(run(&["spectrum", "--omega", "abc"]).status.code(), Some(2));
    assert_eq!(run(&["spectrum", "--model", "v3"]).status.code(), Some(2));
    assert_eq!(run(&["eigvec", "--n", "2", "--q", "5"]).status.code(), Some(2));
    assert_eq!(run(&["limits", "--model", "v1"]).status.code(), Some(2));
    assert_eq!(run(&["gram", "--basis", "polar"]).status.code(), Some(2));
}

#[test]
fn inadmissible_branch_exits_2_naming_the_rule() {
    let out = run(&["spectrum", "--k2", "0.75", "--sign2", "-"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("minus branch requires k2 < 1/2"));
}

#[test]
fn io_failure_exits_4() {
    let out = run(&["spectrum", "--output", "/nonexistent-dir/out.json"]);
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn thread_cap_is_honored_and_validated() {
    let ok = bin()
        .args(["spectrum", "--n", "1"])
        .env("QES_THREADS", "1")
        .output()
        .unwrap();
    assert_eq!(ok.status.code(), Some(0));
    let bad = bin()
        .args(["spectrum", "--n", "1"])
        .env("QES_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(2));
    assert!(stderr(&bad).contains("QES_THREADS"));
}

#[test]
fn wavefn_csv_has_the_documented_shape() {
    let out = run(&[
        "wavefn", "--n", "1", "--q", "1", "--u1-count", "4", "--u2-count", "3",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let data = stdout(&out);
    let lines: Vec<&str> = data.lines().collect();
    assert_eq!(lines[0], "u1,u2,x,y,value");
    assert_eq!(lines.len(), 1 + 4 * 3);
    for line in &lines[1..] {
        assert_eq!(line.split(',').count(), 5);
        for field in line.split(',') {
            field.parse::<f64>().expect("numeric CSV field");
        }
    }
}

#[test]
fn sepconst_concentric_limit_uses_the_closed_form() {
    // v2 defaults (k1=0.5+, k2=1.5+): sk1 + sk2 = 2, n=1 gives
    // lambda = -(2m + 3)^2 for m = 1, 0 -> -25, -9.
    let out = run(&["sepconst", "--d2", "0", "--n", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let data = stdout(&out);
    assert!(data.contains("\"concentric_limit\": true"));
    assert!(data.contains("-2.5000000000000000e1"));
    assert!(data.contains("-9.0000000000000000e0"));
}

#[test]
fn checking_commands_report_their_verdicts() {
    let gram = run(&["gram", "--model", "v2", "--basis", "elliptic", "--n", "3"]);
    assert_eq!(gram.status.code(), Some(0));
    assert!(stdout(&gram).contains("\"pass\": true"));

    let inter = run(&["interbasis", "--n", "2", "--method", "closed-sum"]);
    assert_eq!(inter.status.code(), Some(0));
    assert!(stdout(&inter).contains("\"pass\": true"));

    let niven = run(&["niven", "--n", "4"]);
    assert_eq!(niven.status.code(), Some(0));
    assert!(stdout(&niven).contains("\"pass\": true"));

    let axis = run(&["oracle", "--check", "axis", "--axis", "eta", "--grid", "800"]);
    assert_eq!(axis.status.code(), Some(0));
    assert!(stdout(&axis).contains("\"pass\": true"));

    let tail = run(&["asymptotics", "--model", "v2", "--d2", "2"]);
    assert_eq!(tail.status.code(), Some(0));
    assert!(stdout(&tail).contains("\"pass\": true"));
}

#[test]
fn closed_sum_requires_zero_tilt() {
    let out = run(&["interbasis", "--k1", "1", "--method", "closed-sum"]);
    assert_eq!(out.status.code(), Some(2));
}
