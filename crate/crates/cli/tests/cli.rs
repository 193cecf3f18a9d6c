use std::fs;

use latshell_cli::{run_with, EXIT_FAIL, EXIT_PASS, EXIT_USAGE};

struct Run {
    code: i32,
    stdout: String,
    stderr: String,
}

fn latshell(args: &[&str]) -> Run {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("latshell").chain(args.iter().copied());
    let code = run_with(argv, &mut out, &mut err);
    Run { code, stdout: String::from_utf8(out).unwrap(), stderr: String::from_utf8(err).unwrap() }
}

fn data_lines(csv: &str) -> Vec<&str> {
    csv.lines().filter(|l| !l.starts_with('#')).collect()
}

#[test]
fn count_shell_example() {
    let r = latshell(&["count-shell", "--body", "ball", "--dim", "2", "--R", "5", "--delta", "0"]);
    assert_eq!(r.code, EXIT_PASS, "{}", r.stderr);
    let lines = data_lines(&r.stdout);
    assert_eq!(lines[0], "body,dim,R,delta,convention,count,method,wall_time");
    assert!(lines[1].starts_with("ball,2,5,0,closed,12,fiber,"), "{}", lines[1]);
    assert!(r.stdout.starts_with("# latshell "));
    assert!(r.stdout.contains("# config_sha256: "));
}

#[test]
fn brute_and_fiber_agree_through_the_cli() {
    let base = ["count-shell", "--body", "ellipsoid", "--matrix", "2,1;1,3", "--R", "3:9:3/2", "--delta", "1/2", "--no-timing"];
    let fiber = latshell(&base);
    let brute = latshell(&[&base[..], &["--method", "brute"]].concat());
    let counts = |s: &str| data_lines(s)[1..].iter().map(|l| l.split(',').nth(5).unwrap().to_string()).collect::<Vec<_>>();
    assert_eq!(counts(&fiber.stdout), counts(&brute.stdout));
    assert_eq!(counts(&fiber.stdout).len(), 5);
}

#[test]
fn fit_with_one_row_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.csv");
    fs::write(&path, "# comment\nq,count\n8,697\n").unwrap();
    let r = latshell(&["fit", "--input", path.to_str().unwrap()]);
    assert_eq!(r.code, EXIT_USAGE);
    assert!(r.stderr.contains("degenerate regression"), "{}", r.stderr);
}

#[test]
fn fit_reads_our_own_csv() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("sharp.csv");
    let r = latshell(&["sharpness-demo", "--t", "2:8", "--out", csv.to_str().unwrap()]);
    assert_eq!(r.code, EXIT_PASS, "{}", r.stderr);
    let r = latshell(&["fit", "--input", csv.to_str().unwrap(), "--expect-slope", "2.6667", "--slope-tol", "0.1", "--summary", "-"]);
    assert_eq!(r.code, EXIT_PASS, "{}", r.stderr);
    assert!(r.stdout.contains("\"slope\": 2.61878647017"), "{}", r.stdout);
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(latshell(&["frobnicate"]).code, EXIT_USAGE);
    assert_eq!(latshell(&["preset", "nope"]).code, EXIT_USAGE);
    assert_eq!(latshell(&["count-shell", "--dim", "2"]).code, EXIT_USAGE);
    let r = latshell(&["count-shell", "--body", "pball", "--p", "3", "--dim", "2", "--R", "1"]);
    assert_eq!(r.code, EXIT_USAGE);
    assert!(r.stderr.contains("`body`"), "{}", r.stderr);
    let r = latshell(&["ma-check", "--phase", "parabolic"]);
    assert_eq!(r.code, EXIT_USAGE);
    assert!(r.stderr.contains("`seed`"), "{}", r.stderr);
    let r = latshell(&["energy-scan", "--s", "2", "--q", "8,16,32,64"]);
    assert_eq!(r.code, EXIT_USAGE);
    assert_eq!(latshell(&["--workers", "0", "count-shell", "--dim", "2", "--R", "1"]).code, EXIT_USAGE);
}

#[test]
fn tolerance_failures_exit_1() {
    let r = latshell(&["sharpness-demo", "--t", "2:5", "--slope-tol", "0.001"]);
    assert_eq!(r.code, EXIT_FAIL);
    assert!(r.stderr.contains("FAIL"));
}

#[test]
fn config_file_values_are_overridden_by_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    fs::write(&cfg, r#"{"body": "ball", "dim": 2, "R": [5, 10], "delta": "1/2", "no_timing": true}"#).unwrap();
    let r = latshell(&["count-shell", "--config", cfg.to_str().unwrap()]);
    assert_eq!(r.code, EXIT_PASS, "{}", r.stderr);
    let rows = data_lines(&r.stdout);
    assert_eq!(rows.len(), 3);
    assert!(rows[1].starts_with("ball,2,5,1/2,closed,"));
    assert!(rows[1].ends_with(",fiber,NA"));
    let r = latshell(&["count-shell", "--config", cfg.to_str().unwrap(), "--R", "7"]);
    let rows = data_lines(&r.stdout);
    assert_eq!(rows.len(), 2);
    assert!(rows[1].starts_with("ball,2,7,1/2,"));

    fs::write(&cfg, r#"{"dim": 2, "R": 3, "radius": 4}"#).unwrap();
    let r = latshell(&["count-shell", "--config", cfg.to_str().unwrap()]);
    assert_eq!(r.code, EXIT_USAGE);
    assert!(r.stderr.contains("radius"));
    fs::write(&cfg, "{not json").unwrap();
    assert_eq!(latshell(&["count-shell", "--config", cfg.to_str().unwrap()]).code, EXIT_USAGE);
}

#[test]
fn summary_json_is_flat() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("pairs.csv");
    let r = latshell(&[
        "count-pairs", "--phase", "parabolic", "--dim", "2", "--t", "1:4", "--expect-slope", "0.67", "--slope-tol", "0.2",
        "--out", out.to_str().unwrap(),
    ]);
    assert!(r.code == EXIT_PASS || r.code == EXIT_FAIL, "{}", r.stderr);
    let summary: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.path().join("pairs.json")).unwrap()).unwrap();
    let obj = summary.as_object().unwrap();
    let mut keys: Vec<&str> = obj.keys().map(String::as_str).collect();
    keys.sort();
    assert_eq!(keys, ["experiment", "params", "pass", "results"]);
    assert_eq!(obj["experiment"], "count-pairs");
    assert_eq!(obj["params"]["phase"], "parabolic");
}

#[test]
fn worker_count_does_not_change_output() {
    let args = ["count-pairs", "--phase", "diff_gauge", "--dim", "2", "--q", "4:20:4", "--delta", "0,1/3", "--no-timing"];
    let one = latshell(&[&["--workers", "1"][..], &args].concat());
    let eight = latshell(&[&["--workers", "8"][..], &args].concat());
    assert_eq!(one.code, EXIT_PASS);
    assert_eq!(one.stdout, eight.stdout);
    let e1 = latshell(&["energy-scan", "--s", "1.5", "--q", "4,8,16,32", "--no-timing", "--workers", "1", "--summary", "-"]);
    let e8 = latshell(&["energy-scan", "--s", "1.5", "--q", "4,8,16,32", "--no-timing", "--workers", "8", "--summary", "-"]);
    assert_eq!(e1.stdout, e8.stdout);
}

#[test]
fn preset_list_names_every_preset() {
    let r = latshell(&["preset", "list"]);
    assert_eq!(r.code, EXIT_PASS);
    for name in ["sharpness-d2", "theorem-envelope-d2", "discrepancy-d3", "energy-isotropic", "energy-anisotropic", "dyadic", "ma-certify", "perf-d3"] {
        assert!(r.stdout.contains(name));
    }
}

#[test]
fn workers_fall_back_to_the_environment() {
    let bin = env!("CARGO_BIN_EXE_latshell");
    let args = ["sharpness-demo", "--t", "2:6", "--no-timing"];
    let a = std::process::Command::new(bin).args(args).env("LATSHELL_WORKERS", "1").output().unwrap();
    let b = std::process::Command::new(bin).args(args).env("LATSHELL_WORKERS", "3").output().unwrap();
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let bad = std::process::Command::new(bin).args(args).env("LATSHELL_WORKERS", "many").output().unwrap();
    assert_eq!(bad.status.code(), Some(EXIT_USAGE));
}
