//! End-to-end checks of the `degenlab` binary: pinned reference rows,
//! error-path exit codes, flag handling and CSV shape.

use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

fn write_config(name: &str, text: &str) -> PathBuf {
    let dir = std::env::temp_dir().join("degenlab-cli-tests");
    fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    fs::write(&path, text).unwrap();
    path
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_degenlab")).args(args).output().unwrap()
}

fn stdout_of(out: &Output) -> String {
    assert!(
        out.status.success(),
        "exit {:?}, stderr: {}",
        out.status.code(),
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout.clone()).unwrap()
}

const INTERVAL: &str = r#"
precision = 9

[domain]
variant = "interval"

[coefficient]
delta = 1.5

[layer]
r = 0.5
s = 0.25
samples = 200

[grid]
epsilon = 1e-4
cells = 192
grading = 3.0

[evolution]
dt = 1e-2
t_final = 0.05

[mollifier]
n = [10, 100]

[scan]
target = "classify"
parameter = "delta"
values = [0.5, 1.0, 1.5, 2.0]
"#;

const BALL: &str = r#"
[domain]
variant = "ball_interior"
dim = 3

[coefficient]
delta = 1.6

[layer]
r = 0.5
samples = 200
"#;

#[test]
fn classify_reports_the_self_adjoint_reference_case() {
    let cfg = write_config("classify-ball.toml", BALL);
    let text = stdout_of(&run(&["classify", cfg.to_str().unwrap()]));
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "config,domain,d,d_H,delta,verdict,provenance");
    let row = lines.next().unwrap();
    assert!(row.ends_with("self_adjoint,Thm3.1"), "row: {row}");
    assert!(row.contains(",ball_interior,3,2,"), "row: {row}");
    assert_eq!(lines.next(), None);
}

#[test]
fn deficiency_reports_the_limit_point_reference_case() {
    let cfg = write_config("deficiency-interval.toml", INTERVAL);
    let text = stdout_of(&run(&["deficiency", cfg.to_str().unwrap()]));
    let row = text.lines().nth(1).unwrap();
    assert!(row.contains(",0,0,limit_point"), "row: {row}");
    assert!(row.ends_with("true"), "row: {row}");
}

#[test]
fn scan_emits_one_row_per_value_in_input_order() {
    let cfg = write_config("scan-interval.toml", INTERVAL);
    let text = stdout_of(&run(&["scan", cfg.to_str().unwrap()]));
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 5, "{text}");
    assert_eq!(lines[0], "config,target,parameter,value,outcome,measure");
    let values: Vec<f64> = lines[1..]
        .iter()
        .map(|l| l.split(',').nth(3).unwrap().parse().unwrap())
        .collect();
    assert_eq!(values, vec![0.5, 1.0, 1.5, 2.0]);
    let outcomes: Vec<&str> = lines[1..].iter().map(|l| l.split(',').nth(4).unwrap()).collect();
    assert_eq!(
        outcomes,
        vec![
            "not_markov_unique",
            "markov_unique_not_self_adjoint",
            "critical_indeterminate",
            "self_adjoint"
        ]
    );
}

#[test]
fn malformed_config_exits_with_code_one_and_a_location() {
    let cfg = write_config("broken.toml", "[domain\nvariant = \"interval\"\n");
    let out = run(&["classify", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line 1"), "stderr: {err}");
}

#[test]
fn missing_block_exits_with_code_one() {
    let cfg = write_config("no-coefficient.toml", "[domain]\nvariant = \"interval\"\n");
    let out = run(&["classify", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("[coefficient]"));
}

#[test]
fn withheld_verdict_exits_with_code_one() {
    let cfg = write_config("withheld.toml", BALL);
    let out = run(&[
        "classify",
        cfg.to_str().unwrap(),
        "--set",
        "coefficient.delta=1.2",
        "--set",
        "coefficient.perturbation_gamma=0.5",
        "--set",
        "coefficient.perturbation_scale=1.0",
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("verdict withheld"));
}

#[test]
fn unknown_subcommand_prints_usage_and_exits_with_code_one() {
    let out = run(&["frobnicate", "x.toml"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("Usage"));
}

#[test]
fn out_flag_writes_the_same_csv_to_a_file() {
    let cfg = write_config("outflag.toml", BALL);
    let on_stdout = stdout_of(&run(&["classify", cfg.to_str().unwrap()]));
    let target = std::env::temp_dir().join("degenlab-cli-tests/outflag.csv");
    let out = run(&["classify", cfg.to_str().unwrap(), "--out", target.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    assert_eq!(fs::read_to_string(&target).unwrap(), on_stdout);
}

#[test]
fn precision_flag_controls_significant_digits() {
    let cfg = write_config("precision.toml", BALL);
    let text = stdout_of(&run(&["classify", cfg.to_str().unwrap(), "--precision", "4"]));
    assert!(text.contains(",1.600e0,"), "{text}");
}

#[test]
fn set_override_changes_the_verdict() {
    let cfg = write_config("override.toml", BALL);
    let text =
        stdout_of(&run(&["classify", cfg.to_str().unwrap(), "--set", "coefficient.delta=0.3"]));
    assert!(text.lines().nth(1).unwrap().contains("not_markov_unique"));
}

#[test]
fn conditions_and_witness_emit_ladder_rows() {
    let cfg = write_config("ladders.toml", INTERVAL);
    let conditions = stdout_of(&run(&["conditions", cfg.to_str().unwrap()]));
    assert_eq!(conditions.lines().count(), 5);
    let witness = stdout_of(&run(&[
        "witness",
        cfg.to_str().unwrap(),
        "--set",
        "coefficient.delta=1.25",
    ]));
    assert_eq!(witness.lines().next().unwrap(), "config,delta,epsilon,l2_partial,energy_partial,verdict");
    assert!(witness.lines().count() > 8);
    assert!(witness.lines().nth(1).unwrap().ends_with("confirmed"));
}

#[test]
fn every_row_starts_with_the_config_hash() {
    let cfg = write_config("hash-rows.toml", INTERVAL);
    let text = stdout_of(&run(&["scan", cfg.to_str().unwrap()]));
    let mut rows = text.lines().skip(1);
    let hash = rows.next().unwrap().split(',').next().unwrap().to_string();
    assert_eq!(hash.len(), 12);
    assert!(hash.chars().all(|c| c.is_ascii_hexdigit()));
    for row in rows {
        assert!(row.starts_with(&hash), "row: {row}");
    }
}
