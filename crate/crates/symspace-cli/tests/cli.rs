//! Process-level contract tests for the `symspace` binary: exit codes,
//! report schema and determinism, dataset round trips, flag/config/env
//! precedence, and error reporting with line numbers.

use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn binary() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_symspace"));
    cmd.env_remove("SYMSPACE_SEED");
    cmd
}

fn run(args: &[&str]) -> Output {
    binary().args(args).output().expect("binary spawns")
}

fn exit_code(output: &Output) -> i32 {
    output.status.code().expect("binary not killed by signal")
}

fn stdout(output: &Output) -> String {
    String::from_utf8_lossy(&output.stdout).into_owned()
}

fn stderr(output: &Output) -> String {
    String::from_utf8_lossy(&output.stderr).into_owned()
}

/// Parses a report and strips the one field allowed to differ between runs.
fn report_modulo_elapsed(raw: &str) -> Value {
    let mut v: Value = serde_json::from_str(raw).expect("report is valid JSON");
    let obj = v.as_object_mut().expect("report is a JSON object");
    assert!(
        obj.remove("elapsed_ms").is_some(),
        "report lacks elapsed_ms"
    );
    v
}

#[test]
fn no_arguments_prints_usage_on_stderr_and_exits_2() {
    let out = run(&[]);
    assert_eq!(exit_code(&out), 2);
    assert!(stderr(&out).contains("Usage: symspace"));
    assert!(stdout(&out).is_empty());
}

#[test]
fn unknown_suite_and_zero_threads_are_usage_errors() {
    let out = run(&["verify", "--suite", "nope"]);
    assert_eq!(exit_code(&out), 2);
    assert!(stderr(&out).contains("unknown suite `nope`"));

    let out = run(&["verify", "--suite", "attention", "--threads", "0"]);
    assert_eq!(exit_code(&out), 2);
    assert!(stderr(&out).contains("--threads"));

    let out = run(&["demo", "mlr", "--distance", "x"]);
    assert_eq!(exit_code(&out), 2);
    assert!(stderr(&out).contains("--distance must be g, h, or b"));
}

#[test]
fn report_files_match_the_schema_and_are_deterministic() {
    let dir = TempDir::new().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");

    let first = run(&[
        "verify",
        "--suite",
        "poincare",
        "--seed",
        "3",
        "--trials",
        "5",
        "--report",
        a.to_str().unwrap(),
    ]);
    assert_eq!(exit_code(&first), 0);
    // Same invocation with a different worker count must not change a byte
    // beyond elapsed_ms.
    let second = run(&[
        "verify",
        "--suite",
        "poincare",
        "--seed",
        "3",
        "--trials",
        "5",
        "--threads",
        "4",
        "--report",
        b.to_str().unwrap(),
    ]);
    assert_eq!(exit_code(&second), 0);

    let raw = std::fs::read_to_string(&a).unwrap();
    let v: Value = serde_json::from_str(&raw).unwrap();
    let obj = v.as_object().unwrap();
    let mut keys: Vec<_> = obj.keys().map(String::as_str).collect();
    keys.sort_unstable();
    assert_eq!(
        keys,
        ["checks", "clamp_events", "elapsed_ms", "seed", "suite"]
    );
    assert_eq!(obj["suite"], "poincare");
    assert_eq!(obj["seed"], 3);
    let checks = obj["checks"].as_array().unwrap();
    assert!(!checks.is_empty());
    for check in checks {
        let fields = check.as_object().unwrap();
        let mut names: Vec<_> = fields.keys().map(String::as_str).collect();
        names.sort_unstable();
        assert_eq!(
            names,
            ["max_error", "name", "passed", "tolerance", "trials"]
        );
        assert_eq!(fields["trials"], 5);
        assert!(fields["passed"].as_bool().unwrap());
    }

    let rerun = std::fs::read_to_string(&b).unwrap();
    assert_eq!(report_modulo_elapsed(&raw), report_modulo_elapsed(&rerun));
}

#[test]
fn report_dash_streams_json_to_stdout_and_the_table_to_stderr() {
    let out = run(&[
        "verify",
        "--suite",
        "attention",
        "--trials",
        "2",
        "--report",
        "-",
    ]);
    assert_eq!(exit_code(&out), 0);
    let v: Value = serde_json::from_str(&stdout(&out)).expect("stdout is pure JSON");
    assert_eq!(v["suite"], "attention");
    let table = stderr(&out);
    assert!(table.contains("result: PASS"));
    assert!(table.contains("attn_weight_simplex_le"));
}

#[test]
fn gen_synthetic_csv_round_trips_labels_through_the_demo_loader() {
    let dir = TempDir::new().unwrap();
    let csv_path = dir.path().join("points.csv");
    let out = run(&[
        "gen-synthetic",
        "--dim",
        "3",
        "--classes",
        "4",
        "--samples",
        "40",
        "--sigma",
        "0.05",
        "--seed",
        "9",
        "--out",
        csv_path.to_str().unwrap(),
    ]);
    assert_eq!(exit_code(&out), 0);
    assert!(stderr(&out).contains("wrote 40 rows"));

    // The label column must be exactly what the library sampler draws.
    let expected = symspace::training::gen_synthetic(3, 4, 40, 0.05, 9).unwrap();
    let raw = std::fs::read_to_string(&csv_path).unwrap();
    let mut lines = raw.lines();
    assert_eq!(lines.next(), Some("f0,f1,f2,label"));
    let labels: Vec<usize> = lines
        .map(|l| l.rsplit(',').next().unwrap().parse().unwrap())
        .collect();
    assert_eq!(&labels, expected.labels());

    // And the demo must ingest the file with the population intact.
    let demo = run(&[
        "demo",
        "mlr",
        "--data",
        csv_path.to_str().unwrap(),
        "--epochs",
        "1",
        "--seed",
        "9",
    ]);
    assert_eq!(exit_code(&demo), 0, "stderr: {}", stderr(&demo));
    assert!(stdout(&demo).contains("(40 points, dim 3, 4 classes)"));
}

#[test]
fn malformed_csv_rows_are_reported_with_line_numbers() {
    let dir = TempDir::new().unwrap();
    let write = |name: &str, body: &str| -> String {
        let p = dir.path().join(name);
        std::fs::write(&p, body).unwrap();
        p.to_str().unwrap().to_owned()
    };
    let demo = |path: &str| run(&["demo", "mlr", "--data", path, "--epochs", "1"]);

    let bad_cell = write("cell.csv", "f0,f1,label\n0.1,0.2,0\n0.3,oops,1\n");
    let out = demo(&bad_cell);
    assert_eq!(exit_code(&out), 1);
    assert!(stderr(&out).contains("line 3"), "stderr: {}", stderr(&out));
    assert!(stderr(&out).contains("f1"));

    let short_row = write("short.csv", "f0,f1,label\n0.1,0\n");
    let out = demo(&short_row);
    assert_eq!(exit_code(&out), 1);
    assert!(stderr(&out).contains("line 2"), "stderr: {}", stderr(&out));

    let bad_header = write("header.csv", "x,y,label\n0.1,0.2,0\n");
    let out = demo(&bad_header);
    assert_eq!(exit_code(&out), 1);
    assert!(stderr(&out).contains("header"), "stderr: {}", stderr(&out));

    let bad_label = write("label.csv", "f0,f1,label\n0.1,0.2,-1\n");
    let out = demo(&bad_label);
    assert_eq!(exit_code(&out), 1);
    assert!(stderr(&out).contains("line 2"), "stderr: {}", stderr(&out));
}

#[test]
fn seed_resolution_prefers_flag_then_config_then_env() {
    let dir = TempDir::new().unwrap();
    let config = dir.path().join("cfg");
    std::fs::write(&config, "seed=9\n").unwrap();
    let seed_of = |out: &Output| -> u64 {
        let v: Value = serde_json::from_str(&stdout(out)).unwrap();
        v["seed"].as_u64().unwrap()
    };
    let base = [
        "verify",
        "--suite",
        "attention",
        "--trials",
        "1",
        "--report",
        "-",
    ];

    let out = run(&base);
    assert_eq!(seed_of(&out), 7, "built-in default");

    let out = binary()
        .args(base)
        .env("SYMSPACE_SEED", "11")
        .output()
        .unwrap();
    assert_eq!(seed_of(&out), 11, "environment beats the default");

    let out = binary()
        .args(base)
        .args(["--config", config.to_str().unwrap()])
        .env("SYMSPACE_SEED", "11")
        .output()
        .unwrap();
    assert_eq!(seed_of(&out), 9, "config beats the environment");

    let out = binary()
        .args(base)
        .args(["--config", config.to_str().unwrap(), "--seed", "5"])
        .env("SYMSPACE_SEED", "11")
        .output()
        .unwrap();
    assert_eq!(seed_of(&out), 5, "flag beats everything");

    let out = binary()
        .args(base)
        .env("SYMSPACE_SEED", "abc")
        .output()
        .unwrap();
    assert_eq!(exit_code(&out), 2);
    assert!(stderr(&out).contains("SYMSPACE_SEED"));
}

#[test]
fn config_file_supplies_defaults_and_flags_override_them() {
    let dir = TempDir::new().unwrap();
    let config = dir.path().join("cfg");
    std::fs::write(
        &config,
        "# defaults for the smoke runs\nsuite=attention\ntrials=4\n",
    )
    .unwrap();

    let out = run(&[
        "--config",
        config.to_str().unwrap(),
        "verify",
        "--trials",
        "6",
        "--report",
        "-",
    ]);
    assert_eq!(exit_code(&out), 0, "stderr: {}", stderr(&out));
    let v: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["suite"], "attention", "suite comes from the config file");
    assert_eq!(v["checks"][0]["trials"], 6, "the flag overrides trials=4");

    let broken = dir.path().join("broken");
    std::fs::write(&broken, "trials=4\nwat\n").unwrap();
    let out = run(&["--config", broken.to_str().unwrap(), "verify"]);
    assert_eq!(exit_code(&out), 2);
    assert!(stderr(&out).contains("line 2"), "stderr: {}", stderr(&out));

    let unknown = dir.path().join("unknown");
    std::fs::write(&unknown, "speling=7\n").unwrap();
    let out = run(&["--config", unknown.to_str().unwrap(), "verify"]);
    assert_eq!(exit_code(&out), 2);
    assert!(stderr(&out).contains("speling"), "stderr: {}", stderr(&out));
}

#[test]
fn bench_prints_median_and_p90_and_always_exits_zero() {
    for op in ["dist-ball", "iwasawa", "attention"] {
        let out = run(&["bench", "--op", op, "--dim", "3", "--iters", "25"]);
        assert_eq!(exit_code(&out), 0, "op {op} stderr: {}", stderr(&out));
        let text = stdout(&out);
        assert!(text.contains(&format!("bench {op}  dim 3  iters 25")));
        assert!(text.contains("median"), "op {op}: {text}");
        assert!(text.contains("p90"), "op {op}: {text}");
    }

    let out = run(&["bench", "--dim", "3", "--iters", "25"]);
    assert_eq!(exit_code(&out), 2, "an op must be named");
}

#[test]
fn demo_prints_the_loss_table_and_final_accuracy() {
    let out = run(&[
        "demo",
        "mlr",
        "--distance",
        "g",
        "--samples",
        "60",
        "--epochs",
        "3",
        "--seed",
        "1",
    ]);
    assert_eq!(exit_code(&out), 0, "stderr: {}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("epoch  loss"));
    // Epoch 0 (initial) plus one line per trained epoch.
    for epoch in 0..=3 {
        assert!(
            text.lines()
                .any(|l| l.trim_start().starts_with(&format!("{epoch}  "))),
            "missing epoch {epoch} row in:\n{text}"
        );
    }
    assert!(text.contains("final train accuracy: "));
}
