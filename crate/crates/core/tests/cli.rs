//! End-to-end checks of the `coarse-bell` binary: exit codes, output
//! formats and the thread-count environment variable.

use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_coarse-bell"))
        .args(args)
        .env_remove("COARSE_BELL_THREADS")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn bell_max_writes_csv_with_metadata() {
    let o = run(&["bell-max", "--v", "1", "--d", "1.1", "--restarts", "2"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    for key in ["# tool: coarse-bell", "# command: bell-max", "# seed: 0", "# config_hash: ", "# config: {"] {
        assert!(text.contains(key), "missing {key:?} in\n{text}");
    }
    let row = text.lines().last().unwrap();
    let b: f64 = row.split(',').nth(3).unwrap().parse().unwrap();
    assert!(b > 2.0 && b < 2.0 * 2f64.sqrt());
}

#[test]
fn json_mirrors_csv() {
    let csv = stdout(&run(&["entropy", "--v", "1", "--d", "1:2:2", "--samples", "10000"]));
    let json = stdout(&run(&["entropy", "--v", "1", "--d", "1:2:2", "--samples", "10000", "--format", "json"]));
    let v: serde_json::Value = serde_json::from_str(&json).unwrap();
    let hash = v["meta"]["config_hash"].as_str().unwrap();
    assert!(csv.contains(hash));
    assert_eq!(v["rows"].as_array().unwrap().len(), 2);
    assert_eq!(v["rows"][1]["d"], serde_json::json!(2.0));
}

#[test]
fn output_file_and_threads_env() {
    let path = std::env::temp_dir().join(format!("coarse-bell-cli-{}.csv", std::process::id()));
    let o = Command::new(env!("CARGO_BIN_EXE_coarse-bell"))
        .args(["leggett-scan", "--d", "1.1", "--restarts", "2", "-o"])
        .arg(&path)
        .env("COARSE_BELL_THREADS", "1")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let text = std::fs::read_to_string(&path).unwrap();
    std::fs::remove_file(&path).ok();
    assert!(text.contains("L_script"));
    // the thread count is not part of the configuration hash
    let again = stdout(&run(&["leggett-scan", "--d", "1.1", "--restarts", "2"]));
    let hash = |t: &str| t.lines().find(|l| l.starts_with("# config_hash")).unwrap().to_string();
    assert_eq!(hash(&text), hash(&again));
}

#[test]
fn configuration_errors_exit_2() {
    for args in [
        vec!["bell-max", "--v", "0.5", "--d", "1"],
        vec!["bell-max", "--d", "1", "--eta", "1.5"],
        vec!["bell-max", "--d", "1", "--family", "alt", "--backend", "analytic"],
        vec!["bell-surface", "--d", "3:1:4"],
        vec!["entropy", "--v", "1", "--d", "1", "--samples", "10"],
        vec!["leggett-scan", "--d", "1", "--family", "alt", "--gate", "ideal"],
        vec!["figure", "--id", "3z"],
    ] {
        assert_eq!(run(&args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn non_convergence_exits_3_but_still_writes() {
    let o = run(&["bell-max", "--v", "1", "--d", "1.1", "--restarts", "1", "--max-iters", "3"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stdout(&o).lines().last().unwrap().ends_with("false"));
}

#[test]
fn validate_quick_exits_0() {
    let o = run(&["validate", "quick"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains(", 0 failed"));
}
