use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use mlshade::harness::{read_records, ResultTable};

fn bench(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mlshade-bench"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn out_arg(dir: &Path) -> String {
    dir.to_str().unwrap().to_string()
}

#[test]
fn run_writes_table_and_records() {
    let dir = tempfile::tempdir().unwrap();
    let out = out_arg(dir.path());
    let o = bench(&[
        "run", "--problem", "sphere,ackley", "--dim", "3", "--runs", "4", "--budget", "1500", "--seed", "5", "--jobs", "2", "--out", &out,
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let table = ResultTable::read_csv(fs::File::open(dir.path().join("table.csv")).unwrap()).unwrap();
    assert_eq!(table.rows.len(), 2);
    assert_eq!(table.rows[0].problem, "sphere");
    let records = read_records(&dir.path().join("records.jsonl")).unwrap();
    assert_eq!(records.len(), 8);
    assert_eq!(records[5].problem, "ackley");
    assert_eq!(records[5].run, 1);
    assert_eq!(records[5].record.seed, 6);
    let text = fs::read_to_string(dir.path().join("table.txt")).unwrap();
    assert!(text.contains("E+") || text.contains("E-"));
    assert!(String::from_utf8_lossy(&o.stdout).contains("sphere"));
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("exp.cfg");
    fs::write(&cfg, "problems = sphere\ndim = 2\nruns = 2\nbudget = 400\nseed = 3\n").unwrap();
    let out = out_arg(&dir.path().join("res"));
    let o = bench(&["run", "--config", cfg.to_str().unwrap(), "--runs", "3", "--out", &out]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let records = read_records(&dir.path().join("res/records.jsonl")).unwrap();
    assert_eq!(records.len(), 3);
    assert_eq!(records[0].record.seed, 3);
}

#[test]
fn compare_writes_tally() {
    let dir = tempfile::tempdir().unwrap();
    let out = out_arg(dir.path());
    let o = bench(&[
        "compare", "--problem", "sphere,rastrigin", "--dim", "2", "--runs", "6", "--budget", "600",
        "--variant", "full", "--variant", "full", "--out", &out,
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = fs::read_to_string(dir.path().join("comparison.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines.len(), 4);
    assert!(lines[0].starts_with("problem,variant_a,variant_b"));
    assert!(lines[3].starts_with("tally,full,full"));
    assert!(lines[3].contains("0/2/0"));
}

#[test]
fn trace_from_fresh_run_and_from_records() {
    let dir = tempfile::tempdir().unwrap();
    let out = out_arg(dir.path());
    let o = bench(&["trace", "--problem", "sphere", "--dim", "2", "--runs", "2", "--budget", "400", "--out", &out]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let trace = fs::read_to_string(dir.path().join("trace.csv")).unwrap();
    assert!(trace.starts_with("problem,run,nfes,best_f\n"));
    let rows = trace.lines().count() - 1;
    assert!(rows > 2);

    let other = tempfile::tempdir().unwrap();
    let records = dir.path().join("records.jsonl");
    let o = bench(&["trace", "--records", records.to_str().unwrap(), "--out", &out_arg(other.path())]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(fs::read_to_string(other.path().join("trace.csv")).unwrap(), trace);
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let out = out_arg(dir.path());
    // unknown problem: configuration error, nothing run
    let o = bench(&["run", "--problem", "nosuch", "--out", &out]);
    assert_eq!(o.status.code(), Some(1));
    assert!(!dir.path().join("table.csv").exists());
    // bad variant
    let o = bench(&["run", "--problem", "sphere", "--variant", "fastest", "--out", &out]);
    assert_eq!(o.status.code(), Some(1));
    // compare needs two variants
    let o = bench(&["compare", "--problem", "sphere", "--variant", "full", "--out", &out]);
    assert_eq!(o.status.code(), Some(1));
    // unknown flag
    let o = bench(&["run", "--speed", "3"]);
    assert_eq!(o.status.code(), Some(1));
    // unwritable output: runtime error
    let blocker = dir.path().join("file");
    fs::write(&blocker, "x").unwrap();
    let o = bench(&[
        "run", "--problem", "sphere", "--dim", "2", "--runs", "1", "--budget", "100", "--out", blocker.join("sub").to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn shift_rotate_problem_from_data_dir() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("shift.txt"), "1 -2\n0 1\n-1 0\n").unwrap();
    let out = out_arg(&dir.path().join("res"));
    let o = bench(&[
        "run", "--problem", "sphere@shift.txt", "--dim", "2", "--runs", "2", "--budget", "2000",
        "--data-dir", dir.path().to_str().unwrap(), "--out", &out,
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let records = read_records(&dir.path().join("res/records.jsonl")).unwrap();
    assert_eq!(records[0].problem, "sphere@shift.txt");
    assert!((records[0].record.best_x[0] - 1.0).abs() < 1e-2);
    assert!((records[0].record.best_x[1] + 2.0).abs() < 1e-2);

    let o = bench(&["run", "--problem", "sphere@missing.txt", "--dim", "2", "--data-dir", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
}
