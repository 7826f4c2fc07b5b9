use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use eigenframe::format::{
    from_json, BoundsFile, FrameFile, RegionFile, TableFile, ValidationFile, VerificationFile,
    VerticesFile,
};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_eigenframe"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr_kind(o: &Output) -> String {
    let v: serde_json::Value = serde_json::from_slice(&o.stderr).expect("error JSON on stderr");
    v["error"].as_str().unwrap().to_string()
}

fn path(dir: &Path, name: &str) -> String {
    dir.join(name).to_str().unwrap().to_string()
}

#[test]
fn closed_form_point_reproduces_reference_untf() {
    let dir = tempfile::tempdir().unwrap();
    let frame = path(dir.path(), "frame.json");
    let o = run(&["untf53", "frame", "--x", "0", "--y", "0.3333333333", "-o", &frame]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));

    let file: FrameFile = from_json(&fs::read_to_string(&frame).unwrap()).unwrap();
    let (s5, s6) = (5f64.sqrt(), 6f64.sqrt());
    let expect = [
        [1.0, 0.0, 0.0],
        [2.0 / 3.0, s5 / 3.0, 0.0],
        [-1.0 / s6, s5 / s6, 0.0],
        [-1.0 / 6.0, s5 / 6.0, s5 / s6],
        [1.0 / 6.0, -s5 / 6.0, s5 / s6],
    ];
    for (got, want) in file.columns.iter().zip(expect) {
        for (a, b) in got.iter().zip(want) {
            assert!((a - b).abs() < 1e-8, "{got:?} vs {want:?}");
        }
    }

    let o = run(&["frame", "verify", &frame, "--lambda", "1.6666666666666667,1.6666666666666667,1.6666666666666667", "--mu", "1,1,1,1,1"]);
    assert_eq!(o.status.code(), Some(0));
    let report: VerificationFile = from_json(&stdout(&o)).unwrap();
    assert!(report.spectrum_ok && report.lengths_ok && report.tight);
}

#[test]
fn interior_point_passes_closed_form_check() {
    let o = run(&["untf53", "frame", "--x", "0.2", "--y", "0.5"]);
    assert_eq!(o.status.code(), Some(0));
    let file: FrameFile = from_json(&stdout(&o)).unwrap();
    assert_eq!(file.n, 5);
    assert!(file.eigenbasis.is_some());
}

#[test]
fn outside_point_exits_one() {
    let o = run(&["untf53", "region", "--x", "0.5", "--y", "0.4"]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(stderr_kind(&o), "outside_region");
    let r: RegionFile = from_json(&stdout(&o)).unwrap();
    assert!(!r.inside);

    let o = run(&["untf53", "region", "--x", "0.2", "--y", "0.5"]);
    assert_eq!(o.status.code(), Some(0));

    let o = run(&["untf53", "frame", "--x", "-0.1", "--y", "0.5"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn vertices_listing() {
    let o = run(&["untf53", "vertices"]);
    assert_eq!(o.status.code(), Some(0));
    let v: VerticesFile = from_json(&stdout(&o)).unwrap();
    assert_eq!(v.vertices.len(), 5);
    assert_eq!(v.vertices[0], [0.0, 1.0 / 3.0]);
}

#[test]
fn sample_construct_verify_pipeline() {
    let dir = tempfile::tempdir().unwrap();
    let table = path(dir.path(), "table.json");
    let frame = path(dir.path(), "frame.json");
    let back = path(dir.path(), "back.json");

    let o = run(&["eigensteps", "sample", "--lambda", "2.5,1.5,1", "--mu", "1.2,1,1,0.9,0.9", "--seed", "5", "-o", &table]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let o = run(&["eigensteps", "validate", &table]);
    assert_eq!(o.status.code(), Some(0));
    let v: ValidationFile = from_json(&stdout(&o)).unwrap();
    assert!(v.valid);

    let o = run(&["frame", "construct", &table, "--u1", "random", "--v", "random", "--seed", "3", "-o", &frame]);
    assert_eq!(o.status.code(), Some(0));
    let o = run(&["frame", "verify", &frame]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));

    let o = run(&["frame", "eigensteps", &frame, "-o", &back]);
    assert_eq!(o.status.code(), Some(0));
    let a: TableFile = from_json(&fs::read_to_string(&table).unwrap()).unwrap();
    let b: TableFile = from_json(&fs::read_to_string(&back).unwrap()).unwrap();
    for (ca, cb) in a.steps.iter().zip(&b.steps) {
        for (x, y) in ca.iter().zip(cb) {
            assert!((x - y).abs() < 1e-8);
        }
    }
    // the recovered table is itself accepted by the validator
    let o = run(&["eigensteps", "validate", &back]);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn written_files_reparse_identically() {
    let dir = tempfile::tempdir().unwrap();
    let table = path(dir.path(), "table.json");
    let o = run(&["untf53", "table", "--x", "0.2", "--y", "0.5", "-o", &table]);
    assert_eq!(o.status.code(), Some(0));
    let text = fs::read_to_string(&table).unwrap();
    let file: TableFile = from_json(&text).unwrap();
    assert_eq!(eigenframe::format::to_json(&file), text);
}

#[test]
fn invalid_table_exits_one_with_report() {
    let dir = tempfile::tempdir().unwrap();
    let table = path(dir.path(), "table.json");
    let o = run(&["untf53", "table", "--x", "0", "--y", "0", "-o", &table]);
    assert_eq!(o.status.code(), Some(0));
    let o = run(&["eigensteps", "validate", &table]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(stderr_kind(&o), "invalid_table");
    let v: ValidationFile = from_json(&stdout(&o)).unwrap();
    assert!(v.violations.iter().any(|e| e.kind == "interlacing"));

    let o = run(&["frame", "construct", &table]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn infeasible_sampling_exits_one() {
    let o = run(&["eigensteps", "sample", "--lambda", "1,1", "--mu", "1.5,0.5"]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(stderr_kind(&o), "infeasible_target");
}

#[test]
fn bounds_report_forced_entries() {
    let o = run(&["eigensteps", "bounds", "--lambda", "1.6666666666666667,1.6666666666666667,1.6666666666666667", "--mu", "1,1,1,1,1"]);
    assert_eq!(o.status.code(), Some(0));
    let b: BoundsFile = from_json(&stdout(&o)).unwrap();
    let entry = |n, m| b.entries.iter().find(|e| e.n == n && e.m == m).unwrap();
    assert!(entry(1, 1).forced && (entry(1, 1).lo - 1.0).abs() < 1e-9);
    assert!(entry(4, 3).forced && (entry(4, 3).lo - 2.0 / 3.0).abs() < 1e-9);
    assert!(!entry(3, 3).forced);
    assert!((entry(3, 3).hi - 2.0 / 3.0).abs() < 1e-9);
}

#[test]
fn usage_and_io_errors_exit_two() {
    let o = run(&["frame", "verify", "/nonexistent/frame.json"]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(stderr_kind(&o), "io");

    let o = run(&["untf53", "region", "--x", "abc", "--y", "0.5"]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(stderr_kind(&o), "usage");

    let o = run(&["--tol", "-1", "untf53", "vertices"]);
    assert_eq!(o.status.code(), Some(2));

    let dir = tempfile::tempdir().unwrap();
    let bad = path(dir.path(), "bad.json");
    fs::write(&bad, "{\"M\": 3}").unwrap();
    let o = run(&["eigensteps", "validate", &bad]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(stderr_kind(&o), "input");
}

#[test]
fn outputs_are_deterministic() {
    let args = ["eigensteps", "sample", "--lambda", "3,2,1", "--mu", "1,1,1,1,1,1", "--seed", "17"];
    assert_eq!(stdout(&run(&args)), stdout(&run(&args)));
}
