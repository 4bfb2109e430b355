use std::path::Path;
use std::process::Command;

use upqp_cli::experiments::swap_matrix;
use upqp_cli::format::read_csv;

fn upqp(args: &[&str], dir: &Path) -> std::process::Output {
    let out = Command::new(env!("CARGO_BIN_EXE_upqp"))
        .args(args)
        .current_dir(dir)
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "upqp {args:?} failed:\n{}\n{}",
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

#[test]
fn bounds_table_has_a_row_per_pair() {
    let dir = tempfile::tempdir().unwrap();
    upqp(
        &["bounds", "--d", "2:6", "--eps", "0.1:0.9:0.1", "--out", "b"],
        dir.path(),
    );
    let t = read_csv(&dir.path().join("b.csv")).unwrap();
    assert_eq!(t.rows.len(), 45);
    let eps = t.column("epsilon").unwrap();
    assert!(eps.contains(&"0.3") && eps.contains(&"0.9"));
    let json: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("b.json")).unwrap()).unwrap();
    assert_eq!(json["constants"]["c"], 4.0);
    assert!(
        json["constants"]["conventional_defaults"]
            .as_array()
            .unwrap()
            .len()
            == 3
    );
}

#[test]
fn net_error_and_witness_pipeline() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    upqp(
        &[
            "net",
            "--d",
            "2",
            "--eps",
            "1.0",
            "--seed",
            "3",
            "--max-candidates",
            "500",
            "--out",
            "net.json",
        ],
        p,
    );
    let out = upqp(
        &[
            "error",
            "--processor",
            "net.json",
            "--targets",
            "haar:10",
            "--out",
            "err",
        ],
        p,
    );
    assert!(String::from_utf8_lossy(&out.stdout).contains("PASS"));
    let errs = read_csv(&p.join("err.csv")).unwrap();
    assert_eq!(errs.rows.len(), 10);
    upqp(
        &["distortion", "--processor", "net.json", "--samples", "100"],
        p,
    );

    std::fs::write(p.join("tele.json"), r#"{"kind": "teleport", "d": 2}"#).unwrap();
    upqp(
        &[
            "error",
            "--processor",
            "tele.json",
            "--targets",
            "haar:3",
            "--out",
            "tele_err",
        ],
        p,
    );
    let out = upqp(
        &[
            "typewitness",
            "--processor",
            "tele.json",
            "--eps-cert",
            "tele_err.csv",
            "--out",
            "w.json",
        ],
        p,
    );
    assert!(String::from_utf8_lossy(&out.stdout).contains("PASS type-2 chain"));
    let w: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(p.join("w.json")).unwrap()).unwrap();
    assert!((w["epsilon"].as_f64().unwrap() - 0.75).abs() < 1e-6);
}

#[test]
fn synth_from_map_file() {
    let dir = tempfile::tempdir().unwrap();
    let map = serde_json::json!({"d": 2, "t": swap_matrix(2), "delta": 0.5});
    std::fs::write(dir.path().join("t.json"), map.to_string()).unwrap();
    upqp(
        &[
            "synth",
            "--map",
            "t.json",
            "--targets",
            "3",
            "--out",
            "proc.json",
        ],
        dir.path(),
    );
    let p = dir.path();
    assert!(p.join("proc.report.json").exists() && p.join("proc.csv").exists());
    upqp(
        &[
            "--parallel",
            "error",
            "--processor",
            "proc.json",
            "--targets",
            "haar:2",
            "--out",
            "e.csv",
        ],
        p,
    );
}

#[test]
fn bad_input_exits_with_an_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_upqp"))
        .args(["bounds", "--d", "2", "--eps", "1.5", "--out", "b"])
        .current_dir(dir.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("epsilon"));
}

#[test]
fn run_writes_a_report() {
    let dir = tempfile::tempdir().unwrap();
    upqp(&["run", "bounds", "--quick", "--out", "res"], dir.path());
    let r: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("res/report.json")).unwrap())
            .unwrap();
    assert_eq!(r["passed"], true);
    assert!(
        dir.path().join("res/bounds.csv").exists() && dir.path().join("res/bounds.json").exists()
    );
}

#[test]
fn corollary_prints_csv() {
    let dir = tempfile::tempdir().unwrap();
    let out = upqp(&["corollary", "--d", "1024"], dir.path());
    let s = String::from_utf8(out.stdout).unwrap();
    assert!(s.lines().nth(1).unwrap().contains("0.6875"));
}
