//! End-to-end checks of the binary: exit codes, output schemas and the
//! shipped fixture files.

use std::path::PathBuf;
use std::process::{Command, Output};

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../fixtures")
        .join(name)
}

fn framespec(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_framespec"))
        .args(args)
        .output()
        .expect("binary runs")
}

#[test]
fn validate_fixture_exits_zero() {
    let out = framespec(&["validate", fixture("planar_star.json").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{out:?}");
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("frame is valid"));
    assert!(text.contains("vertex 0: degree 3"));
}

#[test]
fn malformed_json_exits_two() {
    let dir = std::env::temp_dir().join("framespec-cli-test");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("broken.json");
    std::fs::write(&path, "{not json").unwrap();
    let out = framespec(&["validate", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn invariant_violation_exits_one() {
    let dir = std::env::temp_dir().join("framespec-cli-test");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("negative_stiffness.json");
    std::fs::write(
        &path,
        r#"{
  "schema_version": 1,
  "vertices": [
    {"id": 0, "pos": [0,0,0], "joint": {"kind": "clamped"}},
    {"id": 1, "pos": [1,0,0], "joint": {"kind": "free"}}
  ],
  "edges": [
    {"id": 0, "from": 0, "to": 1, "materials": {"a": -1.0, "b": 1.0, "c": 1.0, "d": 1.0}}
  ]
}"#,
    )
    .unwrap();
    let out = framespec(&["validate", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("positive"), "{text}");
}

#[test]
fn scan_emits_stable_csv_columns() {
    let out = framespec(&[
        "scan",
        fixture("planar_star.json").to_str().unwrap(),
        "--lmin",
        "1",
        "--lmax",
        "2",
        "--steps",
        "4",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("# schema_version: 1"));
    assert_eq!(lines.next(), Some("lambda,det_scaled,sigma_min"));
    assert_eq!(lines.count(), 4);
}

#[test]
fn eig_output_is_deterministic() {
    let path = fixture("planar_star.json");
    let args = [
        "eig",
        path.to_str().unwrap(),
        "--lmin",
        "1",
        "--lmax",
        "12",
        "--steps",
        "800",
    ];
    let a = framespec(&args);
    let b = framespec(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn mode_json_has_schema_and_samples() {
    let out = framespec(&[
        "mode",
        fixture("planar_star.json").to_str().unwrap(),
        "--index",
        "0",
        "--lmin",
        "1",
        "--lmax",
        "10",
        "--steps",
        "600",
        "--samples",
        "5",
    ]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["schema_version"], 1);
    assert_eq!(doc["edges"].as_array().unwrap().len(), 3);
    assert_eq!(doc["edges"][0]["samples"].as_array().unwrap().len(), 5);
    // clamped outer end: zero displacement at x = 0
    let s0 = &doc["edges"][0]["samples"][0];
    assert!(s0["v"].as_f64().unwrap().abs() < 1e-9);
}

#[test]
fn fem_json_lists_eigenvalues() {
    let out = framespec(&[
        "fem",
        fixture("antenna_tower.json").to_str().unwrap(),
        "--elements",
        "8",
        "--count",
        "4",
        "--samples",
        "3",
    ]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let eig = doc["eigenvalues"].as_array().unwrap();
    assert_eq!(eig.len(), 4);
    assert!(eig[0].as_f64().unwrap() > 0.0);
}

#[test]
fn reduce_labels_rotating_sector_twice() {
    let out = framespec(&[
        "reduce",
        fixture("antenna_tower.json").to_str().unwrap(),
        "--symmetry",
        fixture("antenna_tower_symmetry.json").to_str().unwrap(),
        "--irrep",
        "all",
        "--lmin",
        "0.5",
        "--lmax",
        "3",
        "--steps",
        "600",
    ]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("omega"), "{text}");
    assert!(text.contains("omegabar"));
    assert!(text.contains("trivial"));
    assert!(text.contains("alternating"));
}

#[test]
fn unknown_irrep_is_a_parse_error() {
    let out = framespec(&[
        "reduce",
        fixture("antenna_tower.json").to_str().unwrap(),
        "--symmetry",
        fixture("antenna_tower_symmetry.json").to_str().unwrap(),
        "--irrep",
        "nonexistent",
        "--lmin",
        "0.5",
        "--lmax",
        "1",
        "--steps",
        "10",
    ]);
    assert_eq!(out.status.code(), Some(2));
}
