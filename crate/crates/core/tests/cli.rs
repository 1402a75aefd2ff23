use std::process::Command;

fn nullrig() -> Command {
    Command::new(env!("CARGO_BIN_EXE_nullrig"))
}

#[test]
fn list_catalog_names_everything() {
    let out = nullrig().arg("list-catalog").output().unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    for word in ["minkowski", "robertson_walker", "lightcone", "dt_rot", "curvature_relations", "lightcone-dt"] {
        assert!(text.contains(word), "missing {word}");
    }
}

#[test]
fn run_writes_reports_and_sets_the_exit_code() {
    let dir = tempfile::tempdir().unwrap();
    let out = nullrig()
        .args(["run", "--scenario", "rw-null-plane", "--samples", "10", "--seed", "3", "--format", "json", "--out"])
        .arg(dir.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("report.json")).unwrap()).unwrap();
    assert_eq!(v["samples"], 10);
    assert_eq!(v["seed"], 3);
}

#[test]
fn hypothesis_failures_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let scen = dir.path().join("rot.json");
    std::fs::write(
        &scen,
        r#"{"schema_version": 1, "name": "rot", "spacetime": {"kind": "minkowski", "dim": 4},
            "hypersurface": {"kind": "lightcone"}, "rigging": "dt_rot", "suites": ["curvature_relations"],
            "sampling": {"count": 4, "seed": 1}}"#,
    )
    .unwrap();
    let out = nullrig().args(["run", "--format", "md", "--scenario"]).arg(&scen).arg("--out").arg(dir.path()).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(dir.path().join("report.md").exists());
}

#[test]
fn errors_exit_with_one() {
    let dir = tempfile::tempdir().unwrap();
    let out = nullrig().args(["run", "--scenario", "missing.json", "--out"]).arg(dir.path()).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("error"));
    let out = nullrig().args(["describe", "--scenario", "lightcone-dt-4d"]).output().unwrap();
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stdout).contains("lightcone"));
}
