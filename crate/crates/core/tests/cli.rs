//! End-to-end CLI tests: exit codes, artifact formats, determinism and the
//! BMV_CONFIG environment override.

use std::fs;
use std::path::Path;
use std::process::Command;

fn bmv() -> Command {
    Command::new(env!("CARGO_BIN_EXE_bmv"))
}

fn write_matrix(dir: &Path, name: &str, json: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, json).unwrap();
    path.to_str().unwrap().to_string()
}

fn diag_pair(dir: &Path) -> (String, String) {
    let a = write_matrix(dir, "a.json", r#"{"n": 2, "re": [[0.3, 0.0], [0.0, -0.4]]}"#);
    let b = write_matrix(dir, "b.json", r#"{"n": 2, "re": [[1.0, 0.0], [0.0, 2.0]]}"#);
    (a, b)
}

fn offdiag_pair(dir: &Path) -> (String, String) {
    let a = write_matrix(dir, "a2.json", r#"{"n": 2, "re": [[0.0, 1.0], [1.0, 0.0]]}"#);
    let b = write_matrix(dir, "b2.json", r#"{"n": 2, "re": [[1.0, 0.0], [0.0, 2.0]]}"#);
    (a, b)
}

#[test]
fn verify_diagonal_exits_zero() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = diag_pair(dir.path());
    let out = bmv()
        .args(["verify", "--matrix-a", &a, "--matrix-b", &b])
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("pass"));
}

#[test]
fn density_writes_csv_and_json() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = offdiag_pair(dir.path());
    let out_dir = dir.path().join("out");
    let out = bmv()
        .args([
            "density",
            "--matrix-a",
            &a,
            "--matrix-b",
            &b,
            "--out-dir",
            out_dir.to_str().unwrap(),
            "--dump-contour",
            dir.path().join("contour.csv").to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let atoms = fs::read_to_string(out_dir.join("atoms.csv")).unwrap();
    let density = fs::read_to_string(out_dir.join("density.csv")).unwrap();
    assert!(atoms.starts_with("# config="));
    assert!(atoms.lines().nth(1).unwrap() == "s,weight");
    assert_eq!(atoms.lines().count(), 4); // config + header + 2 atoms
    assert!(density.lines().nth(1).unwrap() == "s,w");
    assert_eq!(density.lines().count(), 2 + 32); // one interval at default grid

    let contour = fs::read_to_string(dir.path().join("contour.csv")).unwrap();
    let header = contour.lines().next().unwrap();
    assert_eq!(header, "k,re_zeta,im_zeta,re_lambda_0,im_lambda_0,re_lambda_1,im_lambda_1");

    // JSON variant
    let out = bmv()
        .args([
            "density",
            "--matrix-a",
            &a,
            "--matrix-b",
            &b,
            "--json",
            "--out-dir",
            out_dir.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert!(out.status.success());
    let value: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out_dir.join("measure.json")).unwrap()).unwrap();
    assert!(value["config"].is_object());
    assert_eq!(value["atoms"].as_array().unwrap().len(), 2);
    assert_eq!(value["density"].as_array().unwrap().len(), 32);
}

#[test]
fn density_diagonal_w_column_is_zero() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = diag_pair(dir.path());
    let out_dir = dir.path().join("out");
    let status = bmv()
        .args([
            "density",
            "--matrix-a",
            &a,
            "--matrix-b",
            &b,
            "--out-dir",
            out_dir.to_str().unwrap(),
        ])
        .status()
        .unwrap();
    assert!(status.success());
    let density = fs::read_to_string(out_dir.join("density.csv")).unwrap();
    for line in density.lines().skip(2) {
        let w: f64 = line.split(',').nth(1).unwrap().parse().unwrap();
        assert!(w.abs() < 1e-8, "nonzero density {w} for diagonal input");
    }
}

#[test]
fn malformed_json_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let a = write_matrix(dir.path(), "bad.json", r#"{"n": 2, "re": [[0.0, 1.0],"#);
    let b = write_matrix(dir.path(), "b.json", r#"{"n": 2, "re": [[1.0, 0.0], [0.0, 2.0]]}"#);
    let out = bmv()
        .args(["density", "--matrix-a", &a, "--matrix-b", &b])
        .current_dir(dir.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line"), "missing parse location: {err}");
}

#[test]
fn non_hermitian_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let a = write_matrix(
        dir.path(),
        "nh.json",
        r#"{"n": 2, "re": [[0.0, 1.0], [1.0, 0.0]], "im": [[0.0, 1.0], [1.0, 0.0]]}"#,
    );
    let b = write_matrix(dir.path(), "b.json", r#"{"n": 2, "re": [[1.0, 0.0], [0.0, 2.0]]}"#);
    let out = bmv()
        .args(["verify", "--matrix-a", &a, "--matrix-b", &b])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn tiny_node_ceiling_exits_three() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = offdiag_pair(dir.path());
    let out = bmv()
        .args([
            "verify",
            "--matrix-a",
            &a,
            "--matrix-b",
            &b,
            "--nodes",
            "64",
            "--max-nodes",
            "64",
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn poly_examples_and_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let a = write_matrix(dir.path(), "a.json", r#"{"n": 2, "re": [[0.0, 0.0], [0.0, 0.0]]}"#);
    let b = write_matrix(dir.path(), "b.json", r#"{"n": 2, "re": [[1.0, 0.0], [0.0, 1.0]]}"#);
    let out = bmv()
        .args(["poly", "--matrix-a", &a, "--matrix-b", &b, "--p", "3"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let coeffs: Vec<f64> = String::from_utf8_lossy(&out.stdout)
        .split_whitespace()
        .map(|v| v.parse().unwrap())
        .collect();
    assert_eq!(coeffs.len(), 4);
    assert!(coeffs[..3].iter().all(|&c| c.abs() < 1e-14) && (coeffs[3] - 2.0).abs() < 1e-14);

    // A = [[1,1],[1,1]], B = diag(1,0), p = 2 -> 4 2 1
    let a = write_matrix(dir.path(), "a2.json", r#"{"n": 2, "re": [[1.0, 1.0], [1.0, 1.0]]}"#);
    let b2 = write_matrix(dir.path(), "b2.json", r#"{"n": 2, "re": [[1.0, 0.0], [0.0, 0.0]]}"#);
    let out = bmv()
        .args(["poly", "--matrix-a", &a, "--matrix-b", &b2, "--p", "2"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let coeffs: Vec<f64> = String::from_utf8_lossy(&out.stdout)
        .split_whitespace()
        .map(|v| v.parse().unwrap())
        .collect();
    assert!((coeffs[0] - 4.0).abs() < 1e-12);
    assert!((coeffs[1] - 2.0).abs() < 1e-12);
    assert!((coeffs[2] - 1.0).abs() < 1e-12);

    // non-PSD B -> 2
    let bneg = write_matrix(dir.path(), "bneg.json", r#"{"n": 2, "re": [[1.0, 0.0], [0.0, -1.0]]}"#);
    let out = bmv()
        .args(["poly", "--matrix-a", &a, "--matrix-b", &bneg, "--p", "2"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn random_seeded_runs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let run = |out_dir: &Path| {
        let status = bmv()
            .args([
                "density",
                "--random",
                "3",
                "--seed",
                "7",
                "--out-dir",
                out_dir.to_str().unwrap(),
            ])
            .status()
            .unwrap();
        assert!(status.success());
        (
            fs::read(out_dir.join("atoms.csv")).unwrap(),
            fs::read(out_dir.join("density.csv")).unwrap(),
        )
    };
    let (a1, d1) = run(&dir.path().join("r1"));
    let (a2, d2) = run(&dir.path().join("r2"));
    assert_eq!(a1, a2);
    assert_eq!(d1, d2);

    // verify on the same seeded pair is deterministic and passes
    let out1 = bmv().args(["verify", "--random", "3", "--seed", "7"]).output().unwrap();
    let out2 = bmv().args(["verify", "--random", "3", "--seed", "7"]).output().unwrap();
    assert!(out1.status.success());
    assert_eq!(out1.stdout, out2.stdout);
}

#[test]
fn atoms_skips_contour_and_respects_coords() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = diag_pair(dir.path());
    let out_dir = dir.path().join("out");
    let status = bmv()
        .args([
            "atoms",
            "--matrix-a",
            &a,
            "--matrix-b",
            &b,
            "--coords",
            "original",
            "--out-dir",
            out_dir.to_str().unwrap(),
        ])
        .status()
        .unwrap();
    assert!(status.success());
    let text = fs::read_to_string(out_dir.join("atoms.csv")).unwrap();
    let first_atom: f64 = text
        .lines()
        .nth(2)
        .unwrap()
        .split(',')
        .next()
        .unwrap()
        .parse()
        .unwrap();
    // original coordinates: the shift is removed, so the location is b_1 = 1
    assert!((first_atom - 1.0).abs() < 1e-12);
}

#[test]
fn env_config_is_honored_and_flags_override() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = offdiag_pair(dir.path());
    let cfg_path = dir.path().join("cfg.json");
    fs::write(&cfg_path, r#"{"n_nodes_initial": 64, "n_nodes_max": 64}"#).unwrap();
    // env config alone: convergence fails (ceiling too low)
    let out = bmv()
        .args(["verify", "--matrix-a", &a, "--matrix-b", &b])
        .env("BMV_CONFIG", cfg_path.to_str().unwrap())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
    // flag raises the ceiling over the env file
    let out = bmv()
        .args([
            "verify",
            "--matrix-a",
            &a,
            "--matrix-b",
            &b,
            "--max-nodes",
            "16384",
        ])
        .env("BMV_CONFIG", cfg_path.to_str().unwrap())
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn verify_report_json_written() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = offdiag_pair(dir.path());
    let report_path = dir.path().join("report.json");
    let status = bmv()
        .args([
            "verify",
            "--matrix-a",
            &a,
            "--matrix-b",
            &b,
            "--out",
            report_path.to_str().unwrap(),
        ])
        .status()
        .unwrap();
    assert!(status.success());
    let value: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(&report_path).unwrap()).unwrap();
    assert!(value["config"].is_object());
    let report = &value["report"];
    assert_eq!(report["t_grid"].as_array().unwrap().len(), 25);
    assert_eq!(report["laplace_pass"], serde_json::Value::Bool(true));
    assert!(report["max_rel_error"].as_f64().unwrap() < 1e-6);
}
