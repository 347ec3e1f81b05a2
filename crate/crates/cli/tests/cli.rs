use std::process::{Command, Output};

use serde_json::Value;

fn tpms(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tpms"))
        .args(args)
        .env_remove("TPMS_JOBS")
        .output()
        .unwrap()
}

fn json(out: &Output) -> Value {
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn solve_reports_json() {
    let v = json(&tpms(&["solve", "1.5", "2.5", "--json"]));
    assert_eq!(v["schema_version"], 1);
    for k in ["a", "b", "t", "rho", "residual_q"] {
        assert!(v[k].is_number(), "{k}");
    }
    assert!(v["residual_q"].as_f64().unwrap() < 1e-10);
}

#[test]
fn solve_diagonal_is_trivial() {
    let v = json(&tpms(&["solve", "2", "2", "--t", "5", "--json"]));
    assert!((v["rho"].as_f64().unwrap() - 1.0).abs() < 1e-12);
    assert!(v["residual_q"].as_f64().unwrap() < 1e-12);
    // t is required on the diagonal
    assert_eq!(tpms(&["solve", "2", "2"]).status.code(), Some(1));
}

#[test]
fn solve_canonicalizes() {
    let swapped = tpms(&["solve", "2.5", "1.5", "--json"]);
    assert!(String::from_utf8_lossy(&swapped.stderr).contains("canonical"));
    let (s, c) = (
        json(&swapped),
        json(&tpms(&["solve", "1.5", "2.5", "--json"])),
    );
    assert_eq!(s["t"], c["t"]);
    assert_eq!(s["rho"], c["rho"]);
    assert_eq!(s["canonicalized"], true);
}

#[test]
fn exit_codes() {
    assert_eq!(tpms(&["solve", "x", "2"]).status.code(), Some(1));
    assert_eq!(tpms(&["solve"]).status.code(), Some(1));
    assert_eq!(tpms(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(tpms(&["--help"]).status.code(), Some(0));
    // no sign change of Q this close to the coalescence corner
    assert_eq!(tpms(&["solve", "1.01", "1.02"]).status.code(), Some(2));
}

#[test]
fn tstar_prints_constant() {
    let out = tpms(&["tstar"]);
    assert_eq!(
        String::from_utf8_lossy(&out.stdout).trim(),
        "2.1796604316786983"
    );
}

#[test]
fn gauss_diagonal_is_meeks() {
    let v = json(&tpms(&["gauss", "2", "2", "5", "--rho", "1"]));
    assert_eq!(v["classification"], "meeks");
    assert_eq!(v["pairs"].as_array().unwrap().len(), 4);
    assert_eq!(v["points"].as_array().unwrap().len(), 8);
    let v = json(&tpms(&["gauss", "1.5", "2.5", "5"]));
    assert_eq!(v["classification"], "non_meeks");
}

#[test]
fn sweep_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("sweep.csv");
    let out = tpms(&[
        "sweep",
        "--a-grid",
        "1.2:2:5",
        "--b-grid",
        "2.2:3:5",
        "--out",
        path.to_str().unwrap(),
        "--jobs",
        "3",
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let mut r = csv::Reader::from_path(&path).unwrap();
    assert_eq!(
        r.headers().unwrap(),
        vec![
            "a",
            "b",
            "t",
            "rho",
            "residual",
            "iterations",
            "status",
            "note"
        ]
    );
    let rows: Vec<csv::StringRecord> = r.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 25);
    for row in &rows {
        assert_eq!(&row[6], "ok");
        assert!(row[4].parse::<f64>().unwrap() < 1e-10);
    }
}

#[test]
fn sweep_is_deterministic_across_job_counts() {
    let one = tpms(&[
        "sweep", "--a-grid", "1.3,1.8", "--b-grid", "2.5,4", "--jobs", "1",
    ]);
    let many = tpms(&[
        "sweep", "--a-grid", "1.3,1.8", "--b-grid", "2.5,4", "--jobs", "4",
    ]);
    assert!(one.status.success());
    assert_eq!(one.stdout, many.stdout);
}

#[test]
fn sweep_skips_diagonal_and_refuses_bad_grids() {
    let out = tpms(&["sweep", "--a-grid", "2,3", "--b-grid", "2,4"]);
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(
        text.lines()
            .any(|l| l.starts_with("2.0,2.0,") && l.ends_with("skipped,diagonal")),
        "{text}"
    );
    assert_eq!(
        tpms(&["sweep", "--a-grid", "", "--b-grid", "2,3"])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(
        tpms(&["sweep", "--a-grid", "1:2:1", "--b-grid", "2,3"])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(
        tpms(&[
            "sweep",
            "--a-grid",
            "1.2,1.3",
            "--b-grid",
            "2,3",
            "--out",
            "/nonexistent-dir/x.csv"
        ])
        .status
        .code(),
        Some(1)
    );
}

#[test]
fn config_defaults_and_flag_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    std::fs::write(
        &cfg,
        r#"{"a-grid": "1.3,1.8", "b_grid": "2.5,4", "tol": 1e-11}"#,
    )
    .unwrap();
    let out = tpms(&["--config", cfg.to_str().unwrap(), "sweep"]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert_eq!(String::from_utf8_lossy(&out.stdout).lines().count(), 5);
    let out = tpms(&[
        "--config",
        cfg.to_str().unwrap(),
        "sweep",
        "--b-grid",
        "2.5,3,4",
    ]);
    assert_eq!(String::from_utf8_lossy(&out.stdout).lines().count(), 7);
    std::fs::write(&cfg, r#"{"bogus": 1}"#).unwrap();
    assert_eq!(
        tpms(&["--config", cfg.to_str().unwrap(), "tstar"])
            .status
            .code(),
        Some(1)
    );
}

#[test]
fn boundary_table() {
    let out = tpms(&["boundary", "--a-grid", "1.5,2,3"]);
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout);
    let row = text.lines().nth(2).unwrap();
    let t: f64 = row.split(',').nth(1).unwrap().parse().unwrap();
    assert!((t - 4.813347828295835).abs() < 1e-9);
}

#[test]
fn mesh_cell_and_hexagon() {
    let dir = tempfile::tempdir().unwrap();
    let obj = dir.path().join("cell.obj");
    let v = json(&tpms(&[
        "mesh",
        "2",
        "2.001",
        "--copies",
        "8",
        "--resolution",
        "6",
        "--out",
        obj.to_str().unwrap(),
        "--json",
    ]));
    assert_eq!(v["euler_characteristic"], -4);
    assert!(v["weld_residual"].as_f64().unwrap() < 1e-8);
    let text = std::fs::read_to_string(&obj).unwrap();
    assert_eq!(
        text.lines().filter(|l| l.starts_with("v ")).count() as u64,
        v["vertices"].as_u64().unwrap()
    );
    let ply = dir.path().join("hex.ply");
    let v = json(&tpms(&[
        "mesh",
        "2",
        "2",
        "5",
        "--resolution",
        "4",
        "--out",
        ply.to_str().unwrap(),
        "--json",
    ]));
    assert!(std::fs::read_to_string(&ply).unwrap().starts_with("ply\n"));
    assert_eq!(v["copies"], 1);
    // unsolved parameters cannot be extended to a cell
    let bad = tpms(&[
        "mesh",
        "1.5",
        "2.5",
        "4",
        "--copies",
        "8",
        "--out",
        obj.to_str().unwrap(),
    ]);
    assert_eq!(bad.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&bad.stderr).contains("off-centre"));
    assert_eq!(
        tpms(&[
            "mesh",
            "2",
            "2",
            "5",
            "--resolution",
            "3",
            "--out",
            obj.to_str().unwrap()
        ])
        .status
        .code(),
        Some(1)
    );
    assert_eq!(
        tpms(&[
            "mesh",
            "2",
            "2",
            "5",
            "--copies",
            "2",
            "--out",
            obj.to_str().unwrap()
        ])
        .status
        .code(),
        Some(1)
    );
}

#[test]
fn verify_suites() {
    let out = tpms(&["verify", "--suite", "derivatives"]);
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(
        text.starts_with("PASS derivatives (worst residual"),
        "{text}"
    );
    let v = json(&tpms(&["verify", "--json"]));
    assert_eq!(v["passed"], true);
    assert_eq!(v["suites"].as_array().unwrap().len(), 5);
    assert_eq!(tpms(&["verify", "--suite", "nope"]).status.code(), Some(1));
}
