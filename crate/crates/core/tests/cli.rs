//! End-to-end runs of the command-line tool.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use vqutrit::cli::output::{Cell, Table};
use vqutrit::cli::{EXIT_OK, EXIT_USAGE, EXIT_VALIDATION};

fn tool(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_vqutrit"))
        .args(args)
        .env_remove("VQUTRIT_OUTPUT_DIR")
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> u8 {
    out.status.code().expect("exited normally") as u8
}

fn path_str(p: &Path) -> &str {
    p.to_str().expect("utf-8 temp path")
}

#[test]
fn identical_configs_give_identical_bytes() {
    let dir = tempfile::tempdir().unwrap();
    for format in ["csv", "json"] {
        let a = dir.path().join(format!("a.{format}"));
        let b = dir.path().join(format!("b.{format}"));
        // parallel and sequential dispatch must agree byte for byte
        for (path, sequential) in [(&a, false), (&b, true)] {
            let mut args = vec![
                "negativity-dynamics",
                "--t-grid",
                "0:20:41",
                "--format",
                format,
                "--output",
                path_str(path),
            ];
            if sequential {
                args.push("--sequential");
            }
            let out = tool(&args);
            assert_eq!(
                code(&out),
                EXIT_OK,
                "{}",
                String::from_utf8_lossy(&out.stderr)
            );
        }
        assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
    }
}

#[test]
fn dynamics_table_shape_and_start() {
    let out = tool(&[
        "negativity-dynamics",
        "--t-grid",
        "0,10,50",
        "--n-list",
        "1,3",
    ]);
    assert_eq!(code(&out), EXIT_OK);
    let table = Table::parse(&String::from_utf8(out.stdout).unwrap()).unwrap();
    assert_eq!(
        table.columns,
        ["t", "n_atoms", "theta", "gamma0", "lambda", "negativity"]
    );
    assert_eq!(table.rows.len(), 2 * 2 * 3);
    for row in table.rows.iter().filter(|r| r[0].as_f64() == Some(0.0)) {
        assert_eq!(row[5].as_f64(), Some(1.0));
    }
}

#[test]
fn written_tables_recheck_clean() {
    let dir = tempfile::tempdir().unwrap();
    let cases: [(&str, &[&str]); 3] = [
        (
            "negativity-map",
            &["--gamma0-grid", "0:1:5", "--theta-grid", "0:1:5"],
        ),
        (
            "bound-spectrum",
            &["--gamma0-grid", "0.01:1:12", "--n-list", "1,5,10"],
        ),
        (
            "negativity-dynamics",
            &["--t-grid", "0:50:26", "--format", "json"],
        ),
    ];
    for (experiment, args) in cases {
        let path = dir.path().join(format!("{experiment}.out"));
        let mut argv = vec![experiment, "--output", path_str(&path)];
        argv.extend_from_slice(args);
        assert_eq!(code(&tool(&argv)), EXIT_OK);
        let check = tool(&["validate", "--from", path_str(&path)]);
        assert_eq!(
            code(&check),
            EXIT_OK,
            "{}",
            String::from_utf8_lossy(&check.stderr)
        );
    }
}

#[test]
fn tampered_table_fails_recheck() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("map.csv");
    let out = tool(&[
        "negativity-map",
        "--gamma0-grid",
        "0.5",
        "--theta",
        "1",
        "--output",
        path_str(&path),
    ]);
    assert_eq!(code(&out), EXIT_OK);
    let mut table = Table::parse(&fs::read_to_string(&path).unwrap()).unwrap();
    let neg = table.column("negativity").unwrap();
    let v = table.rows[0][neg].as_f64().unwrap();
    table.rows[0][neg] = Cell::Real(v + 1e-4);
    fs::write(&path, table.to_csv()).unwrap();
    let check = tool(&["validate", "--from", path_str(&path)]);
    assert_eq!(code(&check), EXIT_VALIDATION);
}

#[test]
fn output_directory_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_vqutrit"))
        .args([
            "bound-spectrum",
            "--gamma0-grid",
            "0.5",
            "--n-list",
            "2",
            "--format",
            "json",
        ])
        .env("VQUTRIT_OUTPUT_DIR", dir.path())
        .output()
        .unwrap();
    assert_eq!(code(&out), EXIT_OK);
    assert!(out.stdout.is_empty());
    let text = fs::read_to_string(dir.path().join("bound-spectrum.json")).unwrap();
    let doc: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(doc["config"]["experiment"], "bound-spectrum");
    assert_eq!(doc["rows"].as_array().unwrap().len(), 2);
    assert_eq!(doc["rows"][0]["status"], "ok");
}

#[test]
fn config_file_is_overridden_by_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    fs::write(
        &cfg,
        "# map settings\ngamma0-grid = 0,1\ntheta = 0.5\nn-list = 3\nt = 2\n",
    )
    .unwrap();
    let out = tool(&[
        "negativity-map",
        "--config",
        path_str(&cfg),
        "--n-atoms",
        "6",
    ]);
    assert_eq!(
        code(&out),
        EXIT_OK,
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let table = Table::parse(&String::from_utf8(out.stdout).unwrap()).unwrap();
    assert_eq!(table.rows.len(), 2);
    for row in &table.rows {
        assert_eq!(row[table.column("n_atoms").unwrap()], Cell::Int(6));
        assert_eq!(row[table.column("theta").unwrap()].as_f64(), Some(0.5));
        assert_eq!(row[table.column("t").unwrap()].as_f64(), Some(2.0));
    }
}

#[test]
fn usage_errors_exit_one() {
    let bad: [&[&str]; 6] = [
        &["negativity-map", "--theta", "1.5"],
        &["negativity-map", "--format", "xml"],
        &["negativity-dynamics", "--n-list", ""],
        &["negativity-dynamics", "--t", "-1"],
        &["frobnicate"],
        &["validate", "--from", "/nonexistent/table.csv"],
    ];
    for args in bad {
        let out = tool(args);
        assert_eq!(
            code(&out),
            EXIT_USAGE,
            "{args:?}: {}",
            String::from_utf8_lossy(&out.stderr)
        );
    }
    assert_eq!(code(&tool(&["--help"])), EXIT_OK);
}

#[test]
fn unresolved_step_is_reported_as_failed_check() {
    // a step too coarse for the band is rejected before integration
    let out = tool(&["validate", "--modes", "50", "--dt", "0.5"]);
    assert_eq!(code(&out), EXIT_VALIDATION);
    assert!(String::from_utf8_lossy(&out.stderr).contains("does not resolve the band"));
}

#[test]
fn coarse_oracle_fails_validation_with_deviation() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.csv");
    let out = tool(&["validate", "--modes", "50", "--output", path_str(&path)]);
    assert_eq!(code(&out), EXIT_VALIDATION);
    let report = Table::parse(&fs::read_to_string(&path).unwrap()).unwrap();
    let status = report.column("status").unwrap();
    let measured = report.column("measured").unwrap();
    let failing: Vec<_> = report
        .rows
        .iter()
        .filter(|r| r[status] == Cell::Text("fail".into()))
        .collect();
    assert!(!failing.is_empty());
    for row in failing {
        let Cell::Text(name) = &row[0] else {
            panic!("check name is text")
        };
        assert!(
            name.starts_with("oracle") && name.ends_with("deviation"),
            "{name}"
        );
        assert!(row[measured].as_f64().unwrap() > 1e-3);
    }
}

#[test]
fn default_validation_passes_with_trapping() {
    let out = tool(&["validate", "--cutoff-at-zero"]);
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert_eq!(code(&out), EXIT_OK, "{stderr}");
    assert!(stderr.contains("PASS cutoff trapping"));
    assert!(!stderr.contains("FAIL"));
}

#[test]
fn zero_coupling_validation_is_trivial() {
    let out = tool(&["validate", "--gamma0", "0"]);
    assert_eq!(
        code(&out),
        EXIT_OK,
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
}
