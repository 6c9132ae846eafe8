//! End-to-end tests of the command-line binary.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pgfv"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn tmp(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("pgfv-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

#[test]
fn mesh_then_info() {
    let path = tmp("mesh4.txt");
    let out = run(&["mesh", "--n", "4", "--out", path.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = stdout(&out);
    assert!(text.contains("vertices 25 edges 56 triangles 32"), "{text}");

    let info = run(&["info", path.to_str().unwrap()]);
    assert!(info.status.success());
    let text = stdout(&info);
    assert!(text.contains("vertices 25"));
    assert!(text.contains("theta 2.4142136"), "{text}");
}

#[test]
fn mesh_perturbation_bound_rejected() {
    let path = tmp("bad.txt");
    let out = run(&["mesh", "--n", "4", "--perturb", "0.9", "--out", path.to_str().unwrap()]);
    assert!(!out.status.success());
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.starts_with("error:"), "{err}");
}

#[test]
fn solve_mixed_writes_cell_csv() {
    let cells = tmp("cells.csv");
    let edges = tmp("edges.csv");
    let svg = tmp("heat.svg");
    let out = run(&[
        "solve",
        "--scheme",
        "mixed",
        "--case",
        "sinsin",
        "--n",
        "8",
        "--out-cells",
        cells.to_str().unwrap(),
        "--out-edges",
        edges.to_str().unwrap(),
        "--svg",
        svg.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(stdout(&out).contains("conservation-residual"));
    let body = std::fs::read_to_string(&cells).unwrap();
    // header comment + column header + 128 rows
    assert_eq!(body.lines().count(), 2 + 128);
    assert!(body.starts_with("# pgfv-cells-csv 1"));
    assert!(std::fs::read_to_string(&edges).unwrap().lines().count() > 2);
    assert!(std::fs::read_to_string(&svg).unwrap().starts_with("<svg"));
}

#[test]
fn solve_pgfv_n1_all_fallback_notice() {
    let out = run(&["solve", "--scheme", "pgfv", "--case", "sinsin", "--n", "1"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = stdout(&out);
    assert!(text.contains("pg-coverage 0.0000"), "{text}");
    assert!(text.contains("two-point fallback"), "{text}");
}

#[test]
fn solve_f_zero_gives_zero_solution() {
    let cells = tmp("zero.csv");
    let out = run(&[
        "solve",
        "--case",
        "sinsin",
        "--f-zero",
        "--n",
        "4",
        "--out-cells",
        cells.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let body = std::fs::read_to_string(&cells).unwrap();
    for line in body.lines().skip(2) {
        let u: f64 = line.rsplit(',').next().unwrap().parse().unwrap();
        assert!(u.abs() < 1e-12, "{line}");
    }
}

#[test]
fn converge_writes_report() {
    let csv = tmp("report.csv");
    let json = tmp("report.json");
    let svg = tmp("report.svg");
    let out = run(&[
        "converge",
        "--scheme",
        "mixed",
        "--levels",
        "4,8,16",
        "--out-csv",
        csv.to_str().unwrap(),
        "--out-json",
        json.to_str().unwrap(),
        "--svg",
        svg.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let body = std::fs::read_to_string(&csv).unwrap();
    assert!(body.starts_with("# pgfv-convergence-csv 1"));
    assert_eq!(body.lines().count(), 2 + 3); // comment + header + 3 levels
    let json_body = std::fs::read_to_string(&json).unwrap();
    assert!(json_body.contains("\"rates\""));
    assert!(std::fs::read_to_string(&svg).unwrap().contains("slope"));
}

#[test]
fn converge_rejects_unsorted_levels() {
    let out = run(&["converge", "--levels", "8,4"]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("strictly increasing"));
}

#[test]
fn converge_pgfv_reports_coverage() {
    let csv = tmp("pg.csv");
    let out = run(&[
        "converge",
        "--scheme",
        "pgfv",
        "--strategy",
        "anchor",
        "--levels",
        "4,8",
        "--perturb",
        "0.1",
        "--out-csv",
        csv.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let body = std::fs::read_to_string(&csv).unwrap();
    // coverage column populated on data rows
    for line in body.lines().skip(2) {
        let cols: Vec<&str> = line.split(',').collect();
        assert!(!cols[7].is_empty(), "{line}");
    }
}

#[test]
fn stencil_check_bounds_and_zero_coverage() {
    let out = run(&["stencil-check", "--n", "8"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = stdout(&out);
    assert!(text.contains("summary: stencils"), "{text}");
    for line in text.lines().skip(2) {
        if line.starts_with("summary") || !line.contains(',') {
            continue;
        }
        let cols: Vec<&str> = line.split(',').collect();
        let residual: f64 = cols[1].parse().unwrap();
        let dev: f64 = cols[4].parse().unwrap();
        assert!(residual <= 1e-12, "{line}");
        assert!(dev <= 1e-10, "{line}");
    }

    let n1 = run(&["stencil-check", "--n", "1"]);
    assert!(n1.status.success());
    assert!(stdout(&n1).contains("zero stencil coverage"));
}

#[test]
fn csv_deterministic_for_fixed_seed() {
    let run_once = |path: &Path| {
        let out = run(&[
            "converge",
            "--scheme",
            "twopoint",
            "--levels",
            "4,8",
            "--perturb",
            "0.1",
            "--seed",
            "5",
            "--out-csv",
            path.to_str().unwrap(),
        ]);
        assert!(out.status.success());
        std::fs::read_to_string(path).unwrap()
    };
    let a = run_once(&tmp("det-a.csv"));
    let b = run_once(&tmp("det-b.csv"));
    assert_eq!(a, b);
}

#[test]
fn env_seed_is_used() {
    let out = Command::new(env!("CARGO_BIN_EXE_pgfv"))
        .args(["solve", "--scheme", "twopoint", "--n", "4", "--perturb", "0.1"])
        .env("PGFV_SEED", "99")
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(stdout(&out).contains("seed 99"));
}
