use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use hsr_core::export::{read_csv, read_json, TrajectoryRecord};
use hsr_core::{closed_form_trajectory, CurveSpec, IntegratorConfig, Signature};

fn hsr(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hsr"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn generate_base_case_csv() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("base.csv");
    let out = hsr(&[
        "generate",
        "--sig",
        "1,1",
        "--radius",
        "1",
        "--psi-start",
        "0",
        "--psi-end",
        "1",
        "--steps",
        "10",
        "--mode",
        "closed-form",
        "--out",
        path_str(&file),
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));

    let (sig, rows) = read_csv(fs::File::open(&file).unwrap()).unwrap();
    assert_eq!(sig, Signature::new(1, 1).unwrap());
    assert_eq!(rows.len(), 11);
    let r0 = &rows[0];
    assert_eq!(
        [
            r0.psi,
            r0.t[0],
            r0.x[0],
            r0.dt[0],
            r0.dx[0],
            r0.form_residual,
            r0.ortho_residual
        ],
        [0.0, 0.0, 1.0, 1.0, 0.0, 0.0, 0.0]
    );
}

#[test]
fn generate_rejects_zero_steps() {
    let out = hsr(&["generate", "--steps", "0"]);
    assert_eq!(code(&out), 1);
    assert!(String::from_utf8_lossy(&out.stderr).contains("steps"));
}

#[test]
fn generate_unwritable_path() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("missing").join("out.csv");
    let out = hsr(&["generate", "--out", path_str(&file)]);
    assert_eq!(code(&out), 2);
}

#[test]
fn bad_arguments_are_config_errors() {
    assert_eq!(code(&hsr(&["generate", "--sig", "0,3"])), 1);
    assert_eq!(code(&hsr(&["generate", "--sig", "2"])), 1);
    assert_eq!(code(&hsr(&["generate", "--radius", "-1"])), 1);
    assert_eq!(code(&hsr(&["generate", "--tol", "0"])), 1);
    assert_eq!(code(&hsr(&["generate", "--format", "xml"])), 1);
    assert_eq!(code(&hsr(&["no-such-command"])), 1);
    assert_eq!(code(&hsr(&["--help"])), 0);
}

#[test]
fn integrated_matches_closed_form_files() {
    let dir = tempfile::tempdir().unwrap();
    let closed = dir.path().join("closed.csv");
    let numeric = dir.path().join("numeric.csv");
    let common = [
        "generate",
        "--sig",
        "2,3",
        "--radius",
        "1.5",
        "--psi-start",
        "0",
        "--psi-end",
        "1.5",
        "--steps",
        "2000",
    ];
    for (mode, file) in [("closed-form", &closed), ("integrated", &numeric)] {
        let mut args = common.to_vec();
        args.extend(["--mode", mode, "--out", path_str(file)]);
        assert_eq!(code(&hsr(&args)), 0);
    }
    let (_, a) = read_csv(fs::File::open(&closed).unwrap()).unwrap();
    let (_, b) = read_csv(fs::File::open(&numeric).unwrap()).unwrap();
    assert_eq!(a.len(), b.len());
    let mut worst = 0.0f64;
    for (x, y) in a.iter().zip(&b) {
        assert_eq!(x.psi, y.psi);
        let xs = x.t.iter().chain(&x.x).chain(&x.dt).chain(&x.dx);
        let ys = y.t.iter().chain(&y.x).chain(&y.dt).chain(&y.dx);
        for (u, v) in xs.zip(ys) {
            worst = worst.max((u - v).abs());
        }
    }
    let spec = CurveSpec::new(Signature::new(2, 3).unwrap(), 1.5).unwrap();
    let bound = 1e-7 * (1.0 + 3.0 * spec.effective_radius() * (1.5 * spec.rate()).cosh());
    assert!(worst <= bound, "{worst} > {bound}");
}

#[test]
fn json_output_round_trips_bit_exact() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("traj.json");
    let out = hsr(&[
        "generate",
        "--sig",
        "3,2",
        "--radius",
        "0.7",
        "--psi-start",
        "-1.25",
        "--psi-end",
        "2.5",
        "--steps",
        "37",
        "--format",
        "json",
        "--out",
        path_str(&file),
    ]);
    assert_eq!(code(&out), 0);
    let parsed = read_json(fs::File::open(&file).unwrap()).unwrap();

    let spec = CurveSpec::new(Signature::new(3, 2).unwrap(), 0.7).unwrap();
    let cfg = IntegratorConfig::new(-1.25, 2.5, 37, spec).unwrap();
    let expected = TrajectoryRecord::from_trajectory(&closed_form_trajectory(&cfg).unwrap());
    assert_eq!(parsed.samples.len(), expected.samples.len());
    for (a, b) in parsed.samples.iter().zip(&expected.samples) {
        let bits = |s: &hsr_core::export::SampleRecord| -> Vec<u64> {
            std::iter::once(s.psi)
                .chain(s.t.iter().copied())
                .chain(s.x.iter().copied())
                .chain(s.dt.iter().copied())
                .chain(s.dx.iter().copied())
                .chain([s.form_residual, s.ortho_residual])
                .map(f64::to_bits)
                .collect()
        };
        assert_eq!(bits(a), bits(b));
    }
    assert_eq!(parsed, expected);
}

#[test]
fn csv_to_stdout_round_trips() {
    let out = hsr(&["generate", "--sig", "1,3", "--radius", "2", "--steps", "20"]);
    assert_eq!(code(&out), 0);
    let (sig, rows) = read_csv(out.stdout.as_slice()).unwrap();
    let spec = CurveSpec::new(sig, 2.0).unwrap();
    let cfg = IntegratorConfig::new(-3.0, 3.0, 20, spec).unwrap();
    let expected = TrajectoryRecord::from_trajectory(&closed_form_trajectory(&cfg).unwrap());
    assert_eq!(rows, expected.samples);
}

#[test]
fn verify_defaults_pass() {
    let out = hsr(&["verify"]);
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert_eq!(code(&out), 0, "{stdout}");
    assert_eq!(stdout.lines().filter(|l| l.ends_with("PASS")).count(), 16);
    assert!(stdout.contains("16 cells, 16 passed, 0 failed"));
}

#[test]
fn verify_report_rows_match_grid() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("report.csv");
    let out = hsr(&[
        "verify",
        "--max-sig",
        "3",
        "--radius",
        "0.5,1,2",
        "--ode-steps",
        "500",
        "--out",
        path_str(&file),
    ]);
    assert_eq!(code(&out), 0);
    let text = fs::read_to_string(&file).unwrap();
    assert_eq!(text.lines().count(), 1 + 27);
}

#[test]
fn verify_rejects_zero_tol() {
    assert_eq!(code(&hsr(&["verify", "--tol", "0"])), 1);
    assert_eq!(code(&hsr(&["verify", "--max-sig", "0"])), 1);
}

#[test]
fn verify_detects_injected_fault() {
    let out = hsr(&["verify", "--max-sig", "2", "--inject-fault"]);
    assert_eq!(code(&out), 3);
    let stdout = String::from_utf8_lossy(&out.stdout);
    let failing: Vec<&str> = stdout.lines().filter(|l| l.contains("FAIL")).collect();
    // only the r = 2 cells move off the quadric
    assert_eq!(failing.len(), 2);
    assert!(failing.iter().all(|l| l.contains("form")));
}

#[test]
fn dims_prints_bundle_dimension() {
    for (n, p, want) in [("4", "1", "8"), ("4", "2", "16"), ("5", "3", "40")] {
        let out = hsr(&["dims", "--n", n, "--p", p]);
        assert_eq!(code(&out), 0);
        assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), want);
    }
    assert_eq!(code(&hsr(&["dims", "--n", "0", "--p", "1"])), 1);
    assert_eq!(code(&hsr(&["dims", "--n", "3", "--p", "70"])), 1);
}

#[test]
fn transform_reports_preserved_form() {
    let out = hsr(&[
        "transform",
        "--sig",
        "2,2",
        "--radius",
        "1.5",
        "--psi",
        "0.3",
        "--axis-a",
        "1",
        "--axis-b",
        "3",
        "--amount",
        "0.8",
    ]);
    assert_eq!(code(&out), 0);
    let stdout = String::from_utf8_lossy(&out.stdout);
    let value = |key: &str| -> f64 {
        stdout
            .lines()
            .find_map(|l| l.strip_prefix(key))
            .unwrap()
            .trim()
            .parse()
            .unwrap()
    };
    assert!((value("form before:") - 2.25).abs() < 1e-12);
    assert!((value("form after:") - 2.25).abs() < 1e-12);
    assert!(stdout.contains("isometry (1e-12): true"));
    assert_eq!(
        code(&hsr(&["transform", "--axis-a", "0", "--axis-b", "0"])),
        1
    );
}
