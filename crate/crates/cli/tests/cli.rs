use std::f64::consts::PI;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;
use transeig::io;

fn run(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_transeig")).current_dir(dir).args(args).output().expect("binary runs")
}

fn ok(dir: &Path, args: &[&str]) -> String {
    let out = run(dir, args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn error_record(out: &Output) -> serde_json::Value {
    let err = String::from_utf8_lossy(&out.stderr);
    serde_json::from_str(err.lines().last().expect("an error line")).expect("stderr is a JSON record")
}

fn read(dir: &Path, name: &str) -> String {
    std::fs::read_to_string(dir.join(name)).unwrap()
}

const TRIVIAL: &str = "schema = \"transeig-profile/1\"\nb = 1.0\n\n[[segments]]\nx_lo = 0.0\nx_hi = 1.0\nkind = \"constant\"\nvalue = 1.0\n";

#[test]
fn forward_hits_an_eigenvalue_row() {
    let t = TempDir::new().unwrap();
    ok(t.path(), &["example", "ex62_second", "-o", "ex62.prof"]);
    // h = pi, so k = 2 pi is a grid point
    let kmax = (8.0 * PI).to_string();
    ok(t.path(), &["forward", "--profile", "ex62.prof", "--kmax", &kmax, "--n-points", "17", "-o", "d.txt"]);
    let f = io::samples_from_str(&read(t.path(), "d.txt")).unwrap();
    assert_eq!(f.quantity, "D");
    assert_eq!(f.support, 1.0);
    let row = f.samples.k.iter().position(|k| (k - 2.0 * PI).abs() < 1e-12).unwrap();
    assert!(f.samples.values[row].norm() <= 1e-8);
}

#[test]
fn forward_of_trivial_medium_is_zero_and_deterministic() {
    let t = TempDir::new().unwrap();
    std::fs::write(t.path().join("one.prof"), TRIVIAL).unwrap();
    ok(t.path(), &["forward", "--profile", "one.prof", "--kmax", "30", "--n-points", "101", "-o", "a.txt"]);
    ok(t.path(), &["--threads", "1", "forward", "--profile", "one.prof", "--kmax", "30", "--n-points", "101", "-o", "b.txt"]);
    let a = read(t.path(), "a.txt");
    assert_eq!(a, read(t.path(), "b.txt"));
    let f = io::samples_from_str(&a).unwrap();
    assert!(f.samples.values.iter().all(|v| v.norm() < 1e-13));
}

#[test]
fn missing_input_fails_cleanly() {
    let t = TempDir::new().unwrap();
    let out = run(t.path(), &["forward", "--profile", "absent.prof", "-o", "d.txt"]);
    assert_eq!(out.status.code(), Some(3));
    let rec = error_record(&out);
    assert_eq!(rec["code"], "Io");
    assert_eq!(rec["stage"], "read");
    assert!(rec["message"].as_str().unwrap().contains("absent.prof"));
    assert_eq!(std::fs::read_dir(t.path()).unwrap().count(), 0);
}

#[test]
fn bad_numeric_overrides_are_rejected() {
    let t = TempDir::new().unwrap();
    std::fs::write(t.path().join("one.prof"), TRIVIAL).unwrap();
    let out = run(t.path(), &["forward", "--profile", "one.prof", "--kmax", "0", "-o", "d.txt"]);
    assert_eq!(out.status.code(), Some(4));
    assert_eq!(error_record(&out)["code"], "BadParams");
    let out = Command::new(env!("CARGO_BIN_EXE_transeig"))
        .current_dir(t.path())
        .env("TRANSEIG_THREADS", "0")
        .args(["forward", "--profile", "one.prof", "-o", "d.txt"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn eigenvalue_tables() {
    let t = TempDir::new().unwrap();
    ok(t.path(), &["example", "ex62_first", "-o", "first.prof"]);
    ok(t.path(), &["eigs", "--profile", "first.prof", "--kmax", "20", "--im-band", "4", "-o", "e.txt"]);
    let es = io::eigs_from_str(&read(t.path(), "e.txt")).unwrap();
    assert_eq!(es.d, 1);
    assert!((es.gamma + 1.0 / 24.0).abs() < 1e-6);
    let real = es.real_positive();
    assert_eq!(real.len(), 3);
    for (n, z) in real.iter().enumerate() {
        assert!((z.k.re - 2.0 * PI * (n + 1) as f64).abs() < 1e-6);
        assert_eq!(z.multiplicity, 1);
    }

    ok(t.path(), &["example", "delta", "--a", "1", "--c", "2", "-o", "delta.pot"]);
    ok(t.path(), &["eigs", "--potential", "delta.pot", "--kmax", "10", "--im-band", "2", "-o", "d.txt"]);
    let es = io::eigs_from_str(&read(t.path(), "d.txt")).unwrap();
    let real = es.real_positive();
    assert_eq!(real.len(), 3);
    for (n, z) in real.iter().enumerate() {
        assert!((z.k.re - PI * (n + 1) as f64).abs() < 1e-6);
        assert_eq!(z.multiplicity, 2);
    }

    std::fs::write(t.path().join("one.prof"), TRIVIAL).unwrap();
    let out = run(t.path(), &["eigs", "--profile", "one.prof", "-o", "z.txt"]);
    let rec = error_record(&out);
    assert_eq!(rec["code"], "GammaZero");
    assert!(rec["message"].as_str().unwrap().contains("trivial medium"));
    assert!(!t.path().join("z.txt").exists());
}

#[test]
fn transform_writes_potential() {
    let t = TempDir::new().unwrap();
    ok(t.path(), &["example", "ex63", "-o", "ex63.prof"]);
    let s = ok(t.path(), &["transform", "--profile", "ex63.prof", "-o", "v.pot"]);
    let v: serde_json::Value = serde_json::from_str(&s).unwrap();
    assert!((v["a"].as_f64().unwrap() - 2.0 * std::f64::consts::LN_2).abs() < 1e-10);
    let pot = io::potential_from_str(&read(t.path(), "v.pot")).unwrap();
    assert!((pot.a - 2.0 * std::f64::consts::LN_2).abs() < 1e-10);
}

#[test]
fn reconstruct_wave_profile_from_e_samples() {
    let t = TempDir::new().unwrap();
    ok(t.path(), &["example", "ex62_second", "-o", "ex62.prof"]);
    ok(t.path(), &["forward", "--profile", "ex62.prof", "--normalize", "--kmax", "250", "--n-points", "32769", "-o", "e.txt"]);
    let s = ok(t.path(), &["reconstruct", "--input", "e.txt", "-o", "rec.prof", "--diagnostics", "diag.json", "--curve", "rho.txt"]);
    let v: serde_json::Value = serde_json::from_str(&s).unwrap();
    assert_eq!(v["regime"], "a_lt_b");
    assert!((v["a_recovered"].as_f64().unwrap() - 0.5).abs() < 1e-3);
    assert!((v["gamma_recovered"].as_f64().unwrap() - 1.0 / 6.0).abs() < 1e-3);
    let p = io::profile_from_str(&read(t.path(), "rec.prof")).unwrap();
    for i in 0..=95 {
        let x = i as f64 / 100.0;
        assert!((p.rho(x) - (2.0 - x).powi(-4)).abs() < 1e-2, "x = {x}");
    }
    let diag: serde_json::Value = serde_json::from_str(&read(t.path(), "diag.json")).unwrap();
    assert!(diag["diagnostics"].as_array().unwrap().iter().any(|d| d["stage"] == "fit_b_minus_a"));
    let curve = io::parse_table(&read(t.path(), "rho.txt"), io::CURVE_SCHEMA).unwrap();
    assert_eq!(curve.rows.len(), 1001);
}

#[test]
fn reconstruct_rejects_a_greater_than_b() {
    let t = TempDir::new().unwrap();
    ok(t.path(), &["example", "ex61", "-o", "ex61.prof"]);
    ok(t.path(), &["forward", "--profile", "ex61.prof", "--kmax", "300", "--n-points", "8193", "-o", "d.txt"]);
    let out = run(t.path(), &["reconstruct", "--input", "d.txt", "-o", "rec.prof"]);
    assert_eq!(out.status.code(), Some(5));
    let rec = error_record(&out);
    assert_eq!(rec["code"], "Unsupported");
    assert!(rec["message"].as_str().unwrap().contains("open problem"));
    assert!(!t.path().join("rec.prof").exists());
}

#[test]
fn reconstruct_point_potential() {
    let t = TempDir::new().unwrap();
    ok(t.path(), &["example", "delta", "--a", "1", "--c", "2", "-o", "delta.pot"]);
    ok(t.path(), &["forward", "--potential", "delta.pot", "--kmax", "500", "--n-points", "32769", "-o", "dt.txt"]);
    let s = ok(t.path(), &["reconstruct", "--input", "dt.txt", "-o", "rec.pot"]);
    let v: serde_json::Value = serde_json::from_str(&s).unwrap();
    assert_eq!(v["regime"], "schrodinger");
    let pot = io::potential_from_str(&read(t.path(), "rec.pot")).unwrap();
    assert_eq!(pot.points.len(), 1);
    assert!((pot.points[0].y - 1.0).abs() < 1e-3);
    assert!((pot.points[0].weight - 2.0).abs() < 1e-2);
}

#[test]
fn validate_single_group() {
    let t = TempDir::new().unwrap();
    let s = ok(t.path(), &["validate", "--only", "ex63"]);
    assert!(s.contains("8 ln 2 - 17/3"));
    assert!(s.lines().filter(|l| l.starts_with("PASS")).count() >= 4);
    assert!(!s.contains("FAIL"));
    let out = run(t.path(), &["validate", "--only", "bogus"]);
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn nonuniqueness_report() {
    let t = TempDir::new().unwrap();
    let s = ok(t.path(), &["nonuniqueness", "--b", "1"]);
    let v: serde_json::Value = serde_json::from_str(&s).unwrap();
    assert!(v["max_relative_difference"].as_f64().unwrap() < 1e-9);
    assert!((v["first"][0].as_f64().unwrap() + 1.0 / 24.0).abs() < 1e-6);
    assert!((v["second"][1].as_f64().unwrap() - 0.5).abs() < 1e-9);
}
