use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use qcohere::io::{channel_to_json, state_to_json};
use qcohere::qcore::DensityMatrix;
use qcohere::channels::{standard_channel, ChannelKind};
use qcohere::states::{bell_diagonal, maximally_coherent, mcms, BellDiagonalParams};
use tempfile::TempDir;

fn qcohere(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qcohere")).args(args).output().expect("binary runs")
}

fn write_state(dir: &TempDir, name: &str, rho: &DensityMatrix) -> PathBuf {
    let p = dir.path().join(name);
    std::fs::write(&p, state_to_json(rho)).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

/// The value column of a param,measure,value CSV.
fn values(o: &Output) -> Vec<f64> {
    let text = stdout(o);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("param,measure,value"));
    lines.map(|l| l.rsplit(',').next().unwrap().parse().unwrap()).collect()
}

fn bell(c: (f64, f64, f64)) -> DensityMatrix {
    bell_diagonal(BellDiagonalParams::new(c.0, c.1, c.2)).unwrap()
}

#[test]
fn compute_mcms_l1() {
    let dir = TempDir::new().unwrap();
    let p = write_state(&dir, "mcms.json", &mcms(0.5, 3).unwrap());
    let o = qcohere(&["compute", "--state", s(&p), "--measure", "c_l1"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!((v["value"].as_f64().unwrap() - 1.0).abs() < 1e-12);
    assert_eq!(v["method"], "analytic");
}

#[test]
fn malformed_state_exits_2() {
    let dir = TempDir::new().unwrap();
    let p = dir.path().join("bad.json");
    std::fs::write(&p, r#"{"dim": 2, "re": [1, 0, 0]"#).unwrap();
    let o = qcohere(&["compute", "--state", s(&p), "--measure", "c_l1"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(!o.stderr.is_empty());
    let missing = qcohere(&["compute", "--state", "/nonexistent.json", "--measure", "c_l1"]);
    assert_eq!(missing.status.code(), Some(2));
}

#[test]
fn compute_trace_discord_bell_diagonal() {
    let dir = TempDir::new().unwrap();
    let p = write_state(&dir, "bd.json", &bell((0.8, -0.4, 0.2)));
    let o = qcohere(&["compute", "--state", s(&p), "--measure", "trace_discord", "--format", "csv"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o), "measure,value,method,tol\ntrace_discord,0.4,analytic,1e-10\n");
}

#[test]
fn unknown_or_inapplicable_measure_exits_2() {
    let dir = TempDir::new().unwrap();
    let p = write_state(&dir, "q3.json", &maximally_coherent(3).density());
    assert_eq!(qcohere(&["compute", "--state", s(&p), "--measure", "nope"]).status.code(), Some(2));
    assert_eq!(qcohere(&["compute", "--state", s(&p), "--measure", "lqu"]).status.code(), Some(2));
}

#[test]
fn compute_in_rotated_basis() {
    let dir = TempDir::new().unwrap();
    let p = write_state(&dir, "plus.json", &maximally_coherent(2).density());
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let u = dir.path().join("h.json");
    std::fs::write(&u, format!(r#"{{"dim": 2, "re": [{h}, {h}, {h}, {}]}}"#, -h)).unwrap();
    let o = qcohere(&["compute", "--state", s(&p), "--measure", "c_l1", "--basis", s(&u)]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!(v["value"].as_f64().unwrap().abs() < 1e-12);
}

#[test]
fn amplitude_damping_sweep_decreases() {
    let dir = TempDir::new().unwrap();
    let p = write_state(&dir, "plus.json", &maximally_coherent(2).density());
    let o = qcohere(&["sweep", "--state", s(&p), "--measure", "c_l1", "--channel", "amplitude_damping", "--grid", "0:1:11"]);
    assert!(o.status.success());
    let v = values(&o);
    assert_eq!(v.len(), 11);
    assert!(v.windows(2).all(|w| w[1] < w[0]), "{v:?}");
}

#[test]
fn phase_flip_sweep_freezes_discord() {
    let dir = TempDir::new().unwrap();
    // c2 = −c1·c3 with |c3| < |c1|: discord stays put under phase flip on one side
    let p = write_state(&dir, "freeze.json", &bell((0.8, -0.24, 0.3)));
    let o = qcohere(&[
        "sweep", "--state", s(&p), "--measure", "entropic_discord", "--channel", "phase_flip", "--on", "0", "--grid", "0:0.3:7",
    ]);
    assert!(o.status.success());
    let v = values(&o);
    assert!(v.iter().all(|x| (x - v[0]).abs() < 1e-6), "{v:?}");
}

#[test]
fn sweep_with_channel_file() {
    let dir = TempDir::new().unwrap();
    let p = write_state(&dir, "plus.json", &maximally_coherent(2).density());
    let c = dir.path().join("ad.json");
    std::fs::write(&c, channel_to_json(&standard_channel(ChannelKind::AmplitudeDamping, 0.19).unwrap())).unwrap();
    let o = qcohere(&["sweep", "--state", s(&p), "--measure", "c_l1", "--channel", s(&c), "--grid", "0:2:3"]);
    let v = values(&o);
    assert!((v[1] - 0.9).abs() < 1e-12 && (v[2] - 0.81).abs() < 1e-12, "{v:?}");
    let frac = qcohere(&["sweep", "--state", s(&p), "--measure", "c_l1", "--channel", s(&c), "--grid", "0:1:3"]);
    assert_eq!(frac.status.code(), Some(2));
}

#[test]
fn empty_grid_exits_2() {
    let dir = TempDir::new().unwrap();
    let p = write_state(&dir, "plus.json", &maximally_coherent(2).density());
    let o = qcohere(&["sweep", "--state", s(&p), "--measure", "c_l1", "--channel", "bit_flip", "--grid", "0:1:0"]);
    assert_eq!(o.status.code(), Some(2));
    let o = qcohere(&["sweep", "--state", s(&p), "--measure", "c_l1", "--channel", "no_such_channel", "--grid", "0:1:3"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn verify_suites() {
    let o = qcohere(&["verify", "bell-diagonal-suite", "--samples", "5"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).starts_with("check,case,value,expected,tol,pass\n"));
    assert!(!stdout(&o).contains("FAIL"));
    assert_eq!(qcohere(&["verify", "no-such-suite"]).status.code(), Some(2));
}

#[test]
fn verify_haar_within_four_sigma() {
    let o = qcohere(&["verify", "haar", "--dim", "2", "--samples", "10000", "--seed", "1", "--format", "json"]);
    assert!(o.status.success());
    let rows: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let r = &rows[0];
    let (mean, exp) = (r["value"].as_f64().unwrap(), r["expected"].as_f64().unwrap());
    assert!((exp - std::f64::consts::FRAC_PI_4).abs() < 1e-11);
    assert!((mean - exp).abs() <= r["tol"].as_f64().unwrap());
}

#[test]
fn identical_runs_write_identical_files() {
    let dir = TempDir::new().unwrap();
    let (a, b) = (dir.path().join("a.json"), dir.path().join("b.json"));
    for out in [&a, &b] {
        let o = qcohere(&["haar", "--dim", "3", "--samples", "2000", "--seed", "9", "--out", s(out)]);
        assert!(o.status.success());
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    let one = Command::new(env!("CARGO_BIN_EXE_qcohere"))
        .args(["haar", "--dim", "3", "--samples", "2000", "--seed", "9"])
        .env("QCOHERE_THREADS", "1")
        .output()
        .unwrap();
    assert_eq!(one.stdout, std::fs::read(&a).unwrap());
}

#[test]
fn unruh_curve_csv() {
    let o = qcohere(&["curve", "--statistics", "fermionic", "--measure", "negativity", "--grid", "0:20:5"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("acceleration,r,measure,value,n_max"));
    let vals: Vec<f64> = lines.map(|l| l.split(',').nth(3).unwrap().parse().unwrap()).collect();
    assert_eq!(vals[0], 0.5);
    assert!(vals.windows(2).all(|w| w[1] <= w[0]));
    let o = qcohere(&["curve", "--statistics", "bosonic", "--measure", "trace_discord", "--grid", "0:1:3"]);
    assert_eq!(o.status.code(), Some(2));
}
