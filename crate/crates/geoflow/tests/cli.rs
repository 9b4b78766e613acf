//! End-to-end CLI checks: exit codes, CSV output, catalog listing and
//! config round-trip.

use std::path::Path;
use std::process::Command;

const BIN: &str = env!("CARGO_BIN_EXE_geoflow");

fn write_config(dir: &Path, t_final: f64, out: &str) -> std::path::PathBuf {
    let path = dir.join("run.toml");
    std::fs::write(
        &path,
        format!(
            r#"
model = "burgers"

[initial]
preset = "sine"

[time]
t_final = {t_final}
cfl = 0.5
stride = 100000

[output]
directory = "{out}"
fields = ["u"]
"#
        ),
    )
    .unwrap();
    path
}

/// Minimal RFC 4180 reader for the unquoted CSV this crate emits.
fn read_csv(path: &Path) -> Vec<Vec<String>> {
    let text = std::fs::read_to_string(path).unwrap();
    text.split("\r\n")
        .filter(|l| !l.is_empty())
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

#[test]
fn run_writes_series_and_snapshots() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("out");
    let cfg = write_config(tmp.path(), 0.2, out.to_str().unwrap());
    let status = Command::new(BIN).arg("run").arg(&cfg).status().unwrap();
    assert_eq!(status.code(), Some(0));

    let rows = read_csv(&out.join("series.csv"));
    assert_eq!(rows[0], vec!["time", "energy", "integral_u"]);
    assert!(rows.len() >= 3, "initial and final records expected");
    for row in &rows[1..] {
        assert_eq!(row.len(), rows[0].len());
        for cell in row {
            cell.parse::<f64>().unwrap();
        }
    }
    // Energy drifts below 1e-8 relative over t = 0.2.
    let e0: f64 = rows[1][1].parse().unwrap();
    let e1: f64 = rows.last().unwrap()[1].parse().unwrap();
    assert!(((e1 - e0) / e0).abs() <= 1e-8);

    let snap = read_csv(&out.join("snapshot_t0.0000_u.csv"));
    assert_eq!(snap[0], vec!["x", "u"]);
    // First sample of sin x on the uniform grid is sin 0 = 0.
    assert!(snap[1][1].parse::<f64>().unwrap().abs() < 1e-12);
}

#[test]
fn blow_up_exits_2_with_partial_series() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("out");
    let cfg = write_config(tmp.path(), 0.5, out.to_str().unwrap());
    let status = Command::new(BIN).arg("run").arg(&cfg).status().unwrap();
    assert_eq!(status.code(), Some(2));
    let rows = read_csv(&out.join("series.csv"));
    let t_last: f64 = rows.last().unwrap()[0].parse().unwrap();
    assert!(t_last < 0.5, "series is partial");
}

#[test]
fn malformed_config_exits_1() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("bad.toml");
    std::fs::write(&cfg, "model = [").unwrap();
    let status = Command::new(BIN).arg("run").arg(&cfg).status().unwrap();
    assert_eq!(status.code(), Some(1));

    // Schema-valid TOML with an unknown model also exits 1.
    std::fs::write(&cfg, "model = \"nope\"\n[time]\nt_final = 1.0\n").unwrap();
    let status = Command::new(BIN).arg("run").arg(&cfg).status().unwrap();
    assert_eq!(status.code(), Some(1));
}

#[test]
fn dump_config_round_trips() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), 0.2, "out");
    let first = Command::new(BIN)
        .args(["run", "--dump-config"])
        .arg(&cfg)
        .output()
        .unwrap();
    assert!(first.status.success());
    let echoed = tmp.path().join("echoed.toml");
    std::fs::write(&echoed, &first.stdout).unwrap();
    let second = Command::new(BIN)
        .args(["run", "--dump-config"])
        .arg(&echoed)
        .output()
        .unwrap();
    assert_eq!(first.stdout, second.stdout);
}

#[test]
fn list_models_is_stable_and_complete() {
    let a = Command::new(BIN).arg("list-models").output().unwrap();
    assert!(a.status.success());
    let text = String::from_utf8(a.stdout).unwrap();
    for id in [
        "burgers",
        "kdv",
        "camassa-holm",
        "hunter-saxton",
        "euler-2d",
        "qg-beta",
        "boussinesq",
        "passive-scalar",
        "mhd-2d",
        "charged-fluid",
        "template-matching",
        "epdiff",
        "lae-alpha",
        "pair-l2",
        "pair-l2-sigma",
        "pair-h1",
        "pair-h1-sigma",
        "pair-l2-alpha-central",
    ] {
        assert!(text.contains(id), "missing {id}");
    }
    let b = Command::new(BIN).arg("list-models").output().unwrap();
    assert_eq!(text, String::from_utf8(b.stdout).unwrap());
}

#[test]
fn unknown_verify_suite_exits_1() {
    let status = Command::new(BIN)
        .args(["verify", "bogus"])
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(1));
}
