mod common;

use std::path::Path;
use std::process::{Command, Output};

use common::{fixture, fixture_path};
use framelet::io::{read_filter, BankFile, FilterFile};
use framelet::laurent::rat;
use framelet::Filter;

fn framelet(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_framelet"))
        .args(args)
        .current_dir(cwd)
        .output()
        .expect("binary runs")
}

fn fx(name: &str) -> String {
    fixture_path(name).to_string_lossy().into_owned()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn analyze_reports_quincunx_low_pass() {
    let dir = tempfile::tempdir().unwrap();
    let o = framelet(
        &["analyze", "--filter", &fx("ex41_a"), "--dilation", "1 1; 1 -1", "--group", "D4"],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("sr: 4"), "{text}");
    assert!(text.contains("interpolatory: true"));
    assert!(text.contains("symmetry: (D4, (0, 0), +1)"));
}

#[test]
fn constructed_bank_verifies_and_tampering_is_caught() {
    let dir = tempfile::tempdir().unwrap();
    let o = framelet(
        &[
            "dual", "--a", &fx("ex41_a"), "--ta", &fx("ex41_ta"), "--dilation", "1 1; 1 -1", "--n1", "2",
            "--n2", "2", "--out", "bank.json",
        ],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let o = framelet(&["verify", "--bank", "bank.json", "--json"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    let report: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(report["identity_holds"], true);

    let path = dir.path().join("bank.json");
    let mut file = BankFile::load(&path).unwrap();
    let mut b = file.bs[0].to_filter().unwrap();
    b = b.add(&Filter::monomial(vec![0, 0], rat(1, 1024))).unwrap();
    file.bs[0] = FilterFile::from_filter(&b, None);
    file.save(dir.path().join("tampered.json")).unwrap();
    let o = framelet(&["verify", "--bank", "tampered.json"], dir.path());
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("FAILS"), "{}", stdout(&o));
}

#[test]
fn quasi_tight_bank_round_trips_through_files() {
    let dir = tempfile::tempdir().unwrap();
    let o = framelet(
        &["qt", "--a", &fx("ex43_a"), "--dilation", "1 -2; 2 -1", "--m", "2", "--out", "qt.json"],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(0));
    let file = BankFile::load(dir.path().join("qt.json")).unwrap();
    assert_eq!(file.kind, "quasitight");
    assert_eq!(file.eps.as_ref().unwrap().len(), 15);
    assert_eq!(file.bs[0].to_filter().unwrap(), fixture("ex43_b1"));
    assert_eq!(framelet(&["verify", "--bank", "qt.json"], dir.path()).status.code(), Some(0));
}

#[test]
fn design_then_instantiate_recovers_dual_low_pass() {
    let dir = tempfile::tempdir().unwrap();
    let o = framelet(
        &[
            "design", "--support", "-3:3,-3:3", "--dilation", "1 1; 1 -1", "--sr", "4", "--interpolatory",
            "--sym", "D4@0,0", "--coords", "-2,-3;0,-3", "--out", "fam.json",
        ],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("family dimension: 2"));
    let o = framelet(
        &["instantiate", "--family", "fam.json", "--params", "0,1/64", "--out", "ta.json"],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(read_filter(dir.path().join("ta.json")).unwrap(), fixture("ex41_ta"));
    let o = framelet(&["instantiate", "--family", "fam.json", "--params", "0", "--out", "x.json"], dir.path());
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn sm2_and_render() {
    let dir = tempfile::tempdir().unwrap();
    let o = framelet(
        &["sm2", "--filter", &fx("ex42_a"), "--dilation", "2 0; 0 2", "--method", "eig"],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("sm2: 2.4408"), "{}", stdout(&o));

    framelet(
        &["qt", "--a", &fx("ex43_a"), "--dilation", "1 -2; 2 -1", "--m", "2", "--out", "qt.json"],
        dir.path(),
    );
    let o = framelet(&["render", "--bank", "qt.json", "--levels", "2", "--out", "grid", "--format", "json"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    assert!(dir.path().join("grid/phi.json").exists());
    assert!(dir.path().join("grid/psi_15.json").exists());
    let o = framelet(&["render", "--bank", "qt.json", "--levels", "2", "--out", "g", "--format", "png"], dir.path());
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn usage_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(framelet(&["bogus"], dir.path()).status.code(), Some(2));
    assert_eq!(framelet(&["verify"], dir.path()).status.code(), Some(2));
    assert_eq!(framelet(&["verify", "--bank", "missing.json"], dir.path()).status.code(), Some(2));
    assert_eq!(framelet(&["--help"], dir.path()).status.code(), Some(0));
}
