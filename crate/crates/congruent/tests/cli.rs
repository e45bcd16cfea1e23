//! End-to-end tests of the `congruent` binary: exit-status contract,
//! stdout/stderr separation, JSON report re-verification, and cache
//! idempotence through the CLI surface.

use congruent::cli::CertificateJson;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_congruent"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

#[test]
fn verify_5_default_path() {
    let out = run(&["verify", "5"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("congruent"), "{text}");
    assert!(text.contains("(1681/144, "), "{text}");
    assert!(text.contains("20/3 3/2 41/6"), "{text}");
}

#[test]
fn verify_5_double_first_reproduces_doubled_triangle() {
    let out = run(&["verify", "5", "--double-first"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("4920/1519 1519/492 3344161/747348"), "{text}");
}

#[test]
fn verify_13_json_certificate() {
    let out = run(&["verify", "13", "--json"]);
    assert_eq!(out.status.code(), Some(0));
    let report: CertificateJson = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(report.verdict, "congruent");
    assert_eq!(report.x.as_deref(), Some("11432100241/375584400"));
    assert_eq!(report.discriminant, Some(-55));
    // the exact identities re-check from the report's strings alone
    report.check_exact().unwrap();
}

#[test]
fn verify_rejects_non_square_free_input() {
    let out = run(&["verify", "12"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("square-free"));
}

#[test]
fn verify_inapplicable_status() {
    let out = run(&["verify", "1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stdout(&out).contains("inapplicable"));
}

#[test]
fn forced_discriminant_with_torsion_point_is_inconclusive() {
    // -23 is a valid discriminant for N = 5408 whose Heegner sum is
    // torsion; forcing it must yield Inconclusive, never Congruent.
    let out = run(&["verify", "13", "--disc", "-23"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(stdout(&out).contains("inconclusive"));
}

#[test]
fn forced_discriminant_matching_source_example() {
    let out = run(&["verify", "5", "--disc", "-31", "--json"]);
    assert_eq!(out.status.code(), Some(0));
    let report: CertificateJson = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(report.root, Some(113));
    report.check_exact().unwrap();
}

#[test]
fn triangle_subcommand() {
    let out = run(&["triangle", "5"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out).trim(), "20/3 3/2 41/6");

    let out = run(&["triangle", "13"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out).trim(), "323/30 780/323 106921/9690");

    let out = run(&["triangle", "1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stdout(&out).trim().is_empty());
    assert!(String::from_utf8_lossy(&out.stderr).contains("inapplicable"));
}

#[test]
fn coeffs_to_stdout_matches_expansion() {
    let out = run(&["coeffs", "5", "--limit", "100"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.starts_with("CNVC 1 n=5 M=100\n"));
    assert!(text.contains("\n13 -6\n"));
    assert!(text.contains("\n97 -18\n"));
}

#[test]
fn coeffs_cache_file_idempotent_and_extending() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("c13.cnvc");
    let p = path.to_str().unwrap();

    let out = run(&["coeffs", "13", "--limit", "100", "--cache", p]);
    assert_eq!(out.status.code(), Some(0));
    let first = std::fs::read(&path).unwrap();
    let text = String::from_utf8_lossy(&first).into_owned();
    assert!(text.contains("\n45 -6\n"));
    assert!(text.contains("\n85 4\n"));

    // re-run: byte-identical
    let out = run(&["coeffs", "13", "--limit", "100", "--cache", p]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(std::fs::read(&path).unwrap(), first);

    // extend: header advances, old entries preserved
    let out = run(&["coeffs", "13", "--limit", "150", "--cache", p]);
    assert_eq!(out.status.code(), Some(0));
    let second = String::from_utf8_lossy(&std::fs::read(&path).unwrap()).into_owned();
    assert!(second.starts_with("CNVC 1 n=13 M=150\n"));
    assert!(second.contains("\n85 4\n"));

    // corrupt header refuses
    std::fs::write(&path, "CNVC 9 n=13 M=10\n").unwrap();
    let out = run(&["coeffs", "13", "--limit", "100", "--cache", p]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn verify_with_cache_flag_creates_usable_cache() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("v5.cnvc");
    let p = path.to_str().unwrap();
    let out = run(&["verify", "5", "--cache", p]);
    assert_eq!(out.status.code(), Some(0));
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.starts_with("CNVC 1 n=5 M="));
    // second run reuses the file (and still succeeds)
    let out = run(&["verify", "5", "--cache", p]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn json_round_trip_property() {
    // Parsing the report and re-checking the exact identities succeeds
    // using only the report's strings, for several verdicts.
    for (n, expect_code) in [("5", 0), ("13", 0), ("1", 2)] {
        let out = run(&["verify", n, "--json"]);
        assert_eq!(out.status.code(), Some(expect_code));
        let report: CertificateJson = serde_json::from_str(&stdout(&out)).unwrap();
        report.check_exact().unwrap();
        let round: CertificateJson =
            serde_json::from_str(&serde_json::to_string(&report).unwrap()).unwrap();
        round.check_exact().unwrap();
    }
}
