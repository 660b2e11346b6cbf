//! End-to-end tests of the binary: exit codes, file formats, determinism,
//! and the published size table.

use assert_cmd::Command;
use predicates::prelude::*;

fn minrank() -> Command {
    let mut cmd = Command::cargo_bin("minrank").unwrap();
    cmd.env_remove("MINRANK_SEED");
    cmd
}

const SEED: &str = "000102030405060708090a0b0c0d0e0f";

#[test]
fn sizes_matches_golden_file() {
    minrank()
        .arg("sizes")
        .assert()
        .success()
        .stdout(include_str!("fixtures/size_table_golden.txt"));
}

#[test]
fn sizes_other_formats_parse() {
    let out = minrank()
        .args(["sizes", "--format", "json"])
        .assert()
        .success()
        .get_output()
        .stdout
        .clone();
    let value: serde_json::Value = serde_json::from_slice(&out).unwrap();
    let rows = value.as_array().unwrap();
    assert_eq!(rows.len(), 6);
    assert_eq!(rows[0]["pk_bits"][2], 356);

    let out = minrank()
        .args(["sizes", "--format", "csv"])
        .assert()
        .success()
        .get_output()
        .stdout
        .clone();
    let text = String::from_utf8(out).unwrap();
    assert!(text.starts_with("set,lambda,q,m,n,k,r,"));
    assert_eq!(text.lines().count(), 7);
}

#[test]
fn keygen_writes_blobs_of_published_size() {
    let dir = tempfile::tempdir().unwrap();
    minrank()
        .args(["keygen", "--set", "mirith-Ia", "--variant", "3", "--seed", SEED])
        .arg("--out")
        .arg(dir.path())
        .assert()
        .success()
        .stdout(predicate::str::contains("356 bits"));
    // 356 bits -> 45 bytes -> 90 hex chars (plus newline)
    let pk = std::fs::read_to_string(dir.path().join("pk.hex")).unwrap();
    assert_eq!(pk.trim().len(), 90);
    let sk = std::fs::read_to_string(dir.path().join("sk.hex")).unwrap();
    assert_eq!(sk.trim().len(), 64);
}

#[test]
fn keygen_is_deterministic_in_the_seed() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for dir in [&a, &b] {
        minrank()
            .args(["keygen", "--set", "toy-3-4-4-3-2", "--variant", "2", "--seed", SEED])
            .arg("--out")
            .arg(dir.path())
            .assert()
            .success();
    }
    for file in ["pk.hex", "sk.hex"] {
        assert_eq!(
            std::fs::read(a.path().join(file)).unwrap(),
            std::fs::read(b.path().join(file)).unwrap(),
            "{file}"
        );
    }
}

#[test]
fn seed_env_var_is_a_fallback() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    minrank()
        .args(["keygen", "--set", "toy-2-3-3-2-1", "--variant", "1", "--seed", SEED])
        .arg("--out")
        .arg(a.path())
        .assert()
        .success();
    minrank()
        .env("MINRANK_SEED", SEED)
        .args(["keygen", "--set", "toy-2-3-3-2-1", "--variant", "1"])
        .arg("--out")
        .arg(b.path())
        .assert()
        .success();
    assert_eq!(
        std::fs::read(a.path().join("pk.hex")).unwrap(),
        std::fs::read(b.path().join("pk.hex")).unwrap()
    );
}

#[test]
fn verify_roundtrip_reports_canonical_status() {
    let dir = tempfile::tempdir().unwrap();
    for (variant, canonical) in [("1", "canonical: no"), ("3", "canonical: yes")] {
        minrank()
            .args(["keygen", "--set", "toy-3-4-4-3-2", "--variant", variant, "--seed", SEED])
            .arg("--out")
            .arg(dir.path())
            .assert()
            .success();
        minrank()
            .args(["verify", "--set", "toy-3-4-4-3-2", "--variant", variant])
            .arg("--pk")
            .arg(dir.path().join("pk.hex"))
            .arg("--sk")
            .arg(dir.path().join("sk.hex"))
            .assert()
            .success()
            .stdout(predicate::str::contains("witness: valid").and(predicate::str::contains(canonical)));
    }
}

#[test]
fn verify_rejects_mismatched_keys_with_exit_1() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for (dir, seed) in [(&a, SEED), (&b, "ffeeddccbbaa99887766554433221100")] {
        minrank()
            .args(["keygen", "--set", "toy-3-4-4-3-2", "--variant", "3", "--seed", seed])
            .arg("--out")
            .arg(dir.path())
            .assert()
            .success();
    }
    minrank()
        .args(["verify", "--set", "toy-3-4-4-3-2", "--variant", "3"])
        .arg("--pk")
        .arg(a.path().join("pk.hex"))
        .arg("--sk")
        .arg(b.path().join("sk.hex"))
        .assert()
        .code(1);
}

#[test]
fn usage_errors_exit_2() {
    minrank()
        .args(["keygen", "--set", "toy-2-3-3-2-1", "--variant", "4"])
        .assert()
        .code(2);
    minrank()
        .args(["keygen", "--set", "no-such-set", "--variant", "1"])
        .assert()
        .code(2);
    // explicit params violating the overdetermined condition
    minrank()
        .args(["keygen", "--q", "16", "--m", "15", "--n", "15", "--k", "81", "--r", "6", "--variant", "1"])
        .assert()
        .code(2);
}

#[test]
fn io_errors_exit_3() {
    minrank()
        .args(["verify", "--set", "toy-2-3-3-2-1", "--variant", "1"])
        .args(["--pk", "/nonexistent/pk.hex", "--sk", "/nonexistent/sk.hex"])
        .assert()
        .code(3);
}

#[test]
fn stats_subcommand_is_deterministic_and_emits_csv() {
    let run = || {
        minrank()
            .args([
                "stats", "invertible", "--set", "toy-2-3-3-2-1", "--s", "8", "--trials",
                "1000", "--seed", "5", "--format", "csv",
            ])
            .assert()
            .success()
            .get_output()
            .stdout
            .clone()
    };
    let a = run();
    let b = run();
    assert_eq!(a, b);
    let text = String::from_utf8(a).unwrap();
    assert!(text.starts_with("kind,trials,successes,"));
    assert!(text.contains("invertible,1000,"));
    assert!(text.trim_end().ends_with(",pass"));
}

#[test]
fn stats_unknown_kind_exits_2() {
    minrank()
        .args(["stats", "bogus", "--set", "toy-2-3-3-2-1"])
        .assert()
        .code(2);
}
