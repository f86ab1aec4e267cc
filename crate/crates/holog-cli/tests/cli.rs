//! End-to-end tests of the binary: exit-code contract, deterministic
//! machine-readable output, and the behavior of each subcommand on the
//! fixture files.

use std::path::PathBuf;
use std::process::{Command, Output};

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
}

fn holog(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_holog"))
        .args(args)
        .env_remove("HOLOG_BACKEND")
        .env_remove("HOLOG_SEED")
        .env_remove("HOLOG_MAX_FIBER")
        .env_remove("HOLOG_FORMAT")
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf-8 stdout")
}

#[test]
fn exit_codes_distinguish_the_error_classes() {
    let sig = fixture("sig_one_sort.txt");
    let sig = sig.to_str().unwrap();
    let z2 = fixture("grpd_z2.txt");
    let z2 = z2.to_str().unwrap();

    // Grammatical garbage: parse error.
    let out = holog(&["check", "--signature", sig, "(("]);
    assert_eq!(out.status.code(), Some(10), "{out:?}");

    // Malformed signature file: parse error too.
    let bad = fixture("sig_bad.txt");
    let out = holog(&["check", "--signature", bad.to_str().unwrap(), "T"]);
    assert_eq!(out.status.code(), Some(10), "{out:?}");

    // Well-formed but ill-sorted: type error.
    let out = holog(&["check", "--signature", sig, "f(c, c) = c"]);
    assert_eq!(out.status.code(), Some(11), "{out:?}");

    // Fiber larger than the guard: overflow.
    let out = holog(&[
        "--backend",
        "groupoid",
        "--max-fiber",
        "1",
        "eval",
        "--signature",
        sig,
        "--structure",
        z2,
        "exists x:A. T",
    ]);
    assert_eq!(out.status.code(), Some(12), "{out:?}");

    // A verdict contradicting --expect: verification failure.
    let out = holog(&[
        "--backend",
        "groupoid",
        "eval",
        "--signature",
        sig,
        "--structure",
        z2,
        "--expect",
        "inhabited",
        "exists x:A. forall y:A. x = y",
    ]);
    assert_eq!(out.status.code(), Some(13), "{out:?}");
}

#[test]
fn machine_output_is_byte_identical_across_runs() {
    let args = [
        "--format",
        "machine-readable",
        "--seed",
        "7",
        "relations",
        "--rounds",
        "2",
    ];
    let a = holog(&args);
    let b = holog(&args);
    assert!(a.status.success(), "{a:?}");
    assert_eq!(a.stdout, b.stdout);
    assert!(stdout(&a).starts_with("{\"schema\":\"holog-report/1\""));

    // A different seed changes the run but stays deterministic.
    let c = holog(&[
        "--format",
        "machine-readable",
        "--seed",
        "8",
        "relations",
        "--rounds",
        "2",
    ]);
    assert!(c.status.success());
    let parsed: serde_json::Value = serde_json::from_str(&stdout(&c)).unwrap();
    assert_eq!(parsed["seed"], 8);
    assert_eq!(parsed["failures"].as_array().unwrap().len(), 0);
}

#[test]
fn eval_splits_the_two_semantics_on_double_negation() {
    let sig = fixture("sig_one_sort.txt");
    let sig = sig.to_str().unwrap();
    let weak = "exists x:A. forall y:A. !!(x = y)";

    // Groupoid semantics on the two-element group: inhabited.
    let z2 = fixture("grpd_z2.txt");
    let out = holog(&[
        "--backend",
        "groupoid",
        "eval",
        "--signature",
        sig,
        "--structure",
        z2.to_str().unwrap(),
        "--expect",
        "inhabited",
        weak,
    ]);
    assert_eq!(out.status.code(), Some(0), "{out:?}");

    // Set semantics on a two-element carrier: empty.
    let pair = fixture("set_pair.txt");
    let out = holog(&[
        "eval",
        "--signature",
        sig,
        "--structure",
        pair.to_str().unwrap(),
        "--expect",
        "uninhabited",
        weak,
    ]);
    assert_eq!(out.status.code(), Some(0), "{out:?}");
}

#[test]
fn prove_check_reports_the_sequent_and_rejects_ill_typed_proofs() {
    let sig = fixture("sig_one_sort.txt");
    let sig = sig.to_str().unwrap();
    let z2 = fixture("grpd_z2.txt");

    let good = fixture("proof_good.txt");
    let out = holog(&[
        "--format",
        "machine-readable",
        "--backend",
        "groupoid",
        "prove-check",
        "--signature",
        sig,
        "--structure",
        z2.to_str().unwrap(),
        good.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{out:?}");
    let parsed: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(parsed["command"], "prove-check");
    assert_eq!(parsed["nodes"], 5);
    assert_eq!(parsed["sequent"]["context"], "(A)");
    assert_eq!(parsed["sequent"]["premise"], "p(x1, x1) = p(x1, x1)");
    assert_eq!(parsed["sequent"]["conclusion"], "p(x1, x1) = p(x1, x1)");
    assert_eq!(parsed["evaluated"], true);

    let bad = fixture("proof_ill_typed.txt");
    let out = holog(&["prove-check", "--signature", sig, bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(11), "{out:?}");
}

#[test]
fn invariance_on_the_identity_map_reports_invariant_fibers() {
    let sig = fixture("sig_one_sort.txt");
    let z2 = fixture("grpd_z2.txt");
    let map = fixture("map_identity.txt");
    let out = holog(&[
        "--format",
        "machine-readable",
        "--backend",
        "groupoid",
        "invariance",
        "--signature",
        sig.to_str().unwrap(),
        "--source",
        z2.to_str().unwrap(),
        "--target",
        z2.to_str().unwrap(),
        "--map",
        map.to_str().unwrap(),
        "exists x:A. forall y:A. !!(x = y)",
    ]);
    assert!(out.status.success(), "{out:?}");
    let parsed: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    // The file carries no quasi-inverse, so one was found by search.
    assert_eq!(parsed["equivalence_source"], "search");
    assert_eq!(parsed["all_equivalent"], true);
    assert_eq!(parsed["verdicts"][0]["equivalent"], true);

    // The set backend is not a valid target for this subcommand.
    let out = holog(&[
        "invariance",
        "--signature",
        sig.to_str().unwrap(),
        "--source",
        z2.to_str().unwrap(),
        "--target",
        z2.to_str().unwrap(),
        "--map",
        map.to_str().unwrap(),
        "T",
    ]);
    assert_eq!(out.status.code(), Some(2), "{out:?}");
}

#[test]
fn examples_gallery_holds() {
    let out = holog(&["--format", "machine-readable", "examples"]);
    assert!(out.status.success(), "{out:?}");
    let parsed: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(parsed["all_ok"], true);
    let entries = parsed["entries"].as_array().unwrap();
    assert!(entries.len() >= 12, "gallery has {} entries", entries.len());
    assert!(entries.iter().all(|e| e["inhabited"] == e["expected"]));
}

#[test]
fn environment_variables_stand_in_for_flags() {
    let out = Command::new(env!("CARGO_BIN_EXE_holog"))
        .args(["examples"])
        .env("HOLOG_FORMAT", "machine-readable")
        .output()
        .expect("binary runs");
    assert!(out.status.success());
    assert!(stdout(&out).starts_with("{\"schema\":"));
}
