use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../data")
        .join(name)
}

fn z2lab(args: &[&str], threads: Option<&str>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_z2lab"));
    cmd.args(args);
    match threads {
        Some(t) => cmd.env("Z2LAB_THREADS", t),
        None => cmd.env_remove("Z2LAB_THREADS"),
    };
    cmd.output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("valid JSON")
}

fn path(p: &std::path::Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn z2_of_powers_of_two() {
    let v = json(&z2lab(&["z2", "--set", path(&data("pow2.txt"))], None));
    assert_eq!(v["z2"], 1);
    assert_eq!(v["size"], 10);
}

#[test]
fn fock_n2_verifies() {
    let out = z2lab(&["fock", "--n", "2", "--verify", "--format", "text"], None);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.lines().any(|l| l == "passed: true"), "{text}");
    assert!(!text.contains("pass: false"));
}

#[test]
fn ten_term_witness_violates() {
    let v = json(&z2lab(
        &["ratio", "--poly", path(&data("witness10.json"))],
        None,
    ));
    assert_eq!(v["violates"], true);
    let hi = v["ratio_interval"][1].as_f64().unwrap();
    assert!(hi < std::f64::consts::FRAC_1_SQRT_2);
}

#[test]
fn exit_codes() {
    assert_eq!(z2lab(&[], None).status.code(), Some(64));
    assert_eq!(z2lab(&["frobnicate"], None).status.code(), Some(64));
    assert_eq!(z2lab(&["--help"], None).status.code(), Some(0));
    assert_eq!(
        z2lab(&["z2", "--set", "/no/such/file"], None).status.code(),
        Some(2)
    );
    assert_eq!(
        z2lab(
            &["z2", "--set", path(&data("pow2.txt")), "--tol", "0"],
            None
        )
        .status
        .code(),
        Some(2)
    );
    assert_eq!(
        z2lab(&["abelian", "--m", "0", "--case", "z2"], None)
            .status
            .code(),
        Some(2)
    );
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("dup.txt");
    std::fs::write(&bad, "1\n2\n2\n").unwrap();
    let out = z2lab(&["z2", "--set", path(&bad)], None);
    assert_eq!(out.status.code(), Some(2));
    assert!(!out.stderr.is_empty());
}

#[test]
fn generated_sets_round_trip_through_files() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("sidon.txt");
    let out = z2lab(
        &[
            "generate",
            "--kind",
            "greedy-sidon",
            "--count",
            "12",
            "--format",
            "text",
            "--out",
            path(&file),
        ],
        None,
    );
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let v = json(&z2lab(&["z2", "--set", path(&file)], None));
    assert_eq!(v["z2"], 1);
    let v = json(&z2lab(&["audit", "--set", path(&file)], None));
    assert_eq!(v["outcome"], "consistent");
}

#[test]
fn audit_of_an_interval_reports_a_violation() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("run.txt");
    let body: String = (0..12).map(|k| format!("{k}\n")).collect();
    std::fs::write(&file, body).unwrap();
    let v = json(&z2lab(&["audit", "--set", path(&file)], None));
    assert_eq!(v["z2"], 11);
    assert_eq!(v["outcome"], "violation");
    assert_eq!(v["violation"]["violates"], true);
}

#[test]
fn same_seed_gives_identical_bytes_across_thread_counts() {
    let args = [
        "profile",
        "--system",
        "real-gaussian",
        "--d",
        "2",
        "--samples",
        "200000",
        "--seed",
        "5",
    ];
    let a = z2lab(&args, Some("1"));
    let b = z2lab(&args, Some("4"));
    let c = z2lab(&args, None);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(a.stdout, c.stdout);
    let v: Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(v["profile"]["alpha"], 3.0);

    let poly = data("witness9.json");
    let norm = ["norm-s1rc", "--poly", path(&poly), "--seed", "3"];
    assert_eq!(
        z2lab(&norm, Some("1")).stdout,
        z2lab(&norm, Some("3")).stdout
    );
}

#[test]
fn csv_output_is_a_single_record() {
    let out = z2lab(
        &["l1", "--poly", path(&data("ap5.json")), "--format", "csv"],
        None,
    );
    assert_eq!(out.status.code(), Some(0));
    let mut rdr = csv::Reader::from_reader(out.stdout.as_slice());
    let headers = rdr.headers().unwrap().clone();
    let rec = rdr.records().next().unwrap().unwrap();
    let i = headers.iter().position(|h| h == "value").unwrap();
    let value: f64 = rec[i].parse().unwrap();
    assert!((value - 3.0).abs() < 1e-7);
}

#[test]
fn moments_and_zp_reports() {
    let v = json(&z2lab(
        &["moments", "--poly", path(&data("ap5.json"))],
        None,
    ));
    assert_eq!(v["frequency_z2"], 4);
    assert_eq!(v["moment_inequality"], true);
    assert_eq!(v["sup_bound_holds"], true);
    let v = json(&z2lab(
        &["zp", "--set", path(&data("pow2.txt")), "--p", "2"],
        None,
    ));
    assert_eq!(v["zp"], 1);
    let v = json(&z2lab(
        &["abelian", "--m", "2", "--case", "torus", "--check"],
        None,
    ));
    assert_eq!(v["check"]["agrees"], true);
}
