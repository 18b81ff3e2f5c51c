//! End-to-end runs of the `phasekit` binary.

use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_phasekit"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn tables() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tables")
}

fn json_of(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

#[test]
fn verify_gadget_lists_variant_equivalence() {
    let out = run(&["verify", "--suite", "gadget", "--seed", "1"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let report = json_of(&out);
    assert_eq!(report["pass"], true);
    let eq = report["cases"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|c| c["name"] == "variant-equivalence")
        .count();
    // 10 variant pairs for each of 4 moduli
    assert_eq!(eq, 40);
    assert_eq!(
        report["versions"]["rng"]
            .as_str()
            .unwrap()
            .split(' ')
            .next(),
        Some("chacha20/seed_from_u64")
    );
}

#[test]
fn verify_optimality_reports_separations_per_modulus_and_k() {
    let out = run(&["verify", "--suite", "optimality", "--json"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stderr.is_empty());
    let report = json_of(&out);
    let cases: Vec<&Value> = report["cases"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|c| c["name"] == "candidates-pairwise-distinct")
        .collect();
    let expected: usize = (2..=16).map(|m| m - 1).sum();
    assert_eq!(cases.len(), expected);
    for c in cases {
        assert!(c["parameters"]["min_separation_plus"].as_f64().unwrap() > 1e-6);
        assert!(c["parameters"]["min_separation_minus"].as_f64().unwrap() > 1e-6);
    }
}

#[test]
fn unknown_suite_is_a_usage_error() {
    let out = run(&["verify", "--suite", "nonsense"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("unknown suite 'nonsense'"));
    assert!(out.stdout.is_empty());
}

#[test]
fn bad_flags_exit_two() {
    assert_eq!(run(&["verify", "--tol", "bogus=1"]).status.code(), Some(2));
    assert_eq!(
        run(&["gadget", "--m", "4", "--k", "1"]).status.code(),
        Some(2)
    );
    assert_eq!(
        run(&[
            "gadget",
            "--m",
            "4",
            "--k",
            "1",
            "--z",
            "0",
            "--variant",
            "x"
        ])
        .status
        .code(),
        Some(2)
    );
    assert_eq!(
        run(&["demo", "ck", "--n", "2", "--gamma", "tau"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn tightened_tolerance_makes_verification_fail() {
    let out = run(&["verify", "--suite", "apps", "--tol", "quantized=0"]);
    assert_eq!(out.status.code(), Some(1));
    let report = json_of(&out);
    assert_eq!(report["pass"], false);
    assert!(report["failed"]
        .as_array()
        .unwrap()
        .iter()
        .any(|f| f == "apps/ck-quantized-vs-exact"));
    assert!(stderr(&out).contains("FAIL"));
}

#[test]
fn reports_are_byte_identical_for_a_fixed_seed() {
    for args in [
        &["verify", "--suite", "mixed", "--seed", "7"][..],
        &[
            "demo",
            "dj",
            "--n",
            "3",
            "--ancilla",
            "mixed",
            "--seed",
            "5",
        ][..],
        &["gadget", "--m", "8", "--k", "3", "--z", "5", "--seed", "2"][..],
    ] {
        let a = run(args);
        let b = run(args);
        assert_eq!(a.status.code(), Some(0));
        assert_eq!(a.stdout, b.stdout, "{args:?}");
    }
    let a = run(&["verify", "--suite", "mixed", "--seed", "8"]);
    let b = run(&["verify", "--suite", "mixed", "--seed", "9"]);
    assert_ne!(a.stdout, b.stdout);
}

#[test]
fn out_flag_writes_the_same_report() {
    let dir = std::env::temp_dir().join(format!("phasekit-cli-test-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("report.json");
    let to_file = run(&[
        "verify",
        "--suite",
        "primitives",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(to_file.status.code(), Some(0));
    assert!(to_file.stdout.is_empty());
    let stdout = run(&["verify", "--suite", "primitives"]);
    assert_eq!(std::fs::read(&path).unwrap(), stdout.stdout);
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn floats_carry_seventeen_significant_digits() {
    let out = run(&["gadget", "--m", "4", "--k", "1", "--z", "3"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(
        text.contains("\"expected_phase\": -1.5707963267948966e0"),
        "{text}"
    );
}

#[test]
fn dj_demo_on_balanced_file() {
    let table = tables().join("bal4.txt");
    let out = run(&[
        "demo",
        "dj",
        "--table",
        table.to_str().unwrap(),
        "--ancilla",
        "random",
        "--seed",
        "3",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let v = json_of(&out);
    assert_eq!(v["verdict"], "balanced");
    assert!(v["p_zero"].as_f64().unwrap().abs() < 1e-9);
    assert_eq!(v["oracle_calls"], 2);
    assert!(v["ancilla_restoration_fidelity"].as_f64().unwrap() >= 1.0 - 1e-9);
}

#[test]
fn grover_demo_n4_single_iteration() {
    let out = run(&[
        "demo", "grover", "--n", "2", "--target", "2", "--iters", "1",
    ]);
    let v = json_of(&out);
    assert!((v["success_probability"].as_f64().unwrap() - 1.0).abs() < 1e-9);
    assert_eq!(v["f_evaluations"], 2);
    assert_eq!(v["oracle_calls"], 4);
}

#[test]
fn ck_demo_quarter_marked() {
    let out = run(&[
        "demo",
        "ck",
        "--n",
        "2",
        "--solutions",
        "1",
        "--gamma",
        "pi",
        "--beta",
        "pi",
        "--mbits",
        "4",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let v = json_of(&out);
    assert!((v["success_probability"].as_f64().unwrap() - 1.0).abs() < 1e-9);
    assert_eq!(v["input"]["M"], 2);
    assert_eq!(v["parameters"]["mbits"], 4);
}

#[test]
fn every_shipped_demo_restores_the_ancilla() {
    let dir = tables();
    let t = |name: &str| dir.join(name).to_str().unwrap().to_string();
    let runs: Vec<Vec<String>> = vec![
        vec!["demo".into(), "dj".into(), "--table".into(), t("bal4.txt")],
        vec![
            "demo".into(),
            "dj".into(),
            "--table".into(),
            t("const8.txt"),
            "--ancilla".into(),
            "mixed".into(),
        ],
        vec![
            "demo".into(),
            "dj".into(),
            "--n".into(),
            "4".into(),
            "--constant".into(),
            "0".into(),
            "--ancilla".into(),
            "zero".into(),
        ],
        vec![
            "demo".into(),
            "grover".into(),
            "--table".into(),
            t("marked8.txt"),
            "--variant".into(),
            "sform".into(),
        ],
        vec![
            "demo".into(),
            "grover".into(),
            "--n".into(),
            "5".into(),
            "--solutions".into(),
            "3".into(),
            "--ancilla".into(),
            "mixed".into(),
        ],
        vec![
            "demo".into(),
            "ck".into(),
            "--n".into(),
            "4".into(),
            "--solutions".into(),
            "4".into(),
            "--ancilla".into(),
            "mixed".into(),
        ],
        vec![
            "demo".into(),
            "ck".into(),
            "--table".into(),
            t("marked8.txt"),
            "--gamma".into(),
            "2pi/3".into(),
            "--beta".into(),
            "-pi/2".into(),
            "--mbits".into(),
            "6".into(),
        ],
    ];
    for args in runs {
        let args: Vec<&str> = args.iter().map(String::as_str).collect();
        let out = run(&args);
        assert_eq!(out.status.code(), Some(0), "{args:?}: {}", stderr(&out));
        let v = json_of(&out);
        let fid = v["ancilla_restoration_fidelity"].as_f64().unwrap();
        assert!(fid >= 1.0 - 1e-9, "{args:?}: {fid}");
        assert!(v["oracle_calls"].as_u64().unwrap() >= 2);
    }
}

#[test]
fn table_parse_errors_name_file_and_line() {
    let dir = std::env::temp_dir().join(format!("phasekit-cli-bad-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("bad.txt");
    std::fs::write(&path, "4 2\n0 0\n1 1\n1 0\n3 1\n").unwrap();
    let out = run(&["demo", "dj", "--table", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let err = stderr(&out);
    assert!(err.contains("bad.txt: line 4"), "{err}");
    let missing = run(&[
        "demo",
        "dj",
        "--table",
        dir.join("absent.txt").to_str().unwrap(),
    ]);
    assert_eq!(missing.status.code(), Some(2));
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn gadget_phases() {
    let v = json_of(&run(&["gadget", "--m", "4", "--k", "1", "--z", "3"]));
    assert!((v["measured_phase"].as_f64().unwrap() + std::f64::consts::FRAC_PI_2).abs() < 1e-10);
    assert_eq!(v["pass"], true);
    let zero = json_of(&run(&["gadget", "--m", "4", "--k", "1", "--z", "0"]));
    assert!(zero["measured_phase"].as_f64().unwrap().abs() < 1e-10);
    let sform = json_of(&run(&[
        "gadget",
        "--m",
        "16",
        "--k",
        "5",
        "--z",
        "7",
        "--variant",
        "sform",
    ]));
    let comm = json_of(&run(&[
        "gadget",
        "--m",
        "16",
        "--k",
        "5",
        "--z",
        "7",
        "--variant",
        "comm-a",
    ]));
    let d = sform["measured_phase"].as_f64().unwrap() - comm["measured_phase"].as_f64().unwrap();
    assert!(d.abs() < 1e-10);
}

#[test]
fn bench_emits_one_record_per_size() {
    let out = run(&["bench", "--max-n", "10", "--max-m", "4", "--reps", "3"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let text = String::from_utf8(out.stdout).unwrap();
    let records: Vec<Value> = text
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect();
    assert_eq!(records.len(), 40);
    for r in &records {
        assert_eq!(r["oracle_calls"], 2);
        assert_eq!(r["reps"], 3);
        assert!(r["wall_time"].as_f64().unwrap() >= 0.0);
    }
    assert_eq!(records.last().unwrap()["N"], 1024);
    assert_eq!(records.last().unwrap()["M"], 16);
}

#[test]
fn bench_output_is_deterministic_apart_from_timing() {
    let strip = |out: Output| -> Vec<Value> {
        String::from_utf8(out.stdout)
            .unwrap()
            .lines()
            .map(|l| {
                let mut v: Value = serde_json::from_str(l).unwrap();
                v.as_object_mut().unwrap().remove("wall_time");
                v
            })
            .collect()
    };
    let a = strip(run(&[
        "bench", "--max-n", "3", "--max-m", "2", "--reps", "1",
    ]));
    let b = strip(run(&[
        "bench", "--max-n", "3", "--max-m", "2", "--reps", "1",
    ]));
    assert_eq!(a, b);
}

#[test]
fn bench_budget_guard() {
    let out = run(&["bench", "--max-n", "40"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("exceeds the budget"));
    assert!(out.stdout.is_empty());

    let env = bin()
        .args(["bench", "--max-n", "4", "--max-m", "2"])
        .env("PHASEKIT_MEM_BUDGET", "32")
        .output()
        .unwrap();
    assert_eq!(env.status.code(), Some(2));
    let flag = bin()
        .args([
            "bench",
            "--max-n",
            "4",
            "--max-m",
            "2",
            "--mem-budget",
            "64",
        ])
        .env("PHASEKIT_MEM_BUDGET", "32")
        .output()
        .unwrap();
    assert_eq!(flag.status.code(), Some(0));
}
