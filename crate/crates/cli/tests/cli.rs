use std::process::{Command, Output};

fn qse(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qse"))
        .args(args)
        .env_remove("QSE_JOBS")
        .output()
        .expect("spawn qse")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

const HYDROGENIC: [&str; 8] = ["--m", "1", "--lambda", "1", "--N", "1", "--K", "1"];

fn certify(z: &str) -> Output {
    let mut args = vec!["certify", "--alpha", "0.00729927", "--Z", z];
    args.extend(HYDROGENIC);
    qse(&args)
}

#[test]
fn certify_exit_codes() {
    let ok = certify("42");
    assert_eq!(code(&ok), 0);
    let json: serde_json::Value = serde_json::from_slice(&ok.stdout).unwrap();
    assert_eq!(json["feasible"], true);
    assert!(json["report"]["total"].is_number());

    let bad = certify("43");
    assert_eq!(code(&bad), 2);
    let json: serde_json::Value = serde_json::from_slice(&bad.stdout).unwrap();
    assert_eq!(json["feasible"], false);
    assert!(json["report"].is_null());

    assert_eq!(code(&certify("-1")), 64);
}

#[test]
fn certify_flag_errors_are_usage() {
    assert_eq!(code(&qse(&["certify", "--Z", "1"])), 64);
    assert_eq!(
        code(&qse(&[
            "certify",
            "--alpha",
            "0.1",
            "--alpha-inverse",
            "137",
            "--Z",
            "1"
        ])),
        64
    );
    assert_eq!(
        code(&qse(&[
            "certify",
            "--alpha",
            "0.007",
            "--Z",
            "1",
            "--eps",
            "0.5",
            "--optimize-eps"
        ])),
        64
    );
    assert_eq!(
        code(&qse(&[
            "certify", "--alpha", "0.007", "--Z", "1", "--eps", "1.5"
        ])),
        64
    );
    assert_eq!(
        code(&qse(&[
            "certify", "--alpha", "0.007", "--Z", "1", "--N", "0"
        ])),
        64
    );
    assert_eq!(code(&qse(&["bogus"])), 64);
    assert_eq!(code(&qse(&["--help"])), 0);
}

#[test]
fn paper_mode_hydrogen_notes_mass_coefficient() {
    let o = qse(&[
        "certify",
        "--alpha-inverse",
        "137",
        "--Z",
        "1",
        "--eps",
        "0.771",
        "--paper-mode",
    ]);
    assert_eq!(code(&o), 0);
    let json: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let c2 = json["C2"].as_f64().unwrap();
    assert!((c2 - 0.908).abs() < 1e-3, "{c2}");
    assert!(json["notes"][0].as_str().unwrap().contains("0.866"));
}

#[test]
fn maxz_at_inverse_137() {
    for extra in [&[][..], &["--paper-mode"][..]] {
        let mut args = vec!["maxz", "--alpha-inverse", "137"];
        args.extend(extra);
        let o = qse(&args);
        assert_eq!(code(&o), 0);
        let json: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
        assert_eq!(json["max_Z"], 42);
    }
}

#[test]
fn phase_writes_ten_rows() {
    let o = qse(&[
        "phase",
        "--alpha-min",
        "0.001",
        "--alpha-max",
        "0.01",
        "--steps",
        "10",
    ]);
    assert_eq!(code(&o), 0);
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(!text.contains('\r'));
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "alpha,max_Z,eps");
    assert_eq!(lines.len(), 11);
    let zs: Vec<u64> = lines[1..]
        .iter()
        .map(|l| l.split(',').nth(1).unwrap().parse().unwrap())
        .collect();
    assert!(zs.windows(2).all(|w| w[1] <= w[0]), "{zs:?}");
}

#[test]
fn phase_to_file_matches_stdout() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("phase.csv");
    let args = [
        "phase",
        "--alpha-min",
        "0.002",
        "--alpha-max",
        "0.02",
        "--steps",
        "7",
    ];
    let direct = qse(&args);
    let mut with_file = args.to_vec();
    let p = path.to_str().unwrap();
    with_file.extend(["--output", p]);
    let o = qse(&with_file);
    assert_eq!(code(&o), 0);
    assert!(o.stdout.is_empty());
    assert_eq!(std::fs::read(&path).unwrap(), direct.stdout);
}

#[test]
fn classify_free_classical_is_first_kind_unstable() {
    let o = qse(&[
        "classify",
        "--projector",
        "free",
        "--field",
        "classical",
        "--cutoff",
        "no",
        "--coulomb",
        "no",
        "--alpha",
        "0.001",
    ]);
    assert_eq!(code(&o), 2);
    let json: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(json["kind"], "instability_first_kind");
}

#[test]
fn classify_dressed_quantized_cutoff_is_stable() {
    let o = qse(&[
        "classify",
        "--projector",
        "dressed",
        "--field",
        "quantized",
        "--cutoff",
        "yes",
        "--coulomb",
        "yes",
        "--alpha-inverse",
        "137",
        "--Z",
        "20",
    ]);
    assert_eq!(code(&o), 0);
    let json: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(json["kind"], "stable_second_kind");
}

#[test]
fn verify_suites() {
    let o = qse(&["verify", "--suite", "bks", "--trials", "500", "--seed", "7"]);
    assert_eq!(code(&o), 0);
    let json: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(json["pass"], true);
    assert_eq!(json["suites"][0]["trials"], 500);

    assert_eq!(code(&qse(&["verify", "--suite", "nope"])), 64);
    assert_eq!(code(&qse(&["verify", "--suite", "bks", "--tol", "-1"])), 64);
}

#[test]
fn verify_is_byte_identical_across_runs_and_jobs() {
    let base = [
        "verify",
        "--suite",
        "bks,projector,localization",
        "--trials",
        "60",
        "--seed",
        "3",
    ];
    let a = qse(&base);
    let b = qse(&base);
    let mut single = base.to_vec();
    single.extend(["--jobs", "1"]);
    let c = qse(&single);
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(a.stdout, c.stdout);
}

#[test]
fn certify_is_byte_identical() {
    assert_eq!(certify("30").stdout, certify("30").stdout);
}

#[test]
fn jobs_env_fallback_is_validated() {
    let o = Command::new(env!("CARGO_BIN_EXE_qse"))
        .args(["maxz", "--alpha", "0.01"])
        .env("QSE_JOBS", "zero")
        .output()
        .unwrap();
    assert_eq!(code(&o), 64);
    assert_eq!(code(&qse(&["--jobs", "0", "maxz", "--alpha", "0.01"])), 64);
}
