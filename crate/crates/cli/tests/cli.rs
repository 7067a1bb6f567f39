use std::path::PathBuf;
use std::process::{Command, Output};

fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("data")
        .join(name)
}

fn qinv(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qinv"))
        .args(args)
        .output()
        .expect("run qinv")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn code() -> String {
    data("code442.qcode").display().to_string()
}

#[test]
fn invariant_prints_twelve_decimals() {
    let o = qinv(&[
        "invariant",
        "--code",
        &code(),
        "--tuple",
        "(1,2);(1,2);(1,2);(1,2)",
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "4.000000000000 0.000000000000\n");
}

#[test]
fn invariant_quartic_values() {
    let cases = [
        ("(1,3)(2,4);(1,2)(3,4);(1,2)(3,4);(1,2)(3,4)", "4"),
        ("(1,4,2,3);(1,2)(3,4);(1,2)(3,4);(1,2)(3,4)", "2"),
    ];
    for (tuple, expect) in cases {
        let o = qinv(&[
            "invariant",
            "--code",
            &code(),
            "--tuple",
            tuple,
            "--expect",
            expect,
        ]);
        assert_eq!(o.status.code(), Some(0), "{tuple}: {}", stdout(&o));
    }
    let o = qinv(&[
        "invariant",
        "--code",
        &code(),
        "--tuple",
        "(1,2,3,4);(1,2,3,4);(1,3,4,2);(1,4,2,3)",
        "--symmetrize",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let o = qinv(&[
        "invariant",
        "--code",
        &code(),
        "--tuple",
        "e;e;e;e",
        "--k",
        "3",
        "--expect",
        "63",
    ]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(stdout(&o), "64.000000000000 0.000000000000\n");
}

#[test]
fn input_errors_exit_two() {
    let o = qinv(&[
        "invariant",
        "--code",
        &code(),
        "--tuple",
        "(1,9)",
        "--k",
        "4",
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("--tuple"));
    let o = qinv(&["invariant", "--code", "/nonexistent.qcode", "--tuple", "e"]);
    assert_eq!(o.status.code(), Some(2));
    let o = qinv(&["invariant", "--code", &code(), "--tuple", "(1,2);(1,2)"]);
    assert_eq!(o.status.code(), Some(2));
    let o = qinv(&["no-such-command"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn budget_comes_from_environment() {
    let o = Command::new(env!("CARGO_BIN_EXE_qinv"))
        .args([
            "invariant",
            "--code",
            &code(),
            "--tuple",
            "(1,2);(1,2);(1,2);(1,2)",
        ])
        .env("QINV_MAX_DIM", "100")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn shadow_is_nonnegative() {
    for t in ["", "1", "1,2", "2,4", "1,2,3,4"] {
        let o = qinv(&["shadow", "--code", &code(), "--T", t]);
        assert_eq!(o.status.code(), Some(0));
        let re: f64 = stdout(&o)
            .split_whitespace()
            .next()
            .unwrap()
            .parse()
            .unwrap();
        assert!(re >= -1e-9, "T={t}: {re}");
    }
    let o = qinv(&["shadow", "--code", &code(), "--T", ""]);
    // the full enumerator is 84, so the normalized functional is 84 / 16
    assert_eq!(stdout(&o), "5.250000000000 0.000000000000\n");
}

#[test]
fn shadow_element_is_idempotent() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("lambda.txt");
    let o = qinv(&["shadow-element", "--T", "1,3", "--n", "3"]);
    assert_eq!(o.status.code(), Some(0));
    std::fs::write(&path, &o.stdout).unwrap();
    let o = qinv(&["check-idempotent", "--element", path.to_str().unwrap()]);
    assert_eq!(stdout(&o), "idempotent: yes\n");
    assert_eq!(o.status.code(), Some(0));

    std::fs::write(&path, "1 0 (1,2)\n").unwrap();
    let o = qinv(&["check-idempotent", "--element", path.to_str().unwrap()]);
    assert_eq!(stdout(&o), "idempotent: no\n");
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn reduce_quintic() {
    let input = data("quintic.expr").display().to_string();
    let o = qinv(&[
        "reduce",
        "--input",
        &input,
        "--purity-size",
        "3",
        "--K",
        "4",
        "--check",
        &code(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(
        stdout(&o),
        "0.250000000000 0.000000000000 2 (1,2);(1,2);e;e\n"
    );
    let o = qinv(&[
        "reduce",
        "--input",
        &input,
        "--purity-size",
        "3",
        "--K",
        "4",
        "--c",
        "0.5",
    ]);
    assert_eq!(
        stdout(&o),
        "0.250000000000 0.000000000000 2 (1,2);(1,2);e;e\n"
    );
    let o = qinv(&[
        "reduce",
        "--input",
        &input,
        "--purity-size",
        "3",
        "--K",
        "4",
        "--c",
        "0.3",
    ]);
    assert_eq!(o.status.code(), Some(2));
    let o = qinv(&["reduce", "--input", &input, "--code", &code()]);
    assert_eq!(o.status.code(), Some(0));
    // 0.25 Tr(P) = 1, the value of the quintic invariant
    assert_eq!(stdout(&o), "0.250000000000 0.000000000000 1 e;e;e;e\n");
}

#[test]
fn purity_report() {
    let o = qinv(&["purity", "--code", &code(), "--max-size", "1"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.contains("S={3} c 2.000000000000\n"));
    assert!(out.ends_with("mds: yes\n"));
}

#[test]
fn verify_442_exit_codes() {
    let o = qinv(&["verify-442", "--unitaries", "2", "--seed", "7"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let out = stdout(&o);
    assert!(out.starts_with("# verify-442 stab=XXXX,ZZZZ"));
    assert!(out.contains("seed=7"));
    assert!(out.ends_with("18 checks, 0 failed\n"));

    let o = qinv(&["verify-442", "--stab", "XXXI,ZZZZ"]);
    assert_eq!(o.status.code(), Some(2));
    let o = qinv(&["verify-442", "--tolerance", "0", "--unitaries", "1"]);
    assert_eq!(o.status.code(), Some(1));
    // a locally equivalent code passes as well
    let o = qinv(&["verify-442", "--stab", "ZZZZ,XXXX", "--unitaries", "1"]);
    assert_eq!(o.status.code(), Some(0));
}
