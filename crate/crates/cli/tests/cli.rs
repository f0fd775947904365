use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn ctrec(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ctrec"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn write_dyson_spec(dir: &Path, n: usize) -> String {
    let out = ctrec(&["dyson-spec", "--n", &n.to_string()]);
    assert_eq!(code(&out), 0);
    let path = dir.join(format!("dyson{n}.json"));
    fs::write(&path, &out.stdout).unwrap();
    path.to_str().unwrap().to_owned()
}

#[test]
fn constant_term() {
    let out = ctrec(&["ct", "--vars", "x1,x2", "(1 - x1/x2)*(1 - x2/x1)"]);
    assert_eq!(code(&out), 0);
    assert_eq!(stdout(&out).trim(), "2");

    let out = ctrec(&["--json", "ct", "--vars", "x", "(x + 1/x)^4"]);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["constant_term"], "6");
}

#[test]
fn parse_errors_exit_2() {
    for args in [
        &["ct", "--vars", "x1", "x1 +"][..],
        &["ct", "--vars", "x1", "x2"],
        &["ct", "--vars", "x1", "x1^(1/2)"],
        &["ct", "--vars", "x1", "1/(x1 + 1)"],
    ] {
        let out = ctrec(args);
        assert_eq!(code(&out), 2, "{args:?}");
        assert!(!out.stderr.is_empty());
    }
}

#[test]
fn dyson_single_and_grid() {
    let out = ctrec(&["dyson", "--n", "3", "--a", "1,1,1"]);
    assert_eq!(code(&out), 0);
    assert_eq!(stdout(&out).trim(), "a=(1,1,1) brute=6 recursive=6 multinomial=6 OK");

    let out = ctrec(&["dyson", "--n", "3", "--a", "2,1,1", "--method", "recursive"]);
    assert_eq!(stdout(&out).trim(), "a=(2,1,1) recursive=12");

    let out = ctrec(&["dyson", "--n", "2", "--amax", "3"]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).trim_end().ends_with("PASS: 16 instances (n=2, amax=3)"));

    let out = ctrec(&["--json", "dyson", "--n", "2", "--amax", "1"]);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["pass"], true);
    assert_eq!(v["rows"].as_array().unwrap().len(), 4);

    let out = ctrec(&["dyson", "--n", "3", "--a", "1,1"]);
    assert_eq!(code(&out), 2);
}

#[test]
fn lagrange() {
    let out = ctrec(&["lagrange", "--n", "4"]);
    assert_eq!(code(&out), 0);
    assert_eq!(stdout(&out).trim(), "identity holds (n=4)");
}

#[test]
fn annihilate_write_read_verify() {
    let dir = tempfile::tempdir().unwrap();
    for n in [2, 3] {
        let spec = write_dyson_spec(dir.path(), n);
        let cert = dir.path().join(format!("cert{n}.json"));
        let out = ctrec(&["annihilate", &spec, "--grid", "3", "--out", cert.to_str().unwrap()]);
        assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
        let text = stdout(&out);
        let expected = if n == 2 {
            "operator: A1 * A2 - A1 - A2\ngood form: 1 - A1^-1 - A2^-1\n"
        } else {
            "operator: A1 * A2 * A3 - A1 * A2 - A1 * A3 - A2 * A3\ngood form: 1 - A1^-1 - A2^-1 - A3^-1\n"
        };
        assert!(text.starts_with(expected), "{text}");

        let out = ctrec(&["verify", cert.to_str().unwrap(), &spec]);
        assert_eq!(code(&out), 0);
        assert!(stdout(&out).contains("all residuals 0"));
    }
}

#[test]
fn verify_accepts_expressions_and_reports_failures() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write_dyson_spec(dir.path(), 2);
    let good = dir.path().join("good.txt");
    fs::write(&good, "1 - A1^-1 - A2^-1").unwrap();
    let out = ctrec(&["verify", good.to_str().unwrap(), &spec]);
    assert_eq!(code(&out), 0);

    let bad = dir.path().join("bad.txt");
    fs::write(&bad, "A1 - 1").unwrap();
    let out = ctrec(&["--json", "verify", bad.to_str().unwrap(), &spec]);
    assert_eq!(code(&out), 1);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["pass"], false);
    assert!(v["first_failure"].is_object());
}

#[test]
fn limits_and_bad_inputs() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write_dyson_spec(dir.path(), 3);
    let out = ctrec(&["--max-spairs", "1", "annihilate", &spec]);
    assert_eq!(code(&out), 3);
    assert!(String::from_utf8_lossy(&out.stderr).contains("pairs processed"));

    let out = ctrec(&["annihilate", &spec, "--max-n", "2"]);
    assert_eq!(code(&out), 2);

    let out = ctrec(&["annihilate", "/nonexistent/spec.json"]);
    assert_eq!(code(&out), 2);

    let broken = dir.path().join("broken.json");
    fs::write(&broken, r#"{"n": 2, "R": ["x1 +", "1"]}"#).unwrap();
    let out = ctrec(&["annihilate", broken.to_str().unwrap()]);
    assert_eq!(code(&out), 2);
}

#[test]
fn algebraically_independent_input_is_inconclusive() {
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("indep.json");
    fs::write(&spec, r#"{"n": 2, "vars": ["x", "y"], "R": ["x", "y"]}"#).unwrap();
    let out = ctrec(&["annihilate", spec.to_str().unwrap()]);
    assert_eq!(code(&out), 4);
}

#[test]
fn json_annihilate_output_parses() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write_dyson_spec(dir.path(), 2);
    let out = ctrec(&["--json", "annihilate", &spec]);
    assert_eq!(code(&out), 0);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["operator"]["text"], "A1 * A2 - A1 - A2");
    assert_eq!(v["good_form"]["text"], "1 - A1^-1 - A2^-1");
    assert_eq!(v["checked"], 16);
    assert_eq!(v["pass"], true);
}
