use std::path::Path;
use std::process::{Command, Output};

use serde_json::{json, Value};

fn run(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_chancompat"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn read_json(path: &Path) -> Value {
    serde_json::from_slice(&std::fs::read(path).unwrap()).unwrap()
}

fn write_field(dir: &Path, name: &str, harmonics: Value) -> String {
    let v = json!({
        "schema": "channel-compat/field/v1",
        "params": {"alpha": 1.0, "beta": 1.0, "reynolds": 80.0},
        "harmonics": harmonics,
    });
    std::fs::write(dir.join(name), serde_json::to_string_pretty(&v).unwrap()).unwrap();
    name.to_string()
}

/// Ascending coefficients of `(y^2 - 1)^power * sum c_k y^k`.
fn walled(c: &[f64], power: u32) -> Vec<f64> {
    let mut out = c.to_vec();
    for _ in 0..power {
        let mut next = vec![0.0; out.len() + 2];
        for (k, v) in out.iter().enumerate() {
            next[k] -= v;
            next[k + 2] += v;
        }
        out = next;
    }
    out
}

#[test]
fn example_reproduces_closed_forms_and_writes_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["example", "-o", "out"], dir.path());
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let out = dir.path().join("out");
    for f in [
        "example_field.json",
        "oracle_comparison.json",
        "report.json",
        "defect_coefficients.csv",
        "defect_grid.csv",
        "velocity_slice.csv",
    ] {
        assert!(out.join(f).is_file(), "missing {f}");
    }
    let cmp = read_json(&out.join("oracle_comparison.json"));
    assert!(cmp["max_relative"].as_f64().unwrap() < 1e-8);
    let report = read_json(&out.join("report.json"));
    assert_eq!(report["verdict"], "incompatible");

    let slice = std::fs::read_to_string(out.join("velocity_slice.csv")).unwrap();
    assert_eq!(slice.lines().next().unwrap(), "x,y,u2,u3");
    assert_eq!(slice.lines().count(), 1 + 128 * 64);
}

#[test]
fn check_flags_the_example_and_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&run(&["example", "-o", "."], dir.path())), 0);
    let a = run(&["check", "example_field.json", "-o", "a"], dir.path());
    let b = run(&["check", "example_field.json", "-o", "b"], dir.path());
    assert_eq!(code(&a), 2);
    assert!(stdout(&a).contains("Incompatible"));
    for f in ["report.json", "defect_coefficients.csv", "defect_grid.csv"] {
        let x = std::fs::read(dir.path().join("a").join(f)).unwrap();
        let y = std::fs::read(dir.path().join("b").join(f)).unwrap();
        assert_eq!(x, y, "{f} differs between runs");
    }
    assert_eq!(stdout(&a), stdout(&b));
}

#[test]
fn zero_field_is_compatible() {
    let dir = tempfile::tempdir().unwrap();
    let f = write_field(dir.path(), "zero.json", json!([]));
    let o = run(&["check", &f, "-n", "24"], dir.path());
    assert_eq!(code(&o), 0, "{}", stdout(&o));
}

#[test]
fn validate_accepts_admissible_and_names_violations() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&run(&["example", "-o", "."], dir.path())), 0);
    let o = run(&["validate", "example_field.json"], dir.path());
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("admissible"));

    // one wall factor on u2: u3 from continuity picks up u2' != 0 at the walls
    let f = write_field(
        dir.path(),
        "bad.json",
        json!([{"j": 1, "u2": {"cos": [-1.0, 0.0, 1.0]}, "u3": "continuity"}]),
    );
    let o = run(&["validate", &f], dir.path());
    assert_eq!(code(&o), 2);
    let text = stdout(&o);
    assert!(text.contains("violation: no-slip: u3 harmonic 1 sine"), "{text}");
}

#[test]
fn malformed_input_reports_location() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("broken.json"), "{\n  \"schema\": \"channel-compat/field/v1\",\n  \"params\": [}\n").unwrap();
    let o = run(&["check", "broken.json"], dir.path());
    assert_eq!(code(&o), 1);
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("line 3"), "{err}");

    let f = write_field(dir.path(), "typo.json", json!([{"j": 1, "u2": {"cos": [1.0], "son": [1.0]}}]));
    let o = run(&["check", &f], dir.path());
    assert_eq!(code(&o), 1);
    assert!(String::from_utf8_lossy(&o.stderr).contains("son"));

    let o = run(&["check", "missing.json"], dir.path());
    assert_eq!(code(&o), 1);
}

#[test]
fn published_coefficients_are_not_within_a_loose_tolerance() {
    let dir = tempfile::tempdir().unwrap();
    let u1c = [0.6324, 0.9134, 0.127, 0.9058, 0.8147];
    let u1s = [0.9649, 0.9575, 0.5469, 0.2785, 0.09754];
    let u2c = [1.599, 0.4689, 0.7068, -0.1986, -0.6011];
    let u2s = [1.537, 0.3238, 0.8618, 0.2864, 0.1063];
    let f = write_field(
        dir.path(),
        "published.json",
        json!([{
            "j": 1,
            "u1": {"cos": walled(&u1c, 1), "sin": walled(&u1s, 1)},
            "u2": {"cos": walled(&u2c, 2), "sin": walled(&u2s, 2)},
            "u3": "continuity",
        }]),
    );
    let o = run(&["check", &f, "--tol", "1e-2"], dir.path());
    assert_eq!(code(&o), 2, "{}", stdout(&o));
    let report = read_json(&dir.path().join("report.json"));
    assert!(report["defect_relative"].as_f64().unwrap() > 0.1);
}

#[test]
fn oss_writes_mode_table_and_field() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["oss", "-n", "48", "--mode", "1"], dir.path());
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let table = read_json(&dir.path().join("modes.json"));
    let modes = table["modes"].as_array().unwrap();
    assert!(modes.len() >= 5);
    assert!(modes.iter().all(|m| m["growth_rate"].as_f64().unwrap() < 0.0));
    assert_eq!(table["selected"], 1);
    assert_eq!(code(&run(&["validate", "mode_field.json"], dir.path())), 0);
    assert_eq!(code(&run(&["oss", "-n", "48", "--mode", "100000"], dir.path())), 1);
}

#[test]
fn find_produces_a_compatible_field() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["find", "-n", "40", "--seed", "3"], dir.path());
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    let search = read_json(&dir.path().join("search.json"));
    assert_eq!(search["success"], true);
    assert_eq!(search["trivial"], false);
    let c = run(&["check", "found_field.json", "-n", "40", "--tol", "1e-8", "-o", "recheck"], dir.path());
    assert_eq!(code(&c), 0, "{}", stdout(&c));
}

#[test]
fn invalid_options_are_errors() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&run(&["find", "--published", "--degree", "3"], dir.path())), 1);
    assert_eq!(code(&run(&["oss", "--beta", "0"], dir.path())), 1);
    assert_eq!(code(&run(&["example", "-n", "2"], dir.path())), 1);
}
