//! Integration tests of the compiled binary: exit codes, error codes,
//! deterministic output, batch behaviour, coefficient-mode equivalence.

use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_ltaylor"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout_str(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf8 stdout")
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_str(&stdout_str(out)).expect("stdout parses as JSON")
}

fn tmp_dir() -> PathBuf {
    let dir = std::env::temp_dir().join(format!("ltaylor-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

#[test]
fn analyze_rank_zero_curve_passes() {
    let out = run(&["analyze", "--curve", "0,-1,1,-10,-20"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["conductor"], 11);
    assert_eq!(v["analytic_rank"], 0);
    assert_eq!(v["epsilon"], 1);
    assert_eq!(v["ratio"]["pass"], true);
    assert_eq!(v["local_data"][0]["kind"], "split-multiplicative");
}

#[test]
fn analyze_singular_curve_exits_1_with_code() {
    let out = run(&["analyze", "--curve", "0,0,0,0,0"]);
    assert_eq!(out.status.code(), Some(1));
    let v = json(&out);
    assert_eq!(v["error"]["code"], "singular-curve");
}

#[test]
fn sign_override_is_honored_and_caught_off_the_symmetric_split() {
    // The override is taken at face value: no detection diagnostics.
    let out = run(&["analyze", "--curve", "0,-1,1,-10,-20", "--sign", "-1"]);
    let v = json(&out);
    assert_eq!(v["epsilon"], -1);
    assert!(v["sign_detection"].is_null());
    // At t0 = 1 the split is symmetric and the wrong sign still satisfies
    // the ratio identity (it is built into that split); moving the split
    // point exposes it and the verdict fails with exit code 2.
    let off = run(&["analyze", "--curve", "0,-1,1,-10,-20", "--sign", "-1", "--t0", "1.3"]);
    assert_eq!(off.status.code(), Some(2));
    let v = json(&off);
    assert_eq!(v["ratio"]["pass"], false);
}

#[test]
fn analyze_output_is_byte_identical_across_runs() {
    let a = run(&["analyze", "--curve", "0,1,1,-2,0"]);
    let b = run(&["analyze", "--curve", "0,1,1,-2,0"]);
    assert_eq!(out_bytes(&a), out_bytes(&b));
    fn out_bytes(o: &Output) -> &[u8] {
        &o.stdout
    }
}

#[test]
fn analyze_parse_error() {
    let out = run(&["analyze", "--curve", "1,2,3"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(json(&out)["error"]["code"], "parse-error");
}

#[test]
fn ratio_values() {
    let out = run(&["ratio", "--degree", "1", "--disc", "1", "--conductor", "11"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    let rho = v["rho"].as_f64().unwrap();
    assert!((rho - 1.2161450949).abs() < 1e-9);
    assert_eq!(v["sign_flip_threshold"], 126);

    let neg = json(&run(&["ratio", "--conductor", "126"]));
    assert!(neg["rho"].as_f64().unwrap() < 0.0);
    assert_eq!(neg["sign_of_sub_leading"], "opposite");

    let one = json(&run(&["ratio", "--conductor", "1"]));
    // gamma + ln 2 pi
    assert!((one["rho"].as_f64().unwrap() - 2.4150927313).abs() < 1e-9);
}

#[test]
fn batch_catalog_all_pass() {
    let dir = tmp_dir();
    let input = dir.join("catalog.csv");
    let fixtures = run(&["fixtures"]);
    std::fs::write(&input, &fixtures.stdout).unwrap();
    let output = dir.join("catalog-out.csv");
    let out = run(&["batch", input.to_str().unwrap(), "-o", output.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "stdout: {}", stdout_str(&out));
    let v = json(&out);
    assert_eq!(v["summary"]["fail"], 0);
    assert_eq!(v["summary"]["error"], 0);
    assert!(v["summary"]["pass"].as_u64().unwrap() >= 12);
    let rows = std::fs::read_to_string(&output).unwrap();
    assert!(rows.lines().count() >= 13);
    assert!(rows.contains("5077a,pass"));
}

#[test]
fn batch_empty_csv() {
    let dir = tmp_dir();
    let input = dir.join("empty.csv");
    std::fs::write(&input, "label,a1,a2,a3,a4,a6\n").unwrap();
    let out = run(&["batch", input.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout_str(&out);
    assert!(text.contains(r#""pass":0"#));
}

#[test]
fn batch_isolates_singular_row() {
    let dir = tmp_dir();
    let input = dir.join("mixed.csv");
    std::fs::write(
        &input,
        "11a,0,-1,1,-10,-20\nbroken,0,0,0,0,0\n37a,0,0,1,-1,0\n",
    )
    .unwrap();
    let output = dir.join("mixed-out.csv");
    let out = run(&["batch", input.to_str().unwrap(), "-o", output.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let v = json(&out);
    assert_eq!(v["summary"]["pass"], 2);
    assert_eq!(v["summary"]["error"], 1);
    let rows = std::fs::read_to_string(&output).unwrap();
    let lines: Vec<&str> = rows.lines().collect();
    assert!(lines[1].starts_with("11a,pass"));
    assert!(lines[2].starts_with("broken,error,singular-curve"));
    assert!(lines[3].starts_with("37a,pass"));
}

#[test]
fn coefficient_mode_matches_curve_mode() {
    // Build the coefficient file with the curve pipeline itself.
    use ltaylor::coeffs::{choose_truncation, curve_coefficients};
    use ltaylor::curve::{conductor_with_local_data, WeierstrassCurve};
    let e = WeierstrassCurve::new([0i64, 0, 1, -1, 0]).unwrap();
    let (cond, locals) = conductor_with_local_data(&e).unwrap();
    let n = cond.to_u64().unwrap();
    let m = choose_truncation(n, 1e-12, 1.0);
    let table = curve_coefficients(&e, &locals, m).unwrap();
    let dir = tmp_dir();
    let path = dir.join("37a-coeffs.txt");
    let text: String = table.values().iter().map(|v| format!("{v}\n")).collect();
    std::fs::write(&path, text).unwrap();

    let via_curve = json(&run(&["analyze", "--curve", "0,0,1,-1,0"]));
    let via_file = json(&run(&[
        "analyze",
        "--coeffs",
        path.to_str().unwrap(),
        "--conductor",
        "37",
        "--sign",
        "-1",
    ]));
    assert_eq!(via_file["mode"], "coefficients");
    assert_eq!(via_curve["a_r"], via_file["a_r"]);
    assert_eq!(via_curve["a_r1"], via_file["a_r1"]);
    assert_eq!(via_curve["analytic_rank"], via_file["analytic_rank"]);
    assert_eq!(via_curve["lambda_derivatives"], via_file["lambda_derivatives"]);
}

#[test]
fn coefficient_mode_requires_overrides() {
    let dir = tmp_dir();
    let path = dir.join("dummy.txt");
    std::fs::write(&path, "1\n0\n1\n").unwrap();
    let out = run(&["analyze", "--coeffs", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(json(&out)["error"]["code"], "invalid-request");
}

#[test]
fn selftest_passes() {
    let out = run(&["selftest"]);
    assert_eq!(out.status.code(), Some(0), "output:\n{}", stdout_str(&out));
    let text = stdout_str(&out);
    assert!(text.contains("PASS ratio-residual"));
    assert!(!text.contains("FAIL"));
}
