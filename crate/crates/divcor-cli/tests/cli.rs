//! End-to-end tests of the divcor binary: exit codes, format stability,
//! JSON round-trips against values recomputed with the library, and the
//! byte-determinism contract.

use std::path::PathBuf;
use std::process::{Command, Output};

use divcor_core::arith::factorize;
use divcor_core::singular::{b_via_euler, b_via_qsum, f_of_h, Form};
use divcor_core::{ratio_to_f64, SignMode};
use serde_json::Value;

fn divcor(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_divcor"))
        .args(args)
        .env_remove("DIVCOR_MEMORY_BUDGET")
        .output()
        .expect("failed to spawn divcor")
}

fn stdout_json(args: &[&str]) -> Value {
    let out = divcor(args);
    assert!(
        out.status.success(),
        "divcor {args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("stdout is not valid JSON")
}

fn f64_field(v: &Value, name: &str) -> f64 {
    v.get(name)
        .and_then(Value::as_f64)
        .unwrap_or_else(|| panic!("missing f64 field {name}"))
}

fn str_field<'a>(v: &'a Value, name: &str) -> &'a str {
    v.get(name)
        .and_then(Value::as_str)
        .unwrap_or_else(|| panic!("missing string field {name}"))
}

#[test]
fn local_factor_json_round_trips_the_exact_rational() {
    let v = stdout_json(&["local-factor", "--k", "2", "--l", "2", "--h", "12", "--format", "json"]);

    let fact = factorize(12).unwrap();
    let rf = f_of_h(2, 2, &fact, Form::Rf, SignMode::Corrected).unwrap();
    let ng = f_of_h(2, 2, &fact, Form::NgThom, SignMode::Corrected).unwrap();
    assert_eq!(str_field(&v["f_rf"], "numerator"), rf.numer().to_string());
    assert_eq!(str_field(&v["f_rf"], "denominator"), rf.denom().to_string());
    assert_eq!(str_field(&v["f_rf"], "numerator"), "7");
    assert_eq!(str_field(&v["f_rf"], "denominator"), "3");
    assert_eq!(
        f64_field(&v["f_rf"], "decimal").to_bits(),
        ratio_to_f64(&rf).to_bits()
    );
    assert_eq!(str_field(&v["f_ngthom"], "numerator"), ng.numer().to_string());
    assert_eq!(v["forms_agree"], Value::Bool(true));
    assert_eq!(v["h_is_prime"], Value::Bool(false));

    // Per-prime rows: 12 = 2^2 * 3.
    let primes = v["primes"].as_array().expect("primes array");
    assert_eq!(primes.len(), 2);
    assert_eq!(primes[0]["p"], 2);
    assert_eq!(primes[0]["alpha"], 2);
    assert_eq!(str_field(&primes[0]["f_rf"], "numerator"), "7");
    assert_eq!(str_field(&primes[0]["f_rf"], "denominator"), "4");
}

#[test]
fn singular_json_round_trips_every_float_bit_exactly() {
    let v = stdout_json(&["singular", "--k", "3", "--l", "2", "--h", "6", "--format", "json"]);

    let series = b_via_euler(3, 2, 6, 1e-5, SignMode::Corrected).unwrap();
    let qsum = b_via_qsum(3, 2, 6, 10_000, SignMode::Corrected).unwrap();
    assert_eq!(f64_field(&v, "c_truncated").to_bits(), series.c_truncated.to_bits());
    assert_eq!(f64_field(&v, "c_tail_bound").to_bits(), series.c_tail_bound.to_bits());
    assert_eq!(f64_field(&v, "b_euler").to_bits(), series.b.to_bits());
    assert_eq!(f64_field(&v, "b_qsum").to_bits(), qsum.to_bits());
    assert_eq!(
        f64_field(&v, "abs_gap").to_bits(),
        (series.b - qsum).abs().to_bits()
    );
    assert_eq!(v["prime_cutoff"].as_u64(), Some(series.prime_cutoff));
    assert_eq!(str_field(&v["f_exact"], "numerator"), series.f_exact.numer().to_string());
    assert_eq!(str_field(&v["f_exact"], "denominator"), series.f_exact.denom().to_string());
    assert_eq!(v["h_is_prime"], Value::Bool(false));
}

#[test]
fn correlate_json_carries_the_exact_sums_as_strings() {
    let v = stdout_json(&[
        "correlate", "--k", "2", "--l", "2", "--h", "1", "--x-list", "5,1000", "--format", "json",
    ]);
    let rows = v["rows"].as_array().expect("rows array");
    assert_eq!(rows.len(), 2);
    // Hand-checked: d(1)d(2) + ... + d(5)d(6) = 26.
    assert_eq!(rows[0]["x"], 5);
    assert_eq!(str_field(&rows[0], "empirical"), "26");
    assert!(f64_field(&rows[1], "ratio") > 0.0);
}

#[test]
fn repeated_runs_are_byte_identical() {
    for format in ["human", "json", "csv"] {
        let args = ["rf-coeff", "--k", "3", "--qmax", "40", "--format", format];
        let first = divcor(&args);
        let second = divcor(&args);
        assert!(first.status.success());
        assert_eq!(first.stdout, second.stdout, "format {format} not deterministic");
    }
}

#[test]
fn local_factor_human_output_shows_both_forms() {
    let out = divcor(&["local-factor", "--k", "2", "--l", "2", "--h", "12"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("rf form:      7/3"), "missing rf form: {text}");
    assert!(text.contains("ng-thom form: 7/3"), "missing ng-thom form: {text}");
    assert!(text.contains("forms agree:  yes"), "missing agreement: {text}");
}

#[test]
fn verify_theorem1_default_grid_is_clean() {
    let out = divcor(&["verify-theorem1"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("1875"), "unexpected check count: {text}");
    assert!(text.contains("0 mismatches"), "grid not clean: {text}");
}

#[test]
fn verify_theorem1_original_sign_reports_mismatches_as_data() {
    let v = stdout_json(&[
        "verify-theorem1",
        "--kmax", "2", "--lmax", "2", "--primes", "2", "--alpha-max", "1",
        "--sign-mode", "lucht-original",
        "--format", "json",
    ]);
    let count = v["mismatch_count"].as_u64().unwrap();
    assert!(count > 0, "expected mismatches under the original sign");
    assert_eq!(v["mismatches"].as_array().unwrap().len() as u64, count);
    // A disagreeing grid is a result, not a failure; exit status stays 0,
    // which stdout_json already asserted.
}

#[test]
fn unknown_flag_is_a_usage_error() {
    let out = divcor(&["constant", "--k", "2", "--l", "2", "--bogus"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn missing_required_flag_is_a_usage_error() {
    let out = divcor(&["constant", "--k", "2"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn out_of_range_tolerance_is_a_usage_error() {
    let out = divcor(&["constant", "--k", "2", "--l", "2", "--tol", "0.5"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn capacity_errors_exit_three_and_suppress_output() {
    let out = Command::new(env!("CARGO_BIN_EXE_divcor"))
        .args(["correlate", "--k", "2", "--l", "2", "--h", "2", "--x-list", "1000,2000"])
        .env("DIVCOR_MEMORY_BUDGET", "1000")
        .output()
        .expect("failed to spawn divcor");
    assert_eq!(out.status.code(), Some(3));
    assert!(out.stdout.is_empty(), "partial results must be suppressed");
    assert!(!out.stderr.is_empty(), "the error belongs on stderr");
}

#[test]
fn malformed_budget_env_is_rejected() {
    let out = Command::new(env!("CARGO_BIN_EXE_divcor"))
        .args(["carmichael", "--q1", "2", "--q2", "2", "--x", "100"])
        .env("DIVCOR_MEMORY_BUDGET", "lots")
        .output()
        .expect("failed to spawn divcor");
    assert_eq!(out.status.code(), Some(1));
    assert!(out.stdout.is_empty());
}

#[test]
fn csv_headers_are_stable() {
    let cases: [(&[&str], &str); 4] = [
        (
            &["constant", "--k", "2", "--l", "2", "--format", "csv"],
            "k,l,tol,sign_mode,value,tail_bound,prime_cutoff",
        ),
        (
            &["correlate", "--k", "2", "--l", "2", "--h", "2", "--x-list", "10,20", "--format", "csv"],
            "k,l,h,x,empirical,predicted,ratio",
        ),
        (
            &["rf-coeff", "--k", "2", "--qmax", "5", "--format", "csv"],
            "k,q,mult_numerator,mult_denominator,value",
        ),
        (
            &["carmichael", "--q1", "2", "--q2", "3", "--x", "100", "--format", "csv"],
            "q1,q2,x,h,sum,average,reference,abs_gap",
        ),
    ];
    for (args, header) in cases {
        let out = divcor(args);
        assert!(out.status.success(), "divcor {args:?} failed");
        let text = String::from_utf8(out.stdout).unwrap();
        assert_eq!(text.lines().next(), Some(header), "args {args:?}");
    }
}

#[test]
fn carmichael_equal_moduli_reports_the_ramanujan_reference() {
    let v = stdout_json(&[
        "carmichael", "--q1", "1", "--q2", "1", "--x", "1000", "--h", "5", "--format", "json",
    ]);
    assert_eq!(str_field(&v, "sum"), "1000");
    assert_eq!(f64_field(&v, "average"), 1.0);
    assert_eq!(f64_field(&v, "reference"), 1.0);
    assert_eq!(f64_field(&v, "abs_gap"), 0.0);
}

#[test]
fn prime_shift_is_flagged_in_reports() {
    let prime = stdout_json(&["singular", "--k", "2", "--l", "2", "--h", "7", "--format", "json"]);
    assert_eq!(prime["h_is_prime"], Value::Bool(true));
    let composite = stdout_json(&["singular", "--k", "2", "--l", "2", "--h", "12", "--format", "json"]);
    assert_eq!(composite["h_is_prime"], Value::Bool(false));

    let out = divcor(&["singular", "--k", "2", "--l", "2", "--h", "7"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("h = 7 is prime"), "missing prime note: {text}");
}

#[test]
fn rf_reconstruct_reports_checkpoints_and_the_exact_value() {
    let v = stdout_json(&[
        "rf-reconstruct", "--k", "2", "--n", "6", "--qmax", "500", "--format", "json",
    ]);
    assert_eq!(v["tau_exact"], 4);
    let rows = v["rows"].as_array().expect("rows array");
    let checkpoints: Vec<u64> = rows.iter().map(|r| r["q_max"].as_u64().unwrap()).collect();
    assert_eq!(checkpoints, vec![1, 10, 100, 500]);
}

#[test]
fn output_flag_writes_the_same_bytes_as_stdout() {
    let path: PathBuf = [env!("CARGO_TARGET_TMPDIR"), "singular_out.json"]
        .iter()
        .collect();
    let args = ["singular", "--k", "2", "--l", "2", "--h", "2", "--format", "json"];
    let on_stdout = divcor(&args);
    assert!(on_stdout.status.success());

    let mut with_output: Vec<&str> = args.to_vec();
    let path_str = path.to_str().unwrap();
    with_output.extend_from_slice(&["--output", path_str]);
    let redirected = divcor(&with_output);
    assert!(redirected.status.success());
    assert!(redirected.stdout.is_empty());
    assert_eq!(std::fs::read(&path).unwrap(), on_stdout.stdout);
}
