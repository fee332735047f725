//! End-to-end tests against the compiled binary: output shapes, exact
//! values, exit codes, and byte-level determinism.

use std::process::{Command, Output};

fn fastlyap(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fastlyap"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout_json(output: &Output) -> serde_json::Value {
    assert!(
        output.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&output.stderr)
    );
    serde_json::from_slice(&output.stdout).expect("valid JSON on stdout")
}

#[test]
fn spectrum_gauss_power_psi_is_half() {
    let out = fastlyap(&[
        "spectrum", "--map", "gauss", "--psi", "power:2", "--alpha", "finite", "--which", "fast",
    ]);
    let v = stdout_json(&out);
    assert_eq!(v["dimension"], serde_json::json!(0.5));
    assert_eq!(v["invariants"]["provenance"], "analytic");
    assert_eq!(v["config"]["subcommand"], "spectrum");
}

#[test]
fn spectrum_alpha_zero_is_one() {
    let out = fastlyap(&[
        "spectrum", "--map", "renyi", "--psi", "exp:2", "--alpha", "0",
    ]);
    let v = stdout_json(&out);
    assert_eq!(v["dimension"], serde_json::json!(1.0));
}

#[test]
fn spectrum_factorial_block_plateaus() {
    let out = fastlyap(&[
        "spectrum", "--map", "gauss", "--psi", "factorial_block", "--alpha", "finite",
        "--which", "fast",
    ]);
    let v = stdout_json(&out);
    assert!((v["dimension"].as_f64().unwrap() - 1.0 / 6.0).abs() < 1e-15);
    assert_eq!(v["continuous_at_infinity"], serde_json::json!(false));
    let out = fastlyap(&[
        "spectrum", "--map", "gauss", "--psi", "factorial_block", "--alpha", "inf",
        "--which", "upper",
    ]);
    let v = stdout_json(&out);
    assert!((v["dimension"].as_f64().unwrap() - 0.25).abs() < 1e-15);
}

#[test]
fn map_check_renyi_all_pass() {
    let out = fastlyap(&["map", "check", "--map", "renyi"]);
    let v = stdout_json(&out);
    assert_eq!(v["all_pass"], serde_json::json!(true));
    assert_eq!(v["parabolic"], serde_json::json!(true));
    assert_eq!(v["hypotheses"].as_array().unwrap().len(), 5);
}

#[test]
fn code_emits_continued_fraction_digits() {
    let out = fastlyap(&["code", "--map", "gauss", "--x", "5/13", "--depth", "3"]);
    assert!(out.status.success());
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "2,1,1");
}

#[test]
fn cylinder_rows_are_exact() {
    let out = fastlyap(&["cylinder", "--map", "gauss", "--word", "1,1", "--word", "2,3"]);
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "word,lo,hi,diameter,bound_lo,bound_hi");
    assert_eq!(lines[1], "\"1,1\",1/2,2/3,1/6,1/16,16");
    assert!(lines[2].starts_with("\"2,3\","));
    assert!(lines[2].contains(",1/63,"));
}

#[test]
fn eset_digits_match_oracle() {
    let out = fastlyap(&["eset", "digits", "--s", "exp:e", "--depth", "5"]);
    assert!(out.status.success());
    let digits: Vec<String> = String::from_utf8_lossy(&out.stdout)
        .lines()
        .map(str::to_owned)
        .collect();
    assert_eq!(digits, vec!["3", "8", "21", "55", "149"]);
}

#[test]
fn eset_dim_reports_measured_and_formula() {
    let out = fastlyap(&[
        "eset", "dim", "--map", "gauss", "--s", "exp:2", "--depth", "3",
        "--formula-horizon", "100",
    ]);
    let v = stdout_json(&out);
    let levels = v["measured"]["levels"].as_array().unwrap();
    assert_eq!(levels.len(), 3);
    for level in levels {
        assert_eq!(level["gap_dominates_bound"], serde_json::json!(true));
    }
    assert!(v["formula"]["windowed_min"].as_f64().unwrap() > 0.0);
    let lower = v["measured"]["lower_estimate"].as_f64().unwrap();
    let upper = v["measured"]["upper_estimate"].as_f64().unwrap();
    assert!(lower <= upper);
}

#[test]
fn dset_emits_digit_lines() {
    let out = fastlyap(&["dset", "--b", "2", "--c", "2", "--depth", "4"]);
    assert!(out.status.success());
    let digits: Vec<String> = String::from_utf8_lossy(&out.stdout)
        .lines()
        .map(str::to_owned)
        .collect();
    assert_eq!(digits, vec!["4", "4", "16", "256"]);
}

#[test]
fn gpsi_emits_csv_rows() {
    let out = fastlyap(&[
        "gpsi", "--psi", "exp:2", "--epsilon", "0.5", "--horizon", "50", "--method", "simple",
    ]);
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout);
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "n,psi,g_psi,contact,ratio");
    let first = lines.next().unwrap();
    // g = psi = 2 at n = 1, contact flag set.
    assert!(first.starts_with("1,2,2,1,"), "{first}");
    // Summary JSON goes to stderr.
    assert!(String::from_utf8_lossy(&out.stderr).contains("\"case\""));
}

#[test]
fn exponent_csv_has_fast_column() {
    let out = fastlyap(&[
        "exponent", "--map", "gauss", "--x", "5/13", "--depth", "3", "--psi", "power:2",
    ]);
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.starts_with("n,log_deriv_sum,digit_log_sum,lyapunov_partial,fast_partial"));
    assert_eq!(text.lines().count(), 4);
}

#[test]
fn runs_are_byte_identical() {
    let args = [
        "scaling", "--psi", "factorial_block", "--horizon", "500", "--window", "125", "--xi",
    ];
    let a = fastlyap(&args);
    let b = fastlyap(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn batch_cylinders_identical_across_schedules() {
    // The parallel batch must produce the same bytes regardless of the
    // worker-pool size.
    let words: Vec<String> = (1..=24u64).map(|k| format!("{k},{},3", k % 5 + 1)).collect();
    let mut args: Vec<&str> = vec!["cylinder", "--map", "gauss"];
    for w in &words {
        args.push("--word");
        args.push(w);
    }
    let parallel = fastlyap(&args);
    let serial = Command::new(env!("CARGO_BIN_EXE_fastlyap"))
        .args(&args)
        .env("RAYON_NUM_THREADS", "1")
        .output()
        .expect("binary runs");
    assert!(parallel.status.success() && serial.status.success());
    assert_eq!(parallel.stdout, serial.stdout);
}

#[test]
fn usage_errors_exit_two() {
    let out = fastlyap(&["spectrum", "--map", "gauss", "--psi", "power:2", "--wavelength", "7"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn domain_errors_exit_one() {
    // 1/2 sits on a branch boundary: the exceptional set.
    let out = fastlyap(&["orbit", "--map", "gauss", "--x", "1/2", "--depth", "3"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("exceptional set"));
}

#[test]
fn spectrum_from_table_reports_estimated_provenance() {
    // A tabulated psi ~ 2^n forces the estimation path.
    let dir = std::env::temp_dir().join("fastlyap_cli_test_psi");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("geom.csv");
    let rows: String = (1..=400)
        .map(|n| format!("{n},{}\n", 2f64.powi(n)))
        .collect();
    std::fs::write(&path, format!("n,psi\n{rows}")).unwrap();
    let out = fastlyap(&[
        "spectrum", "--map", "gauss", "--psi", path.to_str().unwrap(), "--alpha", "finite",
        "--which", "fast", "--horizon", "400",
    ]);
    let v = stdout_json(&out);
    assert_eq!(v["invariants"]["provenance"], "estimated");
    // beta estimate = 2 up to float noise; dimension near 1/3.
    assert!((v["dimension"].as_f64().unwrap() - 1.0 / 3.0).abs() < 1e-6);
    std::fs::remove_file(&path).ok();
}

#[test]
fn orbit_csv_format() {
    let out = fastlyap(&[
        "orbit", "--map", "gauss", "--x", "5/13", "--depth", "3", "--format", "csv",
    ]);
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "k,point,digit,ln_derivative");
    assert!(lines[1].starts_with("0,5/13,2,"));
    assert!(lines[2].starts_with("1,3/5,1,"));
}

#[test]
fn scaling_estimates_factorial_block() {
    let out = fastlyap(&[
        "scaling", "--psi", "factorial_block", "--horizon", "5913", "--window", "1478",
    ]);
    let v = stdout_json(&out);
    let inv = &v["invariants"];
    assert!((inv["low_b"]["window"].as_f64().unwrap() - 3.0).abs() < 0.15);
    assert!((inv["cap_b"]["running"].as_f64().unwrap() - 4.0).abs() < 0.2);
    assert!((inv["beta"]["running"].as_f64().unwrap() - 5.0).abs() < 1e-9);
    assert_eq!(v["analytic"]["beta"], serde_json::json!(5.0));
}
