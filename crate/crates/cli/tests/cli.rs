use std::process::{Command, Output};

fn l2lab(args: &[&str], out: &std::path::Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_l2lab"))
        .args(["--out", out.to_str().unwrap()])
        .args(args)
        .env_remove("L2LAB_CACHE")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn exponents_prints_exact_constants() {
    let dir = tempfile::tempdir().unwrap();
    let o = l2lab(&["exponents", "--theta", "9/10"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    assert!(s.contains("kappa = 7/9"));
    assert!(s.contains("small_theta_at_kappa = 2/27"));
    assert!(s.contains("headline_exponent(9/10) = 13/30"));
    assert!(!s.contains("FAIL"));
}

#[test]
fn verify_exponents_writes_json_lines() {
    let dir = tempfile::tempdir().unwrap();
    let o = l2lab(&["verify", "--suite", "exponents"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    let lines: Vec<serde_json::Value> = stdout(&o).lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(lines.len(), 9);
    assert!(lines.iter().all(|v| v["pass"] == true));
    assert!(dir.path().join("verify-exponents.jsonl").exists());
}

#[test]
fn eval_lambda_on_critical_line() {
    let dir = tempfile::tempdir().unwrap();
    let o = l2lab(&["eval", "--form", "delta", "--object", "Lambda", "--s", "0.5+9.2i"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    assert!(s.contains("method: AFE"));
    let value = s.lines().find_map(|l| l.strip_prefix("value: ")).unwrap();
    let re: f64 = value.split(['+', 'i']).next().unwrap().parse().unwrap_or(f64::NAN);
    assert!(re > 0.0 && re < 1e-5, "{value}");
}

#[test]
fn usage_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    for args in [
        vec!["--tol", "bogus=1e-5", "exponents"],
        vec!["--tol", "afe=1e-2", "exponents"],
        vec!["eval", "--form", "delta", "--object", "H", "--s", "2"],
        vec!["eval", "--form", "nosuch", "--object", "L", "--s", "2"],
        vec!["eval", "--form", "delta", "--object", "L", "--s", "0.5+90i"],
        vec!["density", "--form", "ec11", "--X", "1000", "--T", "10", "--beta", "0.6"],
        vec!["zeros", "--form", "delta", "--T", "5", "--step", "0.5"],
    ] {
        let o = l2lab(&args, dir.path());
        assert_eq!(o.status.code(), Some(2), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
    }
}

#[test]
fn zeros_below_first_zero_with_plot() {
    let dir = tempfile::tempdir().unwrap();
    let o = l2lab(&["--plot", "zeros", "--form", "delta", "--T", "5", "--scan", "--count", "0.5", "--simple"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let s = stdout(&o);
    assert!(s.contains("zeros_found: 0"));
    assert!(s.contains("complete: true"));
    assert!(s.contains("N(0.5, 5) = 0"));
    let svg = std::fs::read_to_string(dir.path().join("zeros_delta_T5.svg")).unwrap();
    assert!(svg.starts_with("<svg") || svg.starts_with("<?xml"));
}
