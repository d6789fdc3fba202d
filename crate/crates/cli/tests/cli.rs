use std::path::PathBuf;
use std::process::{Command, Output};

fn tautsys(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tautsys"))
        .args(args)
        .env_remove("TAUTSYS_OUT_DIR")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn scratch(name: &str) -> PathBuf {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join(name);
    let _ = std::fs::remove_dir_all(&dir);
    dir
}

#[test]
fn verify_periods_base_system() {
    let o = tautsys(&["verify-periods", "--d", "1", "--p", "0", "--order", "10"]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    assert!(s.contains("verified order: 8"), "{s}");
    assert!(s.contains("all residuals vanish to order 8: yes"));
}

#[test]
fn verify_periods_derivative_systems() {
    for p in ["1", "2", "3"] {
        let o = tautsys(&["verify-periods", "--d", "1", "--p", p, "--order", "10"]);
        assert_eq!(o.status.code(), Some(0), "p = {p}");
        assert!(stdout(&o).contains(": yes"));
    }
}

#[test]
fn membership_second_model_member() {
    let o = tautsys(&["membership", "--d", "2", "--fermat", "--alpha", "2e0"]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    assert!(s.contains("query: x0^2*x1^2*x2^2"));
    assert!(s.contains("verdict: member"));
    assert!(s.contains("q0 = 1/3*x1^2*x2^2"));
    assert!(s.contains("certificate verified: yes"));
}

#[test]
fn membership_first_model() {
    let o = tautsys(&["membership", "--d", "1", "--fermat", "--alpha", "e0"]);
    let s = stdout(&o);
    assert!(s.contains("verdict: member"));
    assert!(s.contains("q0 = 1/2*x1"));
    assert!(s.contains("closed-form prefactor of d/da0: 0/1"));

    let o = tautsys(&["membership", "--d", "1", "--point", "0,1,1", "--alpha", "1,0,0", "--mode", "degree-class"]);
    assert!(stdout(&o).contains("verdict: member"));
}

#[test]
fn non_membership_exits_cleanly() {
    let o = tautsys(&["membership", "--d", "1", "--fermat", "--alpha", "e1"]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    assert!(s.contains("verdict: non-member"));
    assert!(s.contains("closed-form prefactor of d/da1: 2/1"));
    assert!(s.contains("witness verified: yes"));
}

#[test]
fn fourier_matches_reference() {
    let o = tautsys(&["fourier", "--d", "1", "--p", "1"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("matches reference Fourier generator families: yes"));
    let o = tautsys(&["fourier", "--d", "2", "--ordering", "grlex"]);
    assert!(stdout(&o).contains("matches reference Fourier generator families: yes"));
}

#[test]
fn scan_line() {
    let o = tautsys(&["scan", "--d", "1", "--alpha", "e0", "--line", "0,1,1:1,0,0:0,1,2"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(
        stdout(&o),
        "query: x0*x1\nt = 0/1: member\nt = 1/1: non-member\nt = 2/1: non-member\n"
    );
}

#[test]
fn build_system_lists_operators() {
    let o = tautsys(&["build-system", "--d", "1", "--p", "1", "--vector"]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    assert!(s.contains("operators: 16"));
    assert!(s.contains("[toric] toric(2,-1,-1): da0^2 - da1*da2"));
    assert!(s.contains("vector system derives from the base system: yes"));
}

#[test]
fn surjectivity_and_selftest_pass() {
    let o = tautsys(&["surjectivity"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(!stdout(&o).contains(": no"));
    let o = tautsys(&["selftest", "--seed", "11", "--cases", "3"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(!stdout(&o).contains(": no"));
}

#[test]
fn invalid_parameters_fail() {
    let bad: &[&[&str]] = &[
        &["verify-periods", "--d", "4"],
        &["verify-periods", "--d", "1", "--order", "31"],
        &["verify-periods", "--d", "1", "--p", "4"],
        &["build-system", "--d", "1", "--degree-bound", "5"],
        &["build-system", "--d", "1", "--p", "3", "--vector"],
        &["membership", "--d", "1", "--fermat", "--alpha", "e7"],
        &["membership", "--d", "1", "--point", "0,0,0", "--alpha", "e0"],
        &["membership", "--d", "1", "--alpha", "e0"],
        &["scan", "--d", "1", "--alpha", "e0", "--line", "0,1,1:0,0,0:1"],
        &["selftest", "--cases", "0"],
        &["no-such-command"],
    ];
    for args in bad {
        let o = tautsys(args);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
        assert!(!o.stderr.is_empty());
    }
}

#[test]
fn reports_are_deterministic_and_echo_config() {
    let a = scratch("det-a");
    let b = scratch("det-b");
    let args = ["selftest", "--seed", "5", "--cases", "2", "--out-dir"];
    let mut first: Vec<&str> = args.to_vec();
    first.push(a.to_str().unwrap());
    let mut second: Vec<&str> = args.to_vec();
    second.push(b.to_str().unwrap());
    assert_eq!(tautsys(&first).status.code(), Some(0));
    assert_eq!(tautsys(&second).status.code(), Some(0));
    let ra = std::fs::read(a.join("selftest.json")).unwrap();
    let rb = std::fs::read(b.join("selftest.json")).unwrap();
    assert_eq!(ra, rb);
    let v: serde_json::Value = serde_json::from_slice(&ra).unwrap();
    assert_eq!(v["seed"], 5);
    assert_eq!(v["config"]["cases"], 2);
    assert_eq!(v["passed"], true);
}

#[test]
fn out_dir_from_environment_matches_json_stdout() {
    let dir = scratch("env-out");
    let o = Command::new(env!("CARGO_BIN_EXE_tautsys"))
        .args(["membership", "--d", "1", "--fermat", "--alpha", "e0", "--json", "--timing"])
        .env("TAUTSYS_OUT_DIR", &dir)
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0));
    let file = std::fs::read(dir.join("membership.json")).unwrap();
    assert_eq!(file, o.stdout);
    assert!(String::from_utf8(o.stderr).unwrap().starts_with("elapsed:"));
    let v: serde_json::Value = serde_json::from_slice(&file).unwrap();
    assert_eq!(v["command"], "membership");
    assert_eq!(v["config"]["d"], 1);
    assert_eq!(v["config"]["alpha"], "e0");
    assert_eq!(v["result"]["verdict"], "member");
    assert_eq!(v["result"]["point"], serde_json::json!(["0/1", "1/1", "1/1"]));
    assert!(!String::from_utf8(file).unwrap().contains("elapsed"));
}
