use std::io::Write;
use std::process::{Command, Output};

use hyperlin::ambient::Ambient;
use hyperlin::coeffs::Rationals;

fn hyperlin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hyperlin")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn job_file(text: &str) -> tempfile::NamedTempFile {
    let mut f = tempfile::NamedTempFile::new().unwrap();
    f.write_all(text.as_bytes()).unwrap();
    f
}

const CONIC_JOB: &str = r#"{
  "ambient": {"kind": "projective", "dim": 2, "field": {"kind": "rational"}},
  "system": {"degree": [2]},
  "operations": [{"op": "impose-points", "points": [
    {"point": ["1", "0", "1"]}, {"point": ["0", "1", "1"]}, {"point": ["2", "3", "1"]},
    {"point": ["-1", "4", "1"]}, {"point": ["5", "-2", "1"]}]}]
}"#;

#[test]
fn repro_quadrifolium() {
    let o = hyperlin(&["repro", "quadrifolium"]);
    assert!(o.status.success());
    assert_eq!(
        stdout(&o),
        "x^6+26171/9604*x^4*y^2+26171/9604*x^2*y^4-35775/4802*x^2*y^2+y^6\nPASS quadrifolium\n"
    );
}

#[test]
fn repro_json_and_unknown_names() {
    let o = hyperlin(&["repro", "trace-p6", "--json", "--seed", "5"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["data"]["nsections"], 24);
    assert_eq!(v["passed"], true);
    assert_eq!(hyperlin(&["repro", "nonsense"]).status.code(), Some(2));
}

#[test]
fn run_echoes_the_system() {
    let f = job_file(r#"{"ambient":{"kind":"projective","dim":2,"field":{"kind":"gf","p":5}},"system":{"degree":[1]}}"#);
    let o = hyperlin(&["run", f.path().to_str().unwrap()]);
    assert!(o.status.success());
    let out = stdout(&o);
    assert!(out.starts_with("system: linear system on P^2 over GF(5) of degree 1, nsections=3\n"), "{out}");
    assert!(out.contains("sections:\n  "));
}

#[test]
fn run_reports_schema_errors_with_location() {
    let f = job_file("{\n  \"ambient\": {\"kind\":\"projective\",\"dim\":2,\"field\":{\"kind\":\"rational\"}},\n  \"system\": {\"degree\":[2]},\n  \"colour\": 1\n}");
    let o = hyperlin(&["run", f.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8(o.stderr).unwrap();
    assert!(err.contains("unknown field `colour`") && err.contains("line 4"), "{err}");
}

#[test]
fn run_is_deterministic_per_seed() {
    let f = job_file(
        r#"{"ambient":{"kind":"affine","dim":2,"field":{"kind":"gf","p":101}},"system":{"degree":[3]},
            "operations":[{"op":"random-points","count":3,"multiplicity":1}]}"#,
    );
    let p = f.path().to_str().unwrap();
    let a = stdout(&hyperlin(&["run", p, "--seed", "3"]));
    assert_eq!(a, stdout(&hyperlin(&["run", p, "--seed", "3"])));
    assert_ne!(a, stdout(&hyperlin(&["run", p, "--seed", "4"])));
    let single = Command::new(env!("CARGO_BIN_EXE_hyperlin"))
        .args(["run", p, "--seed", "3"])
        .env("HYPERLIN_THREADS", "1")
        .output()
        .unwrap();
    assert_eq!(a, stdout(&single));
}

#[test]
fn scan_reports_counts() {
    let o = hyperlin(&["scan", "--family", "z5", "--q", "101", "--trials", "12", "--target", "nodes31"]);
    assert!(matches!(o.status.code(), Some(0 | 1)));
    let out = stdout(&o);
    assert!(out.contains("trials=12 "), "{out}");
    assert!(out.contains("singular point counts "), "{out}");
    let bad = hyperlin(&["scan", "--family", "z5", "--q", "100", "--trials", "1", "--target", "nodes30"]);
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn lift_recovers_a_rational_conic() {
    let f = job_file(CONIC_JOB);
    let p = f.path().to_str().unwrap();
    let o = hyperlin(&["lift", "--primes", "1000003,1000033,1000037", "--job", p, "--json"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let lifted = v["polynomial"].as_str().unwrap().to_string();
    let exact = stdout(&hyperlin(&["run", p]));
    let section = exact.lines().skip_while(|l| *l != "sections:").nth(1).unwrap().trim().to_string();
    let a = Ambient::projective(&Rationals, 2);
    let (l, s) = (a.parse_poly(&lifted).unwrap(), a.parse_poly(&section).unwrap());
    assert_eq!(l, s.monic());
    let o = hyperlin(&["lift", "--primes", "7", "--job", p]);
    assert_eq!(o.status.code(), Some(1));
}
