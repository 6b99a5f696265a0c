use std::path::Path;
use std::process::{Command, Output};

fn camellia(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_camellia"))
        .args(args)
        .env_remove("CAMELLIA_THREADS")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

const CONFIG: &str = r#"{
  "code": {"family": "rm", "m": 3, "r": 1},
  "channel": {"kind": "bsc", "eps": 0.1},
  "decoder": {"kind": "exact"},
  "target": "p_bit",
  "trials": 2000,
  "seed": 1
}"#;

fn write_config(dir: &Path, text: &str) -> String {
    let path = dir.join("cfg.json");
    std::fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn rate_and_capacity() {
    assert_eq!(
        stdout(&camellia(&["rate", "--m", "3", "--r", "1"])),
        "0.5\n"
    );
    assert_eq!(
        stdout(&camellia(&["rate", "--m", "4", "--r", "2"])),
        "0.6875\n"
    );
    assert_eq!(stdout(&camellia(&["capacity", "--bec", "0.3"])), "0.7\n");
    let bsc = stdout(&camellia(&["capacity", "--bsc", "0.11"]));
    assert!(bsc.starts_with("0.50008"), "{bsc}");
}

#[test]
fn simulate_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), CONFIG);
    let a = camellia(&["simulate", "--config", &cfg, "--seed", "7"]);
    let b = camellia(&[
        "simulate",
        "--config",
        &cfg,
        "--seed",
        "7",
        "--threads",
        "3",
    ]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let text = stdout(&a);
    let mut lines = text.lines();
    assert_eq!(
        lines.next(),
        Some("coord,metric,estimate,ci_lo,ci_hi,trials,seed")
    );
    assert_eq!(text.lines().count(), 10);
    assert!(text.lines().skip(1).all(|l| l.ends_with(",2000,7")));
    assert!(text.contains("\nmax,p_bit,"));
    // timing goes to stderr only
    assert!(String::from_utf8_lossy(&a.stderr).contains("wall-clock"));
    let r = camellia(&["simulate", "--config", &cfg, "--seed", "7", "--random-codeword"]);
    assert!(r.status.success());
    assert_ne!(a.stdout, r.stdout);
    let c = camellia(&["simulate", "--config", &cfg, "--seed", "8"]);
    assert_ne!(a.stdout, c.stdout);
}

#[test]
fn simulate_json_and_out_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), CONFIG);
    let out = dir.path().join("report.json");
    let o = camellia(&[
        "simulate",
        "--config",
        &cfg,
        "--format",
        "json",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    assert!(o.stdout.is_empty());
    let v: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out).unwrap()).unwrap();
    assert_eq!(v["target"], "p_bit");
    assert_eq!(v["rows"].as_array().unwrap().len(), 9);
    for row in v["rows"].as_array().unwrap() {
        let (lo, est, hi) = (
            row["ci_lo"].as_f64().unwrap(),
            row["estimate"].as_f64().unwrap(),
            row["ci_hi"].as_f64().unwrap(),
        );
        assert!(0.0 <= lo && lo <= est && est <= hi && hi <= 1.0);
    }
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(camellia(&["nonsense"]).status.code(), Some(2));
    assert_eq!(
        camellia(&["simulate", "--config", "/nonexistent.json"])
            .status
            .code(),
        Some(2)
    );
    let bad = write_config(dir.path(), "{\"code\": 3}");
    assert_eq!(
        camellia(&["simulate", "--config", &bad]).status.code(),
        Some(2)
    );
    let big = write_config(
        dir.path(),
        &CONFIG.replace("\"m\": 3, \"r\": 1", "\"m\": 9, \"r\": 3"),
    );
    assert_eq!(
        camellia(&["simulate", "--config", &big]).status.code(),
        Some(3)
    );
    assert_eq!(
        camellia(&["audit", "entropy", "--m", "6", "--r", "1", "--bec", "0.3"])
            .status
            .code(),
        Some(3)
    );
}

#[test]
fn trend_emits_one_row_per_m() {
    let o = camellia(&[
        "trend", "--bsc", "0.05", "--ms", "5,6", "--k", "3", "--trials", "200", "--seed", "4",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(
        lines[0],
        "m,n,k,d,coord,metric,estimate,ci_lo,ci_hi,trials,seed"
    );
    assert!(lines[1].starts_with("5,32,3,3,0,p_bit,"));
    assert!(lines[2].starts_with("6,64,3,4,0,p_bit,"));
}

#[test]
fn petals_and_audits_print_json() {
    let v: serde_json::Value =
        serde_json::from_str(&stdout(&camellia(&["petals", "--m", "4", "--d", "3"]))).unwrap();
    assert_eq!(v["rho"], "7/15");
    assert_eq!(v["report"]["invariant"], true);
    let o = camellia(&[
        "audit",
        "covariance",
        "--m",
        "4",
        "--r",
        "1",
        "--bec",
        "0.4",
        "--d",
        "3",
    ]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["within_bound"], true);
    assert_eq!(v["petals"], 15);
}
