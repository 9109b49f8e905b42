use hplab::cli::{execute, EXIT_FAIL, EXIT_PASS, EXIT_USAGE};
use serde_json::Value;
use std::path::PathBuf;

fn run(args: &[&str]) -> (i32, Value) {
    let mut argv = vec!["hplab"];
    argv.extend_from_slice(args);
    let o = execute(argv, None);
    let v = if o.stdout.is_empty() { Value::Null } else { serde_json::from_str(&o.stdout).expect("stdout is JSON") };
    (o.code, v)
}

fn scratch(name: &str) -> PathBuf {
    std::env::temp_dir().join(format!("hplab-cli-{}-{name}", std::process::id()))
}

#[test]
fn eval_f2n_example() {
    let (code, v) = run(&[
        "eval", "f2n", "--n", "2", "--b", "0.3,0.4", "--bprime", "0.2", "--a", "0.5", "--c", "1.2,1.4", "--cprime", "1.1", "--t1", "0.1", "--t2",
        "0.95", "--N", "24", "--no-timestamp",
    ]);
    assert_eq!(code, EXIT_PASS);
    let value = v["result"]["value"].as_f64().unwrap();
    let direct = hplab::hgseries::eval_f2n(
        &hplab::hgseries::HGParamsF2n::new(vec![0.3, 0.4], 0.2, 0.5, vec![1.2, 1.4], 1.1).unwrap(),
        0.1,
        0.05,
        24,
        &Default::default(),
    )
    .unwrap();
    assert_eq!(value, direct.value);
    assert!(v["result"]["tail_bound"].as_f64().unwrap() < 1e-20);
    assert!(v.get("timestamp").is_none());
}

#[test]
fn report_schema_fields() {
    let (code, v) = run(&["verify", "pfaff", "--system", "main", "--n", "1", "--seed", "7", "--no-timestamp"]);
    assert_eq!(code, EXIT_PASS);
    for key in ["command", "seed", "params", "checks", "summary"] {
        assert!(v.get(key).is_some(), "missing {key}");
    }
    assert_eq!(v["seed"], 7);
    for c in v["checks"].as_array().unwrap() {
        for key in ["name", "residual", "tolerance", "pass"] {
            assert!(c.get(key).is_some(), "check lacks {key}");
        }
    }
}

#[test]
fn identical_runs_are_byte_identical() {
    let argv = ["hplab", "verify", "scheme", "--seed", "3", "--draws", "4", "--no-timestamp"];
    let a = execute(argv, None);
    let b = execute(argv, None);
    assert_eq!(a, b);
}

#[test]
fn timestamp_present_by_default() {
    let (_, v) = run(&["eval", "f4", "--a", "1.2", "--b", "-0.3", "--c1", "1.4", "--c2", "1.6", "--x", "0.05", "--y", "0.08"]);
    assert!(v["timestamp"].is_u64());
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(run(&["verify", "nonsense"]).0, EXIT_USAGE);
    assert_eq!(run(&["eval", "f2n", "--b", "0.3"]).0, EXIT_USAGE);
    assert_eq!(run(&["verify", "lpde", "--n-max", "7"]).0, EXIT_USAGE);
    // region violations are input errors
    let far = ["eval", "fn2", "--alpha", "0.5", "--beta", "0.3,0.4", "--gamma", "1.2", "--s1", "0.2", "--s2", "1.5"];
    assert_eq!(run(&far).0, EXIT_USAGE);
}

#[test]
fn failing_check_exits_1() {
    // a truncation this short cannot meet the default tail tolerance
    let (code, v) = run(&["eval", "fn2", "--alpha", "0.5", "--beta", "0.3,0.4", "--gamma", "1.2", "--s1", "0.6", "--s2", "0.7", "--N", "4"]);
    assert_eq!(code, EXIT_FAIL);
    assert_eq!(v["summary"]["pass"], false);
}

#[test]
fn tol_override_applies() {
    let (code, v) = run(&["verify", "scheme", "--draws", "2", "--tol", "1e-3", "--no-timestamp"]);
    assert_eq!(code, EXIT_PASS);
    assert!(v["checks"].as_array().unwrap().iter().all(|c| c["tolerance"] == 1e-3));
}

#[test]
fn config_defaults_and_argv_override() {
    let path = scratch("config.json");
    std::fs::write(&path, r#"{"seed": 11, "draws": 3, "no_timestamp": true}"#).unwrap();
    let p = path.to_str().unwrap();
    let (_, v) = run(&["verify", "symmetry", "--config", p]);
    assert_eq!(v["seed"], 11);
    assert_eq!(v["params"]["draws"], 3);
    assert!(v.get("timestamp").is_none());
    let (_, v) = run(&["verify", "symmetry", "--config", p, "--seed", "12", "--draws", "2"]);
    assert_eq!(v["seed"], 12);
    assert_eq!(v["params"]["draws"], 2);
    std::fs::write(&path, r#"{"sede": 1}"#).unwrap();
    assert_eq!(run(&["verify", "symmetry", "--config", p]).0, EXIT_USAGE);
    std::fs::remove_file(&path).ok();
}

#[test]
fn env_seed_is_the_fallback() {
    let argv = ["hplab", "dump", "connection", "--no-timestamp"];
    let o = execute(argv, Some("42"));
    let v: Value = serde_json::from_str(&o.stdout).unwrap();
    assert_eq!(v["seed"], 42);
    let o = execute(["hplab", "dump", "connection", "--seed", "5", "--no-timestamp"], Some("42"));
    let v: Value = serde_json::from_str(&o.stdout).unwrap();
    assert_eq!(v["seed"], 5);
    assert_eq!(execute(argv, Some("seven")).code, EXIT_USAGE);
}

#[test]
fn out_flag_writes_file() {
    let path = scratch("report.json");
    let o = execute(["hplab", "dump", "scheme", "--system", "f4", "--no-timestamp", "--out", path.to_str().unwrap()], None);
    assert_eq!(o.code, EXIT_PASS);
    assert!(o.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["command"], "dump scheme");
    std::fs::remove_file(&path).ok();
}

#[test]
fn dump_connection_has_five_residues() {
    let (code, v) = run(&["dump", "connection", "--system", "degenerate", "--n", "2", "--seed", "1", "--no-timestamp"]);
    assert_eq!(code, EXIT_PASS);
    let s = v["result"].to_string();
    assert!(s.contains("t1-t2"), "{s}");
}
