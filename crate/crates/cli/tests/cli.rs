use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::{Command, Stdio};

use balancelab_cli::{run, EXIT_DOMAIN, EXIT_OK, EXIT_USAGE};
use serde_json::Value;

struct Output {
    code: i32,
    stdout: String,
    stderr: String,
}

fn cli_with_stdin(args: &[&str], stdin: &str) -> Output {
    let mut argv = vec!["balancelab"];
    argv.extend_from_slice(args);
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = run(argv, &mut stdin.as_bytes(), &mut out, &mut err);
    Output {
        code,
        stdout: String::from_utf8(out).unwrap(),
        stderr: String::from_utf8(err).unwrap(),
    }
}

fn cli(args: &[&str]) -> Output {
    cli_with_stdin(args, "")
}

fn json_of(o: &Output) -> Value {
    assert_eq!(o.code, EXIT_OK, "stderr: {}", o.stderr);
    serde_json::from_str(&o.stdout).unwrap_or_else(|e| panic!("{e}: {}", o.stdout))
}

fn schema_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("schemas")
}

fn fixtures_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures")
}

fn assert_valid(schema: &str, doc: &Value) {
    let path = schema_dir().join(format!("{schema}.schema.json"));
    let s: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    let v = jsonschema::validator_for(&s).unwrap();
    let errors: Vec<String> = v
        .iter_errors(doc)
        .map(|e| format!("{} at {}", e, e.instance_path()))
        .collect();
    assert!(errors.is_empty(), "{schema}: {errors:?}\n{doc:#}");
}

const W_PRIME: &str = "|000>+|100>+|010>+|001>";

#[test]
fn analyze_w_prime() {
    let v = json_of(&cli(&["analyze", "--state", W_PRIME, "--normalize", "--json"]));
    assert_eq!(v["z"], serde_json::json!([-1, 1, 1, 1]));
    assert_eq!(v["class"], "a_balanced_only");
    assert_valid("balance_report", &v);
}

#[test]
fn every_json_output_matches_its_schema() {
    let state = "|1111>+|1100>+|0010>+|0001>";
    let corpus = fixtures_dir();
    let cases: Vec<(&str, Vec<&str>)> = vec![
        ("state", vec!["parse", "--state", W_PRIME]),
        ("state", vec!["flip", "--state", W_PRIME, "--flip-terms", "0", "--json"]),
        ("balance_report", vec!["analyze", "--state", state, "--json"]),
        ("invariants", vec!["invariants", "--state", W_PRIME, "--json"]),
        ("invariants", vec!["invariants", "--state", state, "--json"]),
        ("phases", vec!["phases", "--state", state, "--json"]),
        ("phases", vec!["phases", "--state", "|100>+|010>+|001>", "--json"]),
        (
            "classify_three_qubit",
            vec!["classify", "--state", W_PRIME, "--scheme", "three-qubit", "--json"],
        ),
        (
            "classify_structure",
            vec!["classify", "--state", state, "--scheme", "structure", "--json"],
        ),
        ("census", vec!["enumerate", "--qubits", "4", "--json"]),
        ("verify", vec!["verify", "--suite", "all", "--samples", "20", "--json"]),
        ("corpus_summary", vec!["corpus", corpus.to_str().unwrap(), "--json"]),
    ];
    for (schema, args) in cases {
        let v = json_of(&cli(&args));
        assert_valid(schema, &v);
    }
}

#[test]
fn flip_then_invariants_pipeline() {
    let x = json_of(&cli(&["parse", "--state", "|111>+|100>+|010>+|001>", "--normalize"]));
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("x.json");
    std::fs::write(&file, x.to_string()).unwrap();
    let flipped = cli(&["flip", "--state-file", file.to_str().unwrap(), "--flip-terms", "3"]);
    assert_eq!(flipped.code, EXIT_OK, "{}", flipped.stderr);
    let inv = json_of(&cli_with_stdin(&["invariants", "--json"], &flipped.stdout));
    let tau31 = &inv["tau31"];
    let norm = (tau31["re"].as_f64().unwrap().powi(2) + tau31["im"].as_f64().unwrap().powi(2)).sqrt();
    assert!((norm - 0.125).abs() < 1e-12, "{inv}");
    assert!(inv["tau3"]["re"].as_f64().unwrap().abs() < 1e-12);
}

#[test]
fn binary_pipes_state_json() {
    let bin = env!("CARGO_BIN_EXE_balancelab");
    let flip = Command::new(bin)
        .args([
            "flip",
            "--state",
            "|111>+|100>+|010>+|001>",
            "--normalize",
            "--flip-terms",
            "3",
        ])
        .output()
        .unwrap();
    assert!(flip.status.success());
    let mut child = Command::new(bin)
        .args(["analyze", "--json"])
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(&flip.stdout).unwrap();
    let out = child.wait_with_output().unwrap();
    assert!(out.status.success());
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["class"], "a_balanced_only");
}

#[test]
fn stdin_accepts_expressions() {
    let v = json_of(&cli_with_stdin(&["analyze", "--json"], "|00> + |11>\n"));
    assert_eq!(v["z"], serde_json::json!([1, 1]));
}

#[test]
fn enumerate_three_qubits() {
    let v = json_of(&cli(&["enumerate", "--qubits", "3", "--format", "json"]));
    assert_eq!(v["entries"].as_array().unwrap().len(), 3);
    let table = cli(&["enumerate", "--qubits", "3"]);
    assert_eq!(table.code, EXIT_OK);
    assert!(table.stdout.contains("a_only"));
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("census.json");
    let o = cli(&[
        "enumerate",
        "--qubits",
        "4",
        "--format",
        "json",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.code, EXIT_OK);
    assert!(o.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(out).unwrap()).unwrap();
    assert_eq!(v["qubits"], 4);
}

#[test]
fn exit_codes() {
    let domain = [
        vec!["analyze", "--state", "|0> + |12>"],
        vec!["analyze", "--state", "|00> - |00>", "--normalize"],
        vec!["enumerate", "--qubits", "7"],
        vec!["flip", "--state", "|00>", "--flip-terms", "5"],
        vec!["classify", "--state", "|00>+|11>", "--scheme", "three-qubit"],
        vec!["analyze", "--state-file", "/nonexistent/state.json"],
        vec!["corpus", "/nonexistent/corpus"],
    ];
    for args in domain {
        let o = cli(&args);
        assert_eq!(o.code, EXIT_DOMAIN, "{args:?}: {}", o.stderr);
        assert!(o.stderr.starts_with("error:"), "{args:?}");
    }
    let usage = [
        vec!["analyze"],
        vec!["frobnicate"],
        vec!["analyze", "--state", "|0>", "--state-file", "x.json"],
        vec!["flip", "--state", "|0>"],
        vec!["flip", "--state", "|0>", "--flip-terms", "0", "--flip-theta", "|0>"],
        vec!["flip", "--state", "|0>", "--flip-terms", "a"],
        vec!["analyze", "--state", "|0>", "--json", "--format", "table"],
        vec!["enumerate"],
        vec!["verify", "--suite", "some"],
    ];
    for args in usage {
        assert_eq!(cli(&args).code, EXIT_USAGE, "{args:?}");
    }
    let help = cli(&["--help"]);
    assert_eq!(help.code, EXIT_OK);
    assert!(help.stdout.contains("enumerate"));
}

#[test]
fn hostile_inputs_do_not_panic() {
    let inputs = [
        "",
        "|",
        "|>",
        "((((",
        "1e999|0>",
        "NaN|0>",
        "|0>+",
        "0|0>",
        "i i |0>",
        "|0101> + (1+)|1111>",
        "{\"qubits\": 0, \"terms\": []}",
        "{\"qubits\": 2, \"terms\": [{\"basis\": \"0\", \"re\": 1}]}",
        "{\"qubits\": 70, \"terms\": []}",
        "\u{0}",
    ];
    for text in inputs {
        for cmd in ["parse", "analyze", "invariants", "phases", "classify"] {
            let o = cli_with_stdin(&[cmd], text);
            assert!([EXIT_OK, EXIT_DOMAIN, EXIT_USAGE].contains(&o.code), "{cmd} {text:?}");
            let o = cli(&[cmd, "--state", text]);
            assert!(
                [EXIT_OK, EXIT_DOMAIN, EXIT_USAGE].contains(&o.code),
                "{cmd} --state {text:?}"
            );
        }
    }
    let long = format!("|{}>", "1".repeat(30));
    assert_ne!(cli(&["phases", "--state", &long]).code, EXIT_USAGE);
}

#[test]
fn output_is_deterministic() {
    let args = ["verify", "--suite", "all", "--seed", "42", "--samples", "50", "--json"];
    let a = cli(&args);
    let b = cli(&args);
    assert_eq!(a.code, EXIT_OK);
    assert_eq!(a.stdout, b.stdout);
    let c = cli(&["verify", "--suite", "all", "--seed", "43", "--samples", "50", "--json"]);
    assert_ne!(a.stdout, c.stdout);
    let e1 = cli(&["enumerate", "--qubits", "5", "--json"]);
    let e2 = cli(&["enumerate", "--qubits", "5", "--json"]);
    assert_eq!(e1.stdout, e2.stdout);
}

#[test]
fn seed_falls_back_to_environment() {
    let bin = env!("CARGO_BIN_EXE_balancelab");
    let args = ["verify", "--suite", "theorems", "--samples", "20", "--json"];
    let from_env = Command::new(bin)
        .args(args)
        .env("BALANCELAB_SEED", "7")
        .output()
        .unwrap();
    let from_flag = Command::new(bin)
        .args(args)
        .args(["--seed", "7"])
        .env_remove("BALANCELAB_SEED")
        .output()
        .unwrap();
    assert!(from_env.status.success());
    assert_eq!(from_env.stdout, from_flag.stdout);
    let default = Command::new(bin)
        .args(args)
        .env_remove("BALANCELAB_SEED")
        .output()
        .unwrap();
    let v: Value = serde_json::from_slice(&default.stdout).unwrap();
    assert_eq!(v["seed"], 0);
}

#[test]
fn shipped_corpus_passes() {
    let v = json_of(&cli(&["corpus", fixtures_dir().to_str().unwrap(), "--json"]));
    assert_eq!(v["total"], v["passed"]);
    assert!(v["total"].as_u64().unwrap() >= 10);
}

#[test]
fn empty_corpus_is_zero_of_zero() {
    let dir = tempfile::tempdir().unwrap();
    let o = cli(&["corpus", dir.path().to_str().unwrap()]);
    assert_eq!(o.code, EXIT_OK);
    assert!(o.stdout.contains("0/0"));
}

#[test]
fn corrupted_fixture_is_named() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::copy(fixtures_dir().join("ghz.json"), dir.path().join("ghz.json")).unwrap();
    std::fs::write(dir.path().join("broken.json"), "{ \"name\": \"oops\", ").unwrap();
    let o = cli(&["corpus", dir.path().to_str().unwrap()]);
    assert_eq!(o.code, EXIT_DOMAIN);
    assert!(o.stderr.contains("broken.json"), "{}", o.stderr);
    assert!(o.stdout.contains("1/2"));
}

#[test]
fn wrong_expectation_fails() {
    let dir = tempfile::tempdir().unwrap();
    let fixture = serde_json::json!({
        "name": "GHZ with a wrong z",
        "state": "|000> + |111>",
        "expect": {"analyze": {"z": [1, 2]}}
    });
    std::fs::write(dir.path().join("ghz.json"), fixture.to_string()).unwrap();
    let o = cli(&["corpus", dir.path().to_str().unwrap(), "--json"]);
    assert_eq!(o.code, EXIT_DOMAIN);
    let v: Value = serde_json::from_str(&o.stdout).unwrap();
    assert_eq!(v["passed"], 0);
    assert!(v["results"][0]["mismatches"][0]
        .as_str()
        .unwrap()
        .contains("analyze.z[1]"));
}

#[test]
fn table_outputs() {
    let o = cli(&["classify", "--state", W_PRIME, "--scheme", "three-qubit"]);
    assert_eq!(o.stdout.trim(), "(0,1) W′-class");
    let o = cli(&["analyze", "--state", W_PRIME]);
    assert!(o.stdout.contains("z            (-1,1,1,1)"));
    let o = cli(&["parse", "--state", "|01> + 2i|10>", "--format", "table"]);
    assert_eq!(o.stdout.trim(), "1*|01> + 2i*|10>");
    let o = cli(&["verify", "--samples", "20"]);
    assert!(o.stdout.lines().last().unwrap().ends_with("PASS"));
}
