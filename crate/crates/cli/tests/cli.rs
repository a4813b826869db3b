use std::path::PathBuf;
use std::process::{Command, Output};

use jsonschema::{Draft, JSONSchema};
use serde_json::Value;

fn example(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("examples").join(name).display().to_string()
}

fn dga(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dga")).args(args).output().expect("dga runs")
}

fn report(args: &[&str]) -> Value {
    let out = dga(args);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("json report")
}

fn schema() -> JSONSchema {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../docs/report-schema.json");
    let s: Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    JSONSchema::options().with_draft(Draft::Draft202012).compile(&s).expect("schema compiles")
}

#[test]
fn validate_succeeds() {
    let r = report(&["validate", &example("arrow_d2.dga")]);
    assert_eq!(r["result"]["dim"], 3);
    assert_eq!(r["schema"], "dga-report/1");
}

#[test]
fn gd_of_one_arrow() {
    let r = report(&["gd", &example("arrow_d2.dga")]);
    assert_eq!(r["result"]["value"]["kind"], "Exact");
    assert_eq!(r["result"]["value"]["value"], 3);
}

#[test]
fn ext_table_of_one_arrow() {
    let r = report(&["ext", &example("arrow_d2.dga"), "--from", "simples_sum", "--to", "simples_sum", "--range", "0..8"]);
    let dims = r["result"]["dims"].as_object().unwrap();
    for n in 0..=8 {
        let expected = match n {
            0 => 2,
            3 => 1,
            _ => 0,
        };
        assert_eq!(dims[&n.to_string()], expected, "degree {n}");
    }
}

#[test]
fn reports_match_the_schema() {
    let schema = schema();
    let runs: Vec<Vec<String>> = vec![
        vec!["validate".into(), example("square_with_homotopy.dga")],
        vec!["h0".into(), example("square_with_homotopy.dga")],
        vec!["cohomology".into(), example("a3_radical_square_zero.dga")],
        vec!["ext".into(), example("dual_numbers.dga"), "--range".into(), "-1..4".into()],
        vec!["pd".into(), example("arrow_d2.dga"), "--module".into(), example("p1_over_arrow_d2.dga")],
        vec!["gd".into(), example("dual_numbers.dga"), "--cutoff".into(), "4".into(), "--field".into(), "F3".into()],
        vec!["verify".into(), "triangle-bound".into(), "--trials".into(), "3".into()],
    ];
    for args in runs {
        let args: Vec<&str> = args.iter().map(String::as_str).collect();
        let r = report(&args);
        let msgs: Vec<String> = match schema.validate(&r) {
            Ok(()) => Vec::new(),
            Err(errors) => errors.map(|e| e.to_string()).collect(),
        };
        assert!(msgs.is_empty(), "{args:?}: {msgs:?}");
    }
}

#[test]
fn payloads_are_reproducible() {
    let strip = |mut v: Value| {
        v.as_object_mut().unwrap().remove("timing");
        v
    };
    for args in [vec!["gd", "--seed", "3"], vec!["verify", "acyclic-bound", "--trials", "5", "--seed", "9"]] {
        let mut args: Vec<String> = args.into_iter().map(String::from).collect();
        if args[0] == "gd" {
            args.insert(1, example("square_with_homotopy.dga"));
        }
        let args: Vec<&str> = args.iter().map(String::as_str).collect();
        assert_eq!(strip(report(&args)), strip(report(&args)));
    }
}

#[test]
fn input_hash_is_sha256_of_the_file() {
    let r = report(&["validate", &example("dual_numbers.dga")]);
    let hash = r["input"]["sha256"].as_str().unwrap();
    assert_eq!(hash.len(), 64);
    let other = report(&["validate", &example("arrow_d2.dga")]);
    assert_ne!(other["input"]["sha256"].as_str().unwrap(), hash);
}

#[test]
fn csv_for_ext_only() {
    let out = dga(&["ext", &example("arrow_d2.dga"), "--range", "0..3", "--format", "csv"]);
    assert_eq!(String::from_utf8(out.stdout).unwrap(), "degree,dim\n0,2\n1,0\n2,0\n3,1\n");
    assert_eq!(dga(&["gd", &example("arrow_d2.dga"), "--format", "csv"]).status.code(), Some(1));
}

#[test]
fn out_flag_writes_a_file() {
    let dir = std::env::temp_dir().join(format!("dga-out-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("report.json");
    let out = dga(&["gd", &example("arrow_d2.dga"), "--out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let r: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(r["command"], "gd");
    std::fs::remove_dir_all(dir).unwrap();
}

#[test]
fn bad_input_exits_with_one() {
    let dir = std::env::temp_dir().join(format!("dga-bad-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let bad = dir.join("bad.dga");
    std::fs::write(&bad, "vertices 1\narrow a : 1 -> 1 deg 1\n").unwrap();
    let out = dga(&["gd", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let msg = String::from_utf8_lossy(&out.stderr);
    assert!(msg.contains("bad.dga:2:"), "{msg}");
    assert_eq!(dga(&["gd", "/nonexistent/x.dga"]).status.code(), Some(1));
    assert_eq!(dga(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(dga(&["gd", &example("arrow_d2.dga"), "--field", "F4"]).status.code(), Some(1));
    assert_eq!(dga(&["pd", &example("arrow_d2.dga"), "--module", "simple(9)"]).status.code(), Some(1));
    std::fs::remove_dir_all(dir).unwrap();
}

#[test]
fn cyclic_gd_warns_and_bounds() {
    let r = report(&["gd", &example("dual_numbers.dga")]);
    assert_eq!(r["result"]["value"]["kind"], "AtLeast");
    assert_eq!(r["result"]["cutoff_provenance"], "default");
    assert_eq!(r["result"]["warnings"].as_array().unwrap().len(), 1);
}
