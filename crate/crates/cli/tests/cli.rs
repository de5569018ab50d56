use std::process::{Command, Output};

use serde_json::Value;

fn tmab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tmab"))
        .args(args)
        .env("NO_COLOR", "1")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json_lines(o: &Output) -> Vec<Value> {
    stdout(o)
        .lines()
        .map(|l| serde_json::from_str(l).expect("one JSON object per line"))
        .collect()
}

#[test]
fn complexity_both_methods_agree() {
    let o = tmab(&["--json", "complexity", "--n", "0..10", "--method", "both"]);
    assert_eq!(o.status.code(), Some(0));
    let recs = json_lines(&o);
    let fast: Vec<u64> = recs.iter().map(|r| r["payload"]["fast"].as_u64().unwrap()).collect();
    let brute: Vec<u64> = recs.iter().map(|r| r["payload"]["brute"].as_u64().unwrap()).collect();
    assert_eq!(fast, [1, 2, 4, 6, 8, 6, 8, 10, 8, 6, 8]);
    assert_eq!(fast, brute);
    assert!(recs.iter().all(|r| r["status"] == "ok" && r["command"] == "complexity"));
}

#[test]
fn csv_output() {
    let o = tmab(&["--csv", "complexity", "--n", "3..5"]);
    assert_eq!(stdout(&o), "index,value\n3,6\n4,8\n5,6\n");
    let o = tmab(&["--csv", "complexity", "--n", "7"]);
    assert_eq!(stdout(&o), "index,value\n7,10\n");
}

#[test]
fn other_orders_need_brute_force() {
    let o = tmab(&["--json", "complexity", "--n", "0..6", "--l", "1", "--method", "brute"]);
    assert_eq!(o.status.code(), Some(0));
    let v: Vec<u64> = json_lines(&o).iter().map(|r| r["payload"]["brute"].as_u64().unwrap()).collect();
    assert_eq!(v, [1, 2, 3, 2, 3, 2, 3]);
    assert_eq!(tmab(&["complexity", "--n", "0..6", "--l", "3"]).status.code(), Some(2));
}

#[test]
fn merf_example() {
    let o = tmab(&["merf", "0110010"]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    assert!(s.contains("0110100110010110, frame 8"), "{s}");

    let r = &json_lines(&tmab(&["--json", "merf", "--trace", "0110010"]))[0];
    assert_eq!(r["payload"]["merf"]["extended"], "0110100110010110");
    assert_eq!(r["payload"]["merf"]["trace"].as_array().unwrap().len(), 3);
}

#[test]
fn relations_verify() {
    let o = tmab(&["verify", "relations", "--n-max", "1000"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("13/13 relations hold"));

    let o = tmab(&["--json", "verify", "relations", "--n-max", "20", "--evaluator", "brute"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(json_lines(&o).len(), 13);
}

#[test]
fn other_checks_pass() {
    for args in [
        &["verify", "coverage"][..],
        &["verify", "palindromes", "--q-max", "8"],
        &["verify", "steps", "--n-max", "5000"],
        &["witness", "--steps", "6"],
        &["bounds", "--length", "33"],
        &["pairs", "--n", "0..40", "--method", "both"],
    ] {
        let o = tmab(args);
        assert_eq!(o.status.code(), Some(0), "{args:?}: {}", stdout(&o));
        assert!(!stdout(&o).contains("FAIL"), "{args:?}");
    }
}

#[test]
fn coding_roundtrip() {
    let w = "0110100110010110";
    let c = json_lines(&tmab(&["--json", "coding", w]))[0]["payload"]["coding"]
        .as_str()
        .unwrap()
        .to_owned();
    let first = &w[..1];
    let back = &json_lines(&tmab(&["--json", "decode", &c, first]))[0];
    assert_eq!(back["payload"]["word"], w);
}

#[test]
fn discovery_finds_short_relations() {
    let o = tmab(&["--json", "discover", "--n-max", "128", "--modulus", "16"]);
    assert_eq!(o.status.code(), Some(0));
    let rels: Vec<String> = json_lines(&o)
        .iter()
        .map(|r| r["payload"]["relation"].as_str().unwrap().to_owned())
        .collect();
    assert!(rels.iter().any(|r| r == "P[4n+1] = P[2n+1]"));
    assert!(rels.iter().any(|r| r == "P[16n+10] = P[16n+8]"));
}

#[test]
fn usage_errors_exit_2() {
    for args in [
        &["complexity", "--n", "5..2"][..],
        &["complexity", "--n", "x"],
        &["frobnicate"],
        &["merf", "000"],
        &["merf", "01a"],
        &["coding", "01"],
        &["decode", "DSE", "0"],
        &["decode", "DD", "2"],
        &["witness", "--steps", "40"],
        &["discover", "--n-max", "10", "--modulus", "16"],
        &["discover", "--n-max", "200", "--modulus", "12"],
        &["--json", "--csv", "word", "--length", "4"],
    ] {
        let o = tmab(args);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
        assert!(!o.stderr.is_empty(), "{args:?}");
    }
}

#[test]
fn json_is_deterministic() {
    let args = ["--json", "discover", "--n-max", "100", "--modulus", "8"];
    let a = tmab(&args);
    let b = tmab(&args);
    assert_eq!(a.stdout, b.stdout);
    let args = ["--json", "verify", "coverage"];
    assert_eq!(tmab(&args).stdout, tmab(&args).stdout);
}

#[test]
fn word_and_factors() {
    let r = &json_lines(&tmab(&["--json", "word", "--length", "16"]))[0];
    assert_eq!(r["payload"]["word"], "0110100110010110");
    let r = &json_lines(&tmab(&["--json", "factors", "--length", "4"]))[0];
    assert_eq!(r["payload"]["count"], 10);
    assert_eq!(r["status"], "ok");
}
