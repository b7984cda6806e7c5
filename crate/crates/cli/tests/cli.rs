use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;
use unikb::kb::parse_kb;

fn fig(name: &str) -> String {
    let p = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../figures").join(name);
    p.to_string_lossy().into_owned()
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_unikb")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("{e}: {}", stdout(o)))
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

#[test]
fn translate_frames() {
    let o = run(&["translate", "--from", "frm", &fig("fig2.frm")]);
    assert_eq!(code(&o), 0);
    let kb = parse_kb(&stdout(&o)).unwrap();
    let expected = parse_kb(&std::fs::read_to_string(fig("fig3.kb")).unwrap()).unwrap();
    assert!(kb.equivalent_to(&expected));
}

#[test]
fn translate_er_both_modes() {
    let expected = parse_kb(&std::fs::read_to_string(fig("fig6.kb")).unwrap()).unwrap();
    let o = run(&["translate", "--elide-disjointness", &fig("fig4.ers")]);
    let display = parse_kb(&stdout(&o)).unwrap();
    assert!(display.equivalent_to(&expected));
    assert_eq!(display.assertions().len(), 7);
    let o = run(&["translate", &fig("fig4.ers")]);
    assert_eq!(parse_kb(&stdout(&o)).unwrap().assertions().len(), 16 + 21);
}

#[test]
fn translate_oo() {
    let o = run(&["translate", "--from", "oos", &fig("fig7.oos")]);
    let expected = parse_kb(&std::fs::read_to_string(fig("fig8.kb")).unwrap()).unwrap();
    assert!(parse_kb(&stdout(&o)).unwrap().equivalent_to(&expected));
    let o = run(&["translate", "--pretty", &fig("fig7.oos")]);
    assert!(stdout(&o).contains('⊑'));
}

#[test]
fn find_model_verdicts() {
    let o = run(&["find-model", &fig("keven.kb"), "--goal", "Number AND NOT Even", "--max", "6"]);
    assert_eq!(code(&o), 1);
    let v = json(&o);
    assert_eq!(v["outcome"], "NoModelUpTo");
    assert_eq!(v["bound"], 6);
    assert!(v["facts"].as_array().unwrap().iter().any(|f| f["kind"] == "FiniteSubsumption"));

    let o = run(&["find-model", &fig("keven.kb"), "--goal", "Number", "--max", "1"]);
    assert_eq!(code(&o), 0);
    assert_eq!(json(&o)["witness"]["domain"], 1);

    let o = run(&["find-model", &fig("fig4.ers"), "--goal", "Teacher", "--max", "2", "--pretty"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).starts_with("witness of size 1"));
}

#[test]
fn timed_out_search_is_negative() {
    let o = run(&["find-model", &fig("keven.kb"), "--goal", "Number AND NOT Even", "--max", "64", "--time", "0.1"]);
    assert_eq!(code(&o), 1);
    assert_eq!(json(&o)["outcome"], "TimedOut");
}

#[test]
fn subsumption() {
    let o = run(&["subsumes", &fig("fig4.ers"), "--lhs", "Course", "--rhs", "AdvCourse", "--max", "6"]);
    assert_eq!(code(&o), 1);
    assert_eq!(json(&o)["outcome"], "WitnessFound");
    let o = run(&["subsumes", &fig("fig3.kb"), "--lhs", "AdvCourse", "--rhs", "Course", "--max", "3"]);
    assert_eq!(code(&o), 0);
    assert_eq!(json(&o)["outcome"], "NoModelUpTo");
}

#[test]
fn analyze() {
    let o = run(&["analyze", &fig("ex44.ers")]);
    assert_eq!(code(&o), 0);
    let facts = json(&o);
    let found = facts
        .as_array()
        .unwrap()
        .iter()
        .any(|f| f["kind"] == "FiniteSubsumption" && f["sub"] == "Number" && f["sup"] == "Even");
    assert!(found, "{facts}");
    let o = run(&["analyze", "--pretty", &fig("keven.kb")]);
    assert!(stdout(&o).contains("Number ⊑ Even (finite models)"));
}

#[test]
fn check_model() {
    let o = run(&["check-model", &fig("ex56.oos"), &fig("fig9.json")]);
    assert_eq!(code(&o), 0);
    assert_eq!(json(&o)["model"], true);
    let o = run(&["check-model", &fig("fig8.kb"), &fig("fig9.json")]);
    assert_eq!(code(&o), 3, "symbols outside the signature are an input error");
}

#[test]
fn check_state() {
    let o = run(&["check-state", &fig("fig4.ers"), &fig("fig4-state.json")]);
    assert_eq!(code(&o), 0);
    assert_eq!(json(&o)["legal"], true);
    let o = run(&["check-state", &fig("fig7.oos"), &fig("fig7-instance.json"), "--pretty"]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o).trim(), "legal");

    let dir = std::env::temp_dir().join(format!("unikb-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let bad = dir.join("bad-state.json");
    std::fs::write(&bad, r#"{"domain": ["c"], "entities": {"Course": ["c"]}}"#).unwrap();
    let o = run(&["check-state", &fig("fig4.ers"), bad.to_str().unwrap()]);
    assert_eq!(code(&o), 1);
    let v = json(&o);
    let conditions: Vec<u64> = v["violations"].as_array().unwrap().iter().map(|x| x["condition"].as_u64().unwrap()).collect();
    assert!(conditions.contains(&4));
    std::fs::remove_dir_all(dir).ok();
}

#[test]
fn roundtrip() {
    let o = run(&["roundtrip", &fig("fig4.ers"), &fig("fig4-state.json")]);
    assert_eq!(code(&o), 0);
    let v = json(&o);
    assert_eq!(v["model"], true);
    assert_eq!(v["relation_descriptive"], true);
    assert_eq!(v["differences"].as_array().unwrap().len(), 0);
    let o = run(&["roundtrip", &fig("fig7.oos"), &fig("fig7-instance.json")]);
    assert_eq!(code(&o), 0);
    assert_eq!(json(&o)["differences"].as_array().unwrap().len(), 0);
}

#[test]
fn depth() {
    let o = run(&["depth", &fig("fig7.oos")]);
    assert_eq!(code(&o), 0);
    let out = stdout(&o);
    assert_eq!(out.lines().next(), Some("schema depth: 2"));
    assert!(out.contains("Course: 2"));
    let o = run(&["depth", &fig("ex56.oos")]);
    assert_eq!(stdout(&o).lines().next(), Some("schema depth: 3"));
}

#[test]
fn exit_codes_for_bad_input() {
    assert_eq!(code(&run(&["frobnicate"])), 2);
    assert_eq!(code(&run(&["find-model", &fig("keven.kb")])), 2);
    assert_eq!(code(&run(&["translate", "/nonexistent/x.frm"])), 3);
    assert_eq!(code(&run(&["find-model", &fig("keven.kb"), "--goal", "Nope"])), 3);
    assert_eq!(code(&run(&["find-model", &fig("keven.kb"), "--goal", "Number", "--max", "65"])), 3);
    assert_eq!(code(&run(&["translate", &fig("fig9.json")])), 3);
    assert_eq!(code(&run(&["depth", &fig("fig4.ers")])), 3);
}

#[test]
fn output_is_deterministic() {
    for args in [
        vec!["translate".to_string(), fig("fig4.ers")],
        vec!["find-model".into(), fig("fig4.ers"), "--goal".into(), "Course".into(), "--max".into(), "6".into()],
        vec!["analyze".into(), fig("fig4.ers")],
    ] {
        let args: Vec<&str> = args.iter().map(String::as_str).collect();
        assert_eq!(run(&args).stdout, run(&args).stdout);
    }
}
