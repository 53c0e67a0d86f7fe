//! Exercises the binary end to end: exit codes, report shape, determinism.

use std::path::PathBuf;
use std::process::{Command, Output};

fn example(name: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "examples", name].iter().collect();
    p.to_str().unwrap().to_string()
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_charloci"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn euler_counts_skyscraper_stalks() {
    let o = run(&["euler", "--input", &example("skyscraper_g1.json")]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "3");
}

#[test]
fn fiber_reports_dimensions() {
    let o = run(&["fiber", "--input", &example("const_g1.json"), "--point", "1,1"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let dims = v["dims"].as_array().unwrap();
    assert_eq!(dims.len(), 3);
    assert_eq!(dims[1]["degree"], 0);
    assert_eq!(dims[1]["dim"], 2);
}

#[test]
fn loci_certifies_trivial_character() {
    let o = run(&["loci", "--input", &example("const_g1.json"), "--k", "1", "--m", "1"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["certified"], true);
    let comps = v["components"].as_array().unwrap();
    assert_eq!(comps.len(), 1);
    assert_eq!(comps[0]["codim"], 2);
    assert_eq!(comps[0]["arithmetic"], true);
}

#[test]
fn repeated_runs_are_byte_identical() {
    let args = ["loci", "--input", &example("pushforward_g2_h1.json"), "--k", "1", "--m", "1"];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn perversity_text_output() {
    let o = run(&["perversity", "--input", &example("const_g1.json"), "--output", "text"]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    assert!(s.contains("heart: true"), "got:\n{s}");
    assert!(s.contains("equi_certified: true"), "got:\n{s}");
}

#[test]
fn ic_passes_on_reflexive_module() {
    let o = run(&["ic", "--input", &example("ic_syzygy_n4.json")]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["h0_matches"], true);
    assert_eq!(v["m_perverse"], true);
    assert_eq!(v["stable_under_ell_increase"], true);
}

#[test]
fn transform_round_trips_through_stdin_shape() {
    let o = run(&["transform", "--input", &example("const_g1.json")]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["ring"]["vars"].as_array().unwrap().len(), 2);
    assert!(v["ranks"].is_object());
}

#[test]
fn verify_examples_suite_passes() {
    let o = run(&["verify", "--suite", "examples", "--seed", "7"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("examples: pass"));
}

#[test]
fn missing_file_is_an_input_error() {
    let o = run(&["euler", "--input", "/no/such/file.json"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(!o.stderr.is_empty());
}

#[test]
fn zero_coordinate_point_is_rejected() {
    let o = run(&["fiber", "--input", &example("const_g1.json"), "--point", "0,1"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn wrong_arity_point_is_rejected() {
    let o = run(&["fiber", "--input", &example("const_g1.json"), "--point", "1,1,1"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn even_ell_override_is_rejected() {
    let o = run(&["ic", "--input", &example("ic_syzygy_n4.json"), "--ell-override", "2"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn unknown_suite_is_an_input_error() {
    let o = run(&["verify", "--suite", "nope", "--seed", "1"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn malformed_json_is_an_input_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    std::fs::write(&path, "{ not json").unwrap();
    let o = run(&["euler", "--input", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn seed_is_required_for_verify() {
    let o = run(&["verify", "--suite", "examples"]);
    assert_ne!(o.status.code(), Some(0));
}
