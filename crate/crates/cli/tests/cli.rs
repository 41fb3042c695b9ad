use std::path::Path;
use std::process::{Command, Output};

use grounded_chi::decomposition::find_bracket;
use grounded_chi::dist2::build_pillar_context;
use grounded_chi::io::{self, Loaded};
use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_grounded-chi"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn path(dir: &tempfile::TempDir, name: &str) -> String {
    dir.path().join(name).display().to_string()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn last_json(o: &Output) -> Value {
    serde_json::from_str(stdout(o).lines().last().expect("some output")).unwrap()
}

const TWIN: &str = r#"{"frame": {"width": 9, "height": 5, "x_min": -2}, "sets": [
  {"id": "A", "cells": [[0,0],[0,1],[0,2],[1,2],[2,2]]},
  {"id": "B", "cells": [[4,0],[4,1],[4,2],[3,2],[2,2]]}]}"#;

const APART: &str = r#"{"frame": {"width": 9, "height": 5, "x_min": -2}, "sets": [
  {"id": "A", "cells": [[0,0],[0,1]]}, {"id": "B", "cells": [[2,0],[2,1]]}, {"id": "C", "cells": [[4,0]]}]}"#;

#[test]
fn gen_random_writes_a_valid_family() {
    let dir = tempfile::tempdir().unwrap();
    let out = path(&dir, "fam.json");
    let o = run(&["gen", "--kind", "random", "--n", "10", "--seed", "7", "-o", &out]);
    assert!(o.status.success());
    let Loaded::Grounded(f) = io::load(&out).unwrap() else { panic!("grounded family expected") };
    assert_eq!(f.len(), 10);
    f.validate().unwrap();
    assert_eq!(last_json(&o)["seed"], 7);
}

#[test]
fn gen_bracket_is_found_again() {
    let dir = tempfile::tempdir().unwrap();
    let out = path(&dir, "b.json");
    assert!(run(&["gen", "--kind", "bracket", "--k", "3", "-o", &out]).status.success());
    let Loaded::Grounded(f) = io::load(&out).unwrap() else { panic!() };
    let w = find_bracket(&f, 3).unwrap().expect("bracket present");
    assert_eq!(w.clique.len(), 3);
}

#[test]
fn gen_pillars_builds_a_context() {
    let dir = tempfile::tempdir().unwrap();
    let out = path(&dir, "p.json");
    assert!(run(&["gen", "--kind", "pillars", "--m", "4", "-o", &out]).status.success());
    let Loaded::Scene(sc) = io::load(&out).unwrap() else { panic!() };
    let ctx = build_pillar_context(&sc.s, &sc.pillar_sets(), &sc.frame()).unwrap();
    assert_eq!(ctx.m(), 4);
}

#[test]
fn gen_output_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (path(&dir, "a.json"), path(&dir, "b.json"));
    run(&["gen", "--kind", "scene", "--m", "3", "--n", "6", "--seed", "11", "-o", &a]);
    run(&["gen", "--kind", "scene", "--m", "3", "--n", "6", "--seed", "11", "-o", &b]);
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
}

fn analyze_json(text: &str) -> Value {
    let dir = tempfile::tempdir().unwrap();
    let file = path(&dir, "in.json");
    std::fs::write(&file, text).unwrap();
    let o = run(&["analyze", &file, "--json"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    last_json(&o)
}

#[test]
fn analyze_small_families() {
    let twin = analyze_json(TWIN);
    assert_eq!((twin["omega"].as_u64(), twin["chi"].as_u64()), (Some(2), Some(2)));
    assert_eq!(twin["order"], serde_json::json!(["A", "B"]));
    assert_eq!(twin["simple"], true);
    let apart = analyze_json(APART);
    assert_eq!((apart["omega"].as_u64(), apart["chi"].as_u64()), (Some(1), Some(1)));
    assert_eq!(apart["edges"], 0);
}

#[test]
fn analyze_random_family_respects_clique_bound() {
    let dir = tempfile::tempdir().unwrap();
    let out = path(&dir, "fam.json");
    run(&["gen", "--kind", "random", "--n", "12", "--seed", "7", "-o", &out]);
    let o = run(&["analyze", &out, "--json"]);
    let r = last_json(&o);
    assert!(r["chi"].as_u64().unwrap() >= r["omega"].as_u64().unwrap());
}

#[test]
fn bounds_table() {
    let o = run(&["bounds", "--k", "2", "--json"]);
    let t: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(t["rows"][0]["xi"], "1");
    assert_eq!(t["rows"][1]["xi"], "1488");
    assert_eq!(t["rows"][1]["delta"][0], "90");
    assert!(stdout(&run(&["bounds", "--k", "1"])).contains("xi_1"));
}

#[test]
fn verify_pillars_all_pass() {
    let o = run(&["verify", "--lemma", "pillars", "--trials", "200", "--seed", "1"]);
    assert!(o.status.success());
    let s = last_json(&o);
    assert_eq!(s["failed"], 0);
    assert_eq!(s["trials"], 200);
}

#[test]
fn verify_dist2_stays_within_sixteen() {
    let o = run(&["verify", "--lemma", "dist2", "--k", "2", "--trials", "50"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let mut colored = 0;
    for line in text.lines().filter(|l| l.contains("\"seed\"")) {
        let r: Value = serde_json::from_str(line).unwrap();
        if let Some(p) = r["sizes"]["palette"].as_u64() {
            assert!(p <= 16, "palette {p}");
            colored += 1;
        }
    }
    assert!(colored >= 40);
}

#[test]
fn verify_ladder_holds() {
    let o = run(&["verify", "--lemma", "ladder", "--trials", "100"]);
    assert!(o.status.success());
    assert_eq!(last_json(&o)["failed"], 0);
}

#[test]
fn verify_is_independent_of_thread_count() {
    let one = run(&["verify", "--lemma", "final", "--trials", "12", "--seed", "5", "--jobs", "1"]);
    let many = run(&["verify", "--lemma", "final", "--trials", "12", "--seed", "5", "--jobs", "4"]);
    assert_eq!(one.stdout, many.stdout);
    assert!(!stdout(&one).contains("runtime"));
}

#[test]
fn verify_report_file() {
    let dir = tempfile::tempdir().unwrap();
    let report = path(&dir, "r.jsonl");
    let o = run(&["verify", "--lemma", "corollaries", "--trials", "9", "--report", &report]);
    assert!(o.status.success());
    let text = std::fs::read_to_string(&report).unwrap();
    assert_eq!(text.lines().count(), 10);
}

fn render_to_string(input: &str) -> String {
    let dir = tempfile::tempdir().unwrap();
    let out = path(&dir, "out.svg");
    let o = run(&["render", input, "-o", &out]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    std::fs::read_to_string(&out).unwrap()
}

#[test]
fn render_family_scene_and_trace() {
    let dir = tempfile::tempdir().unwrap();
    let twin = path(&dir, "twin.json");
    std::fs::write(&twin, TWIN).unwrap();
    let svg = render_to_string(&twin);
    assert_eq!(svg.matches("<g class=\"set\"").count(), 2);
    assert_eq!(svg.matches("class=\"baseline\"").count(), 1);

    let scene = path(&dir, "p.json");
    run(&["gen", "--kind", "pillars", "--m", "3", "-o", &scene]);
    let svg = render_to_string(&scene);
    assert!(svg.contains("stroke-dasharray=\"4 3\""));
    assert_eq!(svg.matches("<g class=\"pillar\"").count(), 3);

    let trace = path(&dir, "t.json");
    assert!(run(&["analyze", &scene, "--trace", &trace]).status.success());
    let svg = render_to_string(&trace);
    assert_eq!(svg.matches("class=\"overlay corridor\"").count(), 2);
    assert!(svg.contains("class=\"overlay clip"));
    assert_eq!(svg, render_to_string(&trace));
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(run(&["verify", "--lemma", "nonsense"]).status.code(), Some(2));
    assert_eq!(run(&["bounds"]).status.code(), Some(2));
    let bad = path(&dir, "bad.json");
    std::fs::write(&bad, "{\"frame\": ").unwrap();
    assert_eq!(run(&["render", &bad, "-o", &path(&dir, "x.svg")]).status.code(), Some(2));
    assert_eq!(run(&["analyze", &bad]).status.code(), Some(2));
    assert!(!Path::new(&path(&dir, "x.svg")).exists());
    // every hook meets a pillar, so a clique cap of one rejects them all
    let o = run(&["gen", "--kind", "scene", "--max-clique", "1", "-o", &path(&dir, "s.json")]);
    assert_eq!(o.status.code(), Some(3));
}
