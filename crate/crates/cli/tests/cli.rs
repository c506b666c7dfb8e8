use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn chainrec(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_chainrec")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn one_point_compactification_is_transitive() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("report.json");
    let o = chainrec(&["analyze", "gallery:z-star:n=20", "--eps", "0.2", "--json", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let j = read_json(&out);
    assert_eq!(j["chain_transitive"], true);
    assert_eq!(j["n"], 42);
}

#[test]
fn identity_on_two_far_points_has_two_components() {
    let dir = tempfile::tempdir().unwrap();
    let model = dir.path().join("two.json");
    std::fs::write(
        &model,
        r#"{"name":"two","space":{"metric":"coords","coords":[[0.0],[1.0]]},"relation":{"n":2,"edges":[[0,0],[1,1]]},"eps":0.1}"#,
    )
    .unwrap();
    let out = dir.path().join("r.json");
    let o = chainrec(&["analyze", model.to_str().unwrap(), "--json", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(read_json(&out)["components"], serde_json::json!([[0], [1]]));
}

#[test]
fn tent_is_transitive_at_two_grid_steps() {
    let o = chainrec(&["check", "gallery:tent", "chain-transitive", "--eps", &(2.0 / 256.0 + 1e-9).to_string()]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).trim(), "true");
}

#[test]
fn malformed_models_name_the_position() {
    let dir = tempfile::tempdir().unwrap();
    let model = dir.path().join("bad.json");
    std::fs::write(&model, "{\n  \"name\": \"x\",\n  \"eps\": \"wide\"\n}").unwrap();
    let o = chainrec(&["analyze", model.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("bad.json") && err.contains("field eps") && err.contains("line 3"), "{err}");
}

#[test]
fn sweep_is_monotone_and_rejects_unsorted_scales() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("s.json");
    let o =
        chainrec(&["sweep", "gallery:z-star-star", "--eps", "0.05,0.1,0.16,0.17,0.2", "--json", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let rows = read_json(&out);
    let col: Vec<bool> = rows.as_array().unwrap().iter().map(|r| r["chain_transitive"].as_bool().unwrap()).collect();
    assert_eq!(col, [false, false, false, true, true]);
    let o = chainrec(&["sweep", "gallery:z-star-star", "--eps", "0.2,0.1"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn gallery_emit_round_trips_through_analyze() {
    let dir = tempfile::tempdir().unwrap();
    let model = dir.path().join("m.json");
    let o = chainrec(&["gallery", "emit", "z-star", "--param", "n=6", "--json", model.to_str().unwrap()]);
    assert!(o.status.success());
    let o = chainrec(&["check", model.to_str().unwrap(), "chain-reaches", "--x", "0", "--y", "13"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).trim(), "true");
    let list = stdout(&chainrec(&["gallery", "list"]));
    assert!(list.lines().any(|l| l.starts_with("comb-stack ")));
    assert_eq!(chainrec(&["gallery", "emit", "nothing"]).status.code(), Some(2));
}

#[test]
fn export_dot_writes_a_digraph() {
    let o = chainrec(&["export-dot", "gallery:z-star-star", "--eps", "0.1"]);
    assert!(o.status.success());
    let dot = stdout(&o);
    assert!(dot.starts_with("digraph condensation {") && dot.contains("->"));
}

#[test]
fn verify_reports_are_deterministic_and_exit_codes_follow_verdicts() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a.json"), dir.path().join("b.json"));
    for p in [&a, &b] {
        let o = chainrec(&[
            "verify",
            "decomposition-equivalence",
            "involution",
            "--seed",
            "7",
            "--json",
            p.to_str().unwrap(),
        ]);
        assert!(o.status.success(), "{}", stdout(&o));
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    let j = read_json(&a);
    assert_eq!(j["cases"][0]["id"], "decomposition-equivalence");
    assert!(j["cases"][0]["checks"][0]["detail"].as_str().unwrap().starts_with("1000/1000"));
    assert_eq!(chainrec(&["verify", "no-such-case"]).status.code(), Some(2));
    // The comb stack is not chain recurrent at finite scale, so this case fails.
    assert_eq!(chainrec(&["verify", "comb-stack"]).status.code(), Some(1));
}
