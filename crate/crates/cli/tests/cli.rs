use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn twincolor(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_twincolor"))
        .args(args)
        .output()
        .expect("run twincolor")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn color_path_with_tree_method_round_trips_through_verify() {
    let dir = TempDir::new().unwrap();
    let g = write(dir.path(), "p3.el", "0 1\n1 2\n");
    let lab = dir.path().join("lab.json");
    let out = twincolor(&["color", "--graph", s(&g), "--group", "Z7", "--method", "tree", "-o", s(&lab)]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    assert!(stderr(&out).starts_with("pass"));
    let doc: serde_json::Value = serde_json::from_str(&fs::read_to_string(&lab).unwrap()).unwrap();
    assert_eq!(doc["group"], "Z7");
    assert_eq!(doc["labels"].as_array().unwrap().len(), 2);
    let v = twincolor(&["verify", s(&g), s(&lab)]);
    assert_eq!(code(&v), 0);
}

#[test]
fn star_with_elementary_group_is_proven_impossible() {
    let dir = TempDir::new().unwrap();
    let g = write(dir.path(), "star5.el", "0 1\n0 2\n0 3\n0 4\n0 5\n");
    let out = twincolor(&["color", "--graph", s(&g), "--group", "Z2^3"]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("note:"));
    assert!(stdout(&out).is_empty());
}

#[test]
fn greedy_on_five_cycle() {
    let out = twincolor(&["color", "--edges", "0 1;1 2;2 3;3 4;4 0", "--group", "Z5", "--method", "greedy"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    assert!(stderr(&out).contains("pass"));
    assert!(stdout(&out).contains("\"group\": \"Z5\""));
}

#[test]
fn every_color_output_reverifies() {
    let dir = TempDir::new().unwrap();
    let cases = [
        ("k4.el", "0 1\n0 2\n0 3\n1 2\n1 3\n2 3\n", "Z9", "auto"),
        ("k4x.el", "0 1\n0 2\n0 3\n1 2\n1 3\n2 3\n", "Z2xZ4", "exact"),
        ("t.el", "0 1\n1 2\n1 3\n1 4\n1 5\n1 6\n1 7\n7 8\n", "Z2xZ2xZ3", "auto"),
        ("f.el", "0 1\n1 2\n3 4\n4 5\n4 6\n", "Z7", "tree"),
    ];
    for (name, text, group, method) in cases {
        let g = write(dir.path(), name, text);
        let lab = dir.path().join(format!("{name}.json"));
        let out = twincolor(&["color", "-g", s(&g), "--group", group, "--method", method, "-o", s(&lab)]);
        assert_eq!(code(&out), 0, "{name}: {}", stderr(&out));
        assert_eq!(code(&twincolor(&["verify", s(&g), s(&lab)])), 0, "{name}");
    }
}

#[test]
fn tampered_labeling_fails_verification() {
    let dir = TempDir::new().unwrap();
    let g = write(dir.path(), "p3.el", "0 1\n1 2\n");
    let out = twincolor(&["color", "-g", s(&g), "--group", "Z7"]);
    let mut doc: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    let first = doc["labels"][0]["value"].clone();
    doc["labels"][1]["value"] = first;
    let lab = write(dir.path(), "bad.json", &doc.to_string());
    let v = twincolor(&["verify", s(&g), s(&lab)]);
    assert_eq!(code(&v), 4);
    let report: serde_json::Value = serde_json::from_str(&stdout(&v)).unwrap();
    assert_eq!(report["proper_edge_coloring"], false);
    assert!(!report["violations"].as_array().unwrap().is_empty());
}

#[test]
fn index_subcommand() {
    let p7 = twincolor(&["index", "--edges", "0 1;1 2;2 3;3 4;4 5;5 6"]);
    assert_eq!(code(&p7), 0);
    assert!(stdout(&p7).starts_with("index 3\n"));

    let star = "0 1;0 2;0 3;0 4;0 5";
    let twin = twincolor(&["index", "--edges", star]);
    assert!(stdout(&twin).starts_with("index 7\n"));
    assert!(stdout(&twin).contains("k=6 Z6 not_colorable"));

    let group = twincolor(&["index", "--edges", star, "--mode", "group-twin", "--kmax", "8"]);
    assert_eq!(code(&group), 0);
    assert!(stdout(&group).starts_with("index 7\n"));

    let short = twincolor(&["index", "--edges", star, "--kmax", "6"]);
    assert_eq!(code(&short), 3);

    let k2 = twincolor(&["index", "--edges", "0 1"]);
    assert_eq!(code(&k2), 1);
}

#[test]
fn groups_and_partitions() {
    let out = twincolor(&["groups", "8"]);
    assert_eq!(stdout(&out), "Z8\nZ2xZ4\nZ2^3\n");

    let out = twincolor(&["partition", "Z2^3", "4", "3", "1"]);
    assert_eq!(code(&out), 0);
    let doc: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    let sizes: Vec<usize> = doc["parts"].as_array().unwrap().iter().map(|p| p.as_array().unwrap().len()).collect();
    assert_eq!(sizes, vec![4, 3, 1]);

    let out = twincolor(&["partition", "Z2^3", "5", "3", "--avoid", "1,1,1"]);
    assert_eq!(code(&out), 0);
    let doc: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert!(!doc["parts"][0].as_array().unwrap().contains(&serde_json::json!([1, 1, 1])));

    assert_eq!(code(&twincolor(&["partition", "Z2^3", "2", "3", "3"])), 2);
    assert_eq!(code(&twincolor(&["partition", "Z2^3", "5", "3"])), 1);
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(code(&twincolor(&["frobnicate"])), 1);
    assert_eq!(code(&twincolor(&["color", "--edges", "0 1;1 2", "--group", "Q8"])), 1);
    assert_eq!(code(&twincolor(&["color", "--group", "Z5"])), 1);
    assert_eq!(code(&twincolor(&["--help"])), 0);
}

#[test]
fn seeded_runs_are_byte_identical() {
    let k5 = "0 1;0 2;0 3;0 4;1 2;1 3;1 4;2 3;2 4;3 4";
    let run = |seed: &str| twincolor(&["color", "--edges", k5, "--group", "Z13", "--method", "greedy", "--seed", seed]);
    for seed in ["0", "17"] {
        let (a, b) = (run(seed), run(seed));
        assert_eq!(code(&a), 0);
        assert_eq!(a.stdout, b.stdout);
    }
}

#[test]
fn bench_prints_a_row_per_graph() {
    let dir = TempDir::new().unwrap();
    write(dir.path(), "a.el", "0 1\n1 2\n2 3\n");
    write(dir.path(), "b.el", "0 1\n0 2\n1 2\n2 3\n");
    write(dir.path(), "notes.md", "ignored");
    let out = twincolor(&["bench", s(dir.path())]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    assert_eq!(text.lines().count(), 3);
    assert!(text.contains("a.el") && text.contains("b.el"));
    assert!(!text.contains("error"));
}
