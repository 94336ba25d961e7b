use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

fn gdl(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gdl")).args(args).env_remove("GDL_SEED").output().unwrap()
}

fn out(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn scratch(name: &str) -> PathBuf {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("cli-tests");
    fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn eval_examples() {
    for (diagram, want) in [("builtin:DU", "0"), ("builtin:DL", "-1"), ("() / ()", "0"), ("builtin:DL(5)", "-5")] {
        let o = gdl(&["eval", "--pattern", "builtin:fonep", "--diagram", diagram]);
        assert_eq!(o.status.code(), Some(0), "{diagram}");
        assert_eq!(out(&o).trim(), want, "{diagram}");
    }
    let o = gdl(&["eval", "--pattern", "O1 U1 ; 1:+ ; all-injective", "--diagram", "O1+ U2+ O3+ U1+ O2+ U3+ / ()"]);
    assert_eq!(out(&o).trim(), "3");
}

#[test]
fn references_can_be_files() {
    let d = scratch("dl.txt");
    fs::write(&d, "U1- O5- O6+ U2+ O3+ U6+ U5- O4- / O1- O2+ U3+ U4-\n").unwrap();
    let p = scratch("fonep.txt");
    fs::write(&p, "O1 O2 U1 O3 / U2 U3 ; 1:+ 2:? 3:?\n").unwrap();
    let o = gdl(&["eval", "--pattern", p.to_str().unwrap(), "--diagram", d.to_str().unwrap()]);
    assert_eq!(out(&o).trim(), "-1");
}

#[test]
fn bad_input_exits_with_two() {
    for args in [
        vec!["invariant", "--diagram", "O1+ U2-"],
        vec!["invariant", "--diagram", "builtin:nope"],
        vec!["invariant", "--diagram", "builtin:DL(0)"],
        vec!["eval", "--pattern", "O1 U1 ; 1:x", "--diagram", "builtin:DL"],
        vec!["eval", "--pattern", "O1 / O2 / U1 U2", "--diagram", "O1+ U1+"],
        vec!["move", "--diagram", "builtin:DL", "--kind", "O2d-", "--site", "99"],
        vec!["walk", "--kind", "O5a"],
        vec!["walk", "--steps", "0"],
        vec!["table1", "--samples", "0"],
        vec!["family", "--n", "0"],
        vec!["render", "--diagram", "builtin:DL", "--width", "0"],
        vec!["frobnicate"],
    ] {
        assert_eq!(gdl(&args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn sites_and_moves() {
    let o = gdl(&["sites", "--diagram", "builtin:DL", "--kind", "O2d-"]);
    assert_eq!(out(&o), "0\tarrows 5,6\tsingle-component\n");
    let o = gdl(&["move", "--diagram", "builtin:DL", "--kind", "O2d-", "--site", "0"]);
    assert_eq!(out(&o).trim(), "U1- U2+ O3+ O4- / O1- O2+ U3+ U4-");
    let o = gdl(&["--json", "move", "--diagram", "builtin:DL", "--kind", "O2d-", "--site", "0"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["locality"], "single-component");
    assert_eq!(v["kind"], "O2d-");
}

#[test]
fn walks_report_and_exit() {
    let o = gdl(&["walk", "--diagram", "builtin:DU", "--kind", "O1*", "--steps", "100", "--seed", "1"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(out(&o).contains("values 0x101"), "{}", out(&o));
    let o = gdl(&["walk", "--diagram", "builtin:DL", "--kind", "O2*", "--locality", "two", "--steps", "200", "--seed", "3"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(out(&o).contains("values -1x201"));
    // unrestricted O2 walks reach single-component moves, which may change
    // the value without being a violation
    let o = gdl(&["walk", "--diagram", "builtin:DL", "--kind", "O2*", "--steps", "300", "--seed", "2"]);
    assert_eq!(o.status.code(), Some(0));
    // no move applies to a bare circle pair under decreasing moves only
    let o = gdl(&["walk", "--diagram", "builtin:DU", "--kind", "O1a-", "--steps", "5"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(out(&o).contains("ended early"));
}

#[test]
fn walk_violations_exit_with_one_and_name_the_move() {
    let o = gdl(&["walk", "--diagram", "builtin:DL", "--kind", "O1*,O3*", "--steps", "1000", "--seed", "1"]);
    assert_eq!(o.status.code(), Some(1));
    let text = out(&o);
    assert!(text.contains("VIOLATION") && text.contains("two-component"), "{text}");
}

#[test]
fn seeds_come_from_the_environment() {
    let run = |seed: Option<&str>, flag: &[&str]| {
        let mut c = Command::new(env!("CARGO_BIN_EXE_gdl"));
        c.args(["--json", "walk", "--kind", "O1*", "--steps", "20"]).args(flag).env_remove("GDL_SEED");
        if let Some(s) = seed {
            c.env("GDL_SEED", s);
        }
        out(&c.output().unwrap())
    };
    assert_eq!(run(Some("5"), &[]), run(None, &["--seed", "5"]));
    assert_ne!(run(Some("5"), &[]), run(Some("6"), &[]));
    assert_eq!(run(Some("6"), &["--seed", "5"]), run(None, &["--seed", "5"]));
}

#[test]
fn output_is_deterministic_and_thread_independent() {
    let a = gdl(&["--json", "table1", "--samples", "30", "--seed", "4"]);
    let b = gdl(&["--json", "table1", "--samples", "30", "--seed", "4"]);
    let c = gdl(&["--json", "--sequential", "table1", "--samples", "30", "--seed", "4"]);
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(a.stdout, c.stdout);
    let v: serde_json::Value = serde_json::from_slice(&a.stdout).unwrap();
    assert!(v["rows"].as_array().unwrap().len() >= 30);
}

#[test]
fn family_and_decomposition_reports() {
    let o = gdl(&["family", "--n", "4"]);
    assert_eq!(out(&o), "1\t-1\n2\t-2\n3\t-3\n4\t-4\n");
    assert_eq!(o.status.code(), Some(0));
    // a pattern other than the invariant breaks the family values
    let o = gdl(&["family", "--n", "2", "--pattern", "builtin:fonem"]);
    assert_eq!(o.status.code(), Some(1));
    let o = gdl(&["--json", "check-decomposition", "--samples", "5"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let ks: Vec<u64> = v["variants"].as_array().unwrap().iter().map(|c| c["table_k"].as_u64().unwrap()).collect();
    assert_eq!(ks, [1, 1, 2, 2, 1, 2, 3]);
}

#[test]
fn render_writes_svg() {
    let path = scratch("dl.svg");
    let o = gdl(&["render", "--diagram", "builtin:DL", "--out", path.to_str().unwrap(), "--highlight", "5,6"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    let svg = fs::read_to_string(&path).unwrap();
    assert!(svg.starts_with("<?xml") && svg.trim_end().ends_with("</svg>"));
    assert_eq!(svg.matches("class=\"arrow\"").count(), 6);
    assert_eq!(svg.matches("crimson").count(), 4);
}
