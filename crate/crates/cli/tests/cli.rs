//! End-to-end tests of the command-line surface: exit codes, deterministic
//! output, and the documented behaviour of each subcommand.

use std::path::PathBuf;
use std::process::{Command, Output};

fn presentation(name: &str) -> String {
    let root = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    root.join("../../presentations").join(name).to_string_lossy().into_owned()
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_graphprod"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

#[test]
fn reduce_prints_the_identity_as_one() {
    let out = run(&["reduce", &presentation("path-mixed.gp"), "a:1 a:1"]);
    assert!(out.status.success());
    assert_eq!(stdout(&out), "1\n");
}

#[test]
fn reduce_sorts_commuting_syllables() {
    let out = run(&["reduce", &presentation("path-mixed.gp"), "b:1 a:1", "c:1 b:2 c:1"]);
    assert!(out.status.success());
    assert_eq!(stdout(&out), "a:1 b:1\nb:2\n");
}

#[test]
fn decompose_reports_the_conjugation_core() {
    let out = run(&["decompose", &presentation("free-z.gp"), "h1:2 h2:5 h1:-2"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("conjugator: h1:2"));
    assert!(text.contains("core: h2:5"));
    assert!(text.contains("csp: h2"));
    assert!(text.contains("clg: 1"));
    assert!(text.contains("cyclically-reduced: false"));
}

#[test]
fn project_deletes_foreign_syllables() {
    let out = run(&[
        "project",
        &presentation("path-mixed.gp"),
        "--onto",
        "b",
        "a:1 b:1 a:1",
    ]);
    assert!(out.status.success());
    assert_eq!(stdout(&out), "b:1\n");
}

#[test]
fn classify_heavy_node_is_rejected_without_ch() {
    let out = run(&[
        "classify",
        &presentation("heavy-node.gp"),
        "--mode",
        "not-ch",
        "--query-b",
        "alpha",
        "--expect",
        "does-not-admit",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = stdout(&out);
    assert!(text.contains("a5: 0"));
    assert!(text.contains("a9: alpha"));
    assert!(text.contains("z 2^1: mid lambda"));
    assert!(text.contains("verdict: does-not-admit"));
    assert!(text.contains("rule restricted-sum-strictly-between:"));
}

#[test]
fn classify_heavy_node_passes_under_ch() {
    let out = run(&[
        "classify",
        &presentation("heavy-node.gp"),
        "--mode",
        "ch",
        "--query-b",
        "alpha",
        "--expect",
        "admits",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn classify_expectation_mismatch_exits_one() {
    let out = run(&[
        "classify",
        &presentation("heavy-node.gp"),
        "--mode",
        "not-ch",
        "--query-b",
        "alpha",
        "--expect",
        "admits",
    ]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn classify_output_is_deterministic() {
    let args = ["classify", &presentation("heavy-node.gp"), "--query-b", "alpha"];
    let a = run(&args.iter().map(|s| &**s).collect::<Vec<_>>());
    let b = run(&args.iter().map(|s| &**s).collect::<Vec<_>>());
    assert_eq!(a.stdout, b.stdout);
    assert!(!a.stdout.is_empty());
}

#[test]
fn every_negative_verdict_line_carries_a_rule_statement() {
    let out = run(&[
        "classify",
        &presentation("heavy-node.gp"),
        "--query-b",
        "alpha",
    ]);
    let text = stdout(&out);
    let mut saw_negative = false;
    for (i, line) in text.lines().enumerate() {
        if line.trim_start().starts_with("verdict: does-not-admit") {
            saw_negative = true;
            let next = text.lines().nth(i + 1).unwrap_or("");
            assert!(
                next.trim_start().starts_with("rule "),
                "negative verdict must be followed by its rule trail"
            );
        }
    }
    assert!(saw_negative);
}

#[test]
fn equations_weakened_run_is_clean_and_marked() {
    let out = run(&[
        "equations",
        &presentation("free-z.gp"),
        "--kstar",
        "2",
        "--p",
        "5",
        "--alphabet",
        "2",
        "--maxlen",
        "3",
        "--depth",
        "2",
        "--omega-maxlen",
        "1",
        "--trials",
        "25",
        "--expect-clean",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = stdout(&out);
    assert!(text.contains("parameter-weakened"));
    assert!(text.contains("violations: 0"));
    assert!(text.contains("witness: none"));
    assert!(text.contains("planted control: found"));
}

#[test]
fn abelian_subcommand_reports_the_calculus() {
    let out = run(&[
        "abelian",
        &presentation("abelian-sum.gp"),
        "--factor",
        "g",
        "--tor",
        "4",
        "--div",
        "--phi",
        "2",
        "--classify",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = stdout(&out);
    assert!(text.contains("descriptor: countable part + q ^ continuum + z 2^2 ^ aleph0"));
    assert!(text.contains("tor 4: countable part + z 2^2 ^ aleph0"));
    assert!(text.contains("div: divisible = q ^ continuum; reduced = countable part + z 2^2 ^ aleph0"));
    assert!(text.contains("escapes-bound 2: true"));
    assert!(text.contains("verdict: admits"));
}

#[test]
fn unknown_flags_and_bad_files_exit_two() {
    let out = run(&["classify", &presentation("heavy-node.gp"), "--bogus"]);
    assert_eq!(out.status.code(), Some(2));
    let out = run(&["reduce", "/nonexistent.gp", "a:1"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn word_commands_reject_symbolic_files() {
    let out = run(&["reduce", &presentation("heavy-node.gp"), "0:1"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn four_vertex_file_decomposes_commuting_involutions() {
    // two commuting involutions: order 2, support the adjacent pair
    let out = run(&["decompose", &presentation("four-vertex.gp"), "a1:1 a2:1"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("csp: a1 a2"));
    assert!(text.contains("cyclically-reduced: true"));
}
