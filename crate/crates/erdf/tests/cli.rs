//! End-to-end tests of the command-line binary: exit codes, report text,
//! JSON shape, environment handling, and byte-level determinism.

use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_erdf"));
    // A fixed environment keeps the profile default deterministic even when
    // the ambient shell exports ERDF_PROFILE.
    c.env_remove("ERDF_PROFILE");
    c
}

fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/data")
        .join(name)
}

fn run(args: &[&str]) -> Output {
    let mut cmd = bin();
    for a in args {
        if let Some(name) = a.strip_prefix("data:") {
            cmd.arg(data(name));
        } else {
            cmd.arg(a);
        }
    }
    cmd.output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("stdout is UTF-8")
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).expect("stderr is UTF-8")
}

#[test]
fn models_wine_reports_two_models_and_exits_zero() {
    let out = run(&["models", "data:wine.erdf"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("stable model families: 2"), "{text}");
    assert!(text.contains("model 1:\n"), "{text}");
    assert!(text.contains("model 2:\n"), "{text}");
    // Exactly one of the two models selects Riesling.
    let selected = "PT rdf:type(Riesling, SelectedWine)";
    assert_eq!(text.matches(selected).count(), 1, "{text}");
    assert!(text.contains("approximate: no"), "{text}");
    // The header reports the search space.
    assert!(text.contains("vocabulary: "), "{text}");
    assert!(text.contains("ground rules: "), "{text}");
}

#[test]
fn models_of_unsatisfiable_program_still_exits_zero() {
    let out = run(&["models", "data:oddloop.erdf"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("stable model families: 0"), "{text}");
    assert!(text.contains("no stable model"), "{text}");
}

#[test]
fn check_satisfiable_document_exits_zero() {
    let out = run(&["check", "data:wine.erdf"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("stable model families: 2"));
}

#[test]
fn check_incoherent_graph_exits_one_with_witness() {
    let out = run(&["check", "data:inconsistent.erdf"]);
    assert_eq!(out.status.code(), Some(1));
    let text = stdout(&out);
    assert!(text.contains("graph incoherent: witness -"), "{text}");
}

#[test]
fn check_odd_loop_exits_one() {
    let out = run(&["check", "data:oddloop.erdf"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout(&out).contains("no stable model"));
}

#[test]
fn missing_file_exits_two() {
    let out = run(&["models", "data:no_such_file.erdf"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).starts_with("erdf: "));
}

#[test]
fn malformed_document_exits_two() {
    let dir = std::env::temp_dir().join("erdf-cli-test");
    std::fs::create_dir_all(&dir).unwrap();
    let file = dir.join("broken.erdf");
    std::fs::write(&file, "graph { p(s, o }").unwrap();
    let out = bin().args(["models"]).arg(&file).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).starts_with("erdf: "));
}

#[test]
fn malformed_query_formula_exits_two() {
    let out = run(&[
        "query",
        "data:wine.erdf",
        "--formula",
        "rdf:type(Riesling, SelectedWine",
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("erdf: query:"));
}

#[test]
fn unknown_flag_exits_two() {
    let out = run(&["models", "data:wine.erdf", "--no-such-flag"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn help_exits_zero() {
    let out = run(&["--help"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("models"));
}

#[test]
fn grounding_cap_exits_three_with_required_count() {
    let out = run(&["ground", "data:wine.erdf", "--max-ground-rules", "10"]);
    assert_eq!(out.status.code(), Some(3));
    let err = stderr(&out);
    assert!(err.contains("limit exceeded (ground rules)"), "{err}");
    assert!(err.contains("cap is 10"), "{err}");
}

#[test]
fn ground_prints_skolemized_graph_and_rule_instances() {
    let out = run(&["ground", "data:defaults.erdf"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("skolemized graph: 0 triples"), "{text}");
    assert!(text.contains("ground rules: 1"), "{text}");
    // The single variable-free rule prints verbatim in full-URI form.
    assert!(text.contains("~<http://example.org/x#q>"), "{text}");
}

#[test]
fn query_skeptical_and_credulous_disagree_on_wine_choice() {
    let skeptical = run(&[
        "query",
        "data:wine.erdf",
        "--formula",
        "rdf:type(Retsina, SelectedWine)",
    ]);
    assert_eq!(skeptical.status.code(), Some(0));
    assert!(stdout(&skeptical).starts_with("no\n"));

    let credulous = run(&[
        "query",
        "data:wine.erdf",
        "--formula",
        "rdf:type(Retsina, SelectedWine)",
        "--mode",
        "credulous",
    ]);
    assert_eq!(credulous.status.code(), Some(0));
    assert!(stdout(&credulous).starts_with("yes\n"));
}

#[test]
fn query_open_formula_prints_bindings() {
    let out = run(&["query", "data:qxy.erdf", "--formula", "q(?x, ?y)"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("?x = o, ?y = o"), "{text}");
    assert!(text.contains("?x = o, ?y = s"), "{text}");
    assert!(text.contains("?x = s, ?y = s"), "{text}");
    assert_eq!(text.matches("?x = ").count(), 3, "{text}");
}

#[test]
fn json_models_report_is_well_formed() {
    let out = run(&["models", "data:wine.erdf", "--json"]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).expect("valid JSON");
    assert_eq!(v["models"].as_array().unwrap().len(), 2);
    assert_eq!(v["approximate"], serde_json::Value::Bool(false));
    assert_eq!(v["stats"]["families"], 2);
    // Triples serialize as [predicate, subject, object] full URIs.
    let pt = v["models"][0]["pt"].as_array().unwrap();
    assert!(pt.iter().all(|t| t.as_array().unwrap().len() == 3));
    assert!(pt
        .iter()
        .any(|t| t[0] == "http://www.w3.org/1999/02/22-rdf-syntax-ns#type"));
}

#[test]
fn json_query_report_carries_binding_sets() {
    let out = run(&[
        "query",
        "data:wine.erdf",
        "--formula",
        "rdf:type(?x, SelectedWine)",
        "--mode",
        "credulous",
        "--json",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).expect("valid JSON");
    assert_eq!(v["mode"], "credulous");
    assert_eq!(v["binding_sets"].as_array().unwrap().len(), 2);
}

#[test]
fn output_is_byte_identical_across_runs() {
    for args in [
        vec!["models", "data:wine.erdf"],
        vec!["models", "data:wine.erdf", "--json"],
        vec!["ground", "data:eu.erdf"],
        vec![
            "query",
            "data:assignment.erdf",
            "--formula",
            "allAssigned(Paper, Reviewer)",
            "--mode",
            "credulous",
        ],
    ] {
        let a = run(&args);
        let b = run(&args);
        assert_eq!(a.status.code(), b.status.code(), "{args:?}");
        assert_eq!(a.stdout, b.stdout, "{args:?}");
        assert_eq!(a.stderr, b.stderr, "{args:?}");
    }
}

#[test]
fn profile_env_variable_sets_default_and_flag_wins() {
    let full = run(&["ground", "data:defaults.erdf"]);
    let full_text = stdout(&full);

    let env_compact = bin()
        .env("ERDF_PROFILE", "compact")
        .args(["ground"])
        .arg(data("defaults.erdf"))
        .output()
        .unwrap();
    assert_eq!(env_compact.status.code(), Some(0));
    let compact_text = stdout(&env_compact);
    assert_ne!(full_text, compact_text);

    let vocab_of = |text: &str| -> usize {
        let line = text
            .lines()
            .find(|l| l.starts_with("vocabulary: "))
            .expect("vocabulary line");
        line.split(' ').nth(1).unwrap().parse().unwrap()
    };
    assert!(
        vocab_of(&compact_text) < vocab_of(&full_text),
        "compact profile must shrink the vocabulary: {compact_text}"
    );

    // An explicit flag overrides the environment default.
    let flag_wins = bin()
        .env("ERDF_PROFILE", "compact")
        .args(["ground", "--profile", "full"])
        .arg(data("defaults.erdf"))
        .output()
        .unwrap();
    assert_eq!(stdout(&flag_wins), full_text);

    let bad_env = bin()
        .env("ERDF_PROFILE", "fancy")
        .args(["ground"])
        .arg(data("defaults.erdf"))
        .output()
        .unwrap();
    assert_eq!(bad_env.status.code(), Some(2));
    assert!(stderr(&bad_env).contains("ERDF_PROFILE"));
}
