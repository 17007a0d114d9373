//! End-to-end checks of the command-line interface: exit codes, report
//! files, determinism, and error wording.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn primevent(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_primevent"))
        .args(args)
        .output()
        .expect("spawn primevent")
}

fn stderr(output: &Output) -> String {
    String::from_utf8_lossy(&output.stderr).into_owned()
}

fn file_names(dir: &Path) -> Vec<String> {
    let mut names: Vec<String> = fs::read_dir(dir)
        .expect("read output directory")
        .map(|e| e.expect("dir entry").file_name().to_string_lossy().into_owned())
        .collect();
    names.sort();
    names
}

fn assert_identical_trees(a: &Path, b: &Path) {
    let names = file_names(a);
    assert_eq!(names, file_names(b), "directories hold different files");
    for name in names {
        let left = fs::read(a.join(&name)).expect("read file");
        let right = fs::read(b.join(&name)).expect("read file");
        assert_eq!(left, right, "{name} differs between runs");
    }
}

/// Generates a small fixture into `dir` and returns the docs/index paths.
fn synth_fixture(dir: &Path) -> (String, String) {
    let out = dir.to_str().unwrap().to_owned();
    let output = primevent(&[
        "synth", "--out", &out, "--windows", "16", "--vocab", "30", "--docs-per-window", "12",
        "--tokens-per-doc", "8", "--plant", "4:9", "--seed", "7",
    ]);
    assert!(output.status.success(), "synth failed: {}", stderr(&output));
    (
        dir.join("docs.jsonl").to_str().unwrap().to_owned(),
        dir.join("index.csv").to_str().unwrap().to_owned(),
    )
}

#[test]
fn synth_writes_three_files_deterministically() {
    let tmp = tempfile::tempdir().expect("tempdir");
    let a = tmp.path().join("a");
    let b = tmp.path().join("b");
    synth_fixture(&a);
    synth_fixture(&b);
    assert_eq!(file_names(&a), ["docs.jsonl", "index.csv", "manifest.json"]);
    assert_identical_trees(&a, &b);
}

#[test]
fn synth_requires_a_plant() {
    let tmp = tempfile::tempdir().expect("tempdir");
    let output = primevent(&["synth", "--out", tmp.path().to_str().unwrap()]);
    assert!(!output.status.success());
    assert!(
        stderr(&output).contains("--plant"),
        "stderr should name the missing flag: {}",
        stderr(&output)
    );
}

#[test]
fn run_writes_exactly_four_reports_and_reruns_identically() {
    let tmp = tempfile::tempdir().expect("tempdir");
    let (docs, index) = synth_fixture(&tmp.path().join("fixture"));
    let out1 = tmp.path().join("out1");
    let out2 = tmp.path().join("out2");
    for out in [&out1, &out2] {
        let output = primevent(&[
            "run", "--docs", &docs, "--index", &index, "--out", out.to_str().unwrap(),
        ]);
        assert!(output.status.success(), "run failed: {}", stderr(&output));
    }
    assert_eq!(
        file_names(&out1),
        ["events.json", "manifest.json", "plot.csv", "topics.csv"]
    );
    assert_identical_trees(&out1, &out2);
}

#[test]
fn run_can_dump_the_clustering_diagnostic() {
    let tmp = tempfile::tempdir().expect("tempdir");
    let (docs, index) = synth_fixture(&tmp.path().join("fixture"));
    let out = tmp.path().join("out");
    let output = primevent(&[
        "run", "--docs", &docs, "--index", &index, "--out", out.to_str().unwrap(),
        "--dump-clusters",
    ]);
    assert!(output.status.success(), "run failed: {}", stderr(&output));
    assert_eq!(
        file_names(&out),
        ["clusters.json", "events.json", "manifest.json", "plot.csv", "topics.csv"]
    );
}

#[test]
fn missing_index_error_names_the_path() {
    let tmp = tempfile::tempdir().expect("tempdir");
    let (docs, _) = synth_fixture(&tmp.path().join("fixture"));
    let missing = tmp.path().join("no-such-index.csv");
    let output = primevent(&[
        "run", "--docs", &docs, "--index", missing.to_str().unwrap(),
        "--out", tmp.path().join("out").to_str().unwrap(),
    ]);
    assert!(!output.status.success());
    assert!(
        stderr(&output).contains("no-such-index.csv"),
        "stderr should name the missing file: {}",
        stderr(&output)
    );
}

#[test]
fn malformed_document_error_names_file_and_line() {
    let tmp = tempfile::tempdir().expect("tempdir");
    let docs = tmp.path().join("docs.jsonl");
    let index = tmp.path().join("index.csv");
    fs::write(
        &docs,
        "{\"id\":\"a\",\"date\":\"2021-01-05\",\"text\":\"steady market\"}\nnot json\n",
    )
    .expect("write docs");
    fs::write(&index, "date,value\n2021-01-04,100.0\n2021-01-11,101.0\n").expect("write index");
    let output = primevent(&[
        "run", "--docs", docs.to_str().unwrap(), "--index", index.to_str().unwrap(),
        "--out", tmp.path().join("out").to_str().unwrap(),
    ]);
    assert!(!output.status.success());
    let message = stderr(&output);
    assert!(message.contains("docs.jsonl"), "no file name in: {message}");
    assert!(message.contains("line 2"), "no line number in: {message}");
}

#[test]
fn compare_writes_both_method_summaries() {
    let tmp = tempfile::tempdir().expect("tempdir");
    let (docs, index) = synth_fixture(&tmp.path().join("fixture"));
    let out = tmp.path().join("out");
    let output = primevent(&[
        "compare", "--docs", &docs, "--index", &index, "--out", out.to_str().unwrap(),
    ]);
    assert!(output.status.success(), "compare failed: {}", stderr(&output));
    assert_eq!(file_names(&out), ["compare.csv", "scores.csv"]);
    let compare = fs::read_to_string(out.join("compare.csv")).expect("read compare.csv");
    let lines: Vec<&str> = compare.lines().collect();
    assert_eq!(lines[0], "method,mean_score,event_count");
    assert_eq!(lines.len(), 3, "one row per method: {compare}");
    assert!(lines[1].starts_with("main,"), "{compare}");
    assert!(lines[2].starts_with("baseline,"), "{compare}");
    let scores = fs::read_to_string(out.join("scores.csv")).expect("read scores.csv");
    assert!(scores.starts_with("method,rank,score\n"), "{scores}");
}

#[test]
fn dump_volatility_streams_the_whole_chain() {
    let tmp = tempfile::tempdir().expect("tempdir");
    let (_, index) = synth_fixture(&tmp.path().join("fixture"));
    let output = primevent(&["dump-volatility", "--index", &index]);
    assert!(output.status.success(), "dump failed: {}", stderr(&output));
    let text = String::from_utf8_lossy(&output.stdout).into_owned();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "window,index,vi,pvi");
    assert_eq!(lines.len(), 17, "header plus one row per window: {text}");
}

#[test]
fn dump_bursts_streams_and_rejects_unknown_features() {
    let tmp = tempfile::tempdir().expect("tempdir");
    let (docs, index) = synth_fixture(&tmp.path().join("fixture"));
    let output = primevent(&["dump-bursts", "--docs", &docs, "--index", &index]);
    assert!(output.status.success(), "dump failed: {}", stderr(&output));
    let text = String::from_utf8_lossy(&output.stdout).into_owned();
    assert!(text.starts_with("feature,window,probability\n"), "{text}");

    let output = primevent(&[
        "dump-bursts", "--docs", &docs, "--index", &index, "--features", "nosuchtoken",
    ]);
    assert!(!output.status.success());
    assert!(
        stderr(&output).contains("nosuchtoken"),
        "stderr should name the feature: {}",
        stderr(&output)
    );
}

#[test]
fn flags_override_the_config_file() {
    let tmp = tempfile::tempdir().expect("tempdir");
    let (docs, index) = synth_fixture(&tmp.path().join("fixture"));
    let config = tmp.path().join("config.json");
    fs::write(&config, "{\"sigma\": 0.4, \"seed\": 9}").expect("write config");
    let out = tmp.path().join("out");
    let output = primevent(&[
        "run", "--docs", &docs, "--index", &index, "--out", out.to_str().unwrap(),
        "--config", config.to_str().unwrap(), "--seed", "11",
    ]);
    assert!(output.status.success(), "run failed: {}", stderr(&output));
    let manifest: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.join("manifest.json")).expect("manifest"))
            .expect("manifest JSON");
    assert_eq!(manifest["config"]["sigma"], 0.4, "file value survives");
    assert_eq!(manifest["config"]["seed"], 11, "flag overrides file");
}

#[test]
fn unknown_config_keys_are_rejected_with_the_file_named() {
    let tmp = tempfile::tempdir().expect("tempdir");
    let (docs, index) = synth_fixture(&tmp.path().join("fixture"));
    let config = tmp.path().join("config.json");
    fs::write(&config, "{\"sigmaa\": 0.4}").expect("write config");
    let output = primevent(&[
        "run", "--docs", &docs, "--index", &index,
        "--out", tmp.path().join("out").to_str().unwrap(),
        "--config", config.to_str().unwrap(),
    ]);
    assert!(!output.status.success());
    assert!(
        stderr(&output).contains("config.json"),
        "stderr should name the config file: {}",
        stderr(&output)
    );
}
