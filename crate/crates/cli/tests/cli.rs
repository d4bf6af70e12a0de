use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn povstim(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_povstim"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn ok(dir: &Path, args: &[&str]) -> String {
    let out = povstim(dir, args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn small_build(dir: &Path, name: &str, lang: &str, task: &str, seed: &str) {
    ok(
        dir,
        &[
            "generate", "--lang", lang, "--task", task, "--seed", seed, "-o", name, "--train", "300", "--dev", "30",
            "--test", "30", "--gen", "40",
        ],
    );
}

fn read(path: impl AsRef<Path>) -> String {
    fs::read_to_string(path).unwrap()
}

#[test]
fn help_and_version_exit_cleanly() {
    let tmp = TempDir::new().unwrap();
    let help = povstim(tmp.path(), &["--help"]);
    assert_eq!(help.status.code(), Some(0));
    let text = String::from_utf8_lossy(&help.stdout);
    for sub in ["generate", "oracle", "evaluate", "report", "mine"] {
        assert!(text.contains(sub), "{sub} missing from help");
    }
    assert_eq!(povstim(tmp.path(), &["--version"]).status.code(), Some(0));
    assert_eq!(povstim(tmp.path(), &["frobnicate"]).status.code(), Some(1));
    assert_eq!(povstim(tmp.path(), &["generate", "--lang", "en", "--bogus"]).status.code(), Some(1));
}

#[test]
fn generate_writes_four_splits_and_is_reproducible() {
    let tmp = TempDir::new().unwrap();
    small_build(tmp.path(), "a", "en", "quest", "7");
    small_build(tmp.path(), "b", "en", "quest", "7");
    for file in ["train.tsv", "dev.tsv", "test.tsv", "gen.tsv", "metadata.json"] {
        let a = fs::read(tmp.path().join("a").join(file)).unwrap();
        assert_eq!(a, fs::read(tmp.path().join("b").join(file)).unwrap(), "{file}");
    }
    assert_eq!(read(tmp.path().join("a/gen.tsv")).lines().count(), 40);
    let run: serde_json::Value = serde_json::from_str(&read(tmp.path().join("a/run.json"))).unwrap();
    assert_eq!(run["command"], "generate");
    assert_eq!(run["args"]["seed"], 7);

    small_build(tmp.path(), "c", "en", "quest", "8");
    assert_ne!(read(tmp.path().join("a/train.tsv")), read(tmp.path().join("c/train.tsv")));
}

#[test]
fn oracle_then_evaluate_then_report() {
    let tmp = TempDir::new().unwrap();
    let dir = tmp.path();
    small_build(dir, "d", "de", "passiv", "3");
    ok(dir, &["oracle", "--lang", "de", "-i", "d/gen.tsv", "-o", "hier.txt"]);
    ok(dir, &["oracle", "--lang", "de", "--rule", "linear", "-i", "d/gen.tsv", "-o", "lin.txt", "--trace", "t.jsonl"]);
    assert!(dir.join("hier.txt.run.json").exists());
    assert_eq!(read(dir.join("t.jsonl")).lines().count(), 40);

    for (pred, ckpt, name) in [("hier.txt", "500", "r500.json"), ("lin.txt", "1000", "r1000.json")] {
        ok(
            dir,
            &["evaluate", "--split", "d/gen.tsv", "--predictions", pred, "--checkpoint", ckpt, "-o", &format!("reports/{name}")],
        );
    }
    let hier: serde_json::Value = serde_json::from_str(&read(dir.join("reports/r500.json"))).unwrap();
    assert_eq!(hier["sequence_acc"], 1.0);
    assert_eq!(hier["object_noun_acc"], 1.0);
    let lin: serde_json::Value = serde_json::from_str(&read(dir.join("reports/r1000.json"))).unwrap();
    assert_eq!(lin["object_noun_acc"], 0.0);
    assert_eq!(lin["move_second_freq"], 1.0);

    ok(dir, &["report", "reports", "-o", "curves", "--svg"]);
    let seq = read(dir.join("curves/sequence_acc.csv"));
    assert_eq!(seq, "checkpoint,value\n500,1.000000\n1000,0.000000\n");
    assert!(dir.join("curves/object_noun_acc.svg").exists());
    assert!(read(dir.join("curves/curve.csv")).starts_with("checkpoint,metric,value\n"));
}

#[test]
fn misaligned_predictions_fail_with_a_line_number() {
    let tmp = TempDir::new().unwrap();
    let dir = tmp.path();
    small_build(dir, "d", "en", "quest", "1");
    ok(dir, &["oracle", "--lang", "en", "-i", "d/test.tsv", "-o", "pred.txt"]);
    let mut lines: Vec<String> = read(dir.join("pred.txt")).lines().map(str::to_string).collect();
    lines.truncate(25);
    fs::write(dir.join("short.txt"), lines.join("\n") + "\n").unwrap();
    let out = povstim(dir, &["evaluate", "--split", "d/test.tsv", "--predictions", "short.txt"]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line 26"), "{err}");
}

#[test]
fn invalid_combinations_are_usage_errors() {
    let tmp = TempDir::new().unwrap();
    let out = povstim(tmp.path(), &["sample", "--lang", "en", "--structure", "passiv/on-subject/rc"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("passiv"));
    let out = povstim(tmp.path(), &["mine", "--corpus", "nowhere.tsv", "-o", "m", "--threshold", "0"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn missing_input_is_a_data_error() {
    let tmp = TempDir::new().unwrap();
    let out = povstim(tmp.path(), &["oracle", "--lang", "en", "-i", "absent.txt"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn oracle_reads_plain_sentences() {
    let tmp = TempDir::new().unwrap();
    fs::write(
        tmp.path().join("s.txt"),
        "my unicorn that hasn't amused the yaks has eaten .\nher walruses above my unicorns annoyed her quail .\n",
    )
    .unwrap();
    let out = ok(tmp.path(), &["oracle", "--lang", "en", "-i", "s.txt"]);
    assert_eq!(
        out,
        "has my unicorn that hasn't amused the yaks eaten ?\nher quail was annoyed by her walruses above my unicorns .\n"
    );
    let out = ok(tmp.path(), &["oracle", "--lang", "en", "--rule", "linear", "-i", "s.txt"]);
    assert_eq!(
        out,
        "hasn't my unicorn that amused the yaks has eaten ?\nmy unicorns were annoyed by her walruses .\n"
    );
}

#[test]
fn mine_finds_the_adjacent_pair() {
    let tmp = TempDir::new().unwrap();
    let dir = tmp.path();
    fs::write(
        dir.join("corpus.tsv"),
        "d1\tThe dog has eaten and the cat can run. Has the dog eaten and the cat can run? It rained.\n\
         d2\tNothing to see here. We walked home.\n",
    )
    .unwrap();
    ok(dir, &["mine", "--corpus", "corpus.tsv", "-o", "m"]);
    let pairs = read(dir.join("m/pairs.tsv"));
    let rows: Vec<&str> = pairs.lines().collect();
    assert_eq!(rows.len(), 2, "{pairs}");
    assert!(rows[1].starts_with("d1\t0\t"), "{}", rows[1]);
    let summary: serde_json::Value = serde_json::from_str(&read(dir.join("m/summary.json"))).unwrap();
    assert_eq!(summary["candidates"], 1);
    assert_eq!(summary["stats"]["documents"], 2);
}

#[test]
fn estimate_matches_the_reference_figure() {
    let tmp = TempDir::new().unwrap();
    let out = ok(tmp.path(), &["estimate", "--p-pair", "1.1e-7", "--p-rc", "4.5e-3", "--sentences", "3.78e9"]);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert!((v["product"].as_f64().unwrap() - 4.95e-10).abs() < 1e-18);
    let expected = v["expected_disambiguating"].as_f64().unwrap();
    assert!((1.8..=2.0).contains(&expected), "{expected}");
    let out = povstim(tmp.path(), &["estimate", "--p-pair", "1.1e-7", "--sentences", "3.78e9"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn compose_mixes_two_builds() {
    let tmp = TempDir::new().unwrap();
    let dir = tmp.path();
    small_build(dir, "en", "en", "quest", "1");
    small_build(dir, "de", "de", "quest", "1");
    ok(dir, &["compose", "--input", "en", "--input", "de", "--recipe", "en:quest+decl,de:decl", "-o", "mix"]);
    assert!(dir.join("mix/gen.de.quest.tsv").exists());
    assert!(dir.join("mix/gen.en.quest.tsv").exists());
    let en = read(dir.join("en/train.tsv"));
    let de = read(dir.join("de/train.tsv"));
    let en: std::collections::HashSet<&str> = en.lines().collect();
    let de: std::collections::HashSet<&str> = de.lines().collect();
    let train = read(dir.join("mix/train.tsv"));
    let mut german = 0;
    for line in train.lines() {
        if de.contains(line) {
            assert!(line.starts_with("decl: "), "{line}");
            german += 1;
        } else {
            assert!(en.contains(line), "{line}");
        }
    }
    assert!(german > 0);
}
