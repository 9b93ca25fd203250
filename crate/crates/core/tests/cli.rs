//! Golden-file tests for the command-line tool. Set UPDATE_GOLDEN=1 to
//! rewrite the expected outputs.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::{Command, Output, Stdio};

fn manifest_dir() -> &'static Path {
    Path::new(env!("CARGO_MANIFEST_DIR"))
}

fn run(args: &[&str], stdin: &str) -> Output {
    run_with_env(args, stdin, &[])
}

fn run_with_env(args: &[&str], stdin: &str, env: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_phonostream"));
    cmd.args(args)
        .current_dir(manifest_dir())
        .env_remove("PHONOSTREAM_INVENTORY")
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped());
    for (k, v) in env {
        cmd.env(k, v);
    }
    let mut child = cmd.spawn().expect("binary runs");
    // commands that fail early exit without reading stdin
    let _ = child.stdin.take().expect("piped").write_all(stdin.as_bytes());
    child.wait_with_output().expect("binary finishes")
}

fn golden(name: &str, actual: &[u8]) {
    let path: PathBuf = manifest_dir().join("tests/golden").join(name);
    let actual = String::from_utf8_lossy(actual);
    if std::env::var_os("UPDATE_GOLDEN").is_some() {
        std::fs::write(&path, actual.as_bytes()).expect("golden written");
        return;
    }
    let expected = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    assert_eq!(actual, expected, "output differs from {}", path.display());
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

#[test]
fn convert_rules() {
    let out = run(&["convert", "--backend", "rules=data/toy.rules"], "cha\n");
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    assert_eq!(String::from_utf8_lossy(&out.stdout), "tʃ a\n");
}

#[test]
fn convert_keeps_word_boundaries() {
    let args = ["convert", "--backend", "rules=data/toy.rules", "--keep_word_boundaries"];
    let out = run(&args, "the big dog\ncha\n");
    assert_eq!(code(&out), 0);
    golden("convert_word_boundaries.txt", &out.stdout);
    let plain = run(&args[..3], "the big dog\n");
    assert!(!String::from_utf8_lossy(&plain.stdout).contains("WORD_BOUNDARY"));
}

#[test]
fn uncorrected_skips_the_map() {
    let folded = run(
        &[
            "convert",
            "--backend",
            "rules=data/toy.rules",
            "--map",
            "data/french.fold",
        ],
        "rag\n",
    );
    assert_eq!(String::from_utf8_lossy(&folded.stdout), "ʁ a ɡ\n");
    let raw = run(
        &[
            "convert",
            "--backend",
            "rules=data/toy.rules",
            "--map",
            "data/french.fold",
            "--uncorrected",
        ],
        "rag\n",
    );
    assert_eq!(String::from_utf8_lossy(&raw.stdout), "r a ɡ\n");
}

#[test]
fn convert_row_errors_exit_1() {
    let out = run(
        &["convert", "--backend", "syllabary=data/pinyin.tsv"],
        "ma1\nmx1\nni3hao3\n",
    );
    assert_eq!(code(&out), 1);
    golden("convert_row_errors.txt", &out.stdout);
    assert!(stderr(&out).contains("line 2"), "{}", stderr(&out));
}

#[test]
fn split_tones() {
    let out = run(
        &["convert", "--backend", "syllabary=data/pinyin.tsv", "--split-tones"],
        "ma1\n",
    );
    assert_eq!(String::from_utf8_lossy(&out.stdout), "m a ˥\n");
}

#[test]
fn config_errors_exit_2() {
    let out = run(
        &["convert", "--backend", "rules=data/toy.rules", "--split-tones"],
        "cha\n",
    );
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("split-tones"));
    assert_eq!(code(&run(&["convert"], "cha\n")), 2);
    assert_eq!(code(&run(&["convert", "--backend", "rules=data/missing.rules"], "")), 2);
    assert_eq!(code(&run(&["convert", "--backend", "espeak"], "")), 2);
    assert_eq!(code(&run(&["no-such-command"], "")), 2);
}

#[test]
fn config_file_with_override() {
    let dir = tempfile::tempdir().expect("temp dir");
    let config = dir.path().join("run.toml");
    std::fs::copy(manifest_dir().join("data/pinyin.tsv"), dir.path().join("pinyin.tsv")).expect("copied");
    std::fs::write(&config, "backend = \"syllabary=pinyin.tsv\"\nsplit_tones = true\n").expect("config written");
    let config = config.display().to_string();
    let out = run(&["--config", &config, "convert"], "ma1\n");
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    assert_eq!(String::from_utf8_lossy(&out.stdout), "m a ˥\n");
    // a rules backend from the command line conflicts with split_tones from the file
    let out = run(
        &["--config", &config, "convert", "--backend", "rules=data/toy.rules"],
        "cha\n",
    );
    assert_eq!(code(&out), 2);
}

const FRENCH: [&str; 8] = [
    "--observed",
    "data/french_backend.txt",
    "--map",
    "data/french.fold",
    "--inventory",
    "data/inventories.csv",
    "--inventory-id",
    "2269",
];

#[test]
fn validate_french() {
    let out = run(&[&["validate"], &FRENCH[..]].concat(), "");
    assert_eq!(code(&out), 1);
    golden("validate_french.txt", &out.stdout);
}

#[test]
fn validate_french_json() {
    let out = run(&[&["validate"], &FRENCH[..], &["--json"]].concat(), "");
    assert_eq!(code(&out), 1);
    golden("validate_french.json", &out.stdout);
}

#[test]
fn validate_allowlist() {
    let out = run(&[&["validate"], &FRENCH[..], &["--allow", "dʒ,tʃ,ɧ"]].concat(), "");
    assert_eq!(code(&out), 0);
    let out = run(&[&["validate"], &FRENCH[..], &["--allow", "dʒ,tʃ"]].concat(), "");
    assert_eq!(code(&out), 1);
}

#[test]
fn validate_aligned() {
    let args = [
        "validate",
        "--observed",
        "data/aligned_backend.txt",
        "--inventory",
        "data/aligned_inventory.csv",
        "--inventory-id",
        "1",
    ];
    let out = run(&args, "");
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stdout));
}

#[test]
fn validate_missing_id_exit_2() {
    let mut args = [&["validate"], &FRENCH[..]].concat();
    *args.last_mut().expect("non-empty") = "9999";
    let out = run(&args, "");
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("9999"));
    let out = run(&[&["validate"], &FRENCH[..6]].concat(), "");
    assert_eq!(code(&out), 2);
}

#[test]
fn validate_reads_a_corpus_summary() {
    let dir = tempfile::tempdir().expect("temp dir");
    let summary = dir.path().join("s.json");
    std::fs::write(&summary, r#"{"observed": ["a", "p", "t", "b", "i"]}"#).expect("written");
    let args = [
        "validate",
        "--observed",
        summary.to_str().expect("utf-8 path"),
        "--inventory",
        "data/aligned_inventory.csv",
        "--inventory-id",
        "1",
    ];
    assert_eq!(code(&run(&args, "")), 0);
}

#[test]
fn suggest_diacritics() {
    let args = [
        "suggest",
        "--observed",
        "data/aspirated_backend.txt",
        "--inventory",
        "data/aligned_inventory.csv",
        "--inventory-id",
        "1",
    ];
    let out = run(&args, "");
    assert_eq!(code(&out), 0);
    golden("suggest_diacritics.txt", &out.stdout);
}

#[test]
fn match_french() {
    let args = [
        "match",
        "--observed",
        "data/french_backend.txt",
        "--map",
        "data/french.fold",
        "--inventory",
        "data/inventories.csv",
    ];
    let out = run(&args, "");
    assert_eq!(code(&out), 0);
    golden("match_french.txt", &out.stdout);
}

#[test]
fn match_uses_inventory_env() {
    let args = ["match", "--observed", "data/aligned_backend.txt", "--top", "1"];
    assert_eq!(code(&run(&args, "")), 2);
    let out = run_with_env(&args, "", &[("PHONOSTREAM_INVENTORY", "data/aligned_inventory.csv")]);
    assert_eq!(code(&out), 0);
    assert!(String::from_utf8_lossy(&out.stdout).contains("   1       1         0   1.0000  Toy (tst)"));
}

#[test]
fn match_empty_inventory_exit_2() {
    let args = [
        "match",
        "--observed",
        "data/aligned_backend.txt",
        "--inventory",
        "data/empty_inventory.csv",
    ];
    assert_eq!(code(&run(&args, "")), 2);
}

#[test]
fn corpus_then_info() {
    let dir = tempfile::tempdir().expect("temp dir");
    let output = dir.path().join("out.csv");
    let output_arg = output.to_str().expect("utf-8 path");
    let args = [
        "corpus",
        "--backend",
        "rules=data/toy.rules",
        "--input",
        "data/corpus.csv",
        "--output",
        output_arg,
        "--keep_word_boundaries",
        "--workers",
        "3",
    ];
    let out = run(&args, "");
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    golden("corpus_out.csv", &std::fs::read(&output).expect("output written"));
    golden(
        "corpus_summary.json",
        &std::fs::read(dir.path().join("out.csv.summary.json")).expect("summary"),
    );

    let out = run(&["info", "--input", output_arg, "--per-bucket"], "");
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    golden("info_per_bucket.csv", &out.stdout);
    let sampled = ["info", "--input", output_arg, "--sample-size", "2", "--seed", "11"];
    let first = run(&sampled, "");
    assert_eq!(first.stdout, run(&sampled, "").stdout);
}

#[test]
fn corpus_reports_skipped_rows() {
    let dir = tempfile::tempdir().expect("temp dir");
    let input = dir.path().join("in.csv");
    std::fs::write(&input, "speaker_code,gloss\nMOT,cha\nMOT,cha,extra\n").expect("written");
    let output = dir.path().join("out.csv");
    let args = [
        "corpus",
        "--backend",
        "rules=data/toy.rules",
        "--input",
        input.to_str().expect("utf-8 path"),
        "--output",
        output.to_str().expect("utf-8 path"),
    ];
    let out = run(&args, "");
    assert_eq!(code(&out), 1);
    assert!(stderr(&out).contains("skipped line 3"), "{}", stderr(&out));
    let written = std::fs::read_to_string(&output).expect("output written");
    assert_eq!(
        written,
        "speaker_code,gloss,phonemized,is_child,errors\nMOT,cha,tʃ a,false,\n"
    );
}

#[test]
fn stats_frequencies() {
    let out = run(&["stats", "freq", "--input", "data/french_backend.txt"], "");
    assert_eq!(code(&out), 0);
    golden("stats_freq.txt", &out.stdout);
}

#[test]
fn stats_compare() {
    let out = run(
        &[
            "stats",
            "compare",
            "--a",
            "data/phonemizer_fr.txt",
            "--b",
            "data/epitran_fr.txt",
        ],
        "",
    );
    assert_eq!(code(&out), 0);
    golden("stats_compare.txt", &out.stdout);
}

#[test]
fn stats_features() {
    let args = [
        "stats",
        "features",
        "--inventory",
        "data/features.csv",
        "--inventory-id",
        "7",
    ];
    let out = run(&args, "");
    assert_eq!(code(&out), 0);
    assert_eq!(String::from_utf8_lossy(&out.stdout), "f_a\nf_c\n");
}

#[test]
fn stats_binomial() {
    let out = run(&["stats", "binomial", "--successes", "5", "--trials", "5"], "");
    assert_eq!(String::from_utf8_lossy(&out.stdout), "0.03125\n");
    assert_eq!(
        code(&run(&["stats", "binomial", "--successes", "6", "--trials", "5"], "")),
        2
    );
}

#[test]
fn stats_silhouette() {
    let dir = tempfile::tempdir().expect("temp dir");
    let input = dir.path().join("v.csv");
    std::fs::write(&input, "label,x,y\nL,0,0\nL,0,1\nR,10,0\nR,10,1\n").expect("written");
    let out = run(
        &["stats", "silhouette", "--input", input.to_str().expect("utf-8 path")],
        "",
    );
    assert_eq!(code(&out), 0);
    let score: f64 = String::from_utf8_lossy(&out.stdout).trim().parse().expect("a number");
    assert!((score - 0.900249).abs() < 1e-6);
}

#[test]
fn check_map() {
    let out = run(&["check-map", "--map", "data/french.fold"], "");
    assert_eq!(code(&out), 0);
    golden("check_map_french.txt", &out.stdout);

    let dir = tempfile::tempdir().expect("temp dir");
    let map = dir.path().join("feeding.fold");
    std::fs::write(&map, "a -> b\nb -> c\nx ->\n").expect("written");
    let map = map.to_str().expect("utf-8 path");
    let out = run(&["check-map", "--map", map], "");
    assert_eq!(code(&out), 0);
    golden("check_map_feeding.txt", &out.stdout);
    assert_eq!(code(&run(&["check-map", "--map", map, "--strict"], "")), 1);
}
