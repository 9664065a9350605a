use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use iocr::tally::AccuracyReport;

fn iocr(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_iocr")).args(args).output().unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

/// Generated ballot set under `root`, with or without IDs.
fn generate(root: &Path, extra: &[&str]) {
    let mut args = vec!["generate", "--out", p(root)];
    args.extend_from_slice(extra);
    let out = iocr(&args);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
}

fn tally(root: &Path, ballots: &Path, out: &Path, extra: &[&str]) -> Output {
    let dict = root.join("dictionary.txt");
    let manifest = root.join("manifest.json");
    let mut args = vec![
        "tally",
        "--ballots",
        p(ballots),
        "--dictionary",
        p(&dict),
        "--manifest",
        p(&manifest),
        "--out",
        p(out),
    ];
    args.extend_from_slice(extra);
    iocr(&args)
}

fn report(path: &Path) -> AccuracyReport {
    AccuracyReport::from_json(&fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn clean_generated_ballots_tally_to_the_golden_report() {
    let dir = tempfile::tempdir().unwrap();
    generate(dir.path(), &[]);
    let out = dir.path().join("t");
    assert_eq!(code(&tally(dir.path(), &dir.path().join("ballots"), &out, &[])), 0);
    let golden = fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/tests/golden/exp1_ids_results.txt")).unwrap();
    assert_eq!(fs::read_to_string(out.join("results.txt")).unwrap(), golden);
    assert_eq!(fs::read_to_string(out.join("confusion.tsv")).unwrap(), "");
    assert_eq!(report(&out.join("accuracy.json")).line_accuracy, 1.0);
    assert_eq!(report(&out.join("raw_accuracy.json")).line_accuracy, 1.0);
    let cfg: serde_json::Value = serde_json::from_str(&fs::read_to_string(out.join("run_config.json")).unwrap()).unwrap();
    assert_eq!(cfg["command"], "tally");
    assert_eq!(cfg["matcher"]["position_keyed"], true);
}

#[test]
fn corrupted_ballots_keep_iocr_exact_and_shards_do_not_matter() {
    let dir = tempfile::tempdir().unwrap();
    generate(dir.path(), &["--no-ids"]);
    let noisy = dir.path().join("q20");
    let out = iocr(&["corrupt", "--ballots", p(&dir.path().join("ballots")), "--out", p(&noisy), "--quality", "20"]);
    assert_eq!(code(&out), 0);
    let one = dir.path().join("one");
    let many = dir.path().join("many");
    assert_eq!(code(&tally(dir.path(), &noisy, &one, &["--shards", "1"])), 0);
    assert_eq!(code(&tally(dir.path(), &noisy, &many, &["--shards", "9"])), 0);
    for f in ["results.txt", "confusion.tsv", "accuracy.json", "raw_accuracy.json"] {
        assert_eq!(fs::read(one.join(f)).unwrap(), fs::read(many.join(f)).unwrap(), "{f}");
    }
    let raw = report(&one.join("raw_accuracy.json")).line_accuracy;
    assert!(raw < 0.95 && raw > 0.88, "{raw}");
    assert_eq!(report(&one.join("accuracy.json")).line_accuracy, 1.0);
}

#[test]
fn an_unreadable_ballot_is_reported_and_the_rest_are_tallied() {
    let dir = tempfile::tempdir().unwrap();
    generate(dir.path(), &[]);
    let ballots = dir.path().join("ballots");
    let mut ids: Vec<_> = fs::read_dir(&ballots).unwrap().map(|e| e.unwrap().path()).collect();
    ids.sort();
    fs::write(&ids[0], [0xff, 0xfe, 0x00, 0x9c]).unwrap();
    let out = dir.path().join("t");
    let run = tally(dir.path(), &ballots, &out, &[]);
    assert_eq!(code(&run), 0);
    let stdout = String::from_utf8_lossy(&run.stdout);
    assert!(stdout.contains("unreadable_ballots=1"), "{stdout}");
    let log = fs::read_to_string(out.join("confusion.tsv")).unwrap();
    let stem = ids[0].file_stem().unwrap().to_str().unwrap();
    assert_eq!(log.lines().count(), 10);
    assert!(log.lines().all(|l| l.starts_with(stem) && l.contains("\tUnreadable")));
    let acc = report(&out.join("accuracy.json"));
    assert_eq!(acc.correct_lines, acc.total_lines - 10);
    assert_eq!(acc.mistallied_lines, 0);

    let strict = tally(dir.path(), &ballots, &dir.path().join("s"), &["--max-unreadable", "0"]);
    assert_eq!(code(&strict), 2);
}

#[test]
fn a_ballot_with_extra_lines_is_unreadable() {
    let dir = tempfile::tempdir().unwrap();
    generate(dir.path(), &[]);
    let single = dir.path().join("single");
    fs::create_dir_all(&single).unwrap();
    let src = fs::read_dir(dir.path().join("ballots")).unwrap().next().unwrap().unwrap().path();
    let name = src.file_name().unwrap().to_owned();
    let text = fs::read_to_string(&src).unwrap();
    fs::write(single.join(&name), &text).unwrap();
    let out = dir.path().join("t");
    assert_eq!(code(&tally(dir.path(), &single, &out, &[])), 0);
    assert_eq!(report(&out.join("accuracy.json")).total_lines, 10);
    assert!(fs::read_to_string(out.join("results.txt")).unwrap().contains("total=10\tconfusion=0\tunreadable=0"));

    fs::write(single.join(&name), text + "Extra line noise from the scanner\n").unwrap();
    assert_eq!(code(&tally(dir.path(), &single, &out, &[])), 0);
    assert!(fs::read_to_string(out.join("results.txt")).unwrap().contains("unreadable=10"));
}

#[test]
fn data_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    generate(dir.path(), &[]);
    let empty = dir.path().join("empty");
    fs::create_dir_all(&empty).unwrap();
    assert_eq!(code(&tally(dir.path(), &empty, &dir.path().join("t"), &[])), 2);
    let missing = iocr(&[
        "tally",
        "--ballots",
        p(&dir.path().join("ballots")),
        "--dictionary",
        p(&dir.path().join("nope.txt")),
        "--out",
        p(&dir.path().join("t")),
    ]);
    assert_eq!(code(&missing), 2);
}

#[test]
fn usage_errors_exit_with_one() {
    assert_eq!(code(&iocr(&["experiment", "5"])), 1);
    assert_eq!(code(&iocr(&["corrupt", "--ballots", "a", "--out", "b", "--quality", "30"])), 1);
    assert_eq!(code(&iocr(&["frobnicate"])), 1);
    assert_eq!(code(&iocr(&["tally", "--ballots", "a", "--dictionary", "b", "--out", "c", "--writein-lev", "1.5"])), 1);
    assert_eq!(code(&iocr(&["experiment", "4", "--prefix-weight", "0.25", "--max-prefix", "5"])), 1);
    assert_eq!(code(&iocr(&["--help"])), 0);
}

#[test]
fn experiment_mismatch_exits_with_three() {
    let dir = tempfile::tempdir().unwrap();
    // Thresholds of 1.0 send every misspelled line to the write-in path.
    let out = iocr(&[
        "experiment",
        "4",
        "--ids-only",
        "--writein-lev",
        "1.0",
        "--writein-jw",
        "1.0",
        "--out",
        p(dir.path()),
    ]);
    assert_eq!(code(&out), 3);
    let summary = fs::read_to_string(dir.path().join("summary.txt")).unwrap();
    assert!(summary.ends_with("# result\tFAIL\n"));
}

#[test]
fn experiments_are_reproducible_byte_for_byte() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for d in [&a, &b] {
        assert_eq!(code(&iocr(&["experiment", "3", "--seed", "9", "--out", p(d.path())])), 0);
    }
    let mut files = Vec::new();
    let mut stack = vec![a.path().to_path_buf()];
    while let Some(dir) = stack.pop() {
        for e in fs::read_dir(dir).unwrap() {
            let path = e.unwrap().path();
            if path.is_dir() {
                stack.push(path);
            } else {
                files.push(path);
            }
        }
    }
    assert!(files.len() > 10);
    for f in files {
        let rel = f.strip_prefix(a.path()).unwrap();
        let other = fs::read(b.path().join(rel)).unwrap();
        if rel == Path::new("run_config.json") {
            continue;
        }
        assert_eq!(fs::read(&f).unwrap(), other, "{}", rel.display());
    }
}

#[test]
fn experiment_two_at_one_quality_matches_the_published_figure() {
    let dir = tempfile::tempdir().unwrap();
    let out = iocr(&["experiment", "2", "--quality", "20", "--seed", "4", "--out", p(dir.path())]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stdout));
    let summary = fs::read_to_string(dir.path().join("summary.txt")).unwrap();
    assert!(summary.contains("iocr_line_accuracy_min[ids,q20]\t1.000000"));
    assert!(!summary.contains("anova"));
}

#[test]
fn stats_reads_accuracy_reports() {
    let dir = tempfile::tempdir().unwrap();
    generate(dir.path(), &["--no-ids"]);
    let mut reports = Vec::new();
    for q in ["100", "50", "20"] {
        let noisy = dir.path().join(format!("q{q}"));
        let c = iocr(&["corrupt", "--ballots", p(&dir.path().join("ballots")), "--out", p(&noisy), "--quality", q]);
        assert_eq!(code(&c), 0);
        let out = dir.path().join(format!("t{q}"));
        assert_eq!(code(&tally(dir.path(), &noisy, &out, &[])), 0);
        reports.push(out.join("raw_accuracy.json"));
    }
    let anova = iocr(&["stats", "--anova", p(&reports[0]), p(&reports[1]), p(&reports[2])]);
    assert_eq!(code(&anova), 0);
    let text = String::from_utf8_lossy(&anova.stdout);
    let row: Vec<&str> = text.lines().nth(1).unwrap().split('\t').collect();
    assert_eq!(row[0], "anova");
    assert!(row[1].parse::<f64>().unwrap() > 10.0);
    assert_eq!(row[2], "2,1497");

    let iocr_report = dir.path().join("t20/accuracy.json");
    let paired = iocr(&["stats", "--paired", p(&iocr_report), p(&reports[2])]);
    assert_eq!(code(&paired), 0);
    assert!(String::from_utf8_lossy(&paired.stdout).contains("paired_t\t"));
    assert!(String::from_utf8_lossy(&paired.stdout).contains("\t499\t"));
}

#[test]
fn lexicon_validate_flags_the_similar_pair() {
    let dir = tempfile::tempdir().unwrap();
    generate(dir.path(), &["--no-ids", "--similar-pair"]);
    let dict = dir.path().join("dictionary.txt");
    let out = iocr(&["lexicon", "validate", p(&dict)]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8_lossy(&out.stdout);
    let governor = text.lines().find(|l| l.starts_with("1\t")).unwrap();
    assert!(governor.contains("Mark") && governor.ends_with("yes"), "{governor}");
    assert_eq!(code(&iocr(&["lexicon", "validate", p(&dict), "--min-distance", "3"])), 2);
}

#[test]
fn bench_emits_a_timing_table() {
    let out = iocr(&["bench", "--dict-size", "2000", "--queries", "50", "--norvig-queries", "2"]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8_lossy(&out.stdout);
    let algorithms: Vec<&str> = text.lines().skip(1).map(|l| l.split('\t').next().unwrap()).collect();
    assert_eq!(algorithms, ["symspell", "brute_force_scan", "norvig"]);
}
