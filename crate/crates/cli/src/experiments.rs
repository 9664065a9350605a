use std::collections::{BTreeMap, BTreeSet};
use std::fmt::{self, Display, Write as _};
use std::path::Path;

use anyhow::{anyhow, Context, Result};
use iocr::lexicon::{build_contest_index, validate_lexicon, Lexicon, LexiconEntry};
use iocr::matcher::{confusion_record, BallotLine, DecisionKind, MatchDecision, Matcher, MatcherConfig};
use iocr::seed::derive_seed;
use iocr::stats::{one_way_anova, paired_t_test, SampleGroup};
use iocr::synth::{
    differentiating_char, generate_ballots, inject_noise_corpus, misspell_alphabet, misspell_similar_pair, Ballot,
    BallotSpec, Corpus, ErrorMix, NoiseKind, NoiseModel, QualityLevel, SIMILAR_PAIR, SIMILAR_PAIR_CONTEST,
};
use iocr::tally::{GroundTruth, Tally};

use crate::args::ExperimentArgs;
use crate::files;
use crate::pipeline::{run_and_score, write_outputs, Scored};

/// Allowed gap between the mean raw accuracy and the published figure.
pub const RAW_ACCURACY_TOLERANCE: f64 = 0.005;
/// Lower bound on the quality-level ANOVA statistic.
pub const MIN_ANOVA_F: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
    /// Reported for comparison only.
    Info,
}

impl Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Info => "INFO",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub observed: String,
    pub expected: String,
    pub status: Status,
}

impl Check {
    fn gate(name: impl Into<String>, observed: impl Display, expected: impl Display, pass: bool) -> Self {
        Self {
            name: name.into(),
            observed: observed.to_string(),
            expected: expected.to_string(),
            status: if pass { Status::Pass } else { Status::Fail },
        }
    }

    fn info(name: impl Into<String>, observed: impl Display, expected: impl Display) -> Self {
        Self {
            name: name.into(),
            observed: observed.to_string(),
            expected: expected.to_string(),
            status: Status::Info,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentReport {
    pub number: u8,
    pub seed: u64,
    pub checks: Vec<Check>,
}

impl ExperimentReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.status != Status::Fail)
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn summary(&self) -> String {
        let mut out = format!("# experiment {}\tseed={}\n", self.number, self.seed);
        out.push_str("check\tobserved\texpected\tstatus\n");
        for c in &self.checks {
            let _ = writeln!(out, "{}\t{}\t{}\t{}", c.name, c.observed, c.expected, c.status);
        }
        let _ = writeln!(out, "# result\t{}", if self.passed() { "PASS" } else { "FAIL" });
        out
    }
}

pub fn variant_label(with_ids: bool) -> &'static str {
    if with_ids {
        "ids"
    } else {
        "noids"
    }
}

fn clean_texts(ballots: &[Ballot]) -> Vec<(String, String)> {
    ballots.iter().map(|b| (b.ballot_id.clone(), b.to_text())).collect()
}

fn fmt6(x: f64) -> String {
    format!("{x:.6}")
}

struct Ctx<'a> {
    args: &'a ExperimentArgs,
    cfg: MatcherConfig,
    out: &'a Path,
}

impl Ctx<'_> {
    fn save(&self, sub: &str, corpus: &Corpus, texts: &[(String, String)], scored: &Scored) -> Result<()> {
        let dir = self.out.join(sub);
        files::write(&dir, "dictionary.txt", &corpus.lexicon.to_dictionary_text())?;
        files::write(&dir, "manifest.json", &(corpus.truth.to_json() + "\n"))?;
        write_outputs(&dir, &scored.run, &[&scored.iocr, &scored.raw])?;
        if self.args.write_ballots {
            files::write_ballot_dir(&dir.join("ballots"), texts.iter().cloned())?;
        }
        Ok(())
    }
}

/// Runs experiment `args.n`, writing artifacts, `summary.txt` and
/// `run_config.json` under the output directory.
pub fn run_experiment(args: &ExperimentArgs) -> Result<ExperimentReport> {
    let out = args.out_dir();
    let cfg = args.matcher.to_config()?;
    files::write_run_config(&out, "experiment", args, Some(&cfg))?;
    let ctx = Ctx { args, cfg, out: &out };
    let checks = match args.n {
        1 => experiment1(&ctx)?,
        2 => experiment2(&ctx)?,
        3 => experiment3(&ctx)?,
        4 => experiment4(&ctx)?,
        n => return Err(anyhow!("no experiment {n}")),
    };
    let report = ExperimentReport {
        number: args.n,
        seed: args.seed,
        checks,
    };
    files::write(&out, "summary.txt", &report.summary())?;
    Ok(report)
}

fn tally_matches_truth(tally: &Tally, truth: &GroundTruth) -> bool {
    tally.report() == Tally::from_truth(truth).report()
}

fn experiment1(ctx: &Ctx) -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    let mut ballots = 0;
    for ids in ctx.args.variants() {
        let v = variant_label(ids);
        let corpus = generate_ballots(&BallotSpec::mock_election(ids, ctx.args.seed))?;
        ballots += corpus.ballots.len();
        let texts = clean_texts(&corpus.ballots);
        let s = run_and_score(&corpus.lexicon, &ctx.cfg, &texts, &corpus.truth, v)?;
        ctx.save(v, &corpus, &texts, &s)?;
        checks.push(Check::gate(
            format!("iocr_line_accuracy[{v}]"),
            fmt6(s.iocr.line_accuracy),
            "1.000000",
            s.iocr.line_accuracy == 1.0,
        ));
        checks.push(Check::gate(
            format!("raw_line_accuracy[{v}]"),
            fmt6(s.raw.line_accuracy),
            "1.000000",
            s.raw.line_accuracy == 1.0,
        ));
        checks.push(Check::gate(
            format!("mistallied_lines[{v}]"),
            s.iocr.mistallied_lines,
            0,
            s.iocr.mistallied_lines == 0,
        ));
        let hand = tally_matches_truth(&s.run.tally, &corpus.truth);
        checks.push(Check::gate(format!("tally_equals_hand_count[{v}]"), hand, true, hand));

        // Every leading contest number misread: exact matching fails on every
        // line while the dictionary lookup is unaffected.
        let model = NoiseModel::new(
            1.0,
            ErrorMix::only(NoiseKind::FirstCharCorruption),
            derive_seed(ctx.args.seed, "exp1/first-char"),
        )?;
        let noisy = inject_noise_corpus(&corpus.ballots, &model)?;
        let f = run_and_score(&corpus.lexicon, &ctx.cfg, &noisy, &corpus.truth, &format!("{v}-first-char"))?;
        ctx.save(&format!("{v}-first-char"), &corpus, &noisy, &f)?;
        checks.push(Check::gate(
            format!("raw_line_accuracy_first_char[{v}]"),
            fmt6(f.raw.line_accuracy),
            "0.000000",
            f.raw.line_accuracy == 0.0,
        ));
        checks.push(Check::gate(
            format!("iocr_line_accuracy_first_char[{v}]"),
            fmt6(f.iocr.line_accuracy),
            "1.000000",
            f.iocr.line_accuracy == 1.0,
        ));
    }
    let expected = 500 * ctx.args.variants().len();
    checks.push(Check::gate("ballots", ballots, expected, ballots == expected));
    Ok(checks)
}

/// Raw OCR accuracy published for each image quality.
pub fn published_raw_accuracy(q: QualityLevel) -> f64 {
    match q {
        QualityLevel::Full => 1.0,
        QualityLevel::Half => 0.988,
        QualityLevel::Fifth => 0.916,
    }
}

fn published_wrong_lines(q: QualityLevel) -> usize {
    match q {
        QualityLevel::Full => 0,
        QualityLevel::Half => 60,
        QualityLevel::Fifth => 420,
    }
}

struct Condition {
    raw: Vec<f64>,
    iocr: Vec<f64>,
    raw_line_accuracy: f64,
    iocr_line_accuracy: f64,
    raw_wrong_lines: usize,
    mistallied: usize,
}

fn experiment2(ctx: &Ctx) -> Result<Vec<Check>> {
    let qualities: Vec<QualityLevel> = match &ctx.args.quality {
        Some(p) => {
            let pct: u32 = p.parse().context("quality")?;
            vec![QualityLevel::from_percent(pct).ok_or_else(|| anyhow!("unsupported quality {pct}"))?]
        }
        None => QualityLevel::ALL.to_vec(),
    };
    let reps = ctx.args.replicates as usize;
    let mut checks = Vec::new();
    let mut replicate_rows = String::from(
        "variant\tquality\treplicate\tnoise_seed\traw_line_accuracy\traw_wrong_lines\tiocr_line_accuracy\tconfusion_lines\tmistallied_lines\n",
    );
    let mut stats_text = String::from("variant\treplicate\ttest\tstatistic\tdf\tp_value\n");
    for ids in ctx.args.variants() {
        let v = variant_label(ids);
        let corpus = generate_ballots(&BallotSpec::mock_election(ids, ctx.args.seed))?;
        let mut by_rep: Vec<BTreeMap<QualityLevel, Condition>> = Vec::with_capacity(reps);
        for r in 0..reps {
            let mut conds = BTreeMap::new();
            for &q in &qualities {
                let noise_seed = derive_seed(ctx.args.seed, &format!("exp2/q{}/rep{r}", q.percent()));
                let noisy = inject_noise_corpus(&corpus.ballots, &NoiseModel::for_quality(q, noise_seed))?;
                let label = format!("{v}/q{}", q.percent());
                let s = run_and_score(&corpus.lexicon, &ctx.cfg, &noisy, &corpus.truth, &label)?;
                if r == 0 {
                    ctx.save(&format!("q{}/{v}", q.percent()), &corpus, &noisy, &s)?;
                }
                let _ = writeln!(
                    replicate_rows,
                    "{v}\t{}\t{r}\t{noise_seed}\t{:.6}\t{}\t{:.6}\t{}\t{}",
                    q.percent(),
                    s.raw.line_accuracy,
                    s.raw.total_lines - s.raw.correct_lines,
                    s.iocr.line_accuracy,
                    s.iocr.confusion_lines,
                    s.iocr.mistallied_lines
                );
                conds.insert(
                    q,
                    Condition {
                        raw: s.raw.per_ballot_accuracy(),
                        iocr: s.iocr.per_ballot_accuracy(),
                        raw_line_accuracy: s.raw.line_accuracy,
                        iocr_line_accuracy: s.iocr.line_accuracy,
                        raw_wrong_lines: s.raw.total_lines - s.raw.correct_lines,
                        mistallied: s.iocr.mistallied_lines,
                    },
                );
            }
            by_rep.push(conds);
        }

        for &q in &qualities {
            let p = q.percent();
            let conds: Vec<&Condition> = by_rep.iter().map(|c| &c[&q]).collect();
            let raw_mean = conds.iter().map(|c| c.raw_line_accuracy).sum::<f64>() / reps as f64;
            let iocr_min = conds.iter().map(|c| c.iocr_line_accuracy).fold(1.0, f64::min);
            let mistallied: usize = conds.iter().map(|c| c.mistallied).sum();
            let target = published_raw_accuracy(q);
            checks.push(Check::gate(
                format!("iocr_line_accuracy_min[{v},q{p}]"),
                fmt6(iocr_min),
                "1.000000",
                iocr_min == 1.0,
            ));
            checks.push(Check::gate(
                format!("raw_line_accuracy_mean[{v},q{p}]"),
                fmt6(raw_mean),
                format!("{target:.3} +- {RAW_ACCURACY_TOLERANCE}"),
                (raw_mean - target).abs() <= RAW_ACCURACY_TOLERANCE,
            ));
            checks.push(Check::gate(format!("mistallied_lines[{v},q{p}]"), mistallied, 0, mistallied == 0));
            checks.push(Check::info(
                format!("raw_wrong_lines_rep0[{v},q{p}]"),
                format!("{} of {}", conds[0].raw_wrong_lines, conds[0].raw.len() * 10),
                format!("{} of 5000", published_wrong_lines(q)),
            ));
        }

        if qualities.len() == QualityLevel::ALL.len() {
            checks.extend(quality_stats(v, &by_rep, &mut stats_text));
        }
    }
    files::write(ctx.out, "replicates.tsv", &replicate_rows)?;
    files::write(ctx.out, "stats.tsv", &stats_text)?;
    Ok(checks)
}

fn quality_stats(v: &str, by_rep: &[BTreeMap<QualityLevel, Condition>], log: &mut String) -> Vec<Check> {
    use QualityLevel::{Fifth, Full, Half};
    let mut checks = Vec::new();
    let mut min_f = f64::INFINITY;
    let mut df_ok = true;
    let mut anova_ok = true;
    for (r, conds) in by_rep.iter().enumerate() {
        let groups: Vec<SampleGroup> = QualityLevel::ALL
            .iter()
            .map(|q| SampleGroup::new(format!("q{}", q.percent()), conds[q].raw.clone()))
            .collect();
        match one_way_anova(&groups) {
            Ok(a) => {
                let _ = writeln!(
                    log,
                    "{v}\t{r}\tanova_raw_by_quality\t{:.4}\t{},{}\t{:.3e}",
                    a.f, a.df_between, a.df_within, a.p_value
                );
                min_f = min_f.min(a.f);
                df_ok &= a.df_between == 2 && a.df_within == conds[&Full].raw.len() * 3 - 3;
            }
            Err(e) => {
                let _ = writeln!(log, "{v}\t{r}\tanova_raw_by_quality\t{e}\t\t");
                anova_ok = false;
            }
        }
        let pairs: [(&str, &[f64], &[f64]); 4] = [
            ("t_raw_q100_vs_q50", &conds[&Full].raw, &conds[&Half].raw),
            ("t_raw_q50_vs_q20", &conds[&Half].raw, &conds[&Fifth].raw),
            ("t_iocr_vs_raw_q50", &conds[&Half].iocr, &conds[&Half].raw),
            ("t_iocr_vs_raw_q20", &conds[&Fifth].iocr, &conds[&Fifth].raw),
        ];
        for (name, a, b) in pairs {
            match paired_t_test(a, b) {
                Ok(t) => {
                    let _ = writeln!(log, "{v}\t{r}\t{name}\t{:.4}\t{}\t{:.3e}", t.t, t.df, t.p_value);
                    if r == 0 {
                        checks.push(Check::info(
                            format!("{name}[{v}]"),
                            format!("t={:.3} df={} p={:.2e}", t.t, t.df, t.p_value),
                            "significant, df=499",
                        ));
                    }
                }
                Err(e) => {
                    let _ = writeln!(log, "{v}\t{r}\t{name}\t{e}\t\t");
                    if r == 0 {
                        checks.push(Check::info(format!("{name}[{v}]"), e, "significant, df=499"));
                    }
                }
            }
        }
    }
    checks.insert(
        0,
        Check::gate(
            format!("anova_f_min[{v}]"),
            if anova_ok { format!("{min_f:.3}") } else { "degenerate".into() },
            format!("> {MIN_ANOVA_F} (published 143.43)"),
            anova_ok && min_f > MIN_ANOVA_F,
        ),
    );
    checks.insert(
        1,
        Check::gate(format!("anova_df[{v}]"), if df_ok { "2,1497" } else { "other" }, "2,1497", anova_ok && df_ok),
    );
    checks
}

fn similar_pair_corpus(ids: bool, seed: u64) -> Result<Corpus> {
    Ok(generate_ballots(&BallotSpec::mock_election(ids, seed).with_similar_pair())?)
}

fn pair_entries(lexicon: &Lexicon) -> Result<Vec<&LexiconEntry>> {
    SIMILAR_PAIR
        .iter()
        .map(|(name, _)| {
            lexicon
                .find_candidate(SIMILAR_PAIR_CONTEST, name)
                .ok_or_else(|| anyhow!("{name} missing from the dictionary"))
        })
        .collect()
}

fn experiment3(ctx: &Ctx) -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    for ids in ctx.args.variants() {
        let v = variant_label(ids);
        let corpus = similar_pair_corpus(ids, ctx.args.seed)?;
        let texts = clean_texts(&corpus.ballots);
        let s = run_and_score(&corpus.lexicon, &ctx.cfg, &texts, &corpus.truth, v)?;
        ctx.save(v, &corpus, &texts, &s)?;
        checks.push(Check::gate(
            format!("iocr_line_accuracy[{v}]"),
            fmt6(s.iocr.line_accuracy),
            "1.000000",
            s.iocr.line_accuracy == 1.0,
        ));
        checks.push(Check::gate(
            format!("mistallied_lines[{v}]"),
            s.iocr.mistallied_lines,
            0,
            s.iocr.mistallied_lines == 0,
        ));
        // Nothing garbled the names, so the similar pair was never tested.
        checks.push(Check::gate(
            format!("no_corruption[{v}]"),
            s.raw.total_lines - s.raw.correct_lines,
            "0 altered lines",
            s.raw.correct_lines == s.raw.total_lines,
        ));
        for (entry, (name, n)) in pair_entries(&corpus.lexicon)?.into_iter().zip(SIMILAR_PAIR) {
            let votes = s.run.tally.votes(SIMILAR_PAIR_CONTEST, &entry.canonical_line);
            checks.push(Check::gate(format!("votes[{v},{name}]"), votes, n, votes == n as u64));
        }
        let sep = validate_lexicon(&corpus.lexicon);
        let governor = &sep.contests[SIMILAR_PAIR_CONTEST];
        checks.push(Check::info(
            format!("pair_contest_min_distance[{v}]"),
            governor.min_distance.map_or("-".into(), |d| d.to_string()),
            if ids { "separated by IDs" } else { "flagged" },
        ));
    }
    Ok(checks)
}

/// Outcome of matching every single-character corruption of the
/// differentiating letter of the similar pair.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct PairSweep {
    pub lines: usize,
    pub confident_correct: usize,
    /// Held for review with both names among the candidates.
    pub logged_with_both: usize,
    pub mistallied: usize,
}

/// Replaces the differentiating letter of each similar-pair line with every
/// allowed character, and also deletes it, then matches each variant.
pub fn similar_pair_sweep(lexicon: &Lexicon, cfg: &MatcherConfig) -> Result<PairSweep> {
    let index = build_contest_index(lexicon);
    let matcher = Matcher::new(&index, cfg.clone())?;
    let entries = pair_entries(lexicon)?;
    let (a, b) = (SIMILAR_PAIR[0].0, SIMILAR_PAIR[1].0);
    let (offset, _, _) = differentiating_char(a, b).ok_or_else(|| anyhow!("{a} and {b} do not differ"))?;
    let alphabet = misspell_alphabet(a, b)?;
    let mut sweep = PairSweep::default();
    for (k, entry) in entries.iter().enumerate() {
        let name = SIMILAR_PAIR[k].0;
        let line: Vec<char> = entry.canonical_line.chars().collect();
        let byte = entry.canonical_line.find(name).ok_or_else(|| anyhow!("{name} not in its line"))?;
        let at = entry.canonical_line[..byte].chars().count() + offset;
        let mut variants: Vec<String> = alphabet
            .iter()
            .map(|&c| {
                let mut v = line.clone();
                v[at] = c;
                v.into_iter().collect()
            })
            .collect();
        let mut deleted = line.clone();
        deleted.remove(at);
        variants.push(deleted.into_iter().collect());
        for text in variants {
            let d = matcher.match_line(&BallotLine {
                ballot_id: "sweep".into(),
                line_position: SIMILAR_PAIR_CONTEST,
                raw_text: text.clone(),
                cleaned_text: text.trim().to_string(),
            })?;
            let logged = confusion_record(&d).is_some();
            tally_pair_outcome(&mut sweep, &d, entry, &entries, logged);
        }
    }
    Ok(sweep)
}

fn lists_both(d: &MatchDecision, entries: &[&LexiconEntry]) -> bool {
    entries.iter().all(|e| d.candidates.iter().any(|c| &c.entry == *e))
}

fn tally_pair_outcome(
    sweep: &mut PairSweep,
    d: &MatchDecision,
    truth: &LexiconEntry,
    entries: &[&LexiconEntry],
    logged: bool,
) {
    sweep.lines += 1;
    match d.kind {
        DecisionKind::Confident if d.matched_entry.as_ref() == Some(truth) => sweep.confident_correct += 1,
        DecisionKind::Confident => sweep.mistallied += 1,
        DecisionKind::Confusion if logged && lists_both(d, entries) => {
            sweep.logged_with_both += 1
        }
        _ => {}
    }
}

fn experiment4(ctx: &Ctx) -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    let (a, b) = (SIMILAR_PAIR[0].0, SIMILAR_PAIR[1].0);
    for ids in ctx.args.variants() {
        let v = variant_label(ids);
        let corpus = similar_pair_corpus(ids, ctx.args.seed)?;
        let spelled = misspell_similar_pair(&corpus.ballots, a, b, derive_seed(ctx.args.seed, "exp4"))?;
        let texts = clean_texts(&spelled);
        let s = run_and_score(&corpus.lexicon, &ctx.cfg, &texts, &corpus.truth, v)?;
        ctx.save(v, &corpus, &texts, &s)?;

        let entries = pair_entries(&corpus.lexicon)?;
        let decisions: BTreeMap<&str, &[MatchDecision]> =
            s.run.decisions.iter().map(|(id, ds)| (id.as_str(), ds.as_slice())).collect();
        let log = s.run.confusion_log();
        let log: BTreeSet<&str> = log.lines().collect();
        let mut seen = PairSweep::default();
        for (before, after) in corpus.ballots.iter().zip(&spelled) {
            for (pos, (x, y)) in before.lines.iter().zip(&after.lines).enumerate() {
                if x == y {
                    continue;
                }
                let truth = corpus.lexicon.find_line(x).ok_or_else(|| anyhow!("{x} not in dictionary"))?;
                let d = decisions[before.ballot_id.as_str()]
                    .iter()
                    .find(|d| d.line_position == pos)
                    .ok_or_else(|| anyhow!("no decision for {} line {pos}", before.ballot_id))?;
                let logged = confusion_record(d).is_some_and(|r| log.contains(r.as_str()));
                tally_pair_outcome(&mut seen, d, truth, &entries, logged);
            }
        }
        let sweep = similar_pair_sweep(&corpus.lexicon, &ctx.cfg)?;
        checks.push(Check::info(format!("misspelled_lines[{v}]"), seen.lines, "50"));
        if ids {
            checks.push(Check::gate(
                format!("misspelled_confident_correct[{v}]"),
                format!("{} of {}", seen.confident_correct, seen.lines),
                "all",
                seen.lines > 0 && seen.confident_correct == seen.lines,
            ));
            checks.push(Check::gate(
                format!("sweep_confident_correct[{v}]"),
                format!("{} of {}", sweep.confident_correct, sweep.lines),
                "all",
                sweep.lines > 0 && sweep.confident_correct == sweep.lines,
            ));
            checks.push(Check::gate(
                format!("iocr_line_accuracy[{v}]"),
                fmt6(s.iocr.line_accuracy),
                "1.000000",
                s.iocr.line_accuracy == 1.0,
            ));
        } else {
            checks.push(Check::gate(
                format!("misspelled_in_confusion_log[{v}]"),
                format!("{} of {}", seen.logged_with_both, seen.lines),
                "all, both names listed",
                seen.lines > 0 && seen.logged_with_both == seen.lines,
            ));
            checks.push(Check::gate(
                format!("sweep_in_confusion_log[{v}]"),
                format!("{} of {}", sweep.logged_with_both, sweep.lines),
                "all, both names listed",
                sweep.lines > 0 && sweep.logged_with_both == sweep.lines,
            ));
            checks.push(Check::info(
                format!("iocr_line_accuracy[{v}]"),
                fmt6(s.iocr.line_accuracy),
                "misspelled lines held for review",
            ));
        }
        let mistallied = s.iocr.mistallied_lines + sweep.mistallied;
        checks.push(Check::gate(format!("mistallied_lines[{v}]"), mistallied, 0, mistallied == 0));
    }
    Ok(checks)
}
