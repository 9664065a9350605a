use std::fmt;

use anyhow::{anyhow, bail, Result};
use iocr::lexicon::{build_contest_index, validate_lexicon};
use iocr::matcher::MatcherConfig;
use iocr::stats::{one_way_anova, paired_t_test, SampleGroup};
use iocr::synth::{generate_ballots, BallotSpec, ErrorMix, NoiseModel, QualityLevel};
use iocr::tally::score_raw;

use crate::args::{BenchArgs, CorruptArgs, ExperimentArgs, GenerateArgs, MatcherArgs, StatsArgs, TallyArgs, ValidateArgs};
use crate::bench::run_bench;
use crate::experiments::run_experiment;
use crate::files;
use crate::pipeline::{raw_texts, run_ballots, write_outputs};

/// Invalid argument values that the parser cannot catch.
#[derive(Debug)]
pub struct UsageError(pub String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Ok,
    /// An experiment ran but did not reproduce the expected figures.
    Mismatch,
}

fn matcher_config(args: &MatcherArgs) -> Result<MatcherConfig> {
    args.to_config().map_err(|e| UsageError(e.to_string()).into())
}

pub fn generate(args: &GenerateArgs) -> Result<Outcome> {
    let mut spec = BallotSpec::mock_election(!args.no_ids, args.seed);
    spec.id_d_min = args.id_d_min;
    if args.similar_pair {
        spec = spec.with_similar_pair();
    }
    let corpus = generate_ballots(&spec)?;
    files::write(&args.out, "dictionary.txt", &corpus.lexicon.to_dictionary_text())?;
    files::write(&args.out, "manifest.json", &(corpus.truth.to_json() + "\n"))?;
    let n = files::write_ballots(&args.out.join("ballots"), &corpus.ballots)?;
    files::write_run_config(&args.out, "generate", args, None)?;
    println!("wrote {n} ballots to {}", args.out.join("ballots").display());
    Ok(Outcome::Ok)
}

pub fn corrupt(args: &CorruptArgs) -> Result<Outcome> {
    let mix = if args.no_first_char {
        ErrorMix::without_first_char()
    } else {
        ErrorMix::default()
    };
    let rate = match (&args.quality, args.rate) {
        (Some(q), _) => {
            let pct: u32 = q.parse()?;
            QualityLevel::from_percent(pct)
                .ok_or_else(|| UsageError(format!("unsupported quality {pct}")))?
                .calibrated_line_error_rate()
        }
        (None, Some(r)) => r,
        (None, None) => return Err(UsageError("one of --quality or --rate is required".into()).into()),
    };
    let model = NoiseModel::new(rate, mix, args.seed).map_err(|e| UsageError(e.to_string()))?;
    let ballots = files::read_ballot_dir(&args.ballots)?;
    let mut noisy = Vec::with_capacity(ballots.len());
    for b in &ballots {
        let text = b
            .text
            .as_deref()
            .ok_or_else(|| anyhow!("ballot {} is not UTF-8 text", b.ballot_id))?;
        noisy.push((b.ballot_id.clone(), iocr::synth::inject_noise(text, &model.for_ballot(&b.ballot_id))?));
    }
    let n = files::write_ballot_dir(&args.out, noisy)?;
    files::write_run_config(&args.out, "corrupt", args, None)?;
    println!("wrote {n} corrupted ballots to {}", args.out.display());
    Ok(Outcome::Ok)
}

pub fn tally(args: &TallyArgs) -> Result<Outcome> {
    let cfg = matcher_config(&args.matcher)?;
    if args.shards == 0 {
        return Err(UsageError("--shards must be at least 1".into()).into());
    }
    let lexicon = files::read_dictionary(&args.dictionary)?;
    let truth = args.manifest.as_deref().map(files::read_manifest).transpose()?;
    let ballots = files::read_ballot_dir(&args.ballots)?;
    let index = build_contest_index(&lexicon);
    let run = run_ballots(&index, &cfg, &ballots, args.shards)?;
    let mut reports = Vec::new();
    if let Some(truth) = &truth {
        reports.push(run.score("iocr", truth)?);
        reports.push(score_raw("raw", &raw_texts(&ballots), truth)?);
    }
    write_outputs(&args.out, &run, &reports.iter().collect::<Vec<_>>())?;
    files::write_run_config(&args.out, "tally", args, Some(&cfg))?;
    let unreadable = run.unreadable_ballots();
    println!(
        "ballots={}\tdecisions={}\tconfusion={}\tunreadable_lines={}\tunreadable_ballots={unreadable}",
        ballots.len(),
        run.tally.total_decisions(),
        run.tally.confusion_count(),
        run.tally.unreadable_count()
    );
    for r in &reports {
        println!("{}\tline_accuracy={:.6}\tmistallied={}", r.label, r.line_accuracy, r.mistallied_lines);
    }
    if unreadable > args.max_unreadable {
        bail!("{unreadable} unreadable ballots exceed the limit of {}", args.max_unreadable);
    }
    Ok(Outcome::Ok)
}

pub fn bench(args: &BenchArgs) -> Result<Outcome> {
    let k = usize::from(args.max_distance);
    let result = run_bench(args.dict_size, args.queries, args.norvig_queries, k, args.seed)?;
    let table = result.to_tsv();
    match &args.out {
        Some(path) => {
            let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(std::path::Path::new("."));
            let name = path.file_name().ok_or_else(|| UsageError("--out needs a file name".into()))?;
            files::write(dir, &name.to_string_lossy(), &table)?;
            files::write_run_config(dir, "bench", args, None)?;
        }
        None => print!("{table}"),
    }
    if result.mismatches > 0 {
        bail!("{} queries where SymSpell disagreed with the brute-force scan", result.mismatches);
    }
    Ok(Outcome::Ok)
}

pub fn stats(args: &StatsArgs) -> Result<Outcome> {
    println!("test\tstatistic\tdf\tp_value");
    if !args.anova.is_empty() {
        let groups = args
            .anova
            .iter()
            .map(|p| {
                let r = files::read_report(p)?;
                Ok(SampleGroup::new(r.label.clone(), r.per_ballot_accuracy()))
            })
            .collect::<Result<Vec<_>>>()?;
        let a = one_way_anova(&groups)?;
        println!("anova\t{:.6}\t{},{}\t{:.6e}", a.f, a.df_between, a.df_within, a.p_value);
    } else {
        let a = files::read_report(&args.paired[0])?;
        let b = files::read_report(&args.paired[1])?;
        let ids = |r: &iocr::tally::AccuracyReport| r.per_ballot.iter().map(|x| x.ballot_id.clone()).collect::<Vec<_>>();
        if ids(&a) != ids(&b) {
            bail!("{} and {} cover different ballots", a.label, b.label);
        }
        let t = paired_t_test(&a.per_ballot_accuracy(), &b.per_ballot_accuracy())?;
        println!("paired_t\t{:.6}\t{}\t{:.6e}", t.t, t.df, t.p_value);
    }
    Ok(Outcome::Ok)
}

pub fn experiment(args: &ExperimentArgs) -> Result<Outcome> {
    matcher_config(&args.matcher)?;
    let report = run_experiment(args)?;
    print!("{}", report.summary());
    Ok(if report.passed() { Outcome::Ok } else { Outcome::Mismatch })
}

pub fn lexicon_validate(args: &ValidateArgs) -> Result<Outcome> {
    let lexicon = files::read_dictionary(&args.dictionary)?;
    let report = validate_lexicon(&lexicon);
    print!("{}", report.to_tsv());
    if let Some(d) = args.min_distance {
        if !report.passes(d) {
            bail!(
                "minimum separation {} is below the required {d}",
                report.min_distance().map_or("-".into(), |m| m.to_string())
            );
        }
    }
    Ok(Outcome::Ok)
}
