use std::path::Path;

use anyhow::{anyhow, Result};
use iocr::lexicon::{build_contest_index, ContestIndex, Lexicon};
use iocr::matcher::{confusion_log, DecisionKind, MatchDecision, Matcher, MatcherConfig};
use iocr::tally::{score, score_raw, AccuracyReport, GroundTruth, ScoringOptions, Tally};
use rayon::prelude::*;

use crate::files::{self, BallotFile};

/// Decisions for a batch of ballots and the tally they add up to.
#[derive(Debug, Clone)]
pub struct Run {
    pub decisions: Vec<(String, Vec<MatchDecision>)>,
    pub tally: Tally,
}

impl Run {
    pub fn all_decisions(&self) -> impl Iterator<Item = &MatchDecision> {
        self.decisions.iter().flat_map(|(_, ds)| ds)
    }

    pub fn confusion_log(&self) -> String {
        confusion_log(self.all_decisions())
    }

    /// Ballots that did not fit the layout at all.
    pub fn unreadable_ballots(&self) -> usize {
        self.decisions
            .iter()
            .filter(|(_, ds)| !ds.is_empty() && ds.iter().all(|d| d.kind == DecisionKind::Unreadable))
            .count()
    }

    pub fn score(&self, label: &str, truth: &GroundTruth) -> Result<AccuracyReport> {
        Ok(score(label, &self.decisions, truth, &ScoringOptions::default())?)
    }
}

/// Matches ballots in parallel, tallies `shards` contiguous slices
/// independently, and merges the partial tallies. The result does not depend
/// on the shard count.
pub fn run_ballots(index: &ContestIndex, cfg: &MatcherConfig, ballots: &[BallotFile], shards: usize) -> Result<Run> {
    let matcher = Matcher::new(index, cfg.clone())?;
    let decisions: Vec<(String, Vec<MatchDecision>)> = ballots
        .par_iter()
        .map(|b| {
            let text = b.text.as_deref().unwrap_or("");
            let ds = matcher.resolve_ballot(text, &b.ballot_id)?;
            Ok((b.ballot_id.clone(), ds))
        })
        .collect::<Result<_, iocr::matcher::MatchError>>()?;
    let empty = Tally::for_index(index);
    let chunk = decisions.len().div_ceil(shards.max(1)).max(1);
    let partial: Vec<Tally> = decisions
        .par_chunks(chunk)
        .map(|c| empty.accumulate(c.iter().flat_map(|(_, ds)| ds)))
        .collect();
    let tally = partial
        .iter()
        .try_fold(empty.clone(), |acc, t| acc.merge(t))
        .map_err(|e| anyhow!("{e}"))?;
    Ok(Run { decisions, tally })
}

pub fn texts_to_files(texts: &[(String, String)]) -> Vec<BallotFile> {
    texts
        .iter()
        .map(|(id, t)| BallotFile {
            ballot_id: id.clone(),
            text: Some(t.clone()),
        })
        .collect()
}

pub fn raw_texts(ballots: &[BallotFile]) -> Vec<(String, String)> {
    ballots
        .iter()
        .map(|b| (b.ballot_id.clone(), b.text.clone().unwrap_or_default()))
        .collect()
}

/// iOCR and raw-baseline results of one ballot set.
#[derive(Debug, Clone)]
pub struct Scored {
    pub run: Run,
    pub iocr: AccuracyReport,
    pub raw: AccuracyReport,
}

pub fn run_and_score(
    lexicon: &Lexicon,
    cfg: &MatcherConfig,
    texts: &[(String, String)],
    truth: &GroundTruth,
    label: &str,
) -> Result<Scored> {
    let index = build_contest_index(lexicon);
    let run = run_ballots(&index, cfg, &texts_to_files(texts), rayon::current_num_threads())?;
    let iocr = run.score(&format!("{label}/iocr"), truth)?;
    let raw = score_raw(&format!("{label}/raw"), texts, truth)?;
    Ok(Scored { run, iocr, raw })
}

/// Tally report, confusion log and, given the truth, both accuracy reports.
pub fn write_outputs(dir: &Path, run: &Run, reports: &[&AccuracyReport]) -> Result<()> {
    files::write(dir, "results.txt", &run.tally.report())?;
    files::write(dir, "confusion.tsv", &run.confusion_log())?;
    for r in reports {
        let stem = if r.label.ends_with("raw") { "raw_accuracy" } else { "accuracy" };
        files::write(dir, &format!("{stem}.json"), &(r.to_json() + "\n"))?;
        files::write(dir, &format!("{stem}.tsv"), &r.to_tsv())?;
    }
    Ok(())
}
