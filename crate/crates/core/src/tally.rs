//! Vote tallies and accuracy scoring against hand-counted ground truth.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::lexicon::ContestIndex;
use crate::matcher::{escape_field, DecisionKind, MatchDecision};
use crate::similarity::levenshtein_distance;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TallyError {
    #[error("cannot merge tallies built against different dictionaries ({0} vs {1})")]
    FingerprintMismatch(String, String),
    #[error("ballot {0} is not in the ground truth")]
    UnknownBallot(String),
}

/// Per-candidate vote counts. Tallies form a commutative monoid under
/// [`Tally::merge`] with [`Tally::default`] as identity.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Tally {
    fingerprint: Option<String>,
    counts: BTreeMap<(usize, String), u64>,
    writeins: BTreeMap<(usize, String), u64>,
    confusion_count: u64,
    unreadable_count: u64,
}

impl Tally {
    /// Empty tally bound to a dictionary.
    pub fn for_index(index: &ContestIndex) -> Self {
        Self {
            fingerprint: Some(index.fingerprint().to_string()),
            ..Self::default()
        }
    }

    pub fn fingerprint(&self) -> Option<&str> {
        self.fingerprint.as_deref()
    }

    pub fn counts(&self) -> &BTreeMap<(usize, String), u64> {
        &self.counts
    }

    pub fn writeins(&self) -> &BTreeMap<(usize, String), u64> {
        &self.writeins
    }

    pub fn confusion_count(&self) -> u64 {
        self.confusion_count
    }

    pub fn unreadable_count(&self) -> u64 {
        self.unreadable_count
    }

    pub fn votes(&self, contest_index: usize, canonical_line: &str) -> u64 {
        self.counts
            .get(&(contest_index, canonical_line.to_string()))
            .copied()
            .unwrap_or(0)
    }

    /// Every decision lands in exactly one counter.
    pub fn total_decisions(&self) -> u64 {
        self.counts.values().sum::<u64>()
            + self.writeins.values().sum::<u64>()
            + self.confusion_count
            + self.unreadable_count
    }

    pub fn accumulate<'d>(&self, decisions: impl IntoIterator<Item = &'d MatchDecision>) -> Tally {
        let mut out = self.clone();
        out.add(decisions);
        out
    }

    pub fn add<'d>(&mut self, decisions: impl IntoIterator<Item = &'d MatchDecision>) {
        for d in decisions {
            match d.kind {
                DecisionKind::Confident => {
                    let e = d.matched_entry.as_ref().expect("confident decisions carry an entry");
                    *self
                        .counts
                        .entry((e.contest_index, e.canonical_line.clone()))
                        .or_default() += 1;
                }
                DecisionKind::WriteIn => {
                    let text = d.captured_text.clone().unwrap_or_default();
                    *self.writeins.entry((d.line_position, text)).or_default() += 1;
                }
                DecisionKind::Confusion => self.confusion_count += 1,
                DecisionKind::Unreadable => self.unreadable_count += 1,
            }
        }
    }

    pub fn merge(&self, other: &Tally) -> Result<Tally, TallyError> {
        let fingerprint = match (&self.fingerprint, &other.fingerprint) {
            (Some(a), Some(b)) if a != b => {
                return Err(TallyError::FingerprintMismatch(a.clone(), b.clone()));
            }
            (a, b) => a.clone().or_else(|| b.clone()),
        };
        let mut out = Tally {
            fingerprint,
            counts: self.counts.clone(),
            writeins: self.writeins.clone(),
            confusion_count: self.confusion_count + other.confusion_count,
            unreadable_count: self.unreadable_count + other.unreadable_count,
        };
        for (k, v) in &other.counts {
            *out.counts.entry(k.clone()).or_default() += v;
        }
        for (k, v) in &other.writeins {
            *out.writeins.entry(k.clone()).or_default() += v;
        }
        Ok(out)
    }

    /// The tally a perfect reader would produce.
    pub fn from_truth(truth: &GroundTruth) -> Tally {
        let mut out = Tally::default();
        for lines in truth.ballots.values() {
            for (pos, expected) in lines.iter().enumerate() {
                match expected {
                    ExpectedLine::Candidate(line) => {
                        *out.counts.entry((pos, line.clone())).or_default() += 1;
                    }
                    ExpectedLine::WriteIn(text) => {
                        *out.writeins.entry((pos, text.clone())).or_default() += 1;
                    }
                }
            }
        }
        out
    }

    /// Election results text. Rows are ordered by contest, then votes
    /// descending, then selection text.
    pub fn report(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "# iocr tally\ttotal={}\tconfusion={}\tunreadable={}",
            self.total_decisions(),
            self.confusion_count,
            self.unreadable_count
        );
        let _ = writeln!(out, "contest_index\tkind\tselection\tvotes");
        let mut rows: Vec<(usize, &str, &str, u64)> = self
            .counts
            .iter()
            .map(|((c, line), v)| (*c, "candidate", line.as_str(), *v))
            .chain(
                self.writeins
                    .iter()
                    .map(|((c, text), v)| (*c, "write-in", text.as_str(), *v)),
            )
            .collect();
        rows.sort_by(|a, b| a.0.cmp(&b.0).then(b.3.cmp(&a.3)).then(a.2.cmp(b.2)).then(a.1.cmp(b.1)));
        for (c, kind, selection, votes) in rows {
            let _ = writeln!(out, "{c}\t{kind}\t{}\t{votes}", escape_field(selection));
        }
        out
    }
}

/// What the hand count says a ballot line is.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExpectedLine {
    Candidate(String),
    WriteIn(String),
}

impl ExpectedLine {
    pub fn text(&self) -> &str {
        match self {
            ExpectedLine::Candidate(s) | ExpectedLine::WriteIn(s) => s,
        }
    }
}

/// Hand-tallied outcome of every ballot, keyed by ballot ID.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroundTruth {
    pub lines_per_ballot: usize,
    pub ballots: BTreeMap<String, Vec<ExpectedLine>>,
}

impl GroundTruth {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("ground truth serializes")
    }

    pub fn from_json(text: &str) -> serde_json::Result<Self> {
        serde_json::from_str(text)
    }

    pub fn merge(&mut self, other: GroundTruth) {
        self.lines_per_ballot = self.lines_per_ballot.max(other.lines_per_ballot);
        self.ballots.extend(other.ballots);
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScoringOptions {
    /// Score confusion lines as correct when the expected entry is among the
    /// logged candidates (what-if analysis of human adjudication).
    pub confusion_as_resolved: bool,
    /// Maximum edit distance between captured and expected write-in text.
    pub writein_edit_tolerance: usize,
}

impl Default for ScoringOptions {
    fn default() -> Self {
        Self {
            confusion_as_resolved: false,
            writein_edit_tolerance: 2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BallotAccuracy {
    pub ballot_id: String,
    pub correct: usize,
    pub total: usize,
    pub accuracy: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AccuracyReport {
    pub label: String,
    pub total_lines: usize,
    pub correct_lines: usize,
    pub line_accuracy: f64,
    pub confusion_lines: usize,
    /// Lines tallied to the wrong selection without review.
    pub mistallied_lines: usize,
    pub per_ballot: Vec<BallotAccuracy>,
}

impl AccuracyReport {
    fn from_ballots(label: &str, mut per_ballot: Vec<BallotAccuracy>, confusion_lines: usize, mistallied_lines: usize) -> Self {
        per_ballot.sort_by(|a, b| a.ballot_id.cmp(&b.ballot_id));
        let total_lines = per_ballot.iter().map(|b| b.total).sum();
        let correct_lines = per_ballot.iter().map(|b| b.correct).sum();
        Self {
            label: label.to_string(),
            total_lines,
            correct_lines,
            line_accuracy: ratio(correct_lines, total_lines),
            confusion_lines,
            mistallied_lines,
            per_ballot,
        }
    }

    pub fn per_ballot_accuracy(&self) -> Vec<f64> {
        self.per_ballot.iter().map(|b| b.accuracy).collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn from_json(text: &str) -> serde_json::Result<Self> {
        serde_json::from_str(text)
    }

    /// Summary line followed by one row per ballot.
    pub fn to_tsv(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "label\ttotal_lines\tcorrect_lines\tline_accuracy\tconfusion_lines\tmistallied_lines");
        let _ = writeln!(
            out,
            "{}\t{}\t{}\t{:.6}\t{}\t{}",
            self.label, self.total_lines, self.correct_lines, self.line_accuracy, self.confusion_lines, self.mistallied_lines
        );
        let _ = writeln!(out, "ballot_id\tcorrect\ttotal\taccuracy");
        for b in &self.per_ballot {
            let _ = writeln!(out, "{}\t{}\t{}\t{:.6}", b.ballot_id, b.correct, b.total, b.accuracy);
        }
        out
    }
}

fn ratio(num: usize, den: usize) -> f64 {
    if den == 0 {
        1.0
    } else {
        num as f64 / den as f64
    }
}

/// Scores iOCR decisions against the ground truth. A line is correct when it
/// was tallied to the expected entry, or captured as a write-in within the
/// configured edit tolerance of the expected write-in text.
pub fn score(
    label: &str,
    decisions: &[(String, Vec<MatchDecision>)],
    truth: &GroundTruth,
    opts: &ScoringOptions,
) -> Result<AccuracyReport, TallyError> {
    let mut per_ballot = Vec::with_capacity(decisions.len());
    let (mut confusion, mut mistallied) = (0, 0);
    for (ballot_id, ds) in decisions {
        let expected = truth
            .ballots
            .get(ballot_id)
            .ok_or_else(|| TallyError::UnknownBallot(ballot_id.clone()))?;
        let mut correct = 0;
        for (pos, exp) in expected.iter().enumerate() {
            let Some(d) = ds.iter().find(|d| d.line_position == pos) else {
                continue;
            };
            let ok = match (d.kind, exp) {
                (DecisionKind::Confident, ExpectedLine::Candidate(line)) => {
                    d.matched_entry.as_ref().is_some_and(|e| &e.canonical_line == line)
                }
                (DecisionKind::WriteIn, ExpectedLine::WriteIn(text)) => d
                    .captured_text
                    .as_deref()
                    .is_some_and(|c| levenshtein_distance(c, text) <= opts.writein_edit_tolerance),
                (DecisionKind::Confusion, ExpectedLine::Candidate(line)) => {
                    opts.confusion_as_resolved && d.candidates.iter().any(|c| &c.entry.canonical_line == line)
                }
                _ => false,
            };
            if d.kind == DecisionKind::Confusion {
                confusion += 1;
            }
            if d.kind == DecisionKind::Confident && !ok {
                mistallied += 1;
            }
            correct += usize::from(ok);
        }
        per_ballot.push(BallotAccuracy {
            ballot_id: ballot_id.clone(),
            correct,
            total: expected.len(),
            accuracy: ratio(correct, expected.len()),
        });
    }
    Ok(AccuracyReport::from_ballots(label, per_ballot, confusion, mistallied))
}

/// Scores raw OCR text with no post-processing: after dropping blank lines,
/// line `i` is correct only if it equals the expected text exactly.
pub fn score_raw(label: &str, raw: &[(String, String)], truth: &GroundTruth) -> Result<AccuracyReport, TallyError> {
    let mut per_ballot = Vec::with_capacity(raw.len());
    for (ballot_id, text) in raw {
        let expected = truth
            .ballots
            .get(ballot_id)
            .ok_or_else(|| TallyError::UnknownBallot(ballot_id.clone()))?;
        let lines: Vec<&str> = text.lines().map(str::trim).filter(|l| !l.is_empty()).collect();
        let correct = expected
            .iter()
            .zip(&lines)
            .filter(|(exp, got)| exp.text() == **got)
            .count();
        per_ballot.push(BallotAccuracy {
            ballot_id: ballot_id.clone(),
            correct,
            total: expected.len(),
            accuracy: ratio(correct, expected.len()),
        });
    }
    Ok(AccuracyReport::from_ballots(label, per_ballot, 0, 0))
}
