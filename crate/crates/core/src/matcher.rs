//! Informed OCR matching.
//!
//! Raw OCR text is cleaned into ballot lines; each line is scored against its
//! contest's dictionary entries with both Levenshtein distance and
//! Jaro-Winkler similarity. A line is only tallied when both metrics pick the
//! same unique entry. Ties and disagreements go to the confusion log for
//! human review, and lines far from every entry become write-ins.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::lexicon::{ContestIndex, LexiconEntry};
use crate::similarity::{
    levenshtein_chars, similarity_from_distance, JaroWinkler, SimilarityError, SimilarityScore,
    DEFAULT_MAX_PREFIX, DEFAULT_PREFIX_WEIGHT,
};

/// Floating-point slack when comparing Jaro-Winkler maxima.
pub const JW_TIE_EPSILON: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MatchError {
    #[error(transparent)]
    Similarity(#[from] SimilarityError),
    #[error("contest {0} has no dictionary entries")]
    EmptyGroup(usize),
    #[error("ballot line {0} has no matching contest in the dictionary")]
    MissingGroup(usize),
    #[error("dictionary is empty")]
    EmptyIndex,
}

/// The OCR output could not be split into the expected ballot layout.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("ballot {ballot_id}: expected {expected} lines after cleaning, found {found}")]
pub struct StructuralError {
    pub ballot_id: String,
    pub expected: usize,
    pub found: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatcherConfig {
    pub prefix_weight: f64,
    pub max_prefix: usize,
    pub writein_threshold_lev: SimilarityScore,
    pub writein_threshold_jw: SimilarityScore,
    /// Lines with fewer alphanumeric characters are OCR garbage.
    pub garbage_min_alnum: usize,
    pub case_fold: bool,
    /// Route line `i` to contest `i` instead of scanning every contest.
    pub position_keyed: bool,
    /// Collapse internal whitespace runs before matching.
    pub collapse_whitespace: bool,
}

impl Default for MatcherConfig {
    fn default() -> Self {
        Self {
            prefix_weight: DEFAULT_PREFIX_WEIGHT,
            max_prefix: DEFAULT_MAX_PREFIX,
            writein_threshold_lev: SimilarityScore::new(0.65).unwrap(),
            writein_threshold_jw: SimilarityScore::new(0.75).unwrap(),
            garbage_min_alnum: 3,
            case_fold: false,
            position_keyed: true,
            collapse_whitespace: false,
        }
    }
}

impl MatcherConfig {
    pub fn jaro_winkler(&self) -> Result<JaroWinkler, SimilarityError> {
        JaroWinkler::new(self.prefix_weight, self.max_prefix)
    }
}

/// One cleaned line of OCR output.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BallotLine {
    pub ballot_id: String,
    pub line_position: usize,
    pub raw_text: String,
    pub cleaned_text: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum DecisionKind {
    Confident,
    Confusion,
    WriteIn,
    Unreadable,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ConfusionReason {
    MetricDisagreement,
    LevenshteinTie,
    JaroWinklerTie,
}

impl ConfusionReason {
    pub fn as_str(self) -> &'static str {
        match self {
            ConfusionReason::MetricDisagreement => "MetricDisagreement",
            ConfusionReason::LevenshteinTie => "LevenshteinTie",
            ConfusionReason::JaroWinklerTie => "JaroWinklerTie",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoredCandidate {
    pub entry: LexiconEntry,
    pub distance: usize,
    pub lev_similarity: SimilarityScore,
    pub jw_similarity: SimilarityScore,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatchDecision {
    pub ballot_id: String,
    pub line_position: usize,
    pub raw_text: String,
    pub kind: DecisionKind,
    pub matched_entry: Option<LexiconEntry>,
    pub candidates: Vec<ScoredCandidate>,
    pub reason: Option<ConfusionReason>,
    pub captured_text: Option<String>,
}

impl MatchDecision {
    fn unreadable(ballot_id: &str, line_position: usize, raw_text: String) -> Self {
        Self {
            ballot_id: ballot_id.to_string(),
            line_position,
            raw_text,
            kind: DecisionKind::Unreadable,
            matched_entry: None,
            candidates: Vec::new(),
            reason: None,
            captured_text: None,
        }
    }

    pub fn is_confident(&self) -> bool {
        self.kind == DecisionKind::Confident
    }

    /// Whether this decision belongs in the human-review log.
    pub fn needs_review(&self) -> bool {
        matches!(self.kind, DecisionKind::Confusion | DecisionKind::Unreadable)
    }
}

fn alnum_count(s: &str) -> usize {
    s.chars().filter(|c| c.is_alphanumeric()).count()
}

fn collapse(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join(" ")
}

/// Drops blank and garbage lines, trims the rest and numbers them.
pub fn clean_lines(
    raw_ocr_text: &str,
    ballot_id: &str,
    lines_per_ballot: usize,
    cfg: &MatcherConfig,
) -> Result<Vec<BallotLine>, StructuralError> {
    let lines: Vec<BallotLine> = raw_ocr_text
        .lines()
        .filter_map(|raw| {
            let trimmed = raw.trim();
            if trimmed.is_empty() || alnum_count(trimmed) < cfg.garbage_min_alnum {
                return None;
            }
            let cleaned = if cfg.collapse_whitespace {
                collapse(trimmed)
            } else {
                trimmed.to_string()
            };
            Some((raw.to_string(), cleaned))
        })
        .enumerate()
        .map(|(line_position, (raw_text, cleaned_text))| BallotLine {
            ballot_id: ballot_id.to_string(),
            line_position,
            raw_text,
            cleaned_text,
        })
        .collect();
    let structural = lines.is_empty() || (cfg.position_keyed && lines.len() != lines_per_ballot);
    if structural {
        return Err(StructuralError {
            ballot_id: ballot_id.to_string(),
            expected: lines_per_ballot,
            found: lines.len(),
        });
    }
    Ok(lines)
}

struct Prepared<'a> {
    entry: &'a LexiconEntry,
    chars: Vec<char>,
    /// Length of the `<index>. <title>: ` prefix shared by the contest.
    prefix_len: usize,
}

/// Matcher bound to one contest index and configuration.
pub struct Matcher<'a> {
    index: &'a ContestIndex,
    cfg: MatcherConfig,
    jw: JaroWinkler,
    groups: Vec<Vec<Prepared<'a>>>,
}

impl<'a> Matcher<'a> {
    pub fn new(index: &'a ContestIndex, cfg: MatcherConfig) -> Result<Self, MatchError> {
        let jw = cfg.jaro_winkler()?;
        for t in [cfg.writein_threshold_lev, cfg.writein_threshold_jw] {
            SimilarityScore::new(t.value())?;
        }
        if index.contest_count() == 0 {
            return Err(MatchError::EmptyIndex);
        }
        let groups = (0..=index.groups().keys().copied().max().unwrap_or(0))
            .map(|c| {
                index
                    .group(c)
                    .unwrap_or(&[])
                    .iter()
                    .map(|entry| Prepared {
                        entry,
                        chars: normalize(&entry.canonical_line, &cfg),
                        prefix_len: format!("{}. {}: ", entry.contest_index, entry.contest_title)
                            .chars()
                            .count(),
                    })
                    .collect()
            })
            .collect();
        Ok(Self {
            index,
            cfg,
            jw,
            groups,
        })
    }

    pub fn config(&self) -> &MatcherConfig {
        &self.cfg
    }

    pub fn lines_per_ballot(&self) -> usize {
        self.index.contest_count()
    }

    pub fn match_line(&self, line: &BallotLine) -> Result<MatchDecision, MatchError> {
        let pool: Vec<&Prepared<'a>> = if self.cfg.position_keyed {
            let group = self
                .groups
                .get(line.line_position)
                .filter(|_| self.index.group(line.line_position).is_some())
                .ok_or(MatchError::MissingGroup(line.line_position))?;
            if group.is_empty() {
                return Err(MatchError::EmptyGroup(line.line_position));
            }
            group.iter().collect()
        } else {
            self.groups.iter().flatten().collect()
        };

        let text = normalize(&line.cleaned_text, &self.cfg);
        let scored: Vec<ScoredCandidate> = pool
            .iter()
            .map(|p| {
                let distance = levenshtein_chars(&text, &p.chars);
                ScoredCandidate {
                    entry: p.entry.clone(),
                    distance,
                    lev_similarity: similarity_from_distance(distance, text.len().max(p.chars.len())),
                    jw_similarity: self.jw.similarity_chars(&text, &p.chars),
                }
            })
            .collect();
        Ok(self.decide(line, &text, &pool, scored))
    }

    /// Similarities of the selection segments, ignoring the contest prefix
    /// that every entry of a group shares.
    fn segment_scores(&self, text: &[char], p: &Prepared<'_>) -> (SimilarityScore, SimilarityScore) {
        let entry_sel = &p.chars[p.prefix_len.min(p.chars.len())..];
        let line_sel = &text[p.prefix_len.min(text.len())..];
        let lev = similarity_from_distance(
            levenshtein_chars(line_sel, entry_sel),
            line_sel.len().max(entry_sel.len()),
        );
        (lev, self.jw.similarity_chars(line_sel, entry_sel))
    }

    fn below_thresholds(&self, (lev, jw): (SimilarityScore, SimilarityScore)) -> (bool, bool) {
        (lev < self.cfg.writein_threshold_lev, jw < self.cfg.writein_threshold_jw)
    }

    /// A line is a write-in only when it is far from every entry of its pool
    /// under both metrics.
    fn is_write_in(&self, text: &[char], pool: &[&Prepared<'_>]) -> bool {
        pool.iter()
            .all(|p| self.below_thresholds(self.segment_scores(text, p)) == (true, true))
    }

    fn decide(
        &self,
        line: &BallotLine,
        text: &[char],
        pool: &[&Prepared<'a>],
        scored: Vec<ScoredCandidate>,
    ) -> MatchDecision {
        let min_distance = scored.iter().map(|c| c.distance).min().expect("pool is non-empty");
        let max_jw = scored
            .iter()
            .map(|c| c.jw_similarity.value())
            .fold(f64::NEG_INFINITY, f64::max);
        let lev_best: Vec<usize> = (0..scored.len())
            .filter(|&i| scored[i].distance == min_distance)
            .collect();
        let jw_best: Vec<usize> = (0..scored.len())
            .filter(|&i| max_jw - scored[i].jw_similarity.value() <= JW_TIE_EPSILON)
            .collect();

        let mut decision = MatchDecision {
            ballot_id: line.ballot_id.clone(),
            line_position: line.line_position,
            raw_text: line.raw_text.clone(),
            kind: DecisionKind::Confusion,
            matched_entry: None,
            candidates: Vec::new(),
            reason: None,
            captured_text: None,
        };
        let pick = |ids: &[usize]| ids.iter().map(|&i| scored[i].clone()).collect::<Vec<_>>();

        // A line far from every entry has no meaningful argmin or argmax, so
        // the write-in gate runs before the agreement checks.
        if self.is_write_in(text, pool) {
            decision.kind = DecisionKind::WriteIn;
            decision.captured_text = Some(line.cleaned_text.clone());
            let mut closest = vec![lev_best[0]];
            if !lev_best.contains(&jw_best[0]) {
                closest.push(jw_best[0]);
            }
            decision.candidates = pick(&closest);
            return decision;
        }
        if lev_best.len() >= 2 {
            decision.reason = Some(ConfusionReason::LevenshteinTie);
            decision.candidates = pick(&lev_best);
            return decision;
        }
        if jw_best.len() >= 2 {
            decision.reason = Some(ConfusionReason::JaroWinklerTie);
            decision.candidates = pick(&jw_best);
            return decision;
        }
        let (best_l, best_j) = (lev_best[0], jw_best[0]);
        if best_l != best_j {
            decision.reason = Some(ConfusionReason::MetricDisagreement);
            decision.candidates = pick(&[best_l, best_j]);
            return decision;
        }

        // The agreed entry is far under one metric only: neither a safe
        // match nor a clear write-in.
        let (lev_far, jw_far) = self.below_thresholds(self.segment_scores(text, pool[best_l]));
        if lev_far || jw_far {
            decision.reason = Some(ConfusionReason::MetricDisagreement);
            let runner_up = (0..scored.len())
                .filter(|&i| i != best_l)
                .min_by_key(|&i| scored[i].distance);
            decision.candidates = pick(&std::iter::once(best_l).chain(runner_up).collect::<Vec<_>>());
            return decision;
        }

        let best = scored[best_l].clone();
        decision.kind = DecisionKind::Confident;
        decision.matched_entry = Some(best.entry.clone());
        decision.candidates = vec![best];
        decision
    }

    /// Cleans and matches a whole ballot. A ballot that does not fit the
    /// layout yields one `Unreadable` decision per expected line.
    pub fn resolve_ballot(&self, raw_ocr_text: &str, ballot_id: &str) -> Result<Vec<MatchDecision>, MatchError> {
        let lines_per_ballot = self.lines_per_ballot();
        match clean_lines(raw_ocr_text, ballot_id, lines_per_ballot, &self.cfg) {
            Ok(lines) => lines.iter().map(|l| self.match_line(l)).collect(),
            Err(_) => {
                let mut surviving = raw_ocr_text.lines().filter(|l| !l.trim().is_empty());
                Ok((0..lines_per_ballot)
                    .map(|i| {
                        let raw = surviving.next().unwrap_or_default().to_string();
                        MatchDecision::unreadable(ballot_id, i, raw)
                    })
                    .collect())
            }
        }
    }
}

fn normalize(s: &str, cfg: &MatcherConfig) -> Vec<char> {
    if cfg.case_fold {
        s.chars().flat_map(char::to_lowercase).collect()
    } else {
        s.chars().collect()
    }
}

pub fn match_line(line: &BallotLine, index: &ContestIndex, cfg: &MatcherConfig) -> Result<MatchDecision, MatchError> {
    Matcher::new(index, cfg.clone())?.match_line(line)
}

pub fn resolve_ballot(
    raw_ocr_text: &str,
    ballot_id: &str,
    index: &ContestIndex,
    cfg: &MatcherConfig,
) -> Result<Vec<MatchDecision>, MatchError> {
    Matcher::new(index, cfg.clone())?.resolve_ballot(raw_ocr_text, ballot_id)
}

/// Escapes a field for the tab-separated logs: backslash, tab, CR and LF.
pub fn escape_field(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '\\' => out.push_str("\\\\"),
            '\t' => out.push_str("\\t"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            _ => out.push(c),
        }
    }
    out
}

/// One confusion-log record, or `None` for decisions that need no review.
///
/// Layout: `ballot_id`, `line_position`, `raw_text`, `reason`, then one
/// `candidate`, `lev_sim`, `jw_sim` triple per scored candidate. Similarities
/// use six decimals; unreadable lines carry the reason `Unreadable` and no
/// candidates.
pub fn confusion_record(d: &MatchDecision) -> Option<String> {
    let reason = match (d.kind, d.reason) {
        (DecisionKind::Confusion, Some(r)) => r.as_str(),
        (DecisionKind::Unreadable, _) => "Unreadable",
        _ => return None,
    };
    let mut out = format!(
        "{}\t{}\t{}\t{}",
        escape_field(&d.ballot_id),
        d.line_position,
        escape_field(&d.raw_text),
        reason
    );
    for c in &d.candidates {
        let _ = write!(
            out,
            "\t{}\t{:.6}\t{:.6}",
            escape_field(&c.entry.canonical_line),
            c.lev_similarity.value(),
            c.jw_similarity.value()
        );
    }
    Some(out)
}

/// Confusion-log text for a batch of decisions, one record per line.
pub fn confusion_log<'d>(decisions: impl IntoIterator<Item = &'d MatchDecision>) -> String {
    decisions
        .into_iter()
        .filter_map(confusion_record)
        .map(|mut r| {
            r.push('\n');
            r
        })
        .collect()
}
