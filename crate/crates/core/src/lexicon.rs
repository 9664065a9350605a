//! Election dictionaries.
//!
//! A dictionary file lists every legal ballot line, grouped by contest:
//!
//! ```text
//! #contest 0 President
//! 0. President: Tom Hale-1234 (Green)
//! 0. President: Tim Ruiz-43 (Reform)
//! #contest 1 Governor
//! 1. Governor: Ada Moss (Democratic)
//! ```
//!
//! Canonical lines follow `<contest_index>. <contest_title>: <name>[-<id>] (<party>)`.
//! Either every candidate line carries a numeric ID suffix or none does.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::seed::derive_seed;
use crate::similarity::levenshtein_distance;

/// Default minimum separation requested from [`assign_candidate_ids`].
pub const DEFAULT_ID_D_MIN: usize = 3;
/// Candidate ID lengths, in digits.
pub const ID_LENGTHS: [usize; 5] = [2, 3, 4, 5, 6];

const HEADER_KEYWORD: &str = "#contest";
const ID_ATTEMPTS_PER_CONTEST: usize = 64;
const ID_DRAWS_PER_CANDIDATE: usize = 256;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LexiconError {
    #[error("no contests in dictionary")]
    NoContests,
    #[error("line {line}: malformed contest header {text:?}: {detail}")]
    MalformedHeader {
        line: usize,
        text: String,
        detail: String,
    },
    #[error("line {line}: malformed ballot line {text:?}: {detail}")]
    MalformedLine {
        line: usize,
        text: String,
        detail: String,
    },
    #[error("line {line}: duplicate ballot line {text:?}")]
    DuplicateLine { line: usize, text: String },
    #[error("line {line}: {text:?} breaks ID consistency (dictionary mixes lines with and without candidate IDs)")]
    MixedIds { line: usize, text: String },
    #[error("contest {0} has no candidates")]
    EmptyContest(usize),
    #[error("contest indices must run 0..n without gaps; missing {0}")]
    ContestGap(usize),
    #[error("invalid entry {text:?}: {detail}")]
    InvalidEntry { text: String, detail: String },
    #[error("lexicon already carries candidate IDs")]
    AlreadyHasIds,
    #[error("d_min must be at least 1")]
    InvalidDMin,
    #[error("could not separate contest {contest} ({title}) to distance {required} after {attempts} attempts")]
    IdAssignmentFailed {
        contest: usize,
        title: String,
        required: usize,
        attempts: usize,
    },
}

/// One legal selection in one contest.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct LexiconEntry {
    pub contest_index: usize,
    pub contest_title: String,
    pub candidate_name: String,
    pub party: String,
    pub candidate_id: Option<String>,
    pub canonical_line: String,
}

impl LexiconEntry {
    pub fn new(
        contest_index: usize,
        contest_title: impl Into<String>,
        candidate_name: impl Into<String>,
        party: impl Into<String>,
        candidate_id: Option<String>,
    ) -> Result<Self, LexiconError> {
        let contest_title = contest_title.into();
        let candidate_name = candidate_name.into();
        let party = party.into();
        let canonical_line =
            render_line(contest_index, &contest_title, &candidate_name, candidate_id.as_deref(), &party);
        let invalid = |detail: &str| LexiconError::InvalidEntry {
            text: canonical_line.clone(),
            detail: detail.to_string(),
        };
        if [&contest_title, &candidate_name, &party]
            .iter()
            .any(|s| s.trim().is_empty() || s.contains(['\n', '\r']))
        {
            return Err(invalid("title, name and party must be non-empty single-line text"));
        }
        if let Some(id) = &candidate_id {
            if id.is_empty() || !id.chars().all(|c| c.is_ascii_digit()) {
                return Err(invalid("candidate ID must be a non-empty digit string"));
            }
        } else if split_id(&candidate_name).1.is_some() {
            return Err(invalid("candidate name ends in a hyphen-digit suffix"));
        }
        if contest_title.contains(": ") {
            return Err(invalid("contest title must not contain \": \""));
        }
        Ok(Self {
            contest_index,
            contest_title,
            candidate_name,
            party,
            candidate_id,
            canonical_line,
        })
    }

    /// Name as printed, including the ID suffix when present.
    pub fn printed_name(&self) -> String {
        match &self.candidate_id {
            Some(id) => format!("{}-{}", self.candidate_name, id),
            None => self.candidate_name.clone(),
        }
    }

    /// The same selection printed without a candidate ID.
    pub fn without_id(&self) -> LexiconEntry {
        self.with_id(None).expect("stripping an ID keeps an entry valid")
    }

    fn with_id(&self, id: Option<String>) -> Result<Self, LexiconError> {
        Self::new(
            self.contest_index,
            self.contest_title.clone(),
            self.candidate_name.clone(),
            self.party.clone(),
            id,
        )
    }
}

/// Renders a canonical ballot line.
pub fn render_line(
    contest_index: usize,
    contest_title: &str,
    printed_name: &str,
    candidate_id: Option<&str>,
    party: &str,
) -> String {
    match candidate_id {
        Some(id) => format!("{contest_index}. {contest_title}: {printed_name}-{id} ({party})"),
        None => format!("{contest_index}. {contest_title}: {printed_name} ({party})"),
    }
}

fn split_id(name_segment: &str) -> (&str, Option<&str>) {
    match name_segment.rsplit_once('-') {
        Some((name, id)) if !name.is_empty() && !id.is_empty() && id.chars().all(|c| c.is_ascii_digit()) => {
            (name, Some(id))
        }
        _ => (name_segment, None),
    }
}

/// All legal ballot lines of one dictionary variant.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Lexicon {
    entries: Vec<LexiconEntry>,
    with_ids: bool,
}

impl Lexicon {
    /// Checks the lexicon invariants: distinct lines, contiguous contests,
    /// consistent ID presence.
    pub fn new(entries: Vec<LexiconEntry>) -> Result<Self, LexiconError> {
        if entries.is_empty() {
            return Err(LexiconError::NoContests);
        }
        let mut seen = BTreeSet::new();
        for (i, e) in entries.iter().enumerate() {
            if !seen.insert(e.canonical_line.as_str()) {
                return Err(LexiconError::DuplicateLine {
                    line: i + 1,
                    text: e.canonical_line.clone(),
                });
            }
        }
        let with_ids = entries[0].candidate_id.is_some();
        if let Some((i, e)) = entries
            .iter()
            .enumerate()
            .find(|(_, e)| e.candidate_id.is_some() != with_ids)
        {
            return Err(LexiconError::MixedIds {
                line: i + 1,
                text: e.canonical_line.clone(),
            });
        }
        let contests: BTreeSet<usize> = entries.iter().map(|e| e.contest_index).collect();
        if let Some(missing) = (0..contests.len()).find(|i| !contests.contains(i)) {
            return Err(LexiconError::ContestGap(missing));
        }
        Ok(Self { entries, with_ids })
    }

    pub fn entries(&self) -> &[LexiconEntry] {
        &self.entries
    }

    pub fn with_ids(&self) -> bool {
        self.with_ids
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Number of contests, which is also the number of lines per ballot.
    pub fn contest_count(&self) -> usize {
        self.entries
            .iter()
            .map(|e| e.contest_index + 1)
            .max()
            .unwrap_or(0)
    }

    pub fn contest_title(&self, contest_index: usize) -> Option<&str> {
        self.entries
            .iter()
            .find(|e| e.contest_index == contest_index)
            .map(|e| e.contest_title.as_str())
    }

    pub fn find_line(&self, canonical_line: &str) -> Option<&LexiconEntry> {
        self.entries.iter().find(|e| e.canonical_line == canonical_line)
    }

    /// Looks up a candidate by contest and bare name (ignores IDs).
    pub fn find_candidate(&self, contest_index: usize, candidate_name: &str) -> Option<&LexiconEntry> {
        self.entries
            .iter()
            .find(|e| e.contest_index == contest_index && e.candidate_name == candidate_name)
    }

    /// Dictionary file text; [`parse_dictionary`] inverts it.
    pub fn to_dictionary_text(&self) -> String {
        let mut out = String::new();
        for contest in 0..self.contest_count() {
            let title = self.contest_title(contest).unwrap_or_default();
            let _ = writeln!(out, "{HEADER_KEYWORD} {contest} {title}");
            for e in self.entries.iter().filter(|e| e.contest_index == contest) {
                let _ = writeln!(out, "{}", e.canonical_line);
            }
        }
        out
    }

    /// Short stable digest of the dictionary contents.
    pub fn fingerprint(&self) -> String {
        let digest = Sha256::digest(self.to_dictionary_text().as_bytes());
        digest[..8].iter().map(|b| format!("{b:02x}")).collect()
    }

    /// Same selections without candidate IDs.
    pub fn without_ids(&self) -> Lexicon {
        let entries = self
            .entries
            .iter()
            .map(LexiconEntry::without_id)
            .collect();
        Lexicon {
            entries,
            with_ids: false,
        }
    }
}

/// Parses a dictionary document.
pub fn parse_dictionary(text: &str) -> Result<Lexicon, LexiconError> {
    let mut entries: Vec<LexiconEntry> = Vec::new();
    let mut current: Option<(usize, String)> = None;
    let mut counts: Vec<usize> = Vec::new();
    let mut seen: BTreeSet<String> = BTreeSet::new();
    let mut with_ids: Option<bool> = None;

    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.trim_end_matches('\r');
        if line.trim().is_empty() {
            continue;
        }
        if line.starts_with('#') {
            let header = parse_header(line, line_no, counts.len())?;
            if let Some((prev, _)) = &current {
                if counts[*prev] == 0 {
                    return Err(LexiconError::EmptyContest(*prev));
                }
            }
            counts.push(0);
            current = Some(header);
            continue;
        }
        let (contest_index, title) = current.as_ref().ok_or_else(|| LexiconError::MalformedLine {
            line: line_no,
            text: line.to_string(),
            detail: "ballot line before the first contest header".into(),
        })?;
        let entry = parse_ballot_line(line, line_no, *contest_index, title)?;
        if !seen.insert(entry.canonical_line.clone()) {
            return Err(LexiconError::DuplicateLine {
                line: line_no,
                text: line.to_string(),
            });
        }
        let has_id = entry.candidate_id.is_some();
        if *with_ids.get_or_insert(has_id) != has_id {
            return Err(LexiconError::MixedIds {
                line: line_no,
                text: line.to_string(),
            });
        }
        counts[*contest_index] += 1;
        entries.push(entry);
    }

    match current {
        None => Err(LexiconError::NoContests),
        Some((last, _)) if counts[last] == 0 => Err(LexiconError::EmptyContest(last)),
        Some(_) => Ok(Lexicon {
            entries,
            with_ids: with_ids.unwrap_or(false),
        }),
    }
}

fn parse_header(line: &str, line_no: usize, expected: usize) -> Result<(usize, String), LexiconError> {
    let malformed = |detail: String| LexiconError::MalformedHeader {
        line: line_no,
        text: line.to_string(),
        detail,
    };
    let rest = line
        .strip_prefix(HEADER_KEYWORD)
        .filter(|r| r.starts_with(' '))
        .ok_or_else(|| malformed(format!("expected `{HEADER_KEYWORD} <index> <title>`")))?
        .trim_start();
    let (index, title) = rest
        .split_once(' ')
        .ok_or_else(|| malformed("missing contest title".into()))?;
    let index: usize = index
        .parse()
        .map_err(|_| malformed(format!("contest index {index:?} is not a non-negative integer")))?;
    if index != expected {
        return Err(malformed(format!("expected contest index {expected}, found {index}")));
    }
    let title = title.trim();
    if title.is_empty() {
        return Err(malformed("missing contest title".into()));
    }
    if title.contains(": ") {
        return Err(malformed("contest title must not contain \": \"".into()));
    }
    Ok((index, title.to_string()))
}

fn parse_ballot_line(
    line: &str,
    line_no: usize,
    contest_index: usize,
    title: &str,
) -> Result<LexiconEntry, LexiconError> {
    let malformed = |detail: String| LexiconError::MalformedLine {
        line: line_no,
        text: line.to_string(),
        detail,
    };
    let prefix = format!("{contest_index}. {title}: ");
    let body = line
        .strip_prefix(&prefix)
        .ok_or_else(|| malformed(format!("expected prefix {prefix:?}")))?;
    let (name_segment, party) = body
        .strip_suffix(')')
        .and_then(|b| b.rsplit_once(" ("))
        .ok_or_else(|| malformed("expected trailing \" (<party>)\"".into()))?;
    let (name, id) = split_id(name_segment);
    let entry = LexiconEntry::new(contest_index, title, name, party, id.map(str::to_string))
        .map_err(|e| malformed(e.to_string()))?;
    if entry.canonical_line != line {
        return Err(malformed("line does not round-trip through the canonical format".into()));
    }
    Ok(entry)
}

/// Lexicon entries grouped by contest.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContestIndex {
    groups: BTreeMap<usize, Vec<LexiconEntry>>,
    fingerprint: String,
}

impl ContestIndex {
    pub fn groups(&self) -> &BTreeMap<usize, Vec<LexiconEntry>> {
        &self.groups
    }

    pub fn group(&self, contest_index: usize) -> Option<&[LexiconEntry]> {
        self.groups.get(&contest_index).map(Vec::as_slice)
    }

    pub fn contest_count(&self) -> usize {
        self.groups.len()
    }

    pub fn entries(&self) -> impl Iterator<Item = &LexiconEntry> {
        self.groups.values().flatten()
    }

    /// Fingerprint of the lexicon the index was built from.
    pub fn fingerprint(&self) -> &str {
        &self.fingerprint
    }
}

pub fn build_contest_index(lex: &Lexicon) -> ContestIndex {
    let mut groups: BTreeMap<usize, Vec<LexiconEntry>> = BTreeMap::new();
    for e in lex.entries() {
        groups.entry(e.contest_index).or_default().push(e.clone());
    }
    ContestIndex {
        groups,
        fingerprint: lex.fingerprint(),
    }
}

/// Appends digit IDs so that, within every contest, canonical lines are at
/// Levenshtein distance at least `d_min + 1` from each other. Lengths are
/// drawn without repetition from [`ID_LENGTHS`] until exhausted.
pub fn assign_candidate_ids(lex: &Lexicon, d_min: usize, seed: u64) -> Result<Lexicon, LexiconError> {
    if lex.with_ids() {
        return Err(LexiconError::AlreadyHasIds);
    }
    if d_min == 0 {
        return Err(LexiconError::InvalidDMin);
    }
    let required = d_min + 1;
    let mut out: Vec<Option<LexiconEntry>> = vec![None; lex.len()];

    for contest in 0..lex.contest_count() {
        let members: Vec<usize> = (0..lex.len())
            .filter(|&i| lex.entries[i].contest_index == contest)
            .collect();
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, &format!("ids/{contest}")));
        let assigned = (0..ID_ATTEMPTS_PER_CONTEST)
            .find_map(|_| try_assign_contest(lex, &members, required, &mut rng))
            .ok_or_else(|| LexiconError::IdAssignmentFailed {
                contest,
                title: lex.contest_title(contest).unwrap_or_default().to_string(),
                required,
                attempts: ID_ATTEMPTS_PER_CONTEST,
            })?;
        for (slot, entry) in members.into_iter().zip(assigned) {
            out[slot] = Some(entry);
        }
    }

    let entries = out.into_iter().map(|e| e.expect("every entry belongs to a contest")).collect();
    Ok(Lexicon {
        entries,
        with_ids: true,
    })
}

fn try_assign_contest(
    lex: &Lexicon,
    members: &[usize],
    required: usize,
    rng: &mut ChaCha8Rng,
) -> Option<Vec<LexiconEntry>> {
    let mut lengths = ID_LENGTHS.to_vec();
    lengths.shuffle(rng);
    let mut placed: Vec<LexiconEntry> = Vec::with_capacity(members.len());
    for (k, &i) in members.iter().enumerate() {
        let len = lengths[k % lengths.len()];
        let entry = (0..ID_DRAWS_PER_CANDIDATE).find_map(|_| {
            let candidate = lex.entries[i].with_id(Some(random_id(len, rng))).ok()?;
            placed
                .iter()
                .all(|p| levenshtein_distance(&p.canonical_line, &candidate.canonical_line) >= required)
                .then_some(candidate)
        })?;
        placed.push(entry);
    }
    Some(placed)
}

fn random_id(len: usize, rng: &mut impl Rng) -> String {
    (0..len)
        .map(|k| {
            let lo = if k == 0 { 1 } else { 0 };
            char::from(b'0' + rng.gen_range(lo..10u8))
        })
        .collect()
}

/// Closest pair of lines within one contest.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ContestSeparation {
    pub contest_index: usize,
    pub contest_title: String,
    pub entries: usize,
    /// `None` for single-candidate contests.
    pub min_distance: Option<usize>,
    pub closest_pair: Option<(String, String)>,
    pub flagged: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeparationReport {
    pub contests: Vec<ContestSeparation>,
}

impl SeparationReport {
    pub fn any_flagged(&self) -> bool {
        self.contests.iter().any(|c| c.flagged)
    }

    /// Smallest pairwise distance over all contests, if any contest has a pair.
    pub fn min_distance(&self) -> Option<usize> {
        self.contests.iter().filter_map(|c| c.min_distance).min()
    }

    /// True when every contest is separated by at least `distance`.
    pub fn passes(&self, distance: usize) -> bool {
        self.min_distance().is_none_or(|d| d >= distance)
    }

    pub fn to_tsv(&self) -> String {
        let mut out =
            String::from("contest_index\tcontest_title\tentries\tmin_distance\tline_a\tline_b\tflagged\n");
        for c in &self.contests {
            let (a, b) = c
                .closest_pair
                .as_ref()
                .map(|(a, b)| (a.as_str(), b.as_str()))
                .unwrap_or(("n/a", "n/a"));
            let d = c.min_distance.map_or_else(|| "n/a".to_string(), |d| d.to_string());
            let _ = writeln!(
                out,
                "{}\t{}\t{}\t{}\t{}\t{}\t{}",
                c.contest_index,
                c.contest_title,
                c.entries,
                d,
                a,
                b,
                if c.flagged { "yes" } else { "no" }
            );
        }
        out
    }
}

/// Reports, per contest, the closest pair of canonical lines. Contests whose
/// closest pair is within one edit are flagged.
pub fn validate_lexicon(lex: &Lexicon) -> SeparationReport {
    let index = build_contest_index(lex);
    let contests = index
        .groups()
        .iter()
        .map(|(&contest_index, group)| {
            let mut best: Option<(usize, &LexiconEntry, &LexiconEntry)> = None;
            for (i, a) in group.iter().enumerate() {
                for b in &group[i + 1..] {
                    let d = levenshtein_distance(&a.canonical_line, &b.canonical_line);
                    if best.is_none_or(|(bd, _, _)| d < bd) {
                        best = Some((d, a, b));
                    }
                }
            }
            ContestSeparation {
                contest_index,
                contest_title: group[0].contest_title.clone(),
                entries: group.len(),
                min_distance: best.map(|(d, _, _)| d),
                closest_pair: best.map(|(_, a, b)| (a.canonical_line.clone(), b.canonical_line.clone())),
                flagged: best.is_some_and(|(d, _, _)| d <= 1),
            }
        })
        .collect();
    SeparationReport { contests }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = "\
#contest 0 President
0. President: Tom Hale (Green)
0. President: Ann Ruiz (Reform)
0. President: Lee Park (Democratic)

#contest 1 Governor
1. Governor: Ada Moss (Democratic)
1. Governor: Bo Chen (Republican)
1. Governor: Cy Dunn (Libertarian)
";

    fn mark_pair() -> Lexicon {
        Lexicon::new(vec![
            LexiconEntry::new(0, "Governor", "Mark Day", "Democratic", None).unwrap(),
            LexiconEntry::new(0, "Governor", "Mark May", "Democratic", None).unwrap(),
        ])
        .unwrap()
    }

    #[test]
    fn parses_two_contests() {
        let lex = parse_dictionary(SAMPLE).unwrap();
        assert_eq!(lex.len(), 6);
        assert!(!lex.with_ids());
        assert_eq!(lex.contest_count(), 2);
        let index = build_contest_index(&lex);
        assert_eq!(index.contest_count(), 2);
        assert!(index.groups().values().all(|g| g.len() == 3));
        let first = &lex.entries()[0];
        assert_eq!(first.contest_title, "President");
        assert_eq!(first.candidate_name, "Tom Hale");
        assert_eq!(first.party, "Green");
        assert_eq!(first.candidate_id, None);
    }

    #[test]
    fn round_trips_dictionary_text() {
        let lex = parse_dictionary(SAMPLE).unwrap();
        assert_eq!(parse_dictionary(&lex.to_dictionary_text()).unwrap(), lex);
    }

    #[test]
    fn parses_ids() {
        let text = "#contest 0 Mayor\n0. Mayor: Tom-1234 (Green)\n0. Mayor: Tim-43 (Reform)\n";
        let lex = parse_dictionary(text).unwrap();
        assert!(lex.with_ids());
        assert_eq!(lex.entries()[0].candidate_name, "Tom");
        assert_eq!(lex.entries()[0].candidate_id.as_deref(), Some("1234"));
        assert_eq!(lex.entries()[1].printed_name(), "Tim-43");
    }

    #[test]
    fn hyphenated_names_are_not_ids() {
        let text = "#contest 0 Mayor\n0. Mayor: Mary-Jane Holt (Green)\n";
        let lex = parse_dictionary(text).unwrap();
        assert!(!lex.with_ids());
        assert_eq!(lex.entries()[0].candidate_name, "Mary-Jane Holt");
    }

    #[test]
    fn empty_document_has_no_contests() {
        assert_eq!(parse_dictionary(""), Err(LexiconError::NoContests));
        assert_eq!(parse_dictionary("\n  \n"), Err(LexiconError::NoContests));
    }

    #[test]
    fn rejects_malformed_headers() {
        for bad in [
            "#contst 0 Mayor\n0. Mayor: A B (C)\n",
            "#contest x Mayor\n",
            "#contest 0\n",
            "#contest 1 Mayor\n1. Mayor: A B (C)\n",
        ] {
            assert!(
                matches!(parse_dictionary(bad), Err(LexiconError::MalformedHeader { line: 1, .. })),
                "{bad:?}"
            );
        }
    }

    #[test]
    fn rejects_duplicates_and_mixed_ids() {
        let dup = "#contest 0 Mayor\n0. Mayor: A B (C)\n0. Mayor: A B (C)\n";
        assert_eq!(
            parse_dictionary(dup),
            Err(LexiconError::DuplicateLine {
                line: 3,
                text: "0. Mayor: A B (C)".into()
            })
        );
        let mixed = "#contest 0 Mayor\n0. Mayor: A B-12 (C)\n0. Mayor: D E (C)\n";
        match parse_dictionary(mixed) {
            Err(LexiconError::MixedIds { line, text }) => {
                assert_eq!(line, 3);
                assert_eq!(text, "0. Mayor: D E (C)");
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn rejects_lines_outside_their_contest() {
        let text = "#contest 0 Mayor\n1. Mayor: A B (C)\n";
        assert!(matches!(
            parse_dictionary(text),
            Err(LexiconError::MalformedLine { line: 2, .. })
        ));
        let orphan = "0. Mayor: A B (C)\n";
        assert!(matches!(
            parse_dictionary(orphan),
            Err(LexiconError::MalformedLine { line: 1, .. })
        ));
        let empty = "#contest 0 Mayor\n#contest 1 Sheriff\n1. Sheriff: A B (C)\n";
        assert_eq!(parse_dictionary(empty), Err(LexiconError::EmptyContest(0)));
    }

    #[test]
    fn single_entry_index() {
        let lex = parse_dictionary("#contest 0 Mayor\n0. Mayor: A B (C)\n").unwrap();
        let index = build_contest_index(&lex);
        assert_eq!(index.contest_count(), 1);
        assert_eq!(index.group(0).unwrap().len(), 1);
    }

    #[test]
    fn separation_flags_one_edit_pairs() {
        let report = validate_lexicon(&mark_pair());
        assert_eq!(report.contests[0].min_distance, Some(1));
        assert!(report.contests[0].flagged);
        assert!(report.any_flagged());
    }

    #[test]
    fn single_entry_contest_reports_na() {
        let lex = parse_dictionary("#contest 0 Mayor\n0. Mayor: A B (C)\n").unwrap();
        let report = validate_lexicon(&lex);
        assert_eq!(report.contests[0].min_distance, None);
        assert!(!report.contests[0].flagged);
        assert!(report.to_tsv().contains("\tn/a\tn/a\tn/a\tno"));
    }

    #[test]
    fn assigned_ids_separate_similar_names() {
        let lex = assign_candidate_ids(&mark_pair(), 3, 7).unwrap();
        assert!(lex.with_ids());
        let [a, b] = lex.entries() else { panic!() };
        assert!(levenshtein_distance(&a.canonical_line, &b.canonical_line) >= 4);
        let la = a.candidate_id.as_ref().unwrap().len();
        let lb = b.candidate_id.as_ref().unwrap().len();
        assert_ne!(la, lb);
        assert!(ID_LENGTHS.contains(&la) && ID_LENGTHS.contains(&lb));
        let report = validate_lexicon(&lex);
        assert!(!report.any_flagged());
        assert!(report.passes(4));
        // The ID lexicon is itself a valid dictionary.
        assert_eq!(parse_dictionary(&lex.to_dictionary_text()).unwrap(), lex);
        assert_eq!(lex.without_ids(), mark_pair());
    }

    #[test]
    fn id_assignment_is_deterministic() {
        let a = assign_candidate_ids(&mark_pair(), 3, 99).unwrap();
        let b = assign_candidate_ids(&mark_pair(), 3, 99).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn single_candidate_contest_gets_an_id() {
        let lex = parse_dictionary("#contest 0 Mayor\n0. Mayor: A B (C)\n").unwrap();
        let out = assign_candidate_ids(&lex, 5, 1).unwrap();
        assert!(out.entries()[0].candidate_id.is_some());
    }

    #[test]
    fn id_assignment_preconditions() {
        let with = assign_candidate_ids(&mark_pair(), 3, 1).unwrap();
        assert_eq!(assign_candidate_ids(&with, 3, 1), Err(LexiconError::AlreadyHasIds));
        assert_eq!(assign_candidate_ids(&mark_pair(), 0, 1), Err(LexiconError::InvalidDMin));
    }

    #[test]
    fn impossible_separation_reports_contest() {
        // Six-digit IDs can never push short lines 40 edits apart.
        match assign_candidate_ids(&mark_pair(), 40, 1) {
            Err(LexiconError::IdAssignmentFailed { contest, required, .. }) => {
                assert_eq!(contest, 0);
                assert_eq!(required, 41);
            }
            other => panic!("{other:?}"),
        }
    }
}
