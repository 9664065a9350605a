//! Synthetic mock-election corpora and a seeded OCR noise channel.
//!
//! The generator stands in for a ballot marking device: it prints canonical
//! ballot lines and records the hand-count ground truth. The noise channel
//! stands in for scanning degraded images, corrupting whole lines with the
//! error classes a real OCR engine was observed to make.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::lexicon::{assign_candidate_ids, render_line, Lexicon, LexiconEntry, LexiconError, DEFAULT_ID_D_MIN};
use crate::seed::derive_seed;
use crate::similarity::levenshtein_distance;
use crate::tally::{ExpectedLine, GroundTruth};

/// Seed used when none is given.
pub const DEFAULT_SEED: u64 = 0;
pub const DEFAULT_LINES_PER_BALLOT: usize = 10;
pub const DEFAULT_UNIQUE_BALLOTS: usize = 25;
pub const DEFAULT_DUPLICATES: usize = 20;
pub const DEFAULT_WRITEINS: usize = 5;
pub const WRITEIN_PARTY: &str = "Write-in";

/// Minimum Levenshtein distance between generated lines of one contest.
pub const MIN_GENERATED_SEPARATION: usize = 4;

pub const CONTEST_TITLES: [&str; 10] = [
    "President and Vice President",
    "Governor",
    "Lieutenant Governor",
    "Attorney General",
    "Secretary of State",
    "State Senator",
    "State Representative",
    "Mayor",
    "County Commissioner",
    "School Board",
];

/// The near-identical names of the worst-case experiments, with the number
/// of ballots voting for each.
pub const SIMILAR_PAIR: [(&str, usize); 2] = [("Mark May", 30), ("Mark Day", 20)];
pub const SIMILAR_PAIR_PARTY: &str = "Democratic";
pub const SIMILAR_PAIR_CONTEST: usize = 1;

const FIRST_NAMES: [&str; 40] = [
    "Alice", "Bernard", "Carmen", "Desmond", "Eleanor", "Franklin", "Gloria", "Harold", "Isabel", "Julian",
    "Katrina", "Leonard", "Miriam", "Nathaniel", "Olivia", "Patrick", "Rosalind", "Samuel", "Theresa", "Victor",
    "Wendy", "Xavier", "Yolanda", "Zachary", "Beatrice", "Cornelius", "Dolores", "Ernesto", "Felicity", "Gideon",
    "Henrietta", "Ignatius", "Josephine", "Kenneth", "Lucinda", "Maximilian", "Norma", "Oswald", "Priscilla", "Reginald",
];

const LAST_NAMES: [&str; 40] = [
    "Abernathy", "Blackwood", "Castellano", "Dunmore", "Ellsworth", "Fairbanks", "Gutierrez", "Hawthorne",
    "Ingram", "Jablonski", "Kowalczyk", "Lindqvist", "Montgomery", "Nakamura", "Okonkwo", "Pemberton",
    "Quintero", "Rasmussen", "Sutherland", "Thibodeaux", "Underwood", "Valenzuela", "Whitfield", "Yamamoto",
    "Zimmerman", "Ashworth", "Bianchi", "Cavanaugh", "Delacroix", "Espinoza", "Fitzgerald", "Gallagher",
    "Holloway", "Iwasaki", "Jorgensen", "Kensington", "Lockhart", "Moreau", "Novak", "Ortega",
];

const PARTIES: [&str; 7] = [
    "Democratic",
    "Republican",
    "Libertarian",
    "Green",
    "Independent",
    "Constitution",
    "Reform",
];

/// Names never offered by the dictionary.
const WRITEIN_NAMES: [&str; 20] = [
    "Zebulon Quackenbush",
    "Wilhelmina Fotheringay",
    "Thaddeus Brightwater",
    "Philippa Vanderschoot",
    "Ulysses Marchbanks",
    "Guinevere Oyelaran",
    "Barnaby Wintergreen",
    "Clementine Szczepanski",
    "Archibald Featherstone",
    "Ottoline Przybylski",
    "Mortimer Quigleyson",
    "Seraphina Blythewood",
    "Percival Drummondale",
    "Evangeline Thistlewaite",
    "Horatio Vasquez-Lund",
    "Millicent Crowhurst",
    "Ebenezer Wolfenden",
    "Octavia Rutherfordson",
    "Leopold Kazantzakis",
    "Anastasia Greenhalgh",
];

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SynthError {
    #[error("ballot spec has no contests")]
    NoContests,
    #[error("invalid ballot spec: {0}")]
    InvalidSpec(String),
    #[error(transparent)]
    Lexicon(#[from] LexiconError),
    #[error("invalid noise model: {0}")]
    InvalidNoise(String),
    #[error("target {0:?} does not appear in any ballot")]
    TargetAbsent(String),
    #[error("targets {0:?} and {1:?} have no single differentiating character")]
    NoDifferentiatingChar(String, String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CandidateSpec {
    pub name: String,
    pub party: String,
}

impl CandidateSpec {
    pub fn new(name: &str, party: &str) -> Self {
        Self {
            name: name.into(),
            party: party.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ContestSpec {
    pub title: String,
    pub candidates: Vec<CandidateSpec>,
}

/// A candidate added to a contest who only appears on dedicated ballots.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InjectedCandidate {
    pub contest_index: usize,
    pub candidate: CandidateSpec,
    pub ballots: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BallotSpec {
    pub contests: Vec<ContestSpec>,
    pub lines_per_ballot: usize,
    pub unique_ballots: usize,
    pub duplicates: usize,
    /// Unique ballots carrying one write-in line.
    pub writein_count: usize,
    pub with_ids: bool,
    pub id_d_min: usize,
    pub injected: Vec<InjectedCandidate>,
    pub seed: u64,
}

impl BallotSpec {
    /// One ballot set of the mock election: 25 unique ballots duplicated 20
    /// times, 5 of them with a write-in.
    pub fn mock_election(with_ids: bool, seed: u64) -> Self {
        Self {
            contests: sample_contests(seed),
            lines_per_ballot: DEFAULT_LINES_PER_BALLOT,
            unique_ballots: DEFAULT_UNIQUE_BALLOTS,
            duplicates: DEFAULT_DUPLICATES,
            writein_count: DEFAULT_WRITEINS,
            with_ids,
            id_d_min: DEFAULT_ID_D_MIN,
            injected: Vec::new(),
            seed,
        }
    }

    /// Adds the similar-name ballots to one contest, both on the same party.
    pub fn with_similar_pair(mut self) -> Self {
        self.injected.extend(SIMILAR_PAIR.iter().map(|&(name, ballots)| InjectedCandidate {
            contest_index: SIMILAR_PAIR_CONTEST,
            candidate: CandidateSpec::new(name, SIMILAR_PAIR_PARTY),
            ballots,
        }));
        self
    }

    pub fn total_ballots(&self) -> usize {
        self.unique_ballots * self.duplicates + self.injected.iter().map(|i| i.ballots).sum::<usize>()
    }

    fn validate(&self) -> Result<(), SynthError> {
        if self.contests.is_empty() {
            return Err(SynthError::NoContests);
        }
        let invalid = |m: String| Err(SynthError::InvalidSpec(m));
        if self.lines_per_ballot != self.contests.len() {
            return invalid(format!(
                "lines_per_ballot {} does not match {} contests",
                self.lines_per_ballot,
                self.contests.len()
            ));
        }
        if let Some((i, _)) = self.contests.iter().enumerate().find(|(_, c)| c.candidates.is_empty()) {
            return invalid(format!("contest {i} has no candidates"));
        }
        if self.writein_count > self.unique_ballots {
            return invalid(format!(
                "{} write-ins exceed {} unique ballots",
                self.writein_count, self.unique_ballots
            ));
        }
        if self.writein_count > WRITEIN_NAMES.len() {
            return invalid(format!("at most {} write-ins are supported", WRITEIN_NAMES.len()));
        }
        if let Some(inj) = self.injected.iter().find(|i| i.contest_index >= self.contests.len()) {
            return invalid(format!("injected candidate targets missing contest {}", inj.contest_index));
        }
        Ok(())
    }

    /// Dictionary of every legal selection, before candidate IDs.
    pub fn base_lexicon(&self) -> Result<Lexicon, SynthError> {
        let mut entries = Vec::new();
        for (ci, contest) in self.contests.iter().enumerate() {
            let injected = self
                .injected
                .iter()
                .filter(|i| i.contest_index == ci)
                .map(|i| &i.candidate);
            for cand in contest.candidates.iter().chain(injected) {
                entries.push(LexiconEntry::new(ci, contest.title.clone(), cand.name.clone(), cand.party.clone(), None)?);
            }
        }
        Ok(Lexicon::new(entries)?)
    }
}

/// Draws a ten-contest slate from the committed name pool. Lines within a
/// contest are at least [`MIN_GENERATED_SEPARATION`] edits apart.
pub fn sample_contests(seed: u64) -> Vec<ContestSpec> {
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, "contests"));
    let mut used: BTreeSet<String> = BTreeSet::new();
    CONTEST_TITLES
        .iter()
        .enumerate()
        .map(|(ci, title)| {
            let n = rng.gen_range(2..=4);
            let mut parties = PARTIES.to_vec();
            parties.shuffle(&mut rng);
            let mut candidates: Vec<CandidateSpec> = Vec::with_capacity(n);
            while candidates.len() < n {
                let name = format!(
                    "{} {}",
                    FIRST_NAMES.choose(&mut rng).unwrap(),
                    LAST_NAMES.choose(&mut rng).unwrap()
                );
                let party = parties[candidates.len()];
                let line = render_line(ci, title, &name, None, party);
                let separated = candidates.iter().all(|c| {
                    levenshtein_distance(&render_line(ci, title, &c.name, None, &c.party), &line)
                        >= MIN_GENERATED_SEPARATION
                });
                if separated && used.insert(name.clone()) {
                    candidates.push(CandidateSpec::new(&name, party));
                }
            }
            ContestSpec {
                title: title.to_string(),
                candidates,
            }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Ballot {
    pub ballot_id: String,
    pub lines: Vec<String>,
}

impl Ballot {
    /// Printed ballot text, one line per contest.
    pub fn to_text(&self) -> String {
        let mut out = self.lines.join("\n");
        out.push('\n');
        out
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Corpus {
    pub ballots: Vec<Ballot>,
    pub lexicon: Lexicon,
    pub truth: GroundTruth,
}

/// Prints every ballot of the spec. Selections depend on the seed only, so
/// the same seed with and without IDs yields the same votes.
pub fn generate_ballots(spec: &BallotSpec) -> Result<Corpus, SynthError> {
    spec.validate()?;
    let base = spec.base_lexicon()?;
    let lexicon = if spec.with_ids {
        assign_candidate_ids(&base, spec.id_d_min, derive_seed(spec.seed, "ids"))?
    } else {
        base
    };
    let prefix = if spec.with_ids { "ids" } else { "noids" };
    let line_for = |ci: usize, name: &str| -> String {
        lexicon
            .find_candidate(ci, name)
            .map(|e| e.canonical_line.clone())
            .expect("spec candidates are in the lexicon")
    };
    let random_lines = |rng: &mut ChaCha8Rng| -> Vec<String> {
        spec.contests
            .iter()
            .enumerate()
            .map(|(ci, c)| line_for(ci, &c.candidates.choose(rng).unwrap().name))
            .collect()
    };

    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(spec.seed, "selections"));
    let mut unique: Vec<(Vec<String>, Vec<ExpectedLine>)> = (0..spec.unique_ballots)
        .map(|_| {
            let lines = random_lines(&mut rng);
            let truth = lines.iter().cloned().map(ExpectedLine::Candidate).collect();
            (lines, truth)
        })
        .collect();

    let mut wrng = ChaCha8Rng::seed_from_u64(derive_seed(spec.seed, "writeins"));
    let writein_ballots = rand::seq::index::sample(&mut wrng, spec.unique_ballots, spec.writein_count);
    let mut names = WRITEIN_NAMES.to_vec();
    names.shuffle(&mut wrng);
    for (k, u) in writein_ballots.iter().enumerate() {
        let ci = wrng.gen_range(0..spec.contests.len());
        let line = render_line(ci, &spec.contests[ci].title, names[k], None, WRITEIN_PARTY);
        unique[u].0[ci] = line.clone();
        unique[u].1[ci] = ExpectedLine::WriteIn(line);
    }

    let mut ballots = Vec::with_capacity(spec.total_ballots());
    let mut truth = GroundTruth {
        lines_per_ballot: spec.lines_per_ballot,
        ..GroundTruth::default()
    };
    for (u, (lines, expected)) in unique.iter().enumerate() {
        for d in 0..spec.duplicates {
            let ballot_id = format!("{prefix}-{u:03}-{d:02}");
            truth.ballots.insert(ballot_id.clone(), expected.clone());
            ballots.push(Ballot {
                ballot_id,
                lines: lines.clone(),
            });
        }
    }
    for (k, inj) in spec.injected.iter().enumerate() {
        let mut irng = ChaCha8Rng::seed_from_u64(derive_seed(spec.seed, &format!("injected/{k}")));
        for j in 0..inj.ballots {
            let mut lines = random_lines(&mut irng);
            lines[inj.contest_index] = line_for(inj.contest_index, &inj.candidate.name);
            let ballot_id = format!("{prefix}-x{k}-{j:03}");
            truth
                .ballots
                .insert(ballot_id.clone(), lines.iter().cloned().map(ExpectedLine::Candidate).collect());
            ballots.push(Ballot { ballot_id, lines });
        }
    }
    Ok(Corpus {
        ballots,
        lexicon,
        truth,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum NoiseKind {
    /// One or two spaces inserted inside the line.
    SpaceInsertion,
    CharDeletion,
    /// The leading character (the contest number) misread.
    FirstCharCorruption,
}

/// Probabilities of each corruption class, summing to one.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ErrorMix {
    pub space_insertion: f64,
    pub char_deletion: f64,
    pub first_char_corruption: f64,
}

impl Default for ErrorMix {
    fn default() -> Self {
        Self {
            space_insertion: 0.5,
            char_deletion: 0.4,
            first_char_corruption: 0.1,
        }
    }
}

impl ErrorMix {
    pub fn only(kind: NoiseKind) -> Self {
        let mut mix = Self {
            space_insertion: 0.0,
            char_deletion: 0.0,
            first_char_corruption: 0.0,
        };
        match kind {
            NoiseKind::SpaceInsertion => mix.space_insertion = 1.0,
            NoiseKind::CharDeletion => mix.char_deletion = 1.0,
            NoiseKind::FirstCharCorruption => mix.first_char_corruption = 1.0,
        }
        mix
    }

    /// The default mix with first-character errors redistributed.
    pub fn without_first_char() -> Self {
        Self {
            space_insertion: 5.0 / 9.0,
            char_deletion: 4.0 / 9.0,
            first_char_corruption: 0.0,
        }
    }

    fn weights(&self) -> [f64; 3] {
        [self.space_insertion, self.char_deletion, self.first_char_corruption]
    }

    fn validate(&self) -> Result<(), SynthError> {
        let w = self.weights();
        if w.iter().any(|p| !(0.0..=1.0).contains(p)) || ((w.iter().sum::<f64>() - 1.0).abs() > 1e-9) {
            return Err(SynthError::InvalidNoise(format!("error mix {w:?} is not a distribution")));
        }
        Ok(())
    }

    fn draw(&self, rng: &mut impl Rng) -> NoiseKind {
        let u: f64 = rng.gen();
        if u < self.space_insertion {
            NoiseKind::SpaceInsertion
        } else if u < self.space_insertion + self.char_deletion || self.first_char_corruption == 0.0 {
            NoiseKind::CharDeletion
        } else {
            NoiseKind::FirstCharCorruption
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseModel {
    pub line_error_rate: f64,
    pub error_mix: ErrorMix,
    pub seed: u64,
}

impl NoiseModel {
    pub fn new(line_error_rate: f64, error_mix: ErrorMix, seed: u64) -> Result<Self, SynthError> {
        let model = Self {
            line_error_rate,
            error_mix,
            seed,
        };
        model.validate()?;
        Ok(model)
    }

    pub fn for_quality(quality: QualityLevel, seed: u64) -> Self {
        Self {
            line_error_rate: quality.calibrated_line_error_rate(),
            error_mix: ErrorMix::default(),
            seed,
        }
    }

    fn validate(&self) -> Result<(), SynthError> {
        if !(0.0..=1.0).contains(&self.line_error_rate) {
            return Err(SynthError::InvalidNoise(format!(
                "line error rate {} outside [0, 1]",
                self.line_error_rate
            )));
        }
        self.error_mix.validate()
    }

    /// Same channel with an independent stream for one ballot.
    pub fn for_ballot(&self, ballot_id: &str) -> Self {
        Self {
            seed: derive_seed(self.seed, ballot_id),
            ..*self
        }
    }
}

/// Image quality of the scanned ballots, as a percentage of the original.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum QualityLevel {
    Full,
    Half,
    Fifth,
}

impl QualityLevel {
    pub const ALL: [QualityLevel; 3] = [QualityLevel::Full, QualityLevel::Half, QualityLevel::Fifth];

    pub fn percent(self) -> u32 {
        match self {
            QualityLevel::Full => 100,
            QualityLevel::Half => 50,
            QualityLevel::Fifth => 20,
        }
    }

    pub fn from_percent(percent: u32) -> Option<Self> {
        Self::ALL.into_iter().find(|q| q.percent() == percent)
    }

    /// Fraction of raw OCR lines misread at this quality: 60 of 5000 lines
    /// at 50%, 420 of 5000 at 20%.
    pub fn calibrated_line_error_rate(self) -> f64 {
        match self {
            QualityLevel::Full => 0.0,
            QualityLevel::Half => 0.012,
            QualityLevel::Fifth => 0.084,
        }
    }
}

/// Characters a degraded leading digit is misread as.
const FIRST_CHAR_CONFUSIONS: [char; 10] = ['O', 'l', 'I', '|', 'S', 'B', 'g', 'Z', 'q', '?'];

fn corrupt_line(line: &str, kind: NoiseKind, rng: &mut impl Rng) -> String {
    let mut chars: Vec<char> = line.chars().collect();
    match kind {
        NoiseKind::SpaceInsertion if chars.len() >= 2 => {
            let at = rng.gen_range(1..chars.len());
            let n = rng.gen_range(1..=2);
            for _ in 0..n {
                chars.insert(at, ' ');
            }
        }
        NoiseKind::SpaceInsertion => chars.push(' '),
        NoiseKind::CharDeletion => {
            let at = rng.gen_range(0..chars.len());
            chars.remove(at);
        }
        NoiseKind::FirstCharCorruption => {
            let options: Vec<char> = FIRST_CHAR_CONFUSIONS.iter().copied().filter(|&c| c != chars[0]).collect();
            chars[0] = *options.choose(rng).unwrap();
        }
    }
    chars.into_iter().collect()
}

/// Applies the channel and returns the text with the number of lines hit.
pub fn inject_noise_counted(ballot_text: &str, model: &NoiseModel) -> Result<(String, usize), SynthError> {
    model.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(model.seed);
    let mut hit = 0;
    let out: Vec<String> = ballot_text
        .split('\n')
        .map(|line| {
            if line.trim().is_empty() || !rng.gen_bool(model.line_error_rate) {
                return line.to_string();
            }
            hit += 1;
            let kind = model.error_mix.draw(&mut rng);
            corrupt_line(line, kind, &mut rng)
        })
        .collect();
    Ok((out.join("\n"), hit))
}

/// Corrupts each non-blank line independently with the model's line error
/// rate. The number of lines never changes.
pub fn inject_noise(ballot_text: &str, model: &NoiseModel) -> Result<String, SynthError> {
    inject_noise_counted(ballot_text, model).map(|(text, _)| text)
}

/// Corrupts a corpus; each ballot draws from its own stream so results do
/// not depend on processing order.
pub fn inject_noise_corpus(ballots: &[Ballot], model: &NoiseModel) -> Result<Vec<(String, String)>, SynthError> {
    ballots
        .iter()
        .map(|b| Ok((b.ballot_id.clone(), inject_noise(&b.to_text(), &model.for_ballot(&b.ballot_id))?)))
        .collect()
}

/// Replacement characters for the misspelling experiment.
pub const MISSPELL_ALPHABET: &str = "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789";

/// Position and characters where two equal-length targets first differ.
pub fn differentiating_char(target_a: &str, target_b: &str) -> Option<(usize, char, char)> {
    let a: Vec<char> = target_a.chars().collect();
    let b: Vec<char> = target_b.chars().collect();
    if a.len() != b.len() {
        return None;
    }
    a.iter()
        .zip(&b)
        .enumerate()
        .find(|(_, (x, y))| x != y)
        .map(|(i, (x, y))| (i, *x, *y))
}

/// Replacement characters for one target: the alphabet without either
/// differentiating character, so no misspelling spells the rival name.
pub fn misspell_alphabet(target_a: &str, target_b: &str) -> Result<Vec<char>, SynthError> {
    let (_, ca, cb) = differentiating_char(target_a, target_b)
        .ok_or_else(|| SynthError::NoDifferentiatingChar(target_a.into(), target_b.into()))?;
    Ok(MISSPELL_ALPHABET.chars().filter(|&c| c != ca && c != cb).collect())
}

/// Replaces the differentiating character of every occurrence of either
/// target, cycling through [`misspell_alphabet`] from a seeded offset.
pub fn misspell_similar_pair(
    ballots: &[Ballot],
    target_a: &str,
    target_b: &str,
    seed: u64,
) -> Result<Vec<Ballot>, SynthError> {
    if ballots.is_empty() {
        return Ok(Vec::new());
    }
    let (pos, _, _) = differentiating_char(target_a, target_b)
        .ok_or_else(|| SynthError::NoDifferentiatingChar(target_a.into(), target_b.into()))?;
    let alphabet = misspell_alphabet(target_a, target_b)?;
    for t in [target_a, target_b] {
        if !ballots.iter().any(|b| b.lines.iter().any(|l| l.contains(t))) {
            return Err(SynthError::TargetAbsent(t.into()));
        }
    }
    let mut cursors = [target_a, target_b].map(|t| (derive_seed(seed, t) % alphabet.len() as u64) as usize);
    let out = ballots
        .iter()
        .map(|b| {
            let lines = b
                .lines
                .iter()
                .map(|line| {
                    let mut line = line.clone();
                    for (t, cursor) in [target_a, target_b].iter().zip(cursors.iter_mut()) {
                        line = replace_each(&line, t, pos, || {
                            let c = alphabet[*cursor % alphabet.len()];
                            *cursor += 1;
                            c
                        });
                    }
                    line
                })
                .collect();
            Ballot {
                ballot_id: b.ballot_id.clone(),
                lines,
            }
        })
        .collect();
    Ok(out)
}

fn replace_each(line: &str, target: &str, pos: usize, mut next: impl FnMut() -> char) -> String {
    let mut out = String::with_capacity(line.len());
    let mut rest = line;
    while let Some(at) = rest.find(target) {
        out.push_str(&rest[..at]);
        let replaced: String = target
            .chars()
            .enumerate()
            .map(|(i, c)| if i == pos { next() } else { c })
            .collect();
        out.push_str(&replaced);
        rest = &rest[at + target.len()..];
    }
    out.push_str(rest);
    out
}
