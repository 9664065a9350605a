//! Spelling-correction baselines: Norvig-style edit enumeration and a
//! SymSpell delete index, plus the brute-force scan both are checked against.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};

use thiserror::Error;

use crate::similarity::levenshtein_distance;

/// The lowercase alphabet of the classic Norvig corrector.
pub const NORVIG_ALPHABET: &str = "abcdefghijklmnopqrstuvwxyz";

/// Lowercase letters plus the space and hyphen that ballot lines contain.
pub const BALLOT_ALPHABET: &str = "abcdefghijklmnopqrstuvwxyz -";

/// Largest edit distance the Norvig corrector enumerates.
pub const NORVIG_MAX_K: usize = 2;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BaselineError {
    #[error("word {0:?} has a zero count")]
    ZeroCount(String),
    #[error("norvig correction supports k <= {NORVIG_MAX_K}, got {0}")]
    UnsupportedK(usize),
    #[error("lookup distance {requested} exceeds index max distance {indexed}")]
    DistanceTooLarge { requested: usize, indexed: usize },
}

/// All strings one deletion, adjacent transposition, replacement or
/// insertion away from `word`, over the 26-letter alphabet. As in Norvig's
/// original, replacing a letter with itself keeps `word` in the set.
pub fn norvig_edits1(word: &str) -> HashSet<String> {
    edits1_with(word, NORVIG_ALPHABET)
}

pub fn edits1_with(word: &str, alphabet: &str) -> HashSet<String> {
    let chars: Vec<char> = word.chars().collect();
    let letters: Vec<char> = alphabet.chars().collect();
    let n = chars.len();
    let mut out = HashSet::with_capacity(n * (2 * letters.len() + 2) + letters.len());
    let build = |parts: &[&[char]]| parts.iter().flat_map(|p| p.iter()).collect::<String>();
    for i in 0..=n {
        let (left, right) = chars.split_at(i);
        if !right.is_empty() {
            out.insert(build(&[left, &right[1..]]));
        }
        if right.len() > 1 {
            out.insert(build(&[left, &[right[1], right[0]], &right[2..]]));
        }
        for &c in &letters {
            if !right.is_empty() {
                out.insert(build(&[left, &[c], &right[1..]]));
            }
            out.insert(build(&[left, &[c], right]));
        }
    }
    out
}

pub fn norvig_edits2(word: &str) -> HashSet<String> {
    edits2_with(word, NORVIG_ALPHABET)
}

pub fn edits2_with(word: &str, alphabet: &str) -> HashSet<String> {
    edits1_with(word, alphabet)
        .iter()
        .flat_map(|e| edits1_with(e, alphabet))
        .collect()
}

/// Word occurrence counts, the corrector's language model.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct FrequencyDictionary {
    counts: BTreeMap<String, u64>,
}

impl FrequencyDictionary {
    pub fn from_counts<I, S>(counts: I) -> Result<Self, BaselineError>
    where
        I: IntoIterator<Item = (S, u64)>,
        S: Into<String>,
    {
        let mut out = BTreeMap::new();
        for (word, count) in counts {
            let word = word.into();
            if count == 0 {
                return Err(BaselineError::ZeroCount(word));
            }
            *out.entry(word).or_insert(0) += count;
        }
        Ok(Self { counts: out })
    }

    /// Counts lowercase alphabetic tokens of a text corpus.
    pub fn from_text(text: &str) -> Self {
        let mut counts = BTreeMap::new();
        for token in text
            .split(|c: char| !c.is_alphabetic())
            .filter(|t| !t.is_empty())
        {
            *counts.entry(token.to_lowercase()).or_insert(0) += 1;
        }
        Self { counts }
    }

    pub fn count(&self, word: &str) -> Option<u64> {
        self.counts.get(word).copied()
    }

    pub fn len(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    pub fn words(&self) -> impl Iterator<Item = &str> {
        self.counts.keys().map(String::as_str)
    }

    /// The most frequent known word among `candidates`, ties broken
    /// lexicographically.
    fn best_of<'a>(&self, candidates: impl IntoIterator<Item = &'a String>) -> Option<&'a String> {
        candidates
            .into_iter()
            .filter_map(|w| self.count(w).map(|c| (c, w)))
            .min_by(|(ca, wa), (cb, wb)| cb.cmp(ca).then_with(|| wa.cmp(wb)))
            .map(|(_, w)| w)
    }
}

/// Norvig correction over the ballot alphabet.
pub fn norvig_correct(word: &str, dict: &FrequencyDictionary, k: usize) -> Result<String, BaselineError> {
    norvig_correct_with(word, dict, k, BALLOT_ALPHABET)
}

/// Searches distance tiers 0..=k in order and returns the most frequent
/// known word of the first non-empty tier, or `word` when none is known.
pub fn norvig_correct_with(
    word: &str,
    dict: &FrequencyDictionary,
    k: usize,
    alphabet: &str,
) -> Result<String, BaselineError> {
    if k > NORVIG_MAX_K {
        return Err(BaselineError::UnsupportedK(k));
    }
    if dict.count(word).is_some() {
        return Ok(word.to_string());
    }
    if k == 0 {
        return Ok(word.to_string());
    }
    let tier1 = edits1_with(word, alphabet);
    if let Some(best) = dict.best_of(&tier1) {
        return Ok(best.clone());
    }
    if k == 2 {
        let tier2: HashSet<String> = tier1.iter().flat_map(|e| edits1_with(e, alphabet)).collect();
        if let Some(best) = dict.best_of(&tier2) {
            return Ok(best.clone());
        }
    }
    Ok(word.to_string())
}

/// SymSpell's precomputed delete variants.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DeleteIndex {
    deletes: HashMap<String, BTreeSet<String>>,
    max_distance: usize,
}

impl DeleteIndex {
    pub fn max_distance(&self) -> usize {
        self.max_distance
    }

    pub fn len(&self) -> usize {
        self.deletes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.deletes.is_empty()
    }

    pub fn keys(&self) -> impl Iterator<Item = &str> {
        self.deletes.keys().map(String::as_str)
    }

    pub fn origins(&self, variant: &str) -> Option<&BTreeSet<String>> {
        self.deletes.get(variant)
    }
}

/// Every string reachable from `word` by at most `max_deletes` deletions,
/// `word` included.
pub fn delete_variants(word: &str, max_deletes: usize) -> HashSet<String> {
    let mut all = HashSet::new();
    all.insert(word.to_string());
    let mut frontier = vec![word.to_string()];
    for _ in 0..max_deletes {
        let mut next = Vec::new();
        for w in &frontier {
            let chars: Vec<char> = w.chars().collect();
            for i in 0..chars.len() {
                let shorter: String = chars[..i].iter().chain(&chars[i + 1..]).collect();
                if all.insert(shorter.clone()) {
                    next.push(shorter);
                }
            }
        }
        frontier = next;
    }
    all
}

pub fn symspell_build<S: AsRef<str>>(terms: &[S], max_distance: usize) -> DeleteIndex {
    let mut deletes: HashMap<String, BTreeSet<String>> = HashMap::new();
    for term in terms {
        let term = term.as_ref();
        for variant in delete_variants(term, max_distance) {
            deletes.entry(variant).or_default().insert(term.to_string());
        }
    }
    DeleteIndex { deletes, max_distance }
}

/// Dictionary terms within Levenshtein distance `max_distance` of `word`,
/// each with its exact distance.
pub fn symspell_lookup(
    index: &DeleteIndex,
    word: &str,
    max_distance: usize,
) -> Result<BTreeSet<(String, usize)>, BaselineError> {
    if max_distance > index.max_distance {
        return Err(BaselineError::DistanceTooLarge {
            requested: max_distance,
            indexed: index.max_distance,
        });
    }
    let mut seen = HashSet::new();
    let mut out = BTreeSet::new();
    for variant in delete_variants(word, max_distance) {
        let Some(origins) = index.deletes.get(&variant) else {
            continue;
        };
        for term in origins {
            if seen.insert(term.as_str()) {
                let d = levenshtein_distance(word, term);
                if d <= max_distance {
                    out.insert((term.clone(), d));
                }
            }
        }
    }
    Ok(out)
}

/// Linear scan of every term with full Levenshtein distance.
pub fn brute_force_lookup<S: AsRef<str>>(terms: &[S], word: &str, max_distance: usize) -> BTreeSet<(String, usize)> {
    terms
        .iter()
        .filter_map(|t| {
            let t = t.as_ref();
            let d = levenshtein_distance(word, t);
            (d <= max_distance).then(|| (t.to_string(), d))
        })
        .collect()
}
