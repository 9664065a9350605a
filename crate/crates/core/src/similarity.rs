//! Edit-distance and similarity metrics.
//!
//! All metrics operate on Unicode scalar values, so a multi-byte character
//! counts as a single edit. Similarities are oriented so that `1.0` is an
//! exact match and `0.0` is total dissimilarity.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Default Jaro-Winkler prefix scaling factor.
pub const DEFAULT_PREFIX_WEIGHT: f64 = 0.1;
/// Default cap on the shared prefix length rewarded by Jaro-Winkler.
pub const DEFAULT_MAX_PREFIX: usize = 4;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SimilarityError {
    #[error("similarity {0} is outside [0, 1]")]
    OutOfRange(f64),
    #[error("prefix weight {0} must lie in [0, 0.25]")]
    InvalidPrefixWeight(f64),
    #[error("prefix weight {0} times prefix cap {1} exceeds 1")]
    PrefixBoostTooLarge(f64, usize),
}

/// A similarity value in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct SimilarityScore(f64);

impl SimilarityScore {
    pub const ZERO: SimilarityScore = SimilarityScore(0.0);
    pub const ONE: SimilarityScore = SimilarityScore(1.0);

    pub fn new(value: f64) -> Result<Self, SimilarityError> {
        if (0.0..=1.0).contains(&value) {
            Ok(Self(value))
        } else {
            Err(SimilarityError::OutOfRange(value))
        }
    }

    /// Clamps tiny floating-point excursions back into range.
    fn clamped(value: f64) -> Self {
        Self(value.clamp(0.0, 1.0))
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

impl TryFrom<f64> for SimilarityScore {
    type Error = SimilarityError;

    fn try_from(value: f64) -> Result<Self, Self::Error> {
        Self::new(value)
    }
}

impl From<SimilarityScore> for f64 {
    fn from(score: SimilarityScore) -> f64 {
        score.0
    }
}

impl fmt::Display for SimilarityScore {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.0, f)
    }
}

/// Minimum number of single-character insertions, deletions and
/// substitutions turning `s1` into `s2`.
pub fn levenshtein_distance(s1: &str, s2: &str) -> usize {
    let a: Vec<char> = s1.chars().collect();
    let b: Vec<char> = s2.chars().collect();
    levenshtein_chars(&a, &b)
}

/// Two-row Levenshtein over pre-split characters.
pub fn levenshtein_chars(a: &[char], b: &[char]) -> usize {
    if a.is_empty() {
        return b.len();
    }
    if b.is_empty() {
        return a.len();
    }
    // Keep the shorter string on the inner loop.
    let (a, b) = if a.len() < b.len() { (b, a) } else { (a, b) };

    let mut prev: Vec<usize> = (0..=b.len()).collect();
    let mut curr = vec![0usize; b.len() + 1];
    for (i, &ca) in a.iter().enumerate() {
        curr[0] = i + 1;
        for (j, &cb) in b.iter().enumerate() {
            let substitution = prev[j] + usize::from(ca != cb);
            let deletion = prev[j + 1] + 1;
            let insertion = curr[j] + 1;
            curr[j + 1] = substitution.min(deletion).min(insertion);
        }
        std::mem::swap(&mut prev, &mut curr);
    }
    prev[b.len()]
}

/// `1 - distance / max(|s1|, |s2|)`; two empty strings are identical.
pub fn levenshtein_similarity(s1: &str, s2: &str) -> SimilarityScore {
    let a: Vec<char> = s1.chars().collect();
    let b: Vec<char> = s2.chars().collect();
    levenshtein_similarity_chars(&a, &b)
}

pub fn levenshtein_similarity_chars(a: &[char], b: &[char]) -> SimilarityScore {
    similarity_from_distance(levenshtein_chars(a, b), a.len().max(b.len()))
}

pub(crate) fn similarity_from_distance(distance: usize, longest: usize) -> SimilarityScore {
    if longest == 0 {
        return SimilarityScore::ONE;
    }
    SimilarityScore::clamped(1.0 - distance as f64 / longest as f64)
}

/// Jaro similarity with the usual `max(|s1|,|s2|)/2 - 1` matching window.
pub fn jaro(s1: &str, s2: &str) -> SimilarityScore {
    let a: Vec<char> = s1.chars().collect();
    let b: Vec<char> = s2.chars().collect();
    jaro_chars(&a, &b)
}

pub fn jaro_chars(a: &[char], b: &[char]) -> SimilarityScore {
    if a.is_empty() && b.is_empty() {
        return SimilarityScore::ONE;
    }
    if a.is_empty() || b.is_empty() {
        return SimilarityScore::ZERO;
    }
    let window = (a.len().max(b.len()) / 2).saturating_sub(1);

    let mut a_matched = vec![false; a.len()];
    let mut b_matched = vec![false; b.len()];
    let mut matches = 0usize;
    for (i, &ca) in a.iter().enumerate() {
        let lo = i.saturating_sub(window);
        let hi = (i + window + 1).min(b.len());
        for j in lo..hi {
            if !b_matched[j] && b[j] == ca {
                a_matched[i] = true;
                b_matched[j] = true;
                matches += 1;
                break;
            }
        }
    }
    if matches == 0 {
        return SimilarityScore::ZERO;
    }

    let mut out_of_order = 0usize;
    let mut b_iter = b.iter().zip(&b_matched).filter(|(_, m)| **m).map(|(c, _)| c);
    for (ca, _) in a.iter().zip(&a_matched).filter(|(_, m)| **m) {
        if let Some(cb) = b_iter.next() {
            if ca != cb {
                out_of_order += 1;
            }
        }
    }
    let m = matches as f64;
    // Half the out-of-order matches, kept fractional.
    let t = out_of_order as f64 / 2.0;
    SimilarityScore::clamped((m / a.len() as f64 + m / b.len() as f64 + (m - t) / m) / 3.0)
}

/// Validated Jaro-Winkler parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JaroWinkler {
    prefix_weight: f64,
    max_prefix: usize,
}

impl Default for JaroWinkler {
    fn default() -> Self {
        Self {
            prefix_weight: DEFAULT_PREFIX_WEIGHT,
            max_prefix: DEFAULT_MAX_PREFIX,
        }
    }
}

impl JaroWinkler {
    pub fn new(prefix_weight: f64, max_prefix: usize) -> Result<Self, SimilarityError> {
        if !(0.0..=0.25).contains(&prefix_weight) {
            return Err(SimilarityError::InvalidPrefixWeight(prefix_weight));
        }
        // Past this the boost can lift the score above 1.
        if prefix_weight * max_prefix as f64 > 1.0 {
            return Err(SimilarityError::PrefixBoostTooLarge(prefix_weight, max_prefix));
        }
        Ok(Self {
            prefix_weight,
            max_prefix,
        })
    }

    pub fn prefix_weight(&self) -> f64 {
        self.prefix_weight
    }

    pub fn max_prefix(&self) -> usize {
        self.max_prefix
    }

    pub fn similarity(&self, s1: &str, s2: &str) -> SimilarityScore {
        let a: Vec<char> = s1.chars().collect();
        let b: Vec<char> = s2.chars().collect();
        self.similarity_chars(&a, &b)
    }

    pub fn similarity_chars(&self, a: &[char], b: &[char]) -> SimilarityScore {
        let base = jaro_chars(a, b).value();
        let prefix = a
            .iter()
            .zip(b)
            .take_while(|(x, y)| x == y)
            .count()
            .min(self.max_prefix);
        SimilarityScore::clamped(base + prefix as f64 * self.prefix_weight * (1.0 - base))
    }
}

/// Jaro similarity boosted by the shared prefix, capped at `max_prefix`
/// characters and scaled by `prefix_weight`.
pub fn jaro_winkler(
    s1: &str,
    s2: &str,
    prefix_weight: f64,
    max_prefix: usize,
) -> Result<SimilarityScore, SimilarityError> {
    Ok(JaroWinkler::new(prefix_weight, max_prefix)?.similarity(s1, s2))
}
