//! Informed OCR (iOCR) post-processing for human-readable ballots.
//!
//! OCR output of each ballot line is matched against a per-contest
//! dictionary of every legal selection. Only lines on which Levenshtein
//! distance and Jaro-Winkler similarity agree on a unique entry are tallied;
//! everything else is preserved for human review.

pub mod baselines;
pub mod lexicon;
pub mod matcher;
pub mod seed;
pub mod similarity;
pub mod stats;
pub mod synth;
pub mod tally;
