use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::time::Instant;

use anyhow::Result;
use iocr::baselines::{brute_force_lookup, norvig_correct, symspell_build, symspell_lookup, FrequencyDictionary};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const LETTERS: &[u8] = b"abcdefghijklmnopqrstuvwxyz";

/// `n` distinct random lowercase terms of four to ten letters.
pub fn random_terms(n: usize, seed: u64) -> Vec<String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut set = BTreeSet::new();
    while set.len() < n {
        let len = rng.gen_range(4..=10);
        set.insert(random_word(&mut rng, len));
    }
    set.into_iter().collect()
}

fn random_word(rng: &mut impl Rng, len: usize) -> String {
    (0..len).map(|_| LETTERS[rng.gen_range(0..LETTERS.len())] as char).collect()
}

fn mutate(word: &str, edits: usize, rng: &mut impl Rng) -> String {
    let mut c: Vec<char> = word.chars().collect();
    for _ in 0..edits {
        let letter = LETTERS[rng.gen_range(0..LETTERS.len())] as char;
        match rng.gen_range(0..3) {
            0 if !c.is_empty() => {
                c.remove(rng.gen_range(0..c.len()));
            }
            1 if !c.is_empty() => {
                let i = rng.gen_range(0..c.len());
                c[i] = letter;
            }
            _ => c.insert(rng.gen_range(0..=c.len()), letter),
        }
    }
    c.into_iter().collect()
}

/// Queries near dictionary terms (up to `k` random edits) mixed one in four
/// with unrelated random words.
pub fn random_queries(terms: &[String], n: usize, k: usize, seed: u64) -> Vec<String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            if rng.gen_bool(0.25) {
                let len = rng.gen_range(3..=11);
                random_word(&mut rng, len)
            } else {
                let t = &terms[rng.gen_range(0..terms.len())];
                let edits = rng.gen_range(0..=k);
                mutate(t, edits, &mut rng)
            }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct Timing {
    pub algorithm: &'static str,
    pub dict_size: usize,
    pub max_distance: usize,
    pub queries: usize,
    pub mean_us: f64,
    pub p95_us: f64,
}

impl Timing {
    fn from_samples(algorithm: &'static str, dict_size: usize, max_distance: usize, mut us: Vec<f64>) -> Self {
        us.sort_by(f64::total_cmp);
        let mean = if us.is_empty() { 0.0 } else { us.iter().sum::<f64>() / us.len() as f64 };
        let p95 = if us.is_empty() {
            0.0
        } else {
            us[((us.len() as f64 * 0.95).ceil() as usize).clamp(1, us.len()) - 1]
        };
        Self {
            algorithm,
            dict_size,
            max_distance,
            queries: us.len(),
            mean_us: mean,
            p95_us: p95,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchResult {
    pub timings: Vec<Timing>,
    /// Queries whose SymSpell answer differed from the brute-force scan.
    pub mismatches: usize,
}

impl BenchResult {
    pub fn timing(&self, algorithm: &str) -> Option<&Timing> {
        self.timings.iter().find(|t| t.algorithm == algorithm)
    }

    pub fn to_tsv(&self) -> String {
        let mut out = String::from("algorithm\tdict_size\tmax_distance\tqueries\tmean_us\tp95_us\n");
        for t in &self.timings {
            let _ = writeln!(
                out,
                "{}\t{}\t{}\t{}\t{:.3}\t{:.3}",
                t.algorithm, t.dict_size, t.max_distance, t.queries, t.mean_us, t.p95_us
            );
        }
        out
    }
}

fn time<T>(f: impl FnOnce() -> T) -> (T, f64) {
    let start = Instant::now();
    let out = f();
    (out, start.elapsed().as_secs_f64() * 1e6)
}

pub fn run_bench(dict_size: usize, queries: usize, norvig_queries: usize, k: usize, seed: u64) -> Result<BenchResult> {
    let terms = random_terms(dict_size, seed);
    let qs = random_queries(&terms, queries, k, seed.wrapping_add(1));
    let index = symspell_build(&terms, k);
    let (mut sym, mut brute) = (Vec::with_capacity(queries), Vec::with_capacity(queries));
    let mut mismatches = 0;
    for q in &qs {
        let (a, ta) = time(|| symspell_lookup(&index, q, k));
        let (b, tb) = time(|| brute_force_lookup(&terms, q, k));
        mismatches += usize::from(a? != b);
        sym.push(ta);
        brute.push(tb);
    }
    let counts = terms.iter().enumerate().map(|(i, t)| (t.clone(), 1 + (i % 97) as u64));
    let dict = FrequencyDictionary::from_counts(counts)?;
    let mut norvig = Vec::with_capacity(norvig_queries);
    for q in qs.iter().take(norvig_queries) {
        let (r, t) = time(|| norvig_correct(q, &dict, k));
        r?;
        norvig.push(t);
    }
    Ok(BenchResult {
        timings: vec![
            Timing::from_samples("symspell", dict_size, k, sym),
            Timing::from_samples("brute_force_scan", dict_size, k, brute),
            Timing::from_samples("norvig", dict_size, k, norvig),
        ],
        mismatches,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn terms_are_distinct_and_seeded() {
        let a = random_terms(500, 3);
        assert_eq!(a.len(), 500);
        assert_eq!(a.iter().collect::<BTreeSet<_>>().len(), 500);
        assert_eq!(a, random_terms(500, 3));
        assert_ne!(a, random_terms(500, 4));
    }

    #[test]
    fn p95_is_an_order_statistic() {
        let t = Timing::from_samples("x", 1, 1, (1..=100).rev().map(f64::from).collect());
        assert_eq!(t.p95_us, 95.0);
        assert_eq!(t.mean_us, 50.5);
        let one = Timing::from_samples("x", 1, 1, vec![7.0]);
        assert_eq!((one.mean_us, one.p95_us), (7.0, 7.0));
    }
}
