use std::collections::{BTreeSet, HashSet};

use iocr::baselines::{
    brute_force_lookup, edits1_with, edits2_with, norvig_correct_with, norvig_edits1, symspell_build, symspell_lookup,
    FrequencyDictionary,
};
use proptest::prelude::*;

/// Optimal string alignment distance: Levenshtein plus adjacent swaps.
fn osa(a: &[char], b: &[char]) -> usize {
    let mut d = vec![vec![0usize; b.len() + 1]; a.len() + 1];
    for i in 0..=a.len() {
        d[i][0] = i;
    }
    for j in 0..=b.len() {
        d[0][j] = j;
    }
    for i in 1..=a.len() {
        for j in 1..=b.len() {
            let cost = usize::from(a[i - 1] != b[j - 1]);
            d[i][j] = (d[i - 1][j] + 1).min(d[i][j - 1] + 1).min(d[i - 1][j - 1] + cost);
            if i > 1 && j > 1 && a[i - 1] == b[j - 2] && a[i - 2] == b[j - 1] {
                d[i][j] = d[i][j].min(d[i - 2][j - 2] + 1);
            }
        }
    }
    d[a.len()][b.len()]
}

fn all_strings(alphabet: &[char], max_len: usize) -> Vec<String> {
    let mut out = vec![String::new()];
    let mut layer = vec![String::new()];
    for _ in 0..max_len {
        layer = layer
            .iter()
            .flat_map(|w| alphabet.iter().map(move |c| format!("{w}{c}")))
            .collect();
        out.extend(layer.iter().cloned());
    }
    out
}

/// Every string over the alphabet within one OSA edit of `word`. The empty
/// word has no letter to replace with itself, so it is not its own neighbour.
fn neighbours(word: &str, universe: &[String]) -> HashSet<String> {
    let w: Vec<char> = word.chars().collect();
    universe
        .iter()
        .filter(|s| {
            let c: Vec<char> = s.chars().collect();
            c.len().abs_diff(w.len()) <= 1 && osa(&w, &c) <= 1 && !(word.is_empty() && s.is_empty())
        })
        .cloned()
        .collect()
}

/// Every subsequence that drops at most `k` characters.
fn deletes_oracle(word: &str, k: usize) -> BTreeSet<String> {
    let c: Vec<char> = word.chars().collect();
    (0u32..1 << c.len())
        .filter(|mask| (mask.count_ones() as usize) <= k)
        .map(|mask| (0..c.len()).filter(|i| mask & (1 << i) == 0).map(|i| c[i]).collect())
        .collect()
}

const SMALL: &str = "abc";

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn edits1_equals_osa_neighbourhood(word in "[abc]{0,5}") {
        let alphabet: Vec<char> = SMALL.chars().collect();
        let universe = all_strings(&alphabet, word.len() + 1);
        prop_assert_eq!(edits1_with(&word, SMALL), neighbours(&word, &universe));
    }

    #[test]
    fn edits2_is_two_neighbourhood_steps(word in "[abc]{0,3}") {
        let alphabet: Vec<char> = SMALL.chars().collect();
        let universe = all_strings(&alphabet, word.len() + 2);
        let expected: HashSet<String> = neighbours(&word, &universe)
            .iter()
            .flat_map(|n| neighbours(n, &universe))
            .collect();
        let got = edits2_with(&word, SMALL);
        prop_assert!(got.is_superset(&edits1_with(&word, SMALL)));
        prop_assert_eq!(got, expected);
    }

    #[test]
    fn norvig_size_matches_enumeration(word in "[a-z]{1,7}") {
        let alphabet: Vec<char> = ('a'..='z').collect();
        let w: Vec<char> = word.chars().collect();
        // Count distinct strings by construction class, then deduplicate.
        let mut all = HashSet::new();
        for i in 0..w.len() {
            let mut d = w.clone();
            d.remove(i);
            all.insert(d);
        }
        for i in 0..w.len().saturating_sub(1) {
            let mut t = w.clone();
            t.swap(i, i + 1);
            all.insert(t);
        }
        for i in 0..=w.len() {
            for &c in &alphabet {
                let mut ins = w.clone();
                ins.insert(i, c);
                all.insert(ins);
                if i < w.len() {
                    let mut r = w.clone();
                    r[i] = c;
                    all.insert(r);
                }
            }
        }
        prop_assert_eq!(norvig_edits1(&word).len(), all.len());
    }

    #[test]
    fn norvig_correct_matches_tier_oracle(
        word in "[abc]{1,4}",
        dict_words in prop::collection::btree_map("[abc]{1,5}", 1u64..5, 1..12),
    ) {
        let alphabet: Vec<char> = SMALL.chars().collect();
        let universe = all_strings(&alphabet, word.len() + 2);
        let dict = FrequencyDictionary::from_counts(dict_words.clone()).unwrap();
        let tier1 = neighbours(&word, &universe);
        let tier2: HashSet<String> = tier1.iter().flat_map(|n| neighbours(n, &universe)).collect();
        let best = |tier: &HashSet<String>| {
            let mut known: Vec<(&String, u64)> = tier.iter().filter_map(|w| dict_words.get(w).map(|c| (w, *c))).collect();
            known.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(b.0)));
            known.first().map(|(w, _)| (*w).clone())
        };
        let expected = if dict_words.contains_key(&word) {
            word.clone()
        } else {
            best(&tier1).or_else(|| best(&tier2)).unwrap_or_else(|| word.clone())
        };
        prop_assert_eq!(norvig_correct_with(&word, &dict, 2, SMALL).unwrap(), expected);
    }

    #[test]
    fn delete_index_holds_exactly_the_deletes(terms in prop::collection::vec("[a-e]{0,7}", 1..20), k in 0usize..=2) {
        let idx = symspell_build(&terms, k);
        let keys: BTreeSet<String> = idx.keys().map(str::to_string).collect();
        let expected: BTreeSet<String> = terms.iter().flat_map(|t| deletes_oracle(t, k)).collect();
        prop_assert_eq!(keys, expected);
        for t in &terms {
            prop_assert!(idx.origins(t).unwrap().contains(t));
        }
    }

    #[test]
    fn symspell_equals_brute_force(
        terms in prop::collection::vec("[a-e]{1,8}", 1..200),
        queries in prop::collection::vec("[a-f]{0,9}", 1..20),
        k in 0usize..=2,
    ) {
        let idx = symspell_build(&terms, 2);
        for q in &queries {
            prop_assert_eq!(symspell_lookup(&idx, q, k).unwrap(), brute_force_lookup(&terms, q, k));
        }
    }
}
