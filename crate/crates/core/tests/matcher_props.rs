use iocr::lexicon::{assign_candidate_ids, build_contest_index, ContestIndex, Lexicon, DEFAULT_ID_D_MIN};
use iocr::matcher::{confusion_record, BallotLine, DecisionKind, Matcher, MatcherConfig};
use iocr::synth::{generate_ballots, inject_noise, BallotSpec, QualityLevel, NoiseModel};
use iocr::tally::ExpectedLine;
use proptest::prelude::*;

fn lexicon(seed: u64, ids: bool) -> Lexicon {
    let base = BallotSpec::mock_election(false, seed).base_lexicon().unwrap();
    if ids {
        assign_candidate_ids(&base, DEFAULT_ID_D_MIN, seed).unwrap()
    } else {
        base
    }
}

fn line(pos: usize, text: &str) -> BallotLine {
    BallotLine {
        ballot_id: "p".into(),
        line_position: pos,
        raw_text: text.into(),
        cleaned_text: text.trim().into(),
    }
}

#[derive(Debug, Clone)]
enum Edit {
    Delete(usize),
    Insert(usize, char),
    Substitute(usize, char),
}

fn apply(text: &str, edit: &Edit) -> String {
    let mut c: Vec<char> = text.chars().collect();
    let n = c.len();
    match *edit {
        Edit::Delete(i) => {
            c.remove(i % n);
        }
        Edit::Insert(i, ch) => c.insert(i % (n + 1), ch),
        Edit::Substitute(i, ch) => c[i % n] = ch,
    }
    c.into_iter().collect()
}

fn edit() -> impl Strategy<Value = Edit> {
    let ch = prop::sample::select(
        "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789 .:-()"
            .chars()
            .collect::<Vec<_>>(),
    );
    prop_oneof![
        any::<usize>().prop_map(Edit::Delete),
        (any::<usize>(), ch.clone()).prop_map(|(i, c)| Edit::Insert(i, c)),
        (any::<usize>(), ch).prop_map(|(i, c)| Edit::Substitute(i, c)),
    ]
}

fn matcher(index: &ContestIndex) -> Matcher<'_> {
    Matcher::new(index, MatcherConfig::default()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn exact_lines_are_confident(seed in any::<u64>(), ids in any::<bool>()) {
        let lex = lexicon(seed, ids);
        let index = build_contest_index(&lex);
        let m = matcher(&index);
        for e in lex.entries() {
            let d = m.match_line(&line(e.contest_index, &e.canonical_line)).unwrap();
            prop_assert_eq!(d.kind, DecisionKind::Confident);
            prop_assert_eq!(d.matched_entry.as_ref(), Some(e));
            prop_assert_eq!(d.candidates[0].lev_similarity.value(), 1.0);
            prop_assert_eq!(d.candidates[0].jw_similarity.value(), 1.0);
        }
    }

    /// A single edit never produces a wrong tally: the line either resolves
    /// to its own entry or is held for review.
    #[test]
    fn single_edits_are_never_mistallied(
        seed in any::<u64>(),
        ids in any::<bool>(),
        pick in any::<usize>(),
        e in edit(),
    ) {
        let lex = lexicon(seed, ids);
        let index = build_contest_index(&lex);
        let entry = &lex.entries()[pick % lex.len()];
        let corrupted = apply(&entry.canonical_line, &e);
        let d = matcher(&index).match_line(&line(entry.contest_index, &corrupted)).unwrap();
        match d.kind {
            DecisionKind::Confident => prop_assert_eq!(d.matched_entry.as_ref(), Some(entry)),
            DecisionKind::Confusion => {
                prop_assert!(d.candidates.len() >= 2);
                prop_assert!(d.candidates.iter().any(|c| &c.entry == entry));
            }
            other => prop_assert!(false, "{:?} for {:?}", other, corrupted),
        }
    }

    #[test]
    fn matching_is_deterministic(seed in any::<u64>(), pick in any::<usize>(), e in edit()) {
        let lex = lexicon(seed, false);
        let index = build_contest_index(&lex);
        let entry = &lex.entries()[pick % lex.len()];
        let probe = line(entry.contest_index, &apply(&entry.canonical_line, &e));
        let a = matcher(&index).match_line(&probe).unwrap();
        let b = matcher(&index).match_line(&probe).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn non_confident_decisions_keep_review_material(seed in 0u64..1000, text in "[A-Za-z .:()-]{0,60}") {
        let lex = lexicon(seed, false);
        let index = build_contest_index(&lex);
        let d = matcher(&index).match_line(&line(seed as usize % 10, &text)).unwrap();
        match d.kind {
            DecisionKind::Confident => prop_assert!(confusion_record(&d).is_none()),
            DecisionKind::Confusion => {
                prop_assert!(d.candidates.len() >= 2);
                prop_assert!(d.reason.is_some());
                prop_assert!(confusion_record(&d).is_some());
            }
            DecisionKind::WriteIn => {
                prop_assert_eq!(d.captured_text.as_deref(), Some(text.trim()));
                prop_assert!(!d.candidates.is_empty());
                prop_assert!(confusion_record(&d).is_none());
            }
            DecisionKind::Unreadable => prop_assert!(false, "match_line never yields Unreadable"),
        }
    }
}

/// Candidate lines always resolve exactly. A write-in is captured, or held
/// for review when its name happens to sit near a listed candidate under one
/// metric; it is never tallied as a vote for that candidate.
#[test]
fn clean_generated_ballots_resolve_to_their_truth() {
    let mut held = 0;
    for seed in 0..20 {
        for ids in [false, true] {
            let corpus = generate_ballots(&BallotSpec::mock_election(ids, seed)).unwrap();
            let index = build_contest_index(&corpus.lexicon);
            let m = matcher(&index);
            for b in corpus.ballots.iter().step_by(20) {
                let ds = m.resolve_ballot(&b.to_text(), &b.ballot_id).unwrap();
                for (d, want) in ds.iter().zip(&corpus.truth.ballots[&b.ballot_id]) {
                    match want {
                        ExpectedLine::Candidate(c) => {
                            assert_eq!(d.kind, DecisionKind::Confident, "{}", b.ballot_id);
                            assert_eq!(&d.matched_entry.as_ref().unwrap().canonical_line, c);
                        }
                        ExpectedLine::WriteIn(w) if d.kind == DecisionKind::WriteIn => {
                            assert_eq!(d.captured_text.as_ref(), Some(w));
                        }
                        ExpectedLine::WriteIn(_) => {
                            assert_eq!(d.kind, DecisionKind::Confusion, "{}", b.ballot_id);
                            held += 1;
                        }
                    }
                }
            }
            if seed == 0 {
                let all_exact = corpus.ballots.iter().all(|b| {
                    m.resolve_ballot(&b.to_text(), &b.ballot_id)
                        .unwrap()
                        .iter()
                        .all(|d| matches!(d.kind, DecisionKind::Confident | DecisionKind::WriteIn))
                });
                assert!(all_exact);
            }
        }
    }
    // 200 sampled write-in lines; a handful sit near a candidate.
    assert!(held <= 10, "{held} write-ins held for review");
}

#[test]
fn first_character_corruption_on_every_line_still_resolves() {
    let corpus = generate_ballots(&BallotSpec::mock_election(true, 3)).unwrap();
    let index = build_contest_index(&corpus.lexicon);
    let m = matcher(&index);
    let model = NoiseModel::new(1.0, iocr::synth::ErrorMix::only(iocr::synth::NoiseKind::FirstCharCorruption), 1).unwrap();
    let ballot = corpus
        .ballots
        .iter()
        .find(|b| corpus.truth.ballots[&b.ballot_id].iter().all(|l| matches!(l, ExpectedLine::Candidate(_))))
        .unwrap();
    let noisy = inject_noise(&ballot.to_text(), &model.for_ballot(&ballot.ballot_id)).unwrap();
    assert!(noisy.lines().zip(&ballot.lines).all(|(n, c)| n != c));
    let ds = m.resolve_ballot(&noisy, &ballot.ballot_id).unwrap();
    assert_eq!(ds.len(), 10);
    assert!(ds.iter().all(|d| d.kind == DecisionKind::Confident));
}

#[test]
fn calibrated_noise_keeps_generated_ballots_safe() {
    let corpus = generate_ballots(&BallotSpec::mock_election(false, 1)).unwrap();
    let index = build_contest_index(&corpus.lexicon);
    let m = matcher(&index);
    let model = NoiseModel::for_quality(QualityLevel::Fifth, 1);
    for b in &corpus.ballots {
        let noisy = inject_noise(&b.to_text(), &model.for_ballot(&b.ballot_id)).unwrap();
        for (d, want) in m.resolve_ballot(&noisy, &b.ballot_id).unwrap().iter().zip(&corpus.truth.ballots[&b.ballot_id]) {
            if let (DecisionKind::Confident, ExpectedLine::Candidate(c)) = (d.kind, want) {
                assert_eq!(&d.matched_entry.as_ref().unwrap().canonical_line, c);
            }
            assert!(!(d.kind == DecisionKind::Confident && matches!(want, ExpectedLine::WriteIn(_))));
        }
    }
}
