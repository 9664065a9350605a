use iocr::stats::{one_way_anova, paired_t_test, SampleGroup, StatsError};
use proptest::prelude::*;

/// Sums of squares from pairwise differences: Σ_{i<j} (x_i - x_j)² / n.
fn pairwise_ss(xs: &[f64]) -> f64 {
    let mut s = 0.0;
    for i in 0..xs.len() {
        for j in i + 1..xs.len() {
            s += (xs[i] - xs[j]).powi(2);
        }
    }
    s / xs.len() as f64
}

/// Between-group sum of squares from pairwise differences of group means:
/// Σ_{g<h} n_g n_h (m_g - m_h)² / n. No totals are subtracted, so it stays
/// accurate when the means nearly coincide.
fn ss_between(groups: &[Vec<f64>]) -> f64 {
    let n: usize = groups.iter().map(Vec::len).sum();
    let mean = |g: &[f64]| g.iter().sum::<f64>() / g.len() as f64;
    let mut s = 0.0;
    for (i, g) in groups.iter().enumerate() {
        for h in &groups[i + 1..] {
            s += (g.len() * h.len()) as f64 * (mean(g) - mean(h)).powi(2);
        }
    }
    s / n as f64
}

fn anova_oracle(groups: &[Vec<f64>]) -> f64 {
    let ssw: f64 = groups.iter().map(|g| pairwise_ss(g)).sum();
    let k = groups.len() as f64;
    let n = groups.iter().map(Vec::len).sum::<usize>() as f64;
    (ss_between(groups) / (k - 1.0)) / (ssw / (n - k))
}

fn t_oracle(a: &[f64], b: &[f64]) -> f64 {
    let d: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    let n = d.len() as f64;
    let var = pairwise_ss(&d) / (n - 1.0);
    (d.iter().sum::<f64>() / n) / (var / n).sqrt()
}

fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1e-300)
}

fn to_groups(vals: &[Vec<f64>]) -> Vec<SampleGroup> {
    vals.iter()
        .enumerate()
        .map(|(i, v)| SampleGroup::new(format!("q{i}"), v.clone()))
        .collect()
}

fn arb_groups() -> impl Strategy<Value = Vec<Vec<f64>>> {
    prop::collection::vec(prop::collection::vec(0.0f64..1.0, 2..40), 2..6)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn anova_matches_recomputation(groups in arb_groups()) {
        let r = one_way_anova(&to_groups(&groups)).unwrap();
        let n: usize = groups.iter().map(Vec::len).sum();
        prop_assert_eq!(r.df_between, groups.len() - 1);
        prop_assert_eq!(r.df_within, n - groups.len());
        prop_assert!(rel_close(r.f, anova_oracle(&groups), 1e-9), "{} vs {}", r.f, anova_oracle(&groups));
        prop_assert!((0.0..=1.0).contains(&r.p_value));
    }

    #[test]
    fn anova_ignores_labels_order_and_shift(groups in arb_groups(), shift in -5.0f64..5.0) {
        let base = one_way_anova(&to_groups(&groups)).unwrap();
        let mut reversed = groups.clone();
        reversed.reverse();
        let relabelled: Vec<SampleGroup> = reversed
            .iter()
            .enumerate()
            .map(|(i, v)| SampleGroup::new(format!("other{i}"), v.clone()))
            .collect();
        prop_assert!(rel_close(one_way_anova(&relabelled).unwrap().f, base.f, 1e-9));
        let shifted: Vec<Vec<f64>> = groups.iter().map(|g| g.iter().map(|x| x + shift).collect()).collect();
        prop_assert!(rel_close(one_way_anova(&to_groups(&shifted)).unwrap().f, base.f, 1e-9));
    }

    #[test]
    fn paired_t_matches_recomputation(pairs in prop::collection::vec((0.0f64..1.0, 0.0f64..1.0), 2..80)) {
        let (a, b): (Vec<f64>, Vec<f64>) = pairs.into_iter().unzip();
        let r = paired_t_test(&a, &b).unwrap();
        prop_assert_eq!(r.df, a.len() - 1);
        prop_assert!(rel_close(r.t, t_oracle(&a, &b), 1e-9));
        let flipped = paired_t_test(&b, &a).unwrap();
        prop_assert_eq!(flipped.t, -r.t);
        prop_assert!((flipped.p_value - r.p_value).abs() < 1e-12);
    }

    #[test]
    fn constant_offsets_are_degenerate(a in prop::collection::vec(0.0f64..1.0, 2..30), c in -1.0f64..1.0) {
        let b: Vec<f64> = a.iter().map(|x| x + c).collect();
        prop_assert_eq!(paired_t_test(&b, &a), Err(StatsError::DegenerateT));
    }
}

#[test]
fn hand_computed_example() {
    let r = one_way_anova(&to_groups(&[vec![1.0, 2.0, 3.0], vec![2.0, 3.0, 4.0], vec![3.0, 4.0, 5.0]])).unwrap();
    assert!((r.f - 3.0).abs() < 1e-12);
    assert_eq!((r.df_between, r.df_within), (2, 6));
}
