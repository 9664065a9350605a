//! One-way ANOVA and the paired t-test over per-ballot accuracies.

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, FisherSnedecor, StudentsT};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum StatsError {
    #[error("need at least {needed} groups, got {got}")]
    TooFewGroups { needed: usize, got: usize },
    #[error("group {label:?} has {got} values, need at least 2")]
    TooFewValues { label: String, got: usize },
    #[error("paired samples differ in length: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("degenerate F: zero within-group variance")]
    DegenerateF,
    #[error("degenerate t: zero variance of differences")]
    DegenerateT,
    #[error("non-finite value in {0:?}")]
    NonFinite(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleGroup {
    pub label: String,
    pub values: Vec<f64>,
}

impl SampleGroup {
    pub fn new(label: impl Into<String>, values: Vec<f64>) -> Self {
        Self {
            label: label.into(),
            values,
        }
    }

    pub fn mean(&self) -> f64 {
        mean(&self.values)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnovaResult {
    pub f: f64,
    pub df_between: usize,
    pub df_within: usize,
    pub p_value: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TTestResult {
    pub t: f64,
    pub df: usize,
    /// Two-sided.
    pub p_value: f64,
}

fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// True when a sum of squared deviations is indistinguishable from rounding
/// noise for values of this magnitude.
fn negligible(sum_sq: f64, values: impl Iterator<Item = f64>) -> bool {
    let (mut n, mut scale) = (0usize, 0f64);
    for v in values {
        n += 1;
        scale = scale.max(v.abs());
    }
    let tol = 64.0 * f64::EPSILON * scale;
    sum_sq <= n as f64 * tol * tol
}

fn check_finite(label: &str, xs: &[f64]) -> Result<(), StatsError> {
    if xs.iter().all(|x| x.is_finite()) {
        Ok(())
    } else {
        Err(StatsError::NonFinite(label.to_string()))
    }
}

pub fn one_way_anova(groups: &[SampleGroup]) -> Result<AnovaResult, StatsError> {
    if groups.len() < 2 {
        return Err(StatsError::TooFewGroups {
            needed: 2,
            got: groups.len(),
        });
    }
    for g in groups {
        if g.values.len() < 2 {
            return Err(StatsError::TooFewValues {
                label: g.label.clone(),
                got: g.values.len(),
            });
        }
        check_finite(&g.label, &g.values)?;
    }
    let n: usize = groups.iter().map(|g| g.values.len()).sum();
    let grand = groups.iter().flat_map(|g| &g.values).sum::<f64>() / n as f64;
    let (mut ssb, mut ssw) = (0.0, 0.0);
    for g in groups {
        let m = g.mean();
        ssb += g.values.len() as f64 * (m - grand).powi(2);
        ssw += g.values.iter().map(|x| (x - m).powi(2)).sum::<f64>();
    }
    if negligible(ssw, groups.iter().flat_map(|g| g.values.iter().copied())) {
        return Err(StatsError::DegenerateF);
    }
    let df_between = groups.len() - 1;
    let df_within = n - groups.len();
    let f = (ssb / df_between as f64) / (ssw / df_within as f64);
    let dist = FisherSnedecor::new(df_between as f64, df_within as f64).expect("positive degrees of freedom");
    Ok(AnovaResult {
        f,
        df_between,
        df_within,
        p_value: dist.sf(f),
    })
}

pub fn paired_t_test(a: &[f64], b: &[f64]) -> Result<TTestResult, StatsError> {
    if a.len() != b.len() {
        return Err(StatsError::LengthMismatch(a.len(), b.len()));
    }
    if a.len() < 2 {
        return Err(StatsError::TooFewValues {
            label: "paired".into(),
            got: a.len(),
        });
    }
    check_finite("a", a)?;
    check_finite("b", b)?;
    let diffs: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    let n = diffs.len() as f64;
    let m = mean(&diffs);
    let ss = diffs.iter().map(|d| (d - m).powi(2)).sum::<f64>();
    // Rounding in the differences scales with the inputs, not the differences.
    if negligible(ss, a.iter().chain(b).copied()) {
        return Err(StatsError::DegenerateT);
    }
    let var = ss / (n - 1.0);
    let t = m / (var / n).sqrt();
    let df = diffs.len() - 1;
    let dist = StudentsT::new(0.0, 1.0, df as f64).expect("positive degrees of freedom");
    Ok(TTestResult {
        t,
        df,
        p_value: (2.0 * dist.sf(t.abs())).min(1.0),
    })
}
