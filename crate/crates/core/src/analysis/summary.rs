//! Per-language box-plot statistics.

use std::collections::BTreeMap;

use serde::Serialize;

use super::stats::{median, quantile_sorted, sorted};

pub const TUKEY_K: f64 = 1.5;
pub const MIN_QUARTILE_FILES: usize = 4;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LanguageSummary {
    pub language: String,
    pub n_files: usize,
    pub median: f64,
    /// Quartiles and whiskers are absent for languages with fewer than
    /// four values.
    pub q1: Option<f64>,
    pub q3: Option<f64>,
    pub whisker_low: Option<f64>,
    pub whisker_high: Option<f64>,
    pub n_outliers_removed: usize,
}

impl LanguageSummary {
    pub fn is_partial(&self) -> bool {
        self.q1.is_none()
    }
}

/// Fences come from all values; statistics are recomputed on what stays
/// inside them.
pub fn tukey_split(values: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let s = sorted(values);
    let (Some(q1), Some(q3)) = (quantile_sorted(&s, 0.25), quantile_sorted(&s, 0.75)) else {
        return (s, Vec::new());
    };
    let iqr = q3 - q1;
    let (lo, hi) = (q1 - TUKEY_K * iqr, q3 + TUKEY_K * iqr);
    s.into_iter().partition(|&v| lo <= v && v <= hi)
}

/// Summaries ordered by ascending median, then language name. Empty groups
/// are skipped.
pub fn language_summary(values: &BTreeMap<String, Vec<f64>>) -> Vec<LanguageSummary> {
    let mut out: Vec<LanguageSummary> = values
        .iter()
        .filter(|(_, v)| !v.is_empty())
        .map(|(language, v)| summarize(language, v))
        .collect();
    out.sort_by(|a, b| a.median.total_cmp(&b.median).then_with(|| a.language.cmp(&b.language)));
    out
}

fn summarize(language: &str, values: &[f64]) -> LanguageSummary {
    if values.len() < MIN_QUARTILE_FILES {
        return LanguageSummary {
            language: language.to_string(),
            n_files: values.len(),
            median: median(values).expect("non-empty"),
            q1: None,
            q3: None,
            whisker_low: None,
            whisker_high: None,
            n_outliers_removed: 0,
        };
    }
    let (kept, removed) = tukey_split(values);
    LanguageSummary {
        language: language.to_string(),
        n_files: values.len(),
        median: median(&kept).expect("fences keep the quartiles"),
        q1: quantile_sorted(&kept, 0.25),
        q3: quantile_sorted(&kept, 0.75),
        whisker_low: kept.first().copied(),
        whisker_high: kept.last().copied(),
        n_outliers_removed: removed.len(),
    }
}
