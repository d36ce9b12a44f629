//! Cross-model correlation of per-language medians.

use std::collections::{BTreeMap, BTreeSet};

use super::stats::pearson;
use super::AnalysisError;

#[derive(Debug, Clone, PartialEq)]
pub struct PearsonMatrix {
    /// Row and column order: descending mean off-diagonal correlation.
    pub models: Vec<String>,
    /// `None` where a zero-variance vector leaves the entry undefined.
    pub values: Vec<Vec<Option<f64>>>,
    pub degenerate: Vec<String>,
}

impl PearsonMatrix {
    pub fn get(&self, a: &str, b: &str) -> Option<f64> {
        let i = self.models.iter().position(|m| m == a)?;
        let j = self.models.iter().position(|m| m == b)?;
        self.values[i][j]
    }
}

/// Restricts each model's medians to the languages every model has, in
/// name order.
pub fn align_medians(
    per_model: &BTreeMap<String, BTreeMap<String, f64>>,
) -> (Vec<String>, BTreeMap<String, Vec<f64>>) {
    let mut common: Option<BTreeSet<&String>> = None;
    for langs in per_model.values() {
        let keys: BTreeSet<&String> = langs.keys().collect();
        common = Some(match common {
            None => keys,
            Some(c) => c.intersection(&keys).copied().collect(),
        });
    }
    let languages: Vec<String> = common.unwrap_or_default().into_iter().cloned().collect();
    let vectors = per_model
        .iter()
        .map(|(m, langs)| (m.clone(), languages.iter().map(|l| langs[l]).collect()))
        .collect();
    (languages, vectors)
}

pub fn pearson_matrix(models: &BTreeMap<String, Vec<f64>>) -> Result<PearsonMatrix, AnalysisError> {
    if models.len() < 2 {
        return Err(AnalysisError::TooFewModels(models.len()));
    }
    let names: Vec<&String> = models.keys().collect();
    let len = models[names[0]].len();
    if let Some(bad) = models.values().find(|v| v.len() != len) {
        return Err(AnalysisError::LengthMismatch(len, bad.len()));
    }
    if len < 3 {
        return Err(AnalysisError::TooFew(len));
    }
    let k = names.len();
    let degenerate: Vec<String> = names
        .iter()
        .filter(|n| models[**n].iter().all(|&x| x == models[**n][0]))
        .map(|n| n.to_string())
        .collect();
    let mut raw = vec![vec![None; k]; k];
    for i in 0..k {
        for j in 0..k {
            raw[i][j] = if i == j {
                (!degenerate.contains(names[i])).then_some(1.0)
            } else {
                pearson(&models[names[i]], &models[names[j]])
            };
        }
    }
    let mean_off = |i: usize| -> f64 {
        let vals: Vec<f64> = (0..k).filter(|&j| j != i).filter_map(|j| raw[i][j]).collect();
        if vals.is_empty() {
            f64::NEG_INFINITY
        } else {
            vals.iter().sum::<f64>() / vals.len() as f64
        }
    };
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&a, &b| mean_off(b).total_cmp(&mean_off(a)).then_with(|| names[a].cmp(names[b])));
    Ok(PearsonMatrix {
        models: order.iter().map(|&i| names[i].clone()).collect(),
        values: order.iter().map(|&i| order.iter().map(|&j| raw[i][j]).collect()).collect(),
        degenerate,
    })
}
