//! Aggregation of file-level perplexities into per-language statistics,
//! language rankings, rank correlations and cross-model matrices.

mod attributes;
mod matrix;
mod rank;
mod stats;
mod summary;

use std::collections::BTreeMap;
use std::path::PathBuf;

use serde::Serialize;
use thiserror::Error;

pub use attributes::{attribute_scatter, AttributeTable, Scatter, ScatterPoint};
pub use matrix::{align_medians, pearson_matrix, PearsonMatrix};
pub use rank::{kendall, rank_correlation, spearman, RankCorrelation, EXACT_MAX_N};
pub use stats::{average_ranks, mean, median, pearson, quantile, quantile_sorted};
pub use summary::{language_summary, tukey_split, LanguageSummary, MIN_QUARTILE_FILES, TUKEY_K};

#[derive(Debug, Error)]
pub enum AnalysisError {
    #[error("{0}: {1}")]
    Io(PathBuf, #[source] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error("{0}")]
    Schema(String),
    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("need at least 3 paired values, got {0}")]
    TooFew(usize),
    #[error("need at least 2 models, got {0}")]
    TooFewModels(usize),
    #[error("non-finite value in ranking input")]
    NonFinite,
    #[error("a ranking with every value tied has no rank correlation")]
    ConstantRanking,
    #[error("unknown attribute `{0}`")]
    UnknownAttribute(String),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RankedLanguage {
    pub rank: usize,
    pub language: String,
    pub median: f64,
}

/// Rank 1 is the lowest median perplexity.
pub fn rank_languages(summaries: &[LanguageSummary]) -> Vec<RankedLanguage> {
    let mut s: Vec<&LanguageSummary> = summaries.iter().collect();
    s.sort_by(|a, b| a.median.total_cmp(&b.median).then_with(|| a.language.cmp(&b.language)));
    s.into_iter()
        .enumerate()
        .map(|(i, s)| RankedLanguage { rank: i + 1, language: s.language.clone(), median: s.median })
        .collect()
}

/// An ordering of languages from some other study: lower rank first.
#[derive(Debug, Clone, PartialEq)]
pub struct ExternalRanking {
    pub study: String,
    pub ranks: BTreeMap<String, f64>,
}

impl ExternalRanking {
    /// CSV with columns `language,rank`.
    pub fn from_reader<R: std::io::Read>(study: &str, reader: R) -> Result<Self, AnalysisError> {
        let mut rdr = csv::Reader::from_reader(reader);
        let headers = rdr.headers()?.clone();
        if headers.iter().collect::<Vec<_>>() != ["language", "rank"] {
            return Err(AnalysisError::Schema(format!("ranking `{study}` must have columns language,rank")));
        }
        let mut ranks = BTreeMap::new();
        for rec in rdr.records() {
            let rec = rec?;
            let rank: f64 = rec[1].trim().parse().map_err(|_| {
                AnalysisError::Schema(format!("ranking `{study}`: bad rank `{}`", &rec[1]))
            })?;
            ranks.insert(rec[0].trim().to_string(), rank);
        }
        Ok(Self { study: study.to_string(), ranks })
    }

    pub fn load(path: &std::path::Path) -> Result<Self, AnalysisError> {
        let study = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
        let f = std::fs::File::open(path).map_err(|e| AnalysisError::Io(path.to_path_buf(), e))?;
        Self::from_reader(&study, f)
    }
}

/// Correlates a model's medians with an external ranking over the
/// languages both cover.
pub fn compare_ranking(
    summaries: &[LanguageSummary],
    external: &ExternalRanking,
) -> Result<RankCorrelation, AnalysisError> {
    let (mut ours, mut theirs) = (Vec::new(), Vec::new());
    for s in summaries {
        if let Some(&r) = external.ranks.get(&s.language) {
            ours.push(s.median);
            theirs.push(r);
        }
    }
    rank_correlation(&ours, &theirs)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn external_ranking_agreement() {
        let mut values = BTreeMap::new();
        for (i, l) in ["C", "Go", "R", "Java"].iter().enumerate() {
            values.insert(l.to_string(), vec![(i + 1) as f64 * 10.0; 4]);
        }
        let sums = language_summary(&values);
        let same = ExternalRanking::from_reader("same", "language,rank\nC,1\nGo,2\nR,3\nJava,4\nPerl,5\n".as_bytes()).unwrap();
        let rev = ExternalRanking::from_reader("rev", "language,rank\nC,4\nGo,3\nR,2\nJava,1\n".as_bytes()).unwrap();
        let a = compare_ranking(&sums, &same).unwrap();
        let b = compare_ranking(&sums, &rev).unwrap();
        assert_eq!((a.rho, a.tau, a.n), (1.0, 1.0, 4));
        assert_eq!((b.rho, b.tau), (-1.0, -1.0));
        let ranked = rank_languages(&sums);
        assert_eq!(ranked[0].language, "C");
        assert_eq!(ranked[3].rank, 4);
    }
}
