//! Report artifacts: score tables, per-language summaries, rankings,
//! correlation tables, SVG charts and the `run.json` replay record.
//!
//! Every float in a CSV is written with 9 significant digits, so equal
//! inputs give byte-identical files.

mod num;
mod svg;

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use num::{fmt_g9, fmt_opt};
pub use svg::{boxplot_svg, scatter_svg};

use crate::analysis::{
    align_medians, attribute_scatter, compare_ranking, language_summary, pearson_matrix, rank_languages,
    AnalysisError, AttributeTable, ExternalRanking, LanguageSummary, RankCorrelation,
};
use crate::engine::FileScore;
use crate::tokenize::TokenStats;

pub const RUN_SCHEMA_VERSION: u32 = 1;
pub const SCORES_HEADER: [&str; 6] = ["file", "project", "language", "n_tokens", "n_scored", "perplexity"];

#[derive(Debug, Error)]
pub enum ReportError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },
    #[error("{path}: {message}")]
    Schema { path: PathBuf, message: String },
    #[error(transparent)]
    Analysis(#[from] AnalysisError),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> ReportError + '_ {
    move |source| ReportError::Io { path: path.to_path_buf(), source }
}

fn csv_err(path: &Path) -> impl FnOnce(csv::Error) -> ReportError + '_ {
    move |source| ReportError::Csv { path: path.to_path_buf(), source }
}

/// Writes rows (header first) to `path` as CSV.
pub fn write_csv(path: &Path, header: &[&str], rows: &[Vec<String>]) -> Result<(), ReportError> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).map_err(io_err(dir))?;
    }
    let mut w = csv::Writer::from_path(path).map_err(csv_err(path))?;
    w.write_record(header).map_err(csv_err(path))?;
    for r in rows {
        w.write_record(r).map_err(csv_err(path))?;
    }
    w.flush().map_err(io_err(path))
}

pub fn write_text(path: &Path, text: &str) -> Result<(), ReportError> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).map_err(io_err(dir))?;
    }
    fs::write(path, text).map_err(io_err(path))
}

/// One row of a scores file.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreRow {
    pub file: String,
    pub project: String,
    pub language: String,
    pub n_tokens: usize,
    pub n_scored: usize,
    pub perplexity: f64,
}

impl From<&FileScore> for ScoreRow {
    fn from(s: &FileScore) -> Self {
        Self {
            file: s.source.path.clone(),
            project: s.source.project.clone(),
            language: s.source.language.clone(),
            n_tokens: s.n_tokens,
            n_scored: s.n_scored,
            perplexity: s.perplexity,
        }
    }
}

pub fn write_scores(path: &Path, scores: &[FileScore]) -> Result<(), ReportError> {
    let rows: Vec<Vec<String>> = scores
        .iter()
        .map(|s| {
            vec![
                s.source.path.clone(),
                s.source.project.clone(),
                s.source.language.clone(),
                s.n_tokens.to_string(),
                s.n_scored.to_string(),
                fmt_g9(s.perplexity),
            ]
        })
        .collect();
    write_csv(path, &SCORES_HEADER, &rows)
}

pub fn read_scores(path: &Path) -> Result<Vec<ScoreRow>, ReportError> {
    let schema = |message: String| ReportError::Schema { path: path.to_path_buf(), message };
    let mut rdr = csv::Reader::from_path(path).map_err(csv_err(path))?;
    let header: Vec<String> = rdr.headers().map_err(csv_err(path))?.iter().map(String::from).collect();
    if header != SCORES_HEADER {
        return Err(schema(format!("expected columns {}, found {}", SCORES_HEADER.join(","), header.join(","))));
    }
    let mut rows = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(csv_err(path))?;
        let line = i + 2;
        let int = |j: usize| -> Result<usize, ReportError> {
            rec[j].parse().map_err(|_| schema(format!("line {line}: `{}` is not a count", &rec[j])))
        };
        let perplexity: f64 = rec[5]
            .parse()
            .map_err(|_| schema(format!("line {line}: `{}` is not a number", &rec[5])))?;
        if !(perplexity.is_finite() && perplexity > 0.0) {
            return Err(schema(format!("line {line}: perplexity must be positive, got {perplexity}")));
        }
        rows.push(ScoreRow {
            file: rec[0].to_string(),
            project: rec[1].to_string(),
            language: rec[2].to_string(),
            n_tokens: int(3)?,
            n_scored: int(4)?,
            perplexity,
        });
    }
    Ok(rows)
}

pub fn write_token_stats(path: &Path, stats: &BTreeMap<String, TokenStats>) -> Result<(), ReportError> {
    let rows: Vec<Vec<String>> = stats
        .iter()
        .map(|(l, s)| vec![l.clone(), s.files.to_string(), fmt_g9(s.median_tokens), fmt_g9(s.median_unique_tokens)])
        .collect();
    write_csv(path, &["language", "files", "median_tokens", "median_unique_tokens"], &rows)
}

/// Replay record written next to every command's outputs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub schema_version: u32,
    pub tool: String,
    pub tool_version: String,
    pub command: String,
    pub seed: u64,
    pub corpus_digest: Option<String>,
    pub config: serde_json::Value,
    pub details: BTreeMap<String, serde_json::Value>,
}

impl RunRecord {
    pub fn new(command: &str, seed: u64, config: &impl Serialize) -> Result<Self, ReportError> {
        Ok(Self {
            schema_version: RUN_SCHEMA_VERSION,
            tool: env!("CARGO_PKG_NAME").into(),
            tool_version: env!("CARGO_PKG_VERSION").into(),
            command: command.into(),
            seed,
            corpus_digest: None,
            config: serde_json::to_value(config)?,
            details: BTreeMap::new(),
        })
    }

    pub fn set(&mut self, key: &str, value: impl Serialize) -> Result<(), ReportError> {
        self.details.insert(key.to_string(), serde_json::to_value(value)?);
        Ok(())
    }

    pub fn write(&self, path: &Path) -> Result<(), ReportError> {
        let mut text = serde_json::to_string_pretty(self)?;
        text.push('\n');
        write_text(path, &text)
    }

    pub fn read(path: &Path) -> Result<Self, ReportError> {
        let text = fs::read_to_string(path).map_err(io_err(path))?;
        Ok(serde_json::from_str(&text)?)
    }
}

/// Statistical conventions recorded in every analysis run.
pub fn analysis_methods() -> serde_json::Value {
    serde_json::json!({
        "quartiles": "type-7 linear interpolation",
        "outliers": "Tukey fences at 1.5 IQR, computed on all values; statistics recomputed on retained values",
        "min_files_for_quartiles": crate::analysis::MIN_QUARTILE_FILES,
        "p_values": "two-sided",
        "exact_p_max_n": crate::analysis::EXACT_MAX_N,
        "spearman_large_n": "t approximation with n-2 degrees of freedom",
        "kendall": "tau-b; tie-corrected normal approximation above the exact limit",
    })
}

/// Scores of one model, labelled for the report's model axis.
#[derive(Debug, Clone)]
pub struct ModelScores {
    pub label: String,
    pub rows: Vec<ScoreRow>,
}

impl ModelScores {
    pub fn values_by_language(&self) -> BTreeMap<String, Vec<f64>> {
        let mut m: BTreeMap<String, Vec<f64>> = BTreeMap::new();
        for r in &self.rows {
            m.entry(r.language.clone()).or_default().push(r.perplexity);
        }
        m
    }
}

#[derive(Debug, Clone, Default)]
pub struct ReportInput {
    /// The first model is the reference for charts.
    pub models: Vec<ModelScores>,
    pub external: Vec<ExternalRanking>,
    pub attributes: Option<AttributeTable>,
    /// Attributes to chart; empty charts every attribute in the table.
    pub scatter_attributes: Vec<String>,
}

#[derive(Debug, Clone, Default)]
pub struct ReportBundle {
    pub summaries: BTreeMap<String, Vec<LanguageSummary>>,
    pub correlations: Vec<(String, String, RankCorrelation)>,
    pub files: Vec<PathBuf>,
    /// Non-fatal problems, such as undefined correlations.
    pub notes: Vec<String>,
}

fn file_label(label: &str) -> String {
    label
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '-' || c == '_' || c == '.' { c } else { '_' })
        .collect()
}

/// Writes the report files into `out_dir` and returns what was computed.
pub fn emit_report(input: &ReportInput, out_dir: &Path, run: &RunRecord) -> Result<ReportBundle, ReportError> {
    let mut bundle = ReportBundle::default();
    if input.models.is_empty() {
        return Err(ReportError::Schema { path: out_dir.to_path_buf(), message: "no score files given".into() });
    }
    let mut summary_rows = Vec::new();
    let mut ranking_rows = Vec::new();
    let mut ordered = Vec::new();
    for m in &input.models {
        if bundle.summaries.contains_key(&m.label) {
            return Err(ReportError::Schema {
                path: out_dir.to_path_buf(),
                message: format!("model label `{}` used twice", m.label),
            });
        }
        let sums = language_summary(&m.values_by_language());
        for s in &sums {
            summary_rows.push(vec![
                m.label.clone(),
                s.language.clone(),
                s.n_files.to_string(),
                fmt_g9(s.median),
                fmt_opt(s.q1),
                fmt_opt(s.q3),
                fmt_opt(s.whisker_low),
                fmt_opt(s.whisker_high),
                s.n_outliers_removed.to_string(),
            ]);
            if s.is_partial() {
                bundle.notes.push(format!("{}: {} has fewer than 4 files; quartiles omitted", m.label, s.language));
            }
        }
        for r in rank_languages(&sums) {
            ranking_rows.push(vec![m.label.clone(), r.rank.to_string(), r.language, fmt_g9(r.median)]);
        }
        ordered.push(m.label.clone());
        bundle.summaries.insert(m.label.clone(), sums);
    }
    let emit_csv = |name: &str, header: &[&str], rows: &[Vec<String>], bundle: &mut ReportBundle| {
        let path = out_dir.join(name);
        write_csv(&path, header, rows)?;
        bundle.files.push(path);
        Ok::<_, ReportError>(())
    };
    emit_csv(
        "summary.csv",
        &["model", "language", "n_files", "median", "q1", "q3", "whisker_low", "whisker_high", "n_outliers_removed"],
        &summary_rows,
        &mut bundle,
    )?;
    emit_csv("ranking.csv", &["model", "rank", "language", "median"], &ranking_rows, &mut bundle)?;

    if !input.external.is_empty() {
        let mut rows = Vec::new();
        for ext in &input.external {
            for label in &ordered {
                match compare_ranking(&bundle.summaries[label], ext) {
                    Ok(c) => rows.push((ext.study.clone(), label.clone(), c)),
                    Err(e) => bundle.notes.push(format!("{} vs {label}: {e}", ext.study)),
                }
            }
        }
        rows.sort_by(|a, b| b.2.rho.total_cmp(&a.2.rho).then_with(|| (&a.0, &a.1).cmp(&(&b.0, &b.1))));
        let table: Vec<Vec<String>> = rows
            .iter()
            .map(|(study, model, c)| {
                vec![
                    study.clone(),
                    model.clone(),
                    fmt_g9(c.rho),
                    fmt_g9(c.p_rho),
                    fmt_g9(c.tau),
                    fmt_g9(c.p_tau),
                    c.n.to_string(),
                ]
            })
            .collect();
        emit_csv(
            "correlations.csv",
            &["study", "model", "spearman_rho", "spearman_p", "kendall_tau", "kendall_p", "n_languages"],
            &table,
            &mut bundle,
        )?;
        bundle.correlations = rows;
    }

    if input.models.len() >= 2 {
        let per_model: BTreeMap<String, BTreeMap<String, f64>> = bundle
            .summaries
            .iter()
            .map(|(m, sums)| (m.clone(), sums.iter().map(|s| (s.language.clone(), s.median)).collect()))
            .collect();
        let (languages, vectors) = align_medians(&per_model);
        match pearson_matrix(&vectors) {
            Ok(mat) => {
                let mut header = vec!["model"];
                header.extend(mat.models.iter().map(String::as_str));
                let rows: Vec<Vec<String>> = mat
                    .models
                    .iter()
                    .zip(&mat.values)
                    .map(|(m, row)| std::iter::once(m.clone()).chain(row.iter().map(|v| fmt_opt(*v))).collect())
                    .collect();
                for d in &mat.degenerate {
                    bundle.notes.push(format!("{d}: medians have zero variance; correlations undefined"));
                }
                emit_csv("pearson.csv", &header, &rows, &mut bundle)?;
            }
            Err(e) => bundle.notes.push(format!("pearson matrix skipped: {e}")),
        }
        let mut models: Vec<(&String, f64)> = vectors
            .iter()
            .map(|(m, v)| (m, crate::analysis::median(v).unwrap_or(f64::NAN)))
            .collect();
        models.sort_by(|a, b| a.1.total_cmp(&b.1).then_with(|| a.0.cmp(b.0)));
        let mut rows = Vec::new();
        for (m, _) in models {
            for (l, v) in languages.iter().zip(&vectors[m]) {
                rows.push(vec![m.clone(), l.clone(), fmt_g9(*v)]);
            }
        }
        emit_csv("parallel.csv", &["model", "language", "median"], &rows, &mut bundle)?;
    }

    for (i, label) in ordered.iter().enumerate() {
        let name = if i == 0 { "boxplot.svg".to_string() } else { format!("boxplot.{}.svg", file_label(label)) };
        let path = out_dir.join(name);
        write_text(&path, &boxplot_svg(&bundle.summaries[label], &format!("Perplexity by language ({label})"), "perplexity"))?;
        bundle.files.push(path);
    }

    if let Some(table) = &input.attributes {
        let reference = &bundle.summaries[&ordered[0]];
        let names: Vec<String> =
            if input.scatter_attributes.is_empty() { table.attributes().to_vec() } else { input.scatter_attributes.clone() };
        for attr in names {
            let sc = attribute_scatter(reference, table, &attr)?;
            if !sc.missing.is_empty() {
                bundle.notes.push(format!("{attr}: missing for {}", sc.missing.join(", ")));
            }
            let path = out_dir.join(format!("scatter.{}.svg", file_label(&attr)));
            write_text(&path, &scatter_svg(&sc, &format!("{attr} vs median perplexity"), "median perplexity"))?;
            bundle.files.push(path);
        }
    }

    let mut run = run.clone();
    run.set("analysis", analysis_methods())?;
    run.set("models", &ordered)?;
    run.set("studies", input.external.iter().map(|e| &e.study).collect::<Vec<_>>())?;
    run.set("notes", &bundle.notes)?;
    let path = out_dir.join("run.json");
    run.write(&path)?;
    bundle.files.push(path);
    Ok(bundle)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rows(lang_vals: &[(&str, &[f64])]) -> Vec<ScoreRow> {
        let mut out = Vec::new();
        for (lang, vals) in lang_vals {
            for (i, v) in vals.iter().enumerate() {
                out.push(ScoreRow {
                    file: format!("f{i}"),
                    project: "p".into(),
                    language: lang.to_string(),
                    n_tokens: 100,
                    n_scored: 50,
                    perplexity: *v,
                });
            }
        }
        out
    }

    #[test]
    fn single_model_outputs() {
        let dir = tempfile::tempdir().unwrap();
        let input = ReportInput {
            models: vec![ModelScores { label: "m".into(), rows: rows(&[("C", &[3.0, 4.0, 5.0, 6.0]), ("Go", &[1.0, 2.0])]) }],
            ..Default::default()
        };
        let run = RunRecord::new("analyze", 13, &serde_json::json!({})).unwrap();
        let b = emit_report(&input, dir.path(), &run).unwrap();
        let summary = fs::read_to_string(dir.path().join("summary.csv")).unwrap();
        assert_eq!(
            summary,
            "model,language,n_files,median,q1,q3,whisker_low,whisker_high,n_outliers_removed\n\
             m,Go,2,1.5,NA,NA,NA,NA,0\n\
             m,C,4,4.5,3.75,5.25,3,6,0\n"
        );
        assert!(dir.path().join("boxplot.svg").exists());
        assert!(!dir.path().join("pearson.csv").exists());
        assert_eq!(b.notes.len(), 1);
        let rec = RunRecord::read(&dir.path().join("run.json")).unwrap();
        assert_eq!(rec.seed, 13);
        assert!(rec.details.contains_key("analysis"));
    }

    #[test]
    fn two_models_add_matrix() {
        let dir = tempfile::tempdir().unwrap();
        let a = rows(&[("C", &[1.0]), ("Go", &[2.0]), ("R", &[4.0])]);
        let b = rows(&[("C", &[2.0]), ("Go", &[4.0]), ("R", &[8.0])]);
        let input = ReportInput {
            models: vec![ModelScores { label: "a".into(), rows: a }, ModelScores { label: "b".into(), rows: b }],
            ..Default::default()
        };
        emit_report(&input, dir.path(), &RunRecord::new("analyze", 1, &()).unwrap()).unwrap();
        let pearson = fs::read_to_string(dir.path().join("pearson.csv")).unwrap();
        assert_eq!(pearson.lines().count(), 3);
        assert!(pearson.starts_with("model,a,b\n"));
        let parallel = fs::read_to_string(dir.path().join("parallel.csv")).unwrap();
        assert!(parallel.starts_with("model,language,median\na,C,1\n"));
    }

    #[test]
    fn scores_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("scores.csv");
        let score = FileScore {
            source: crate::FileKey { language: "C".into(), project: "p".into(), path: "a,b.c".into() },
            scorer_id: "u".into(),
            n_tokens: 10,
            n_scored: 5,
            sum_log2p: -40.0,
            perplexity: 256.0,
        };
        write_scores(&path, std::slice::from_ref(&score)).unwrap();
        assert_eq!(read_scores(&path).unwrap(), vec![ScoreRow::from(&score)]);
        fs::write(&path, "file,language\n").unwrap();
        assert!(matches!(read_scores(&path), Err(ReportError::Schema { .. })));
    }
}
