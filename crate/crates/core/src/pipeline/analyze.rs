use std::collections::BTreeSet;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use super::{at, fail, PipelineError};
use crate::analysis::{AttributeTable, ExternalRanking};
use crate::config::{AnalysisConfig, RunConfig};
use crate::report::{emit_report, read_scores, ModelScores, ReportBundle, ReportInput, RunRecord};

/// A scores file on the command line: `path` or `label=path`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScoresInput {
    pub label: Option<String>,
    pub path: PathBuf,
}

impl FromStr for ScoresInput {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.split_once('=') {
            Some((label, path)) if !label.is_empty() && !path.is_empty() => {
                Ok(Self { label: Some(label.to_string()), path: PathBuf::from(path) })
            }
            Some(_) => Err(format!("expected LABEL=PATH, got `{s}`")),
            None => Ok(Self { label: None, path: PathBuf::from(s) }),
        }
    }
}

impl ScoresInput {
    /// `scores.<id>.csv` is labelled `<id>`; a plain `scores.csv` takes the
    /// name of its directory.
    pub fn label(&self) -> String {
        if let Some(l) = &self.label {
            return l.clone();
        }
        let stem = self.path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
        match stem.strip_prefix("scores.") {
            Some(id) if !id.is_empty() => id.to_string(),
            _ if stem == "scores" => self
                .path
                .parent()
                .and_then(Path::file_name)
                .map(|n| n.to_string_lossy().into_owned())
                .unwrap_or(stem),
            _ => stem,
        }
    }
}

/// Runs the analysis with the config's `[analysis]` settings and writes
/// the report into `out` (the config's report directory when absent).
pub fn cmd_analyze(cfg: &RunConfig, inputs: &[ScoresInput], out: Option<&Path>) -> Result<ReportBundle, PipelineError> {
    let resolve = |p: &PathBuf| cfg.resolve(p);
    let settings = AnalysisConfig {
        attributes: cfg.analysis.attributes.as_ref().map(resolve),
        token_stats: cfg.analysis.token_stats.as_ref().map(resolve),
        scatter: cfg.analysis.scatter.clone(),
        rankings: cfg.analysis.rankings.iter().map(resolve).collect(),
    };
    let out_dir = out.map(Path::to_path_buf).unwrap_or_else(|| cfg.report_dir());
    let run = RunRecord::new("analyze", cfg.seed, cfg).map_err(at("run.json"))?;
    analyze(inputs, &settings, &out_dir, run)
}

/// Analysis with already resolved paths; usable without a config file.
pub fn analyze(
    inputs: &[ScoresInput],
    settings: &AnalysisConfig,
    out_dir: &Path,
    mut run: RunRecord,
) -> Result<ReportBundle, PipelineError> {
    if inputs.is_empty() {
        return Err(fail("analyze", "at least one scores file is required"));
    }
    let mut models = Vec::new();
    let mut labels = BTreeSet::new();
    let mut digests = Vec::new();
    for input in inputs {
        let label = input.label();
        if !labels.insert(label.clone()) {
            return Err(fail("analyze", format!("two inputs are labelled `{label}`; name them with LABEL=PATH")));
        }
        let bytes = std::fs::read(&input.path).map_err(|e| fail("scores", format!("{}: {e}", input.path.display())))?;
        digests.push(serde_json::json!({
            "label": label,
            "path": input.path.display().to_string(),
            "sha256": crate::corpus::content_hash(&bytes),
        }));
        let rows = read_scores(&input.path).map_err(at("scores"))?;
        models.push(ModelScores { label, rows });
    }

    let mut attributes: Option<AttributeTable> = None;
    for path in settings.attributes.iter().chain(&settings.token_stats) {
        let table = AttributeTable::load(path).map_err(at("attributes"))?;
        let merged = attributes.get_or_insert_with(AttributeTable::new);
        for name in table.attributes() {
            for m in &models {
                for r in &m.rows {
                    if let Some(v) = table.get(&r.language, name) {
                        merged.set(&r.language, name, v);
                    }
                }
            }
            if !merged.has_attribute(name) {
                merged.declare(name);
            }
        }
    }
    let external = settings
        .rankings
        .iter()
        .map(|p| ExternalRanking::load(p).map_err(at("rankings")))
        .collect::<Result<Vec<_>, _>>()?;

    run.set("inputs", digests).map_err(at("run.json"))?;
    let input = ReportInput { models, external, attributes, scatter_attributes: settings.scatter.clone() };
    emit_report(&input, out_dir, &run).map_err(at("report"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn labels() {
        let p = |s: &str| ScoresInput::from_str(s).unwrap();
        assert_eq!(p("out/perplexity/header/scores.trigram.csv").label(), "trigram");
        assert_eq!(p("out/perplexity/header/scores.csv").label(), "header");
        assert_eq!(p("llama=a/scores.csv").label(), "llama");
        assert_eq!(p("results.csv").label(), "results");
        assert!(ScoresInput::from_str("=x").is_err());
    }
}
