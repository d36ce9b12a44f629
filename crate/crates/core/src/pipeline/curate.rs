use std::collections::BTreeMap;
use std::fmt::Write;
use std::path::PathBuf;

use super::{at, ext_map, manifest, PipelineError};
use crate::config::RunConfig;
use crate::corpus::{
    classify_files, corpus_digest, dedup_files, frequency_filter, license_filter, quality_filter,
    stratified_sample, write_sample_csv, CorpusError, SampleSpec, SampleStage, SourceFile,
};
use crate::report::{write_text, RunRecord};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FunnelStage {
    pub stage: &'static str,
    pub count: usize,
    pub unit: &'static str,
}

#[derive(Debug, Clone)]
pub struct CurateOutcome {
    pub sample: Vec<SourceFile>,
    pub funnel: Vec<FunnelStage>,
    pub notes: Vec<String>,
    pub sample_csv: PathBuf,
    pub corpus_digest: String,
}

/// Filters projects, classifies and deduplicates their files, and draws the
/// first-stage sample. Writes `sample.csv`, `curation.log` and `run.json`.
pub fn cmd_curate(cfg: &RunConfig) -> Result<CurateOutcome, PipelineError> {
    let (projects, mut notes) = manifest(cfg)?;
    if projects.is_empty() {
        return Err(at("manifest")(CorpusError::EmptyManifest));
    }
    if !(0.0..=1.0).contains(&cfg.sample.min_lang_frequency) {
        return Err(at("filter")(CorpusError::InvalidFrequency(cfg.sample.min_lang_frequency)));
    }
    let mut funnel = vec![FunnelStage { stage: "manifest", count: projects.len(), unit: "projects" }];
    let licensed = license_filter(&projects, &cfg.sample.licenses);
    funnel.push(FunnelStage { stage: "license", count: licensed.len(), unit: "projects" });
    let quality = quality_filter(&licensed);
    funnel.push(FunnelStage { stage: "quality", count: quality.len(), unit: "projects" });
    let kept = frequency_filter(&quality, &licensed, cfg.sample.min_lang_frequency);
    funnel.push(FunnelStage { stage: "frequency", count: kept.len(), unit: "projects" });

    let map = ext_map(cfg)?;
    let classified = classify_files(&kept, &map).map_err(at("classify"))?;
    funnel.push(FunnelStage { stage: "classify", count: classified.files.len(), unit: "files" });
    if classified.unreadable > 0 {
        notes.push(format!("{} unreadable entries skipped", classified.unreadable));
    }
    let unique = dedup_files(&classified.files);
    funnel.push(FunnelStage { stage: "dedup", count: unique.len(), unit: "files" });

    let spec = SampleSpec::new(cfg.sample.per_language, cfg.seed, SampleStage::First);
    let sample = stratified_sample(&unique, &spec).map_err(at("sample"))?;
    funnel.push(FunnelStage { stage: "sample", count: sample.len(), unit: "files" });

    let dir = cfg.curate_dir();
    std::fs::create_dir_all(&dir).map_err(at("write"))?;
    let sample_csv = dir.join("sample.csv");
    let f = std::fs::File::create(&sample_csv).map_err(at("write"))?;
    write_sample_csv(f, &sample).map_err(at("write"))?;

    let mut per_language: BTreeMap<&str, usize> = BTreeMap::new();
    for f in &sample {
        *per_language.entry(&f.language).or_default() += 1;
    }
    let mut log = String::new();
    for s in &funnel {
        let _ = writeln!(log, "{:<10} {:>8} {}", s.stage, s.count, s.unit);
    }
    for (lang, n) in &per_language {
        let _ = writeln!(log, "  {lang}: {n}");
    }
    for n in &notes {
        let _ = writeln!(log, "note: {n}");
    }
    write_text(&dir.join("curation.log"), &log).map_err(at("write"))?;

    let digest = corpus_digest(sample.iter().map(|f| f.content_hash.as_str()));
    let mut run = RunRecord::new("curate", cfg.seed, cfg).map_err(at("run.json"))?;
    run.corpus_digest = Some(digest.clone());
    let funnel_json: Vec<_> = funnel
        .iter()
        .map(|s| serde_json::json!({"stage": s.stage, "count": s.count, "unit": s.unit}))
        .collect();
    run.set("funnel", funnel_json).map_err(at("run.json"))?;
    run.set("per_language", &per_language).map_err(at("run.json"))?;
    run.set("notes", &notes).map_err(at("run.json"))?;
    run.write(&dir.join("run.json")).map_err(at("run.json"))?;

    Ok(CurateOutcome { sample, funnel, notes, sample_csv, corpus_digest: digest })
}
