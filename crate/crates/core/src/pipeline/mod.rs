//! The four commands: `curate`, `perplexity`, `analyze` and
//! `protocol-check`. Each writes its outputs plus a `run.json` under the
//! configured output directory.

mod analyze;
mod curate;
mod perplexity;

use std::collections::BTreeMap;
use std::error::Error as StdError;
use std::fmt;
use std::path::{Path, PathBuf};

pub use analyze::{analyze, cmd_analyze, ScoresInput};
pub use curate::{cmd_curate, CurateOutcome, FunnelStage};
pub use perplexity::{cmd_perplexity, holdout_split, ContextInfo, PerplexityOutcome, ScorerRun};

use crate::clean::GrammarSet;
use crate::config::{endpoint_var_for, RunConfig};
use crate::corpus::{parse_manifest, ExtensionMap, ProjectRecord};
use crate::protocol::{check_endpoint, CheckReport, Endpoint, ScorerClient};

/// A failure tagged with the pipeline stage it came from.
#[derive(Debug)]
pub struct PipelineError {
    pub stage: &'static str,
    pub source: Box<dyn StdError + Send + Sync>,
}

impl fmt::Display for PipelineError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.stage, self.source)
    }
}

impl StdError for PipelineError {
    fn source(&self) -> Option<&(dyn StdError + 'static)> {
        Some(self.source.as_ref())
    }
}

pub(crate) fn at<E: Into<Box<dyn StdError + Send + Sync>>>(stage: &'static str) -> impl FnOnce(E) -> PipelineError {
    move |e| PipelineError { stage, source: e.into() }
}

pub(crate) fn fail(stage: &'static str, msg: impl Into<String>) -> PipelineError {
    PipelineError { stage, source: msg.into().into() }
}

pub(crate) fn ext_map(cfg: &RunConfig) -> Result<ExtensionMap, PipelineError> {
    match &cfg.ext_map {
        Some(p) => ExtensionMap::load(&cfg.resolve(p)).map_err(at("extension map")),
        None => Ok(ExtensionMap::builtin()),
    }
}

pub(crate) fn grammars(cfg: &RunConfig) -> Result<GrammarSet, PipelineError> {
    match &cfg.grammars {
        Some(p) => GrammarSet::load(&cfg.resolve(p)).map_err(at("grammars")),
        None => Ok(GrammarSet::builtin()),
    }
}

/// Manifest projects plus the text of every rejected row.
pub(crate) fn manifest(cfg: &RunConfig) -> Result<(Vec<ProjectRecord>, Vec<String>), PipelineError> {
    let path = cfg.resolve(&cfg.manifest);
    let base = match &cfg.corpus_root {
        Some(r) => cfg.resolve(r),
        None => path.parent().map(Path::to_path_buf).unwrap_or_default(),
    };
    let file = std::fs::File::open(&path).map_err(|e| fail("manifest", format!("{}: {e}", path.display())))?;
    let load = parse_manifest(file, &base).map_err(at("manifest"))?;
    let rejected = load.rejected.iter().map(|d| format!("manifest line {}: {}", d.line, d.message)).collect();
    Ok((load.projects, rejected))
}

pub(crate) fn project_roots(projects: &[ProjectRecord]) -> BTreeMap<&str, &Path> {
    projects.iter().map(|p| (p.name.as_str(), p.root_path.as_path())).collect()
}

/// Reads an endpoint from `spec` directly when it looks like one
/// (`tcp://`, `http://`, `exec:`), otherwise treats it as a scorer id and
/// reads that scorer's environment variable.
pub fn resolve_endpoint(cfg: Option<&RunConfig>, spec: &str) -> Result<Endpoint, PipelineError> {
    if spec.contains("://") || spec.starts_with("exec:") {
        return spec.parse().map_err(at("endpoint"));
    }
    let var = match cfg.and_then(|c| c.scorer(spec)) {
        Some(s) => s.endpoint_var(),
        None => endpoint_var_for(spec),
    };
    let value = std::env::var(&var)
        .map_err(|_| fail("endpoint", format!("scorer `{spec}`: environment variable {var} is not set")))?;
    value.parse().map_err(at("endpoint"))
}

/// Handshakes an external scorer and validates every request type.
pub fn protocol_check(endpoint: &Endpoint) -> Result<CheckReport, PipelineError> {
    let client = ScorerClient::connect(endpoint).map_err(at("connect"))?;
    check_endpoint(&client).map_err(at("protocol-check"))
}

pub(crate) fn scores_file_name(scorer_id: &str, single: bool) -> PathBuf {
    if single {
        PathBuf::from("scores.csv")
    } else {
        PathBuf::from(format!("scores.{scorer_id}.csv"))
    }
}
