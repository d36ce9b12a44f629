//! Corpus curation: manifest filtering, language classification, exact
//! deduplication and per-language stratified sampling.

mod classify;
mod extmap;
mod manifest;
mod records;
mod select;

use std::fmt;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

pub use classify::{classify_files, Classified};
pub use extmap::ExtensionMap;
pub use manifest::{
    filter_projects, frequency_filter, license_filter, load_manifest, parse_manifest,
    quality_filter, ManifestLoad, ProjectRecord, RowDiagnostic, GNU_LICENSES,
};
pub use records::{read_sample_csv, write_sample_csv, SampleRecord};
pub use select::{dedup_files, size_filter, stratified_sample, SampleSpec, SampleStage};

#[derive(Debug, Error)]
pub enum CorpusError {
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
    #[error("manifest contains no projects")]
    EmptyManifest,
    #[error("minimum language frequency {0} is outside [0, 1]")]
    InvalidFrequency(f64),
    #[error("project `{project}`: cannot read root {path}: {source}")]
    UnreadableRoot {
        project: String,
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("extension map line {line}: {message}")]
    ExtensionMap { line: usize, message: String },
    #[error("language `{language}` has {available} files, fewer than the quota of {requested}")]
    QuotaExceeded {
        language: String,
        available: usize,
        requested: usize,
    },
    #[error("per-language quota must be positive")]
    ZeroQuota,
    #[error("{project}/{path}: token count missing; tokenize before size filtering")]
    MissingTokenCount { project: String, path: String },
    #[error("context size must be positive")]
    ZeroContext,
}

/// Identity of a file in the corpus. Orders by language, then project,
/// then path, which is the canonical output order everywhere.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct FileKey {
    pub language: String,
    pub project: String,
    pub path: String,
}

impl fmt::Display for FileKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.project, self.path)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SourceFile {
    pub project: String,
    /// Path relative to the project root, `/`-separated.
    pub path: String,
    pub language: String,
    pub raw_bytes: Vec<u8>,
    /// Lowercase hex SHA-256 of `raw_bytes`.
    pub content_hash: String,
    pub token_count: Option<usize>,
}

impl SourceFile {
    pub fn new(project: &str, path: &str, language: &str, raw_bytes: Vec<u8>) -> Self {
        let content_hash = content_hash(&raw_bytes);
        Self {
            project: project.to_string(),
            path: path.to_string(),
            language: language.to_string(),
            raw_bytes,
            content_hash,
            token_count: None,
        }
    }

    pub fn key(&self) -> FileKey {
        FileKey {
            language: self.language.clone(),
            project: self.project.clone(),
            path: self.path.clone(),
        }
    }

    fn sort_key(&self) -> (&str, &str, &str) {
        (&self.language, &self.project, &self.path)
    }
}

pub fn content_hash(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Digest over the sorted content hashes of a file set. Used in run
/// metadata to pin which corpus a result came from.
pub fn corpus_digest<'a>(hashes: impl IntoIterator<Item = &'a str>) -> String {
    let mut all: Vec<&str> = hashes.into_iter().collect();
    all.sort_unstable();
    let mut hasher = Sha256::new();
    for h in all {
        hasher.update(h.as_bytes());
        hasher.update(b"\n");
    }
    hex::encode(hasher.finalize())
}
