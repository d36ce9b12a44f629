//! Run configuration: one versioned TOML file, with paths relative to the
//! file's directory and a handful of command-line overrides.
//!
//! ```toml
//! version = 1
//! seed = 13
//! manifest = "corpus/manifest.csv"
//! out_dir = "out"
//! clean_mode = "header"
//!
//! [tokenizer]
//! kind = "byte"
//!
//! [sample]
//! per_language = 6
//!
//! [[scorer]]
//! id = "trigram"
//! kind = "ngram"
//! order = 3
//! ```

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::clean::CleanMode;
use crate::corpus::GNU_LICENSES;
use crate::engine::{EngineConfig, ScorerKind, DEFAULT_CANDIDATES, DEFAULT_SEED};
use crate::tokenize::{TokenizerKind, DEFAULT_WHITESPACE_VOCAB};

pub const CONFIG_VERSION: u32 = 1;
pub const ENDPOINT_ENV_PREFIX: &str = "CODEPPL_SCORER_";

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Parse {
        path: PathBuf,
        #[source]
        source: toml::de::Error,
    },
    #[error("{0}")]
    Invalid(String),
}

fn invalid<T>(msg: impl Into<String>) -> Result<T, ConfigError> {
    Err(ConfigError::Invalid(msg.into()))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub version: u32,
    #[serde(default = "default_seed")]
    pub seed: u64,
    /// Base for relative project roots in the manifest; defaults to the
    /// manifest's directory.
    #[serde(default)]
    pub corpus_root: Option<PathBuf>,
    pub manifest: PathBuf,
    /// Extension map CSV; the bundled map when absent.
    #[serde(default)]
    pub ext_map: Option<PathBuf>,
    /// Comment grammar TOML; the bundled grammars when absent.
    #[serde(default)]
    pub grammars: Option<PathBuf>,
    #[serde(default = "default_out")]
    pub out_dir: PathBuf,
    /// Token cache location; `<out_dir>/cache` when absent.
    #[serde(default)]
    pub cache_dir: Option<PathBuf>,
    #[serde(default = "default_clean_mode")]
    pub clean_mode: CleanMode,
    #[serde(default = "default_workers")]
    pub workers: usize,
    #[serde(default)]
    pub tokenizer: TokenizerConfig,
    pub sample: SampleConfig,
    #[serde(default)]
    pub engine: EngineSection,
    #[serde(default, rename = "scorer")]
    pub scorers: Vec<ScorerConfig>,
    #[serde(default)]
    pub analysis: AnalysisConfig,
    #[serde(skip)]
    pub base_dir: PathBuf,
}

fn default_seed() -> u64 {
    DEFAULT_SEED
}

fn default_out() -> PathBuf {
    PathBuf::from("out")
}

fn default_clean_mode() -> CleanMode {
    CleanMode::HeaderStripped
}

fn default_workers() -> usize {
    1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TokenizerConfig {
    pub kind: TokenizerKind,
    #[serde(default)]
    pub id: Option<String>,
    /// Interning capacity of the whitespace tokenizer.
    #[serde(default)]
    pub vocab_size: Option<usize>,
    /// External tokenizers borrow the endpoint of this scorer.
    #[serde(default)]
    pub scorer: Option<String>,
}

impl Default for TokenizerConfig {
    fn default() -> Self {
        Self { kind: TokenizerKind::Byte, id: None, vocab_size: None, scorer: None }
    }
}

impl TokenizerConfig {
    pub fn id(&self) -> String {
        self.id.clone().unwrap_or_else(|| self.kind.to_string())
    }

    pub fn whitespace_vocab(&self) -> usize {
        self.vocab_size.unwrap_or(DEFAULT_WHITESPACE_VOCAB)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SampleConfig {
    pub per_language: usize,
    #[serde(default = "default_licenses")]
    pub licenses: BTreeSet<String>,
    #[serde(default)]
    pub min_lang_frequency: f64,
    /// Files per language to draw again after size filtering.
    #[serde(default)]
    pub second_stage: Option<usize>,
    /// Sample CSV read by the perplexity step; `<out_dir>/curate/sample.csv`
    /// when absent.
    #[serde(default)]
    pub sample_csv: Option<PathBuf>,
}

fn default_licenses() -> BTreeSet<String> {
    GNU_LICENSES.iter().map(|s| s.to_string()).collect()
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EngineSection {
    /// Fixed context size; derived from token medians when absent.
    #[serde(default)]
    pub ctx_size: Option<usize>,
    #[serde(default)]
    pub stride: Option<usize>,
    #[serde(default)]
    pub batch_size: Option<usize>,
    #[serde(default)]
    pub candidate_ctx: Option<Vec<usize>>,
}

impl EngineSection {
    pub fn stride(&self) -> usize {
        self.stride.unwrap_or(1)
    }

    pub fn candidates(&self) -> Vec<usize> {
        self.candidate_ctx.clone().unwrap_or_else(|| DEFAULT_CANDIDATES.to_vec())
    }

    pub fn engine_config(&self, ctx_size: usize, seed: u64) -> EngineConfig {
        EngineConfig {
            ctx_size,
            stride: self.stride(),
            batch_size: self.batch_size.unwrap_or(ctx_size),
            seed,
            candidate_ctx: self.candidates(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScorerConfig {
    pub id: String,
    pub kind: ScorerKind,
    /// n-gram order.
    #[serde(default)]
    pub order: Option<usize>,
    /// n-gram add-k constant.
    #[serde(default)]
    pub smoothing: Option<f64>,
    /// Share of each language's files used to train an n-gram scorer; the
    /// rest are scored. Zero trains and scores on every file.
    #[serde(default)]
    pub train_fraction: Option<f64>,
    /// Environment variable holding the endpoint of an external scorer;
    /// `CODEPPL_SCORER_<ID>` when absent.
    #[serde(default)]
    pub endpoint_env: Option<String>,
    #[serde(default)]
    pub connections: Option<usize>,
    /// Log2 probability of a fixed scorer.
    #[serde(default)]
    pub log2p: Option<f64>,
}

impl ScorerConfig {
    pub fn endpoint_var(&self) -> String {
        self.endpoint_env.clone().unwrap_or_else(|| endpoint_var_for(&self.id))
    }

    pub fn order(&self) -> usize {
        self.order.unwrap_or(3)
    }

    pub fn smoothing(&self) -> f64 {
        self.smoothing.unwrap_or(0.01)
    }

    pub fn train_fraction(&self) -> f64 {
        self.train_fraction.unwrap_or(0.5)
    }
}

/// `CODEPPL_SCORER_` followed by the id upper-cased, with every
/// non-alphanumeric character turned into `_`.
pub fn endpoint_var_for(id: &str) -> String {
    let tail: String = id
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() { c.to_ascii_uppercase() } else { '_' })
        .collect();
    format!("{ENDPOINT_ENV_PREFIX}{tail}")
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnalysisConfig {
    /// Per-language attribute table (`language,<attr>...`).
    #[serde(default)]
    pub attributes: Option<PathBuf>,
    /// Extra attribute tables merged in, e.g. a run's `token_stats.csv`.
    #[serde(default)]
    pub token_stats: Option<PathBuf>,
    /// Attributes to chart; all when empty.
    #[serde(default)]
    pub scatter: Vec<String>,
    /// Language rankings from other studies (`language,rank`).
    #[serde(default)]
    pub rankings: Vec<PathBuf>,
}

/// Command-line values that take precedence over the file.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub ctx_size: Option<usize>,
    pub stride: Option<usize>,
    pub scorer: Option<String>,
    pub clean_mode: Option<CleanMode>,
    pub workers: Option<usize>,
    pub out: Option<PathBuf>,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|source| ConfigError::Io { path: path.to_path_buf(), source })?;
        let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Self::parse(&text, &base).map_err(|e| match e {
            ConfigError::Parse { source, .. } => ConfigError::Parse { path: path.to_path_buf(), source },
            other => other,
        })
    }

    pub fn parse(text: &str, base_dir: &Path) -> Result<Self, ConfigError> {
        let mut cfg: RunConfig =
            toml::from_str(text).map_err(|source| ConfigError::Parse { path: PathBuf::new(), source })?;
        cfg.base_dir = base_dir.to_path_buf();
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.version != CONFIG_VERSION {
            return invalid(format!("unsupported config version {} (expected {CONFIG_VERSION})", self.version));
        }
        if self.workers == 0 {
            return invalid("workers must be at least 1");
        }
        if self.sample.per_language == 0 {
            return invalid("sample.per_language must be at least 1");
        }
        let mut ids = BTreeSet::new();
        for s in &self.scorers {
            if !ids.insert(&s.id) {
                return invalid(format!("scorer id `{}` appears twice", s.id));
            }
            if s.id.is_empty() || s.id.contains(['/', '\\']) {
                return invalid(format!("scorer id `{}` must be non-empty and free of path separators", s.id));
            }
            if let Some(f) = s.train_fraction {
                if !(0.0..1.0).contains(&f) {
                    return invalid(format!("scorer `{}`: train_fraction must be in [0, 1)", s.id));
                }
            }
            if s.kind == ScorerKind::Fixed && s.log2p.is_none() {
                return invalid(format!("scorer `{}`: fixed scorers need log2p", s.id));
            }
        }
        if self.tokenizer.kind == TokenizerKind::External {
            let Some(sid) = &self.tokenizer.scorer else {
                return invalid("an external tokenizer needs `tokenizer.scorer`");
            };
            if !self.scorers.iter().any(|s| &s.id == sid && s.kind == ScorerKind::External) {
                return invalid(format!("tokenizer.scorer `{sid}` is not an external scorer"));
            }
        }
        Ok(())
    }

    pub fn apply(&mut self, o: &Overrides) -> Result<(), ConfigError> {
        if let Some(s) = o.seed {
            self.seed = s;
        }
        if let Some(c) = o.ctx_size {
            self.engine.ctx_size = Some(c);
        }
        if let Some(s) = o.stride {
            self.engine.stride = Some(s);
        }
        if let Some(m) = o.clean_mode {
            self.clean_mode = m;
        }
        if let Some(w) = o.workers {
            self.workers = w;
        }
        if let Some(out) = &o.out {
            self.out_dir = out.clone();
        }
        if let Some(id) = &o.scorer {
            if !self.scorers.iter().any(|s| &s.id == id) {
                return invalid(format!("no scorer with id `{id}` in the config"));
            }
            let keep_tok = self.tokenizer.scorer.clone();
            self.scorers.retain(|s| &s.id == id || Some(&s.id) == keep_tok.as_ref());
        }
        self.validate()
    }

    /// Joins relative paths onto the config's directory.
    pub fn resolve(&self, p: &Path) -> PathBuf {
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            self.base_dir.join(p)
        }
    }

    pub fn out_dir(&self) -> PathBuf {
        self.resolve(&self.out_dir)
    }

    pub fn curate_dir(&self) -> PathBuf {
        self.out_dir().join("curate")
    }

    pub fn perplexity_dir(&self) -> PathBuf {
        self.out_dir().join("perplexity").join(self.clean_mode.to_string())
    }

    pub fn report_dir(&self) -> PathBuf {
        self.out_dir().join("report")
    }

    pub fn cache_dir(&self) -> PathBuf {
        match &self.cache_dir {
            Some(p) => self.resolve(p),
            None => self.out_dir().join("cache"),
        }
    }

    pub fn sample_csv(&self) -> PathBuf {
        match &self.sample.sample_csv {
            Some(p) => self.resolve(p),
            None => self.curate_dir().join("sample.csv"),
        }
    }

    pub fn scorer(&self, id: &str) -> Option<&ScorerConfig> {
        self.scorers.iter().find(|s| s.id == id)
    }
}
